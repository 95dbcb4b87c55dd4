"""Shared domain types: entity slots, conversation state, history records."""

from __future__ import annotations

import datetime as dt
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Deque, Optional, Union

SCORE_CAP = 1.5  # raw provider score (<=1.0) plus the largest bias we allow


class EntityType(Enum):
    """The six query criteria the bot can extract, in stable index order."""

    AUDIENCE_AGE = 1
    GENRE = 2
    KEYWORD = 3
    COUNTRY_OR_CONTINENT = 4
    PERSON = 5
    RELEASE_YEAR = 6

    @property
    def key(self) -> str:
        """Lowercase wire/JSON name, e.g. ``"audience_age"``."""
        return self.name.lower()

    @property
    def pos(self) -> int:
        """Zero-based position for array-shaped per-type data."""
        return self.value - 1

    @classmethod
    def from_key(cls, key: str) -> "EntityType":
        try:
            return cls[key.upper()]
        except KeyError:
            raise ValueError(f"unknown entity type {key!r}") from None


ENTITY_TYPES: tuple[EntityType, ...] = tuple(EntityType)
N_TYPES = len(ENTITY_TYPES)


class Intent(Enum):
    SPECIFY = "specify"
    REFUSE = "refuse"
    NONE = "none"


SlotValue = Union[str, int]  # genre ids are ints, everything else strings


@dataclass(frozen=True)
class ScoredValue:
    """An extracted value with a signed certainty score.

    The sign encodes negation ("not horror"); the magnitude is the certainty
    after biases, capped at SCORE_CAP so adaptive feedback stays bounded.
    """

    value: SlotValue
    score: float

    def __post_init__(self) -> None:
        if self.score == 0:
            raise ValueError("score must be non-zero")
        if abs(self.score) > SCORE_CAP:
            raise ValueError(f"|score| must be <= {SCORE_CAP}, got {self.score}")

    @property
    def negated(self) -> bool:
        return self.score < 0


def clamp_score(score: float) -> float:
    """Clamp a signed score into [-SCORE_CAP, SCORE_CAP]."""
    return max(-SCORE_CAP, min(SCORE_CAP, score))


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning knobs for the skip-probability estimators.

    k is the history window; initial_bias is the prior skip rate used to pad
    an underfilled window. bias_alpha scales the probability-to-score bias
    (cubed variant optional). weight_alpha, beta, gamma and delta are the
    decay/penalty factors of the distance-weighted estimators. value_coeff
    adds the value-overlap term to distances when value history is supplied
    (0 disables it).
    """

    k: int = 10
    bias_alpha: float = 0.4
    weight_alpha: float = 1.0
    beta: float = 0.5
    gamma: float = 0.5
    delta: float = 1.0
    initial_bias: float = 0.5
    bias_cubed: bool = False
    value_coeff: float = 0.0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for name in ("weight_alpha", "beta", "gamma", "delta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 <= self.initial_bias <= 1.0:
            raise ValueError("initial_bias must be in [0, 1]")
        if self.value_coeff < 0:
            raise ValueError("value_coeff must be >= 0")


@dataclass(frozen=True)
class AssumptionRecord:
    """Skip status assumed for a type within the current conversation.

    order counts the entity types assumed strictly before this one; types
    assumed by the same utterance share the same order value.
    """

    skipped: bool
    order: int

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValueError("order must be >= 0")


@dataclass
class SpecificationSlot:
    """Per-type extraction state plus bounded skip/order history queues."""

    entity_type: EntityType
    capacity: int
    values: dict[SlotValue, float] = field(default_factory=dict)
    skip_history: Deque[bool] = field(init=False)
    order_history: Deque[int] = field(init=False)

    def __post_init__(self) -> None:
        self.skip_history = deque(maxlen=self.capacity)
        self.order_history = deque(maxlen=self.capacity)

    def add_value(self, value: SlotValue, score: float) -> None:
        """Record an extracted value; re-extraction overwrites the score."""
        self.values[value] = clamp_score(score)

    def push_history(self, skipped: bool, order: int) -> None:
        self.skip_history.append(skipped)
        self.order_history.append(order)

    def scored_values(self) -> list[ScoredValue]:
        return [ScoredValue(v, s) for v, s in self.values.items()]


@dataclass(frozen=True)
class ConversationRecord:
    """Finished-conversation metadata: one skip flag and order per type.

    Index 0 of skips/orders corresponds to EntityType.AUDIENCE_AGE and so on
    in enum order. Entity values are deliberately absent; only skip and order
    information is ever shared across users.
    """

    skips: tuple[bool, ...]
    orders: tuple[int, ...]
    timestamp: dt.datetime
    user_id: Optional[str] = None

    def __post_init__(self) -> None:
        if len(self.skips) != N_TYPES or len(self.orders) != N_TYPES:
            raise ValueError(f"skips/orders must have length {N_TYPES}")
        if any(o < 0 or o >= N_TYPES for o in self.orders):
            raise ValueError("orders out of range")

    def skip_of(self, t: EntityType) -> bool:
        return self.skips[t.pos]

    def order_of(self, t: EntityType) -> int:
        return self.orders[t.pos]


@dataclass
class ConversationState:
    """Live conversation context: six slots, last question, assumptions.

    Single-owner mutable; the slot history queues persist across
    conversations of the same user via push_record().
    """

    config: EstimatorConfig
    slots: dict[EntityType, SpecificationSlot] = field(init=False)
    last_question: Optional[EntityType] = None
    assumptions: dict[EntityType, AssumptionRecord] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.slots = {t: SpecificationSlot(t, self.config.k) for t in ENTITY_TYPES}

    def slot(self, t: EntityType) -> SpecificationSlot:
        return self.slots[t]

    @property
    def assumed_count(self) -> int:
        return len(self.assumptions)

    def assume(self, t: EntityType, skipped: bool, order: int) -> None:
        """Create or update an assumption; the first assumption wins the order."""
        existing = self.assumptions.get(t)
        if existing is None:
            self.assumptions[t] = AssumptionRecord(skipped=skipped, order=order)
        elif existing.skipped != skipped:
            self.assumptions[t] = replace(existing, skipped=skipped)

    def add_value(self, t: EntityType, value: SlotValue, score: float) -> None:
        self.slots[t].add_value(value, score)

    def push_record(self, record: ConversationRecord) -> None:
        """Append a finished conversation to every slot's history queues."""
        for t in ENTITY_TYPES:
            self.slots[t].push_history(record.skip_of(t), record.order_of(t))

    def history_records(self, user_id: Optional[str] = None) -> list[ConversationRecord]:
        """Reconstruct the queue contents as records, newest first.

        All queues are pushed in lockstep, so position j is consistent across
        types. Timestamps are not retained by the queues; a neutral epoch is
        used.
        """
        lengths = {len(self.slots[t].skip_history) for t in ENTITY_TYPES}
        if len(lengths) != 1:
            raise ValueError("slot history queues are out of sync")
        n = lengths.pop()
        epoch = dt.datetime(1970, 1, 1, tzinfo=dt.timezone.utc)
        records = []
        for j in range(n):
            skips = tuple(self.slots[t].skip_history[j] for t in ENTITY_TYPES)
            orders = tuple(self.slots[t].order_history[j] for t in ENTITY_TYPES)
            records.append(ConversationRecord(skips, orders, epoch, user_id))
        records.reverse()
        return records

    def reset_conversation(self) -> None:
        """Clear per-conversation data, keeping the history queues."""
        for slot in self.slots.values():
            slot.values.clear()
        self.assumptions.clear()
        self.last_question = None


def new_conversation(config: Optional[EstimatorConfig] = None) -> ConversationState:
    """Fresh state: six empty slots, no question pending, no assumptions."""
    return ConversationState(config=config or EstimatorConfig())


def finalize_conversation(
    state: ConversationState,
    *,
    timestamp: Optional[dt.datetime] = None,
    user_id: Optional[str] = None,
) -> ConversationRecord:
    """Project an ended conversation onto its (skips, orders) record.

    A type is recorded skipped iff it ended with no extracted values. Types
    never assumed share the terminal order (the count of assumed types),
    consistent with order-as-count-of-predecessors.
    """
    terminal = state.assumed_count
    skips = []
    orders = []
    for t in ENTITY_TYPES:
        skips.append(not state.slots[t].values)
        rec = state.assumptions.get(t)
        orders.append(rec.order if rec is not None else terminal)
    ts = timestamp or dt.datetime.now(dt.timezone.utc)
    return ConversationRecord(tuple(skips), tuple(orders), ts, user_id)
