"""Skip-probability estimators.

Every estimator answers the same question: given the skip/order history of
past conversations and what is already known about the current one, how
likely is the user to refuse ("skip") entity type i if asked now?

Models, from simplest to richest:

* intra_type        -- per-type skip frequency, optionally padded with a prior.
* nn_estimate       -- skip rate among the past conversations closest to the
                       current one (Hamming distance over assumed types).
* weighted_nn_estimate -- all conversations, weighted by exp(-alpha * distance).
* order_nn_estimate -- same, with assumption-order terms in the distance.
* classifier_estimate -- enumerates the possible orders of the not-yet-assumed
                       types, weights them by plausibility, and mixes
                       per-order estimates.

All functions are pure; history is a sequence of ConversationRecord, newest
first, and assumptions map EntityType -> AssumptionRecord for the current
conversation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import AbstractSet, Iterable, Mapping, Optional, Sequence

from .model import (
    ENTITY_TYPES,
    AssumptionRecord,
    ConversationRecord,
    EntityType,
    EstimatorConfig,
)

Assumptions = Mapping[EntityType, AssumptionRecord]

DEFAULT_INITIAL_BIAS = 0.5


class EstimatorModel(Enum):
    INTRA_TYPE = "intra_type"
    NN = "nn"
    WEIGHTED_NN = "weighted_nn"
    ORDER_NN = "order_nn"
    ORDER_ASKED_NN = "order_asked_nn"
    ORDER_CLASSIFIER = "order_classifier"
    VALUE_AWARE = "value_aware"


@dataclass(frozen=True)
class SkipEstimate:
    p_hat: float
    model: EstimatorModel

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_hat <= 1.0:
            raise ValueError(f"p_hat out of [0,1]: {self.p_hat}")


@dataclass(frozen=True)
class HistoryView:
    """Immutable newest-first snapshot of past conversation records."""

    records: tuple[ConversationRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, idx):
        return self.records[idx]


class EmptyHistoryError(ValueError):
    """Raised by neighbor estimators when there is no history to compare."""


def intra_type(
    skips: Sequence[bool],
    k: int,
    initial_bias: Optional[float] = None,
) -> SkipEstimate:
    """Per-type skip frequency over the recorded window.

    With initial_bias given, an underfilled window is padded with the prior:
    (#skips + bias * (k - #recorded)) / k. Without it the plain ratio is
    used; an empty window then falls back to the 0.5 prior.
    """
    n = len(skips)
    s = sum(1 for x in skips if x)
    if initial_bias is not None and n < k:
        p = (s + initial_bias * (k - n)) / k
    elif n == 0:
        p = initial_bias if initial_bias is not None else DEFAULT_INITIAL_BIAS
    else:
        p = s / n
    return SkipEstimate(p, EstimatorModel.INTRA_TYPE)


def hamming_distance(record: ConversationRecord, assumptions: Assumptions) -> int:
    """Number of assumed types whose skip flag differs from the record's."""
    return sum(
        1 for t, a in assumptions.items() if record.skip_of(t) != a.skipped
    )


def nn_estimate(
    i: EntityType,
    history: Sequence[ConversationRecord],
    assumptions: Assumptions,
) -> SkipEstimate:
    """Skip rate of type i among the minimum-distance past conversations."""
    _check_target(i, assumptions)
    if not history:
        raise EmptyHistoryError("nn_estimate needs at least one record")
    distances = [hamming_distance(r, assumptions) for r in history]
    best = min(distances)
    nearest = [r for r, d in zip(history, distances) if d == best]
    p = sum(1 for r in nearest if r.skip_of(i)) / len(nearest)
    return SkipEstimate(p, EstimatorModel.NN)


def weighted_nn_estimate(
    i: EntityType,
    history: Sequence[ConversationRecord],
    assumptions: Assumptions,
    weight_alpha: float,
) -> SkipEstimate:
    """Distance-weighted skip rate: weight(j) = exp(-alpha * distance(j)).

    Large alpha approaches nn_estimate; alpha near zero approaches the plain
    intra-type frequency of column i.
    """
    _check_target(i, assumptions)
    if weight_alpha <= 0:
        raise ValueError("weight_alpha must be > 0")
    if not history:
        raise EmptyHistoryError("weighted_nn_estimate needs at least one record")
    weights = [math.exp(-weight_alpha * hamming_distance(r, assumptions)) for r in history]
    num = math.fsum(w for r, w in zip(history, weights) if r.skip_of(i))
    den = math.fsum(weights)
    return SkipEstimate(num / den, EstimatorModel.WEIGHTED_NN)


def order_distance(
    record: ConversationRecord,
    assumptions: Assumptions,
    beta: float,
    *,
    gamma: Optional[float] = None,
    asked_type: Optional[EntityType] = None,
    asked_order: Optional[int] = None,
) -> float:
    """Skip-Hamming distance plus order-difference penalties.

    Base form: hamming + beta * sum(|order_j - order_now|) over assumed types.
    When the bot just asked about a type, pass gamma/asked_type/asked_order
    (asked_order is the order that type would take now, i.e. the number of
    assumed types): the distance gains gamma * |record order of asked_type -
    asked_order|.
    """
    if beta <= 0:
        raise ValueError("beta must be > 0")
    asked_args = (gamma, asked_type, asked_order)
    if any(a is not None for a in asked_args) and any(a is None for a in asked_args):
        raise ValueError("gamma, asked_type and asked_order must be given together")
    d = float(hamming_distance(record, assumptions))
    d += beta * sum(
        abs(record.order_of(t) - a.order) for t, a in assumptions.items()
    )
    if gamma is not None:
        d += gamma * abs(record.order_of(asked_type) - asked_order)
    return d


def order_nn_estimate(
    i: EntityType,
    history: Sequence[ConversationRecord],
    assumptions: Assumptions,
    config: EstimatorConfig,
    asked: bool = False,
) -> SkipEstimate:
    """weighted_nn_estimate with the order-aware distance.

    With asked=True the distance also penalizes records in which type i was
    assumed at a different point than it would be now.
    """
    _check_target(i, assumptions)
    if not history:
        raise EmptyHistoryError("order_nn_estimate needs at least one record")
    kwargs: dict = {}
    if asked:
        kwargs = dict(gamma=config.gamma, asked_type=i, asked_order=len(assumptions))
    weights = [
        math.exp(-config.weight_alpha * order_distance(r, assumptions, config.beta, **kwargs))
        for r in history
    ]
    num = math.fsum(w for r, w in zip(history, weights) if r.skip_of(i))
    den = math.fsum(weights)
    model = EstimatorModel.ORDER_ASKED_NN if asked else EstimatorModel.ORDER_NN
    return SkipEstimate(num / den, model)


def orders_set(m: int, assumed_count: int) -> set[tuple[int, ...]]:
    """All order vectors the m not-yet-assumed types can still take.

    Simulates every possible sequence of future inputs, each assuming a
    non-empty subset of the remaining types; simultaneous assumptions share
    an order value. Every entry is offset by assumed_count, the number of
    types already assumed. Cardinality is the ordered-Bell number of m.
    """
    if m < 0 or assumed_count < 0:
        raise ValueError("m and assumed_count must be >= 0")
    if m == 0:
        return {()}
    complete: set[tuple[int, ...]] = set()
    frontier: set[tuple[int, ...]] = {(-1,) * m}
    while frontier:
        grown: set[tuple[int, ...]] = set()
        for vec in frontier:
            placed = sum(1 for v in vec if v != -1)
            free = [k for k, v in enumerate(vec) if v == -1]
            for r in range(1, len(free) + 1):
                for subset in itertools.combinations(free, r):
                    new = list(vec)
                    for k in subset:
                        new[k] = placed
                    if -1 in new:
                        grown.add(tuple(new))
                    else:
                        complete.add(tuple(assumed_count + v for v in new))
        frontier = grown
    return complete


def _unassumed_types(assumptions: Assumptions) -> list[EntityType]:
    return [t for t in ENTITY_TYPES if t not in assumptions]


def _candidate_distance(
    record: ConversationRecord,
    assumptions: Assumptions,
    candidate: Mapping[EntityType, int],
    beta: float,
) -> float:
    """Distance between a record and the current conversation with full orders.

    Uses actual orders for assumed types and the candidate's hypothetical
    orders for the rest, summed over all types.
    """
    d = float(hamming_distance(record, assumptions))
    total = 0
    for t in ENTITY_TYPES:
        a = assumptions.get(t)
        o_now = a.order if a is not None else candidate[t]
        total += abs(record.order_of(t) - o_now)
    return d + beta * total


def estimated_orders_weights(
    order_set: Iterable[tuple[int, ...]],
    i: EntityType,
    history: Sequence[ConversationRecord],
    assumptions: Assumptions,
    beta: float,
    delta: float,
) -> dict[tuple[int, ...], float]:
    """Normalized plausibility weight for each candidate order vector.

    Candidate vectors list orders for the not-yet-assumed types in enum
    order. weight(k) = sum_j exp(-delta * D(j, k)), normalized to sum to 1.
    With no history all candidates are equally plausible.
    """
    if delta <= 0:
        raise ValueError("delta must be > 0")
    candidates = list(order_set)
    if not candidates:
        raise ValueError("order_set must be non-empty")
    _check_target(i, assumptions)
    free = _unassumed_types(assumptions)
    if any(len(c) != len(free) for c in candidates):
        raise ValueError("candidate length must match the unassumed type count")
    if not history:
        u = 1.0 / len(candidates)
        return {c: u for c in candidates}
    raw: dict[tuple[int, ...], float] = {}
    for cand in candidates:
        mapping = dict(zip(free, cand))
        raw[cand] = math.fsum(
            math.exp(-delta * _candidate_distance(r, assumptions, mapping, beta))
            for r in history
        )
    total = math.fsum(raw.values())
    return {c: w / total for c, w in raw.items()}


def classifier_estimate(
    i: EntityType,
    history: Sequence[ConversationRecord],
    assumptions: Assumptions,
    config: EstimatorConfig,
    top_only: bool = False,
) -> SkipEstimate:
    """Mixture of order-aware estimates over all possible order completions.

    For each candidate order vector of the not-yet-assumed types, computes a
    distance-weighted skip rate for type i with those orders imputed, then
    averages the per-candidate estimates by the candidate weights. With
    top_only, only the highest-weight candidates (ties within 1e-12) are
    averaged, unweighted.
    """
    _check_target(i, assumptions)
    if not history:
        raise EmptyHistoryError("classifier_estimate needs at least one record")
    free = _unassumed_types(assumptions)
    candidates = sorted(orders_set(len(free), len(assumptions)))
    weights = estimated_orders_weights(candidates, i, history, assumptions, config.beta, config.delta)

    per_candidate: dict[tuple[int, ...], float] = {}
    for cand in candidates:
        mapping = dict(zip(free, cand))
        w = [
            math.exp(-config.weight_alpha * _candidate_distance(r, assumptions, mapping, config.beta))
            for r in history
        ]
        num = math.fsum(x for r, x in zip(history, w) if r.skip_of(i))
        per_candidate[cand] = num / math.fsum(w)

    if top_only:
        best = max(weights.values())
        chosen = [c for c in candidates if weights[c] >= best - 1e-12]
        p = math.fsum(per_candidate[c] for c in chosen) / len(chosen)
    else:
        p = math.fsum(weights[c] * per_candidate[c] for c in candidates)
    # guard against float drift just outside [0, 1]
    p = min(1.0, max(0.0, p))
    return SkipEstimate(p, EstimatorModel.ORDER_CLASSIFIER)


def value_binary_distance(values_a: AbstractSet, values_b: AbstractSet) -> float:
    """Jaccard distance between two extracted-value sets.

    0 means identical sets, 1 means disjoint; two empty sets count as
    identical.
    """
    if not values_a and not values_b:
        return 0.0
    union = len(values_a | values_b)
    inter = len(values_a & values_b)
    return 1.0 - inter / union


def value_aware_estimate(
    i: EntityType,
    history: Sequence[ConversationRecord],
    assumptions: Assumptions,
    config: EstimatorConfig,
    record_values: Sequence[Mapping[EntityType, frozenset]],
    current_values: Mapping[EntityType, frozenset],
) -> SkipEstimate:
    """weighted_nn_estimate with a value-overlap term added to the distance.

    record_values must align with history (newest first). The extra term is
    config.value_coeff * sum of per-assumed-type Jaccard distances; with
    value_coeff = 0 this degenerates to weighted_nn_estimate. Value history
    lives only in process; it is never persisted or shared.
    """
    _check_target(i, assumptions)
    if not history:
        raise EmptyHistoryError("value_aware_estimate needs at least one record")
    if len(record_values) != len(history):
        raise ValueError("record_values must align with history")
    weights = []
    for r, vals in zip(history, record_values):
        d = float(hamming_distance(r, assumptions))
        d += config.value_coeff * sum(
            value_binary_distance(vals.get(t, frozenset()), current_values.get(t, frozenset()))
            for t in assumptions
        )
        weights.append(math.exp(-config.weight_alpha * d))
    num = math.fsum(w for r, w in zip(history, weights) if r.skip_of(i))
    return SkipEstimate(num / math.fsum(weights), EstimatorModel.VALUE_AWARE)


def probability_to_bias(p_hat: float, bias_alpha: float, cubed: bool = False) -> float:
    """Certainty-score bias derived from a skip probability.

    b = -alpha * (p - 0.5), or the cubed variant for a flatter center. The
    bias is 0 at p = 0.5 and strictly decreasing in p, so types the user
    tends to skip get their extraction scores damped.
    """
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError("p_hat must be in [0, 1]")
    if bias_alpha <= 0:
        raise ValueError("bias_alpha must be > 0")
    centered = p_hat - 0.5
    if cubed:
        return -bias_alpha * centered**3
    return -bias_alpha * centered


def estimate_skip(
    i: EntityType,
    history: Sequence[ConversationRecord],
    assumptions: Assumptions,
    config: EstimatorConfig,
    model: EstimatorModel,
    asked: bool = False,
    top_only: bool = False,
) -> SkipEstimate:
    """Dispatch to the configured estimator with the cold-start fallback.

    Neighbor-based models fall back to the padded intra-type prior when the
    history is empty. The value-aware model needs value history and must be
    called directly.
    """
    if model is EstimatorModel.INTRA_TYPE or not history:
        column = [r.skip_of(i) for r in history]
        est = intra_type(column, config.k, config.initial_bias)
        return est
    if model is EstimatorModel.NN:
        return nn_estimate(i, history, assumptions)
    if model is EstimatorModel.WEIGHTED_NN:
        return weighted_nn_estimate(i, history, assumptions, config.weight_alpha)
    if model is EstimatorModel.ORDER_NN:
        return order_nn_estimate(i, history, assumptions, config, asked=False)
    if model is EstimatorModel.ORDER_ASKED_NN:
        return order_nn_estimate(i, history, assumptions, config, asked=asked)
    if model is EstimatorModel.ORDER_CLASSIFIER:
        return classifier_estimate(i, history, assumptions, config, top_only=top_only)
    raise ValueError(f"model {model} cannot be dispatched here")


def _check_target(i: EntityType, assumptions: Assumptions) -> None:
    if i in assumptions:
        raise ValueError(f"{i} is already assumed; nothing to estimate")
