"""The turn loop: understand the input, pick the next question, show results.

Question policy: ask for the unassumed type with the lowest estimated skip
probability. When every remaining type is likely to be refused (all
estimates above the sufficiency threshold), stop asking and present
results instead.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .estimators import (
    EstimatorModel,
    estimate_skip,
    intra_type,
    probability_to_bias,
)
from .history import HistoryStore, HistoryWriteError
from .lexicons import LexiconSet
from .model import (
    ENTITY_TYPES,
    ConversationRecord,
    ConversationState,
    EntityType,
    EstimatorConfig,
    Intent,
    finalize_conversation,
    new_conversation,
)
from .moviedb import MovieDoc, MovieStore, build_query, execute
from .nlu import NluConfig, ProviderError, UnderstandingProvider, understand

logger = logging.getLogger(__name__)

QUESTION_TEMPLATES: dict[EntityType, str] = {
    EntityType.GENRE: "What genre of movies would you like?",
    EntityType.PERSON: "Any preferred director or actor?",
    EntityType.RELEASE_YEAR: "From what year or era should the movie be?",
    EntityType.AUDIENCE_AGE: "Who is it for: kids, teens or adults?",
    EntityType.COUNTRY_OR_CONTINENT: "Movies from a particular country or continent?",
    EntityType.KEYWORD: "Any topic or keyword it should be about?",
}

GREETING = "Hi! I can help you find a movie. Tell me anything about what you want to watch."
APOLOGY = "Sorry, I had trouble understanding that. "
FAREWELL_TEXT = "Great, enjoy the movie! Come back any time."


def render_question(t: EntityType) -> str:
    return QUESTION_TEMPLATES[t]


class TurnKind(Enum):
    ASK = "ask"
    RESULTS = "results"
    FAREWELL = "farewell"


@dataclass(frozen=True)
class BotTurn:
    kind: TurnKind
    utterance: str
    entity_type: Optional[EntityType] = None
    results: tuple[MovieDoc, ...] = ()
    estimates: dict[EntityType, float] = field(default_factory=dict)


@dataclass(frozen=True)
class DialogConfig:
    sufficiency_threshold: float = 0.75
    model: EstimatorModel = EstimatorModel.WEIGHTED_NN
    min_questions: int = 1
    reask_limit: int = 2
    result_limit: int = 5
    adaptive_score_bias: bool = False
    use_global_history: bool = False
    cache_max_age_seconds: float = 600.0
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    nlu: NluConfig = field(default_factory=NluConfig)

    def __post_init__(self) -> None:
        if not 0.0 < self.sufficiency_threshold < 1.0:
            raise ValueError("sufficiency_threshold must be in (0, 1)")
        if self.min_questions < 0 or self.reask_limit < 0:
            raise ValueError("min_questions and reask_limit must be >= 0")


@dataclass
class BotDeps:
    """Everything a session needs besides its own state."""

    provider: UnderstandingProvider
    lexicons: LexiconSet
    store: MovieStore
    history: Optional[HistoryStore] = None


class Phase(Enum):
    ACTIVE = "active"
    RESULTS_SHOWN = "results_shown"
    ENDED = "ended"


class DialogSession:
    """One user's conversation loop; call step() once per user utterance.

    Not thread-safe: callers serialize step() per session. The slot history
    queues survive conversation resets, so estimates adapt across the
    user's successive conversations.
    """

    def __init__(
        self,
        deps: BotDeps,
        config: Optional[DialogConfig] = None,
        user_id: Optional[str] = None,
    ) -> None:
        self.deps = deps
        self.config = config or DialogConfig()
        self.user_id = user_id
        self.state: ConversationState = new_conversation(self.config.estimator)
        self.phase = Phase.ACTIVE
        self.ask_counts: Counter[EntityType] = Counter()
        self.questions_asked = 0
        self.last_record: Optional[ConversationRecord] = None
        self.conversations_completed = 0

    # public ----------------------------------------------------------------

    def greeting(self) -> str:
        return GREETING

    def step(self, text: str) -> BotTurn:
        if self.phase is Phase.ENDED:
            self._begin_new_conversation()

        type_bias = self._adaptive_bias() if self.config.adaptive_score_bias else None
        try:
            result = understand(
                text,
                self.state,
                self.deps.provider,
                self.deps.lexicons,
                self.config.nlu,
                type_bias=type_bias,
            )
        except ProviderError:
            return self._apology_turn()
        if result.provider_failed and not result.accepted:
            return self._apology_turn()

        if self.phase is Phase.RESULTS_SHOWN:
            if result.accepted:
                self.phase = Phase.ACTIVE  # user kept specifying; refine
            else:
                return self._farewell_turn()

        # "done specifying" with no question on the table: show what we have
        if (
            result.intent is Intent.REFUSE
            and self.state.last_question is None
            and self.questions_asked >= self.config.min_questions
        ):
            return self._results_turn(self._estimates())

        self._force_skip_if_exhausted()
        estimates = self._estimates()
        return self._choose(estimates)

    # internals ---------------------------------------------------------------

    def _choose(self, estimates: dict[EntityType, float]) -> BotTurn:
        unassumed = [t for t in ENTITY_TYPES if t not in self.state.assumptions]
        if not unassumed:
            return self._results_turn(estimates)
        if self.questions_asked >= self.config.min_questions and all(
            estimates[t] > self.config.sufficiency_threshold for t in unassumed
        ):
            return self._results_turn(estimates)
        target = min(unassumed, key=lambda t: (estimates[t], t.value))
        self.state.last_question = target
        self.ask_counts[target] += 1
        self.questions_asked += 1
        return BotTurn(
            TurnKind.ASK,
            render_question(target),
            entity_type=target,
            estimates=estimates,
        )

    def _estimates(self) -> dict[EntityType, float]:
        cfg = self.config
        history = self.state.history_records(self.user_id)
        out: dict[EntityType, float] = {}
        for t in ENTITY_TYPES:
            if t in self.state.assumptions:
                continue
            if cfg.use_global_history and self.deps.history is not None:
                est = self.deps.history.estimate_with_cache(
                    t, self.state.assumptions, cfg.model, cfg.estimator, cfg.cache_max_age_seconds
                )
            else:
                est = estimate_skip(
                    t,
                    history,
                    self.state.assumptions,
                    cfg.estimator,
                    cfg.model,
                    asked=t is self.state.last_question,
                )
            out[t] = est.p_hat
        return out

    def _adaptive_bias(self) -> dict[EntityType, float]:
        cfg = self.config.estimator
        biases = {}
        for t in ENTITY_TYPES:
            slot = self.state.slot(t)
            p = intra_type(list(slot.skip_history), cfg.k, cfg.initial_bias).p_hat
            biases[t] = probability_to_bias(p, cfg.bias_alpha, cfg.bias_cubed)
        return biases

    def _force_skip_if_exhausted(self) -> None:
        lq = self.state.last_question
        if lq is None or lq in self.state.assumptions:
            return
        if self.ask_counts[lq] >= self.config.reask_limit + 1:
            # asked, re-asked R times, still nothing: treat as a refusal
            self.state.assume(lq, skipped=True, order=self.state.assumed_count)

    def _apology_turn(self) -> BotTurn:
        unassumed = [t for t in ENTITY_TYPES if t not in self.state.assumptions]
        if self.phase is Phase.RESULTS_SHOWN or not unassumed:
            # nothing left to ask about: re-present the results instead
            turn = self._results_turn(self._estimates())
            return BotTurn(
                TurnKind.RESULTS,
                APOLOGY + turn.utterance,
                results=turn.results,
                estimates=turn.estimates,
            )
        target = self.state.last_question
        if target is None or target not in unassumed:
            target = unassumed[0]
            self.state.last_question = target
        self.ask_counts[target] += 1
        self.questions_asked += 1
        self._force_skip_if_exhausted()
        return BotTurn(
            TurnKind.ASK,
            APOLOGY + render_question(target),
            entity_type=target,
            estimates={},
        )

    def _results_turn(self, estimates: dict[EntityType, float]) -> BotTurn:
        query = build_query(self.state, self.config.result_limit)
        results = tuple(execute(query, self.deps.store))
        self.phase = Phase.RESULTS_SHOWN
        self.state.last_question = None
        if results:
            lines = [
                f"{i}. {m.title} ({m.release_year}) - rated {m.quality_rating:.1f}"
                for i, m in enumerate(results, start=1)
            ]
            text = "Here is what I found:\n" + "\n".join(lines) + "\nHappy with these, or want to refine?"
        else:
            text = "I could not find a match. Want to loosen some criteria?"
        return BotTurn(TurnKind.RESULTS, text, results=results, estimates=estimates)

    def _farewell_turn(self) -> BotTurn:
        self._finalize()
        self.phase = Phase.ENDED
        return BotTurn(TurnKind.FAREWELL, FAREWELL_TEXT, estimates={})

    def _finalize(self) -> ConversationRecord:
        record = finalize_conversation(self.state, user_id=self.user_id)
        self.last_record = record
        self.conversations_completed += 1
        if self.deps.history is not None:
            try:
                self.deps.history.record(record)
            except HistoryWriteError as exc:
                logger.warning("history write failed, continuing: %s", exc)
        self.state.push_record(record)
        return record

    def _begin_new_conversation(self) -> None:
        self.state.reset_conversation()
        self.phase = Phase.ACTIVE
        self.ask_counts.clear()
        self.questions_asked = 0
