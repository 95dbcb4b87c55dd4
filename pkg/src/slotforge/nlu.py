"""Utterance understanding: parse, score gating, word search, negation.

The pipeline per user input is: provider parse -> asked-type bias gate ->
word-search fallback (only when nothing was accepted and the asked type has
a lexicon) -> negation sign flip -> slot/assumption update.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Protocol, Sequence

from .lexicons import LexiconSet, find_phrases
from .model import (
    ConversationState,
    EntityType,
    Intent,
    ScoredValue,
    SlotValue,
    clamp_score,
)

DEFAULT_THRESHOLD = 0.7
DEFAULT_ASKED_BIAS = 0.2

# Expressions that negate the entity they precede. "n't" is matched as a raw
# substring (it is a suffix); the rest are word-bounded.
DEFAULT_NEGATIONS: tuple[str, ...] = (
    "not",
    "n't",
    "except",
    "but",
    "anything other than",
    "different from",
    "no ",
)

# Types the word-search fallback can serve: those with a phrase lexicon.
WORD_SEARCH_TYPES = (
    EntityType.GENRE,
    EntityType.AUDIENCE_AGE,
    EntityType.COUNTRY_OR_CONTINENT,
)


class ProviderError(RuntimeError):
    """Recoverable provider failure; distinct from a None-intent parse."""


@dataclass(frozen=True)
class EntityMention:
    """One extracted entity occurrence with its character span.

    start/end are Python-style half-open offsets into the original input;
    spans of distinct mentions never overlap.
    """

    entity_type: EntityType
    value: str
    raw_score: float
    start: int
    end: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.raw_score <= 1.0:
            raise ValueError("raw_score must be in [0, 1]")
        if self.start < 0 or self.end <= self.start:
            raise ValueError("invalid span")


@dataclass(frozen=True)
class ParsedUtterance:
    intent: Intent
    intent_score: float
    mentions: tuple[EntityMention, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 <= self.intent_score <= 1.0:
            raise ValueError("intent_score must be in [0, 1]")
        spans = sorted((m.start, m.end) for m in self.mentions)
        for (s1, e1), (s2, _) in zip(spans, spans[1:]):
            if s2 < e1:
                raise ValueError("mention spans overlap")


class UnderstandingProvider(Protocol):
    def parse(self, text: str) -> ParsedUtterance: ...


@dataclass(frozen=True)
class NluConfig:
    asked_bias: float = DEFAULT_ASKED_BIAS
    threshold: float = DEFAULT_THRESHOLD
    negations: tuple[str, ...] = DEFAULT_NEGATIONS

    def __post_init__(self) -> None:
        if self.asked_bias < 0:
            raise ValueError("asked_bias must be >= 0")
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must be in (0, 1]")


def parse(text: str, provider: UnderstandingProvider) -> ParsedUtterance:
    """Run the provider and normalize its output (mentions sorted by span)."""
    parsed = provider.parse(text)
    mentions = tuple(sorted(parsed.mentions, key=lambda m: m.start))
    return ParsedUtterance(parsed.intent, parsed.intent_score, mentions)


def apply_asked_type_bias(
    parsed: ParsedUtterance,
    asked: Optional[EntityType],
    bias: float = DEFAULT_ASKED_BIAS,
    threshold: float = DEFAULT_THRESHOLD,
    type_bias: Optional[Mapping[EntityType, float]] = None,
) -> dict[EntityType, list[ScoredValue]]:
    """Gate mentions at the threshold, favoring the type just asked about.

    A mention passes iff raw + bias(es) >= threshold, and the biased sum is
    what gets passed onward. type_bias carries the per-type score adjustment
    derived from skip history (zero when adaptation is off).
    """
    out: dict[EntityType, list[ScoredValue]] = {}
    for mention, total in gate_mentions(parsed.mentions, asked, bias, threshold, type_bias):
        out.setdefault(mention.entity_type, []).append(ScoredValue(mention.value, total))
    return out


def gate_mentions(
    mentions: Sequence[EntityMention],
    asked: Optional[EntityType],
    bias: float = DEFAULT_ASKED_BIAS,
    threshold: float = DEFAULT_THRESHOLD,
    type_bias: Optional[Mapping[EntityType, float]] = None,
) -> list[tuple[EntityMention, float]]:
    """(mention, biased score) pairs for mentions that clear the threshold."""
    if bias < 0:
        raise ValueError("bias must be >= 0")
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    accepted = []
    for m in mentions:
        total = m.raw_score
        if asked is not None and m.entity_type is asked:
            total += bias
        if type_bias:
            total += type_bias.get(m.entity_type, 0.0)
        if total >= threshold:
            accepted.append((m, clamp_score(total)))
    return accepted


def word_count_score(n_words: int) -> float:
    """Fallback certainty by input length: 1.0 for one word, floored at 0.4."""
    return max(0.4, 1.0 - 0.3 * (n_words - 1))


def word_search_mentions(
    text: str,
    asked: EntityType,
    lexicon: Mapping[str, SlotValue],
) -> list[tuple[EntityMention, SlotValue]]:
    """Lexicon scan for the asked type, keeping spans for negation checks."""
    score = word_count_score(len(text.split()))
    out = []
    for match in find_phrases(text, lexicon):
        mention = EntityMention(asked, match.phrase, score, match.start, match.end)
        out.append((mention, match.value))
    return out


def word_search(
    text: str,
    asked: EntityType,
    lexicon: Optional[Mapping[str, SlotValue]],
) -> list[ScoredValue]:
    """Scored lexicon hits for the asked type; empty when no lexicon exists.

    Deduplicates by mapped value (e.g. "funny comedy" maps to one genre id).
    """
    if not lexicon:
        return []
    score = word_count_score(len(text.split()))
    seen: dict[SlotValue, ScoredValue] = {}
    for _, value in word_search_mentions(text, asked, lexicon):
        seen.setdefault(value, ScoredValue(value, score))
    return list(seen.values())


def _negation_pattern(expressions: Sequence[str]) -> re.Pattern:
    parts = []
    for expr in expressions:
        if expr == "n't":
            parts.append(re.escape(expr))  # suffix, no left word boundary
        elif expr.endswith(" "):
            parts.append(rf"\b{re.escape(expr.strip())}\s")
        else:
            parts.append(rf"\b{re.escape(expr)}\b")
    return re.compile("|".join(parts), re.IGNORECASE)


def apply_negation(
    text: str,
    scored: Sequence[tuple[EntityMention, float]],
    negations: Sequence[str] = DEFAULT_NEGATIONS,
) -> list[tuple[EntityMention, float]]:
    """Flip scores negative for mentions preceded by a negation expression.

    The window checked for mention i runs from the end of mention i-1 (or
    the start of the input) up to the start of mention i. A lone "but" in
    the window does not negate when the previous mention was itself negated:
    "not French but by Spielberg" flips back to positive, while "anything
    but horror" still negates.
    """
    pattern = _negation_pattern(negations)
    but_only = re.compile(r"\bbut\b", re.IGNORECASE)
    out: list[tuple[EntityMention, float]] = []
    prev_end = 0
    prev_negated = False
    ordered = sorted(scored, key=lambda pair: pair[0].start)
    for mention, score in ordered:
        window = text[prev_end : mention.start]
        hits = pattern.findall(window)
        negated = bool(hits)
        if negated and prev_negated and all(but_only.fullmatch(h.strip()) for h in hits):
            negated = False
        out.append((mention, -abs(score) if negated else abs(score)))
        prev_end = mention.end
        prev_negated = negated
    return out


@dataclass
class UnderstandResult:
    intent: Intent
    intent_score: float
    accepted: list[tuple[EntityType, ScoredValue]] = field(default_factory=list)
    used_word_search: bool = False
    provider_failed: bool = False

    @property
    def new_value_types(self) -> set[EntityType]:
        return {t for t, _ in self.accepted}


def understand(
    text: str,
    state: ConversationState,
    provider: UnderstandingProvider,
    lexicons: LexiconSet,
    config: Optional[NluConfig] = None,
    type_bias: Optional[Mapping[EntityType, float]] = None,
) -> UnderstandResult:
    """Full pipeline: parse, gate, fall back, negate, update the state.

    Mutates state: accepted values land in their slots (latest score wins),
    extraction assumes skip=false, a refusal of the pending question assumes
    skip=true. Raises ProviderError only when the provider fails and the
    word-search fallback is not applicable.
    """
    cfg = config or NluConfig()
    asked = state.last_question

    provider_failed = False
    try:
        parsed = parse(text, provider)
    except ProviderError:
        if asked is None or lexicons.get(asked) is None:
            raise
        provider_failed = True
        parsed = ParsedUtterance(Intent.NONE, 0.0)

    scored = gate_mentions(parsed.mentions, asked, cfg.asked_bias, cfg.threshold, type_bias)
    used_ws = False
    value_of: dict[int, SlotValue] = {}  # mention id -> mapped slot value

    if not scored and asked is not None and asked in WORD_SEARCH_TYPES:
        lexicon = lexicons.get(asked)
        if lexicon:
            for mention, mapped in word_search_mentions(text, asked, lexicon):
                scored.append((mention, mention.raw_score))
                value_of[id(mention)] = mapped
            used_ws = bool(scored)

    signed = apply_negation(text, scored, cfg.negations)

    intent = parsed.intent if parsed.intent_score >= cfg.threshold else Intent.NONE
    batch_order = state.assumed_count
    accepted: list[tuple[EntityType, ScoredValue]] = []
    for mention, score in signed:
        mapped = value_of.get(id(mention))
        if mapped is None:
            mapped = _map_value(mention, lexicons)
        if mapped is None:
            continue  # e.g. a genre word with no id mapping
        sv = ScoredValue(mapped, clamp_score(score))
        state.add_value(mention.entity_type, sv.value, sv.score)
        accepted.append((mention.entity_type, sv))

    for t in {t for t, _ in accepted}:
        state.assume(t, skipped=False, order=batch_order)
    if intent is Intent.REFUSE and asked is not None:
        if asked not in state.assumptions:
            state.assume(asked, skipped=True, order=batch_order)

    return UnderstandResult(
        intent=intent,
        intent_score=parsed.intent_score if not provider_failed else 0.0,
        accepted=accepted,
        used_word_search=used_ws,
        provider_failed=provider_failed,
    )


def _map_value(mention: EntityMention, lexicons: LexiconSet) -> Optional[SlotValue]:
    """Slot value for a mention: genre ids via lexicon, strings elsewhere."""
    surface = mention.value.strip().lower()
    if not surface:
        return None
    if mention.entity_type is EntityType.GENRE:
        lex = lexicons.get(EntityType.GENRE, {})
        return lex.get(surface)
    if mention.entity_type is EntityType.AUDIENCE_AGE:
        lex = lexicons.get(EntityType.AUDIENCE_AGE, {})
        return lex.get(surface, surface)
    if mention.entity_type is EntityType.COUNTRY_OR_CONTINENT:
        lex = lexicons.get(EntityType.COUNTRY_OR_CONTINENT, {})
        return lex.get(surface, surface)
    return surface
