"""Understanding providers: a built-in rule engine and a remote HTTP client.

Both produce the same ParsedUtterance shape consumed by nlu.understand, so
they are interchangeable behind the provider setting.
"""

from __future__ import annotations

import re
from typing import Iterable, Optional

import httpx

from .lexicons import LexiconSet, default_lexicons, find_phrases
from .model import EntityType, Intent
from .nlu import EntityMention, ParsedUtterance, ProviderError

# Words that must never be read as a person name on their own.
_STOPWORDS = frozenset(
    """hey hi hello hiya yo thanks thank ok okay yes yeah yep no nope nah
    please sure fine great cool quit exit bye goodbye stop skip pass maybe
    hmm well right alright anything something whatever nothing movie movies
    film films show the and for with from""".split()
)

_STRONG_REFUSAL = re.compile(
    r"doesn'?t matter|does not matter|don'?t care|do not care|no preference"
    r"|\bskip\b|\bpass\b|\bwhatever\b|any(thing)? is fine|anything goes"
    r"|no thanks|not important|don'?t know|don'?t mind|\bdunno\b"
    r"|that'?s all|that is all|nothing else|no more|i'?m good|surprise me",
    re.IGNORECASE,
)
_BARE_NO = re.compile(r"^\W*(no|nope|nah)\W*$", re.IGNORECASE)
_REQUEST_VERB = re.compile(
    r"\b(want|give|show|find|search|look(ing)?|recommend|suggest|need|get|play|fetch|bring)\b",
    re.IGNORECASE,
)

_NAME_TOKEN = r"[A-Z][a-z'\-]+"
_PERSON_INTRO = re.compile(
    rf"\b(?:by|from|starring|with|featuring|of|like|directed by)\s+({_NAME_TOKEN}(?:\s+{_NAME_TOKEN}){{0,3}})"
)
_BARE_NAME = re.compile(rf"^({_NAME_TOKEN}(?:\s+{_NAME_TOKEN}){{1,3}})$")
_SINGLE_NAME = re.compile(r"^([A-Z][a-z'\-]{3,})$")

_YEAR_RANGE = re.compile(r"\b(after|since|before|until)\s+((?:19|20)\d{2})\b", re.IGNORECASE)
_YEAR_DECADE = re.compile(r"\b((?:19|20)\d)0s\b")
_YEAR_SHORT_DECADE = re.compile(r"\b(\d)0s\b")
_YEAR_EXACT = re.compile(r"\b((?:19|20)\d{2})\b")

_KEYWORD = re.compile(r"\babout\s+([a-z]+(?:\s+[a-z]+){0,2})", re.IGNORECASE)
_KEYWORD_TRIM = frozenset("movie movies film films please stuff things one ones".split())

# Lower number wins when two candidate mentions cover the same span.
_PRIORITY_LEXICON = 1
_PRIORITY_PATTERN = 2
_PRIORITY_NAME = 3
_PRIORITY_SINGLE_NAME = 4


class BuiltinProvider:
    """Rule-based parser: lexicon scans plus a handful of regex patterns.

    known_people (full names, any case) enables gazetteer person matching in
    addition to the capitalized-name heuristics; wire it from the movie
    store so the bot recognizes names it can actually query.
    """

    def __init__(
        self,
        lexicons: Optional[LexiconSet] = None,
        known_people: Optional[Iterable[str]] = None,
    ) -> None:
        self.lexicons = lexicons if lexicons is not None else default_lexicons()
        names = sorted({n.strip().lower() for n in known_people or () if n.strip()}, key=len, reverse=True)
        self._gazetteer = (
            re.compile(r"\b(?:" + "|".join(re.escape(n) for n in names) + r")\b", re.IGNORECASE)
            if names
            else None
        )

    def parse(self, text: str) -> ParsedUtterance:
        candidates = self._candidates(text)
        mentions = _resolve_overlaps(candidates)
        intent, score = self._classify(text, mentions)
        return ParsedUtterance(intent, score, tuple(mentions))

    # candidate collection -------------------------------------------------

    def _candidates(self, text: str) -> list[tuple[int, EntityMention]]:
        out: list[tuple[int, EntityMention]] = []
        score_by_type = {
            EntityType.GENRE: 0.9,
            EntityType.AUDIENCE_AGE: 0.8,
            EntityType.COUNTRY_OR_CONTINENT: 0.8,
        }
        for etype, raw in score_by_type.items():
            lexicon = self.lexicons.get(etype)
            if not lexicon:
                continue
            for m in find_phrases(text, lexicon):
                out.append(
                    (_PRIORITY_LEXICON, EntityMention(etype, m.phrase, raw, m.start, m.end))
                )
        out.extend(self._year_candidates(text))
        out.extend(self._person_candidates(text))
        out.extend(self._keyword_candidates(text))
        return out

    def _year_candidates(self, text: str) -> list[tuple[int, EntityMention]]:
        out = []
        for m in _YEAR_RANGE.finditer(text):
            word = "after" if m.group(1).lower() in ("after", "since") else "before"
            value = f"{word} {m.group(2)}"
            out.append(
                (_PRIORITY_LEXICON, EntityMention(EntityType.RELEASE_YEAR, value, 0.85, m.start(), m.end()))
            )
        for m in _YEAR_DECADE.finditer(text):
            out.append(
                (_PRIORITY_LEXICON, EntityMention(EntityType.RELEASE_YEAR, f"{m.group(1)}0s", 0.85, m.start(), m.end()))
            )
        for m in _YEAR_SHORT_DECADE.finditer(text):
            decade = int(m.group(1))
            century = "19" if decade >= 3 else "20"
            out.append(
                (_PRIORITY_PATTERN, EntityMention(EntityType.RELEASE_YEAR, f"{century}{decade}0s", 0.8, m.start(), m.end()))
            )
        for m in _YEAR_EXACT.finditer(text):
            out.append(
                (_PRIORITY_PATTERN, EntityMention(EntityType.RELEASE_YEAR, m.group(1), 0.85, m.start(), m.end()))
            )
        return out

    def _person_candidates(self, text: str) -> list[tuple[int, EntityMention]]:
        out = []
        for m in _PERSON_INTRO.finditer(text):
            name = m.group(1)
            if all(w.lower() not in _STOPWORDS for w in name.split()):
                out.append(
                    (_PRIORITY_PATTERN, EntityMention(EntityType.PERSON, name.lower(), 0.8, m.start(1), m.end(1)))
                )
        if self._gazetteer is not None:
            for m in self._gazetteer.finditer(text):
                out.append(
                    (_PRIORITY_PATTERN, EntityMention(EntityType.PERSON, m.group(0).lower(), 0.8, m.start(), m.end()))
                )
        stripped = _strip_politeness(text)
        m = _BARE_NAME.match(stripped.text)
        if m and all(w.lower() not in _STOPWORDS for w in m.group(1).split()):
            out.append(
                (
                    _PRIORITY_NAME,
                    EntityMention(
                        EntityType.PERSON,
                        m.group(1).lower(),
                        0.75,
                        stripped.offset + m.start(1),
                        stripped.offset + m.end(1),
                    ),
                )
            )
        m = _SINGLE_NAME.match(stripped.text)
        if m and m.group(1).lower() not in _STOPWORDS:
            out.append(
                (
                    _PRIORITY_SINGLE_NAME,
                    EntityMention(
                        EntityType.PERSON,
                        m.group(1).lower(),
                        0.65,
                        stripped.offset + m.start(1),
                        stripped.offset + m.end(1),
                    ),
                )
            )
        return out

    def _keyword_candidates(self, text: str) -> list[tuple[int, EntityMention]]:
        out = []
        for m in _KEYWORD.finditer(text):
            words = m.group(1).split()
            while words and words[-1].lower() in _KEYWORD_TRIM:
                words.pop()
            if not words:
                continue
            phrase = " ".join(words)
            end = m.start(1) + len(phrase)
            out.append(
                (_PRIORITY_PATTERN, EntityMention(EntityType.KEYWORD, phrase.lower(), 0.7, m.start(1), end))
            )
        return out

    # intent ---------------------------------------------------------------

    def _classify(self, text: str, mentions: list[EntityMention]) -> tuple[Intent, float]:
        if mentions:
            return Intent.SPECIFY, 0.9
        if _STRONG_REFUSAL.search(text):
            return Intent.REFUSE, 0.95
        if _BARE_NO.match(text):
            return Intent.REFUSE, 0.85
        if _REQUEST_VERB.search(text):
            return Intent.SPECIFY, 0.75
        return Intent.NONE, 0.6


class _Stripped:
    __slots__ = ("text", "offset")

    def __init__(self, text: str, offset: int) -> None:
        self.text = text
        self.offset = offset


def _strip_politeness(text: str) -> _Stripped:
    """Trim whitespace/punctuation and a trailing "please" for name checks."""
    s = text
    offset = 0
    m = re.match(r"^\s+", s)
    if m:
        offset = m.end()
        s = s[offset:]
    s = re.sub(r"[\s!.,?]+$", "", s)
    m = re.search(r"[\s,]+please$", s, re.IGNORECASE)
    if m:
        s = s[: m.start()]
    return _Stripped(s, offset)


def _resolve_overlaps(candidates: list[tuple[int, EntityMention]]) -> list[EntityMention]:
    """Keep a non-overlapping subset: earliest start, then longest, then priority."""
    ranked = sorted(candidates, key=lambda c: (c[1].start, -(c[1].end - c[1].start), c[0]))
    kept: list[EntityMention] = []
    last_end = -1
    for _, mention in ranked:
        if mention.start >= last_end:
            kept.append(mention)
            last_end = mention.end
    return kept


class RemoteProvider:
    """HTTP client for an external parser.

    POSTs {"text": ...} to the endpoint and expects {"intent", "score",
    "entities": [{"type", "value", "score", "start", "end"}]}. Timeouts,
    transport errors and non-2xx responses surface as ProviderError so the
    caller can retry or degrade to word search.
    """

    def __init__(self, url: str, timeout: float = 5.0) -> None:
        self.url = url
        self.timeout = timeout

    def parse(self, text: str) -> ParsedUtterance:
        try:
            resp = httpx.post(self.url, json={"text": text}, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise ProviderError(f"provider request failed: {exc}") from exc
        if resp.status_code // 100 != 2:
            raise ProviderError(f"provider returned HTTP {resp.status_code}")
        try:
            payload = resp.json()
            intent = _parse_intent(payload.get("intent", "none"))
            score = float(payload.get("score", 0.0))
            mentions = []
            for ent in payload.get("entities", []):
                try:
                    etype = EntityType.from_key(str(ent["type"]))
                except ValueError:
                    continue
                mentions.append(
                    EntityMention(
                        etype,
                        str(ent["value"]),
                        min(1.0, max(0.0, float(ent["score"]))),
                        int(ent["start"]),
                        int(ent["end"]),
                    )
                )
            return ParsedUtterance(intent, min(1.0, max(0.0, score)), tuple(mentions))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc


def _parse_intent(raw: str) -> Intent:
    try:
        return Intent(raw.strip().lower())
    except ValueError:
        return Intent.NONE
