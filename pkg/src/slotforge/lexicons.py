"""Phrase lexicons mapping surface words to query values.

A lexicon is a plain dict of lowercase phrase -> value (genre id int, age
tier string, canonical country name). Matching is case-insensitive, word
bounded and longest-match-first, so "science fiction" wins over any shorter
overlap.
"""

from __future__ import annotations

import json
import re
from importlib import resources
from pathlib import Path
from typing import Mapping, NamedTuple, Union

from .model import EntityType, SlotValue

Lexicon = Mapping[str, SlotValue]
LexiconSet = Mapping[EntityType, Lexicon]

GENRE_NAMES: dict[int, str] = {
    1: "comedy",
    2: "action",
    3: "horror",
    4: "drama",
    5: "thriller",
    6: "romance",
    7: "documentary",
    8: "animation",
    9: "science fiction",
    10: "fantasy",
    11: "western",
    12: "musical",
    13: "crime",
    14: "war",
    15: "adventure",
    16: "mystery",
}

AGE_TIERS: tuple[str, ...] = ("g", "pg", "pg-13", "r", "nc-17")
AGE_RANK: dict[str, int] = {t: i for i, t in enumerate(AGE_TIERS)}

_LEXICON_FILES = {
    EntityType.GENRE: "genre.json",
    EntityType.AUDIENCE_AGE: "audience_age.json",
    EntityType.COUNTRY_OR_CONTINENT: "country.json",
}


class LexiconMatch(NamedTuple):
    phrase: str
    value: SlotValue
    start: int
    end: int  # exclusive


def load_lexicon_file(path: Union[str, Path]) -> dict[str, SlotValue]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not data:
        raise ValueError(f"lexicon {path} must be a non-empty JSON object")
    return {str(k).lower(): v for k, v in data.items()}


def default_lexicons() -> dict[EntityType, dict[str, SlotValue]]:
    """The bundled genre/audience/country lexicons."""
    out: dict[EntityType, dict[str, SlotValue]] = {}
    for etype, fname in _LEXICON_FILES.items():
        ref = resources.files("slotforge.data.lexicons") / fname
        data = json.loads(ref.read_text(encoding="utf-8"))
        out[etype] = {str(k).lower(): v for k, v in data.items()}
    return out


def _compile(lexicon: Lexicon) -> re.Pattern:
    # longest alternative first, so the regex engine takes the longest match
    keys = sorted(lexicon, key=len, reverse=True)
    body = "|".join(re.escape(k) for k in keys)
    return re.compile(rf"\b(?:{body})\b", re.IGNORECASE)


def find_phrases(text: str, lexicon: Lexicon) -> list[LexiconMatch]:
    """All non-overlapping lexicon matches in the text, left to right."""
    if not lexicon:
        return []
    matches = []
    for m in _compile(lexicon).finditer(text):
        phrase = m.group(0).lower()
        matches.append(LexiconMatch(phrase, lexicon[phrase], m.start(), m.end()))
    return matches


def genre_id(lexicons: LexiconSet, surface: str) -> SlotValue | None:
    """Map a surface genre word to its id, or None when unknown."""
    lex = lexicons.get(EntityType.GENRE, {})
    return lex.get(surface.lower())
