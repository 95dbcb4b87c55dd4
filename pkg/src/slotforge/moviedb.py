"""Movie document store: JSONL ingestion, person-key index, query engine.

Queries are a conjunction across entity types, a disjunction within a
type's include set, and a veto on any exclude hit. Country/continent
includes match only the movie's main country/continent, while excludes
match anywhere in the full arrays: a co-production merely involving a
country is not "from" it, but excluding that country must still drop it.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .lexicons import AGE_RANK
from .model import ENTITY_TYPES, ConversationState, EntityType, SlotValue
from .phonetics import person_key

logger = logging.getLogger(__name__)

_REQUIRED_FIELDS = (
    "id",
    "title",
    "release_year",
    "audience_age",
    "quality_rating",
    "genre_ids",
    "directors",
    "actors",
    "countries",
    "continents",
    "main_country",
    "main_continent",
)


@dataclass(frozen=True)
class MovieDoc:
    id: str
    title: str
    release_year: int
    audience_age: str
    quality_rating: float
    genre_ids: tuple[int, ...]
    directors: tuple[str, ...]
    actors: tuple[str, ...]
    director_keys: tuple[str, ...]
    actor_keys: tuple[str, ...]
    countries: tuple[str, ...]
    continents: tuple[str, ...]
    main_country: str
    main_continent: str
    keywords: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.director_keys) != len(self.directors):
            raise ValueError("director_keys length must match directors")
        if len(self.actor_keys) != len(self.actors):
            raise ValueError("actor_keys length must match actors")
        if self.main_country not in self.countries:
            raise ValueError("main_country must appear in countries")
        if self.main_continent not in self.continents:
            raise ValueError("main_continent must appear in continents")

    @classmethod
    def from_json(cls, data: dict) -> "MovieDoc":
        missing = [f for f in _REQUIRED_FIELDS if f not in data]
        if missing:
            raise ValueError(f"missing fields: {', '.join(missing)}")
        directors = tuple(str(d) for d in data["directors"])
        actors = tuple(str(a) for a in data["actors"])
        director_keys = data.get("director_keys")
        actor_keys = data.get("actor_keys")
        return cls(
            id=str(data["id"]),
            title=str(data["title"]),
            release_year=int(data["release_year"]),
            audience_age=str(data["audience_age"]).lower(),
            quality_rating=float(data["quality_rating"]),
            genre_ids=tuple(int(g) for g in data["genre_ids"]),
            directors=directors,
            actors=actors,
            director_keys=(
                tuple(str(k) for k in director_keys)
                if director_keys is not None
                else tuple(person_key(d) for d in directors)
            ),
            actor_keys=(
                tuple(str(k) for k in actor_keys)
                if actor_keys is not None
                else tuple(person_key(a) for a in actors)
            ),
            countries=tuple(str(c).lower() for c in data["countries"]),
            continents=tuple(str(c).lower() for c in data["continents"]),
            main_country=str(data["main_country"]).lower(),
            main_continent=str(data["main_continent"]).lower(),
            keywords=tuple(str(k).lower() for k in data.get("keywords", [])),
        )

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "release_year": self.release_year,
            "audience_age": self.audience_age,
            "quality_rating": self.quality_rating,
            "genre_ids": list(self.genre_ids),
            "directors": list(self.directors),
            "actors": list(self.actors),
            "director_keys": list(self.director_keys),
            "actor_keys": list(self.actor_keys),
            "countries": list(self.countries),
            "continents": list(self.continents),
            "main_country": self.main_country,
            "main_continent": self.main_continent,
            "keywords": list(self.keywords),
        }

    @property
    def person_keys(self) -> frozenset:
        return frozenset(self.director_keys) | frozenset(self.actor_keys)


@dataclass(frozen=True)
class IngestError:
    line_no: int
    reason: str


@dataclass(frozen=True)
class Query:
    """Per-type include/exclude value sets plus a result limit."""

    include: dict[EntityType, frozenset] = field(default_factory=dict)
    exclude: dict[EntityType, frozenset] = field(default_factory=dict)
    limit: int = 10

    def __post_init__(self) -> None:
        for t in ENTITY_TYPES:
            overlap = self.include.get(t, frozenset()) & self.exclude.get(t, frozenset())
            if overlap:
                raise ValueError(f"values both included and excluded for {t}: {overlap}")

    def is_empty(self) -> bool:
        return not any(self.include.values()) and not any(self.exclude.values())


class MovieStore:
    """Immutable after ingest; queries need no coordination."""

    def __init__(self, movies: Iterable[MovieDoc], errors: Optional[list[IngestError]] = None) -> None:
        by_id: dict[str, MovieDoc] = {}
        for m in movies:
            if m.id in by_id:
                logger.warning("duplicate movie id %s: keeping the last occurrence", m.id)
            by_id[m.id] = m
        self.movies: tuple[MovieDoc, ...] = tuple(by_id.values())
        self.by_id = by_id
        self.errors: list[IngestError] = list(errors or [])
        self.person_index: dict[str, list[MovieDoc]] = {}
        for m in self.movies:
            for key in m.person_keys:
                self.person_index.setdefault(key, []).append(m)

    @property
    def count(self) -> int:
        return len(self.movies)

    def person_names(self) -> set[str]:
        names: set[str] = set()
        for m in self.movies:
            names.update(d.lower() for d in m.directors)
            names.update(a.lower() for a in m.actors)
        return names

    def dump(self, path: Union[str, Path]) -> None:
        """Write the normalized store back out, one JSON document per line."""
        with open(path, "w", encoding="utf-8") as fh:
            for m in self.movies:
                fh.write(json.dumps(m.to_json(), sort_keys=True) + "\n")


def ingest(path: Union[str, Path]) -> MovieStore:
    """Load a JSONL movie file, computing person keys where absent.

    Malformed or invariant-violating lines are rejected and reported in
    store.errors with their line number; valid lines still load. Duplicate
    ids keep the last occurrence.
    """
    movies: list[MovieDoc] = []
    errors: list[IngestError] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                movies.append(MovieDoc.from_json(json.loads(line)))
            except (json.JSONDecodeError, ValueError, TypeError, KeyError) as exc:
                errors.append(IngestError(line_no, str(exc)))
                logger.warning("rejected movie line %d: %s", line_no, exc)
    return MovieStore(movies, errors)


def build_query(state: ConversationState, limit: int = 10) -> Query:
    """Turn slot values into a query: positive -> include, negative -> exclude."""
    include: dict[EntityType, set] = {}
    exclude: dict[EntityType, set] = {}
    for t in ENTITY_TYPES:
        for value, score in state.slot(t).values.items():
            bucket = include if score > 0 else exclude
            bucket.setdefault(t, set()).add(value)
    return Query(
        include={t: frozenset(v) for t, v in include.items()},
        exclude={t: frozenset(v) for t, v in exclude.items()},
        limit=limit,
    )


def execute(query: Query, store: MovieStore, use_index: Optional[bool] = None) -> list[MovieDoc]:
    """Ranked matches: rating desc, then year desc, then id for stability.

    When the query includes at least one person, candidate movies come from
    the person-key index and the remaining clauses filter that list; the
    result is identical to a full scan (tested property). use_index forces
    one path or the other.
    """
    person_includes = query.include.get(EntityType.PERSON, frozenset())
    take_index = bool(person_includes) if use_index is None else (use_index and bool(person_includes))
    if take_index:
        seen: dict[str, MovieDoc] = {}
        for value in sorted(person_includes):
            for movie in store.person_index.get(person_key(str(value)), []):
                seen[movie.id] = movie
        candidates: Iterable[MovieDoc] = seen.values()
    else:
        candidates = store.movies
    matched = [m for m in candidates if matches(m, query)]
    matched.sort(key=_rank_key)
    return matched[: query.limit] if query.limit else matched


def _rank_key(m: MovieDoc):
    return (-m.quality_rating, -m.release_year, m.id)


def matches(movie: MovieDoc, query: Query) -> bool:
    """Conjunction over types; see type_matches for per-type semantics."""
    return all(
        type_matches(
            movie,
            t,
            query.include.get(t, frozenset()),
            query.exclude.get(t, frozenset()),
        )
        for t in ENTITY_TYPES
    )


def type_matches(
    movie: MovieDoc,
    t: EntityType,
    include: frozenset,
    exclude: frozenset,
) -> bool:
    if exclude and _hits_any(movie, t, exclude, as_exclude=True):
        return False
    if include:
        return _hits_any(movie, t, include, as_exclude=False)
    return True


def _hits_any(movie: MovieDoc, t: EntityType, values: frozenset, as_exclude: bool) -> bool:
    return any(_hits(movie, t, v, as_exclude) for v in values)


def _hits(movie: MovieDoc, t: EntityType, value: SlotValue, as_exclude: bool) -> bool:
    if t is EntityType.GENRE:
        return isinstance(value, int) and value in movie.genre_ids
    if t is EntityType.PERSON:
        return person_key(str(value)) in movie.person_keys
    if t is EntityType.COUNTRY_OR_CONTINENT:
        name = str(value).lower()
        if as_exclude:
            return name in movie.countries or name in movie.continents
        return name == movie.main_country or name == movie.main_continent
    if t is EntityType.RELEASE_YEAR:
        return _year_matches(movie.release_year, str(value))
    if t is EntityType.AUDIENCE_AGE:
        movie_rank = AGE_RANK.get(movie.audience_age)
        asked_rank = AGE_RANK.get(str(value).lower())
        if movie_rank is None or asked_rank is None:
            return False
        if as_exclude:
            return movie.audience_age == str(value).lower()
        return movie_rank <= asked_rank  # "for kids" means rated at or below
    if t is EntityType.KEYWORD:
        return str(value).lower() in movie.keywords
    return False


def _year_matches(year: int, value: str) -> bool:
    """Support exact years, decades ("1990s") and open ranges ("after 2000")."""
    v = value.strip().lower()
    if v.endswith("s") and v[:-1].isdigit() and len(v) == 5:
        start = (int(v[:-1]) // 10) * 10
        return start <= year <= start + 9
    if v.startswith("after "):
        rest = v[6:].strip()
        return rest.isdigit() and year > int(rest)
    if v.startswith("before "):
        rest = v[7:].strip()
        return rest.isdigit() and year < int(rest)
    if v.isdigit():
        return year == int(v)
    return False
