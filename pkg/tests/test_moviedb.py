"""Document store: ingestion, clause semantics, index equivalence."""

import json
import random

import pytest

from slotforge.model import EntityType, new_conversation
from slotforge.moviedb import MovieDoc, Query, build_query, execute, ingest, matches
from slotforge.phonetics import person_key

A = EntityType.AUDIENCE_AGE
G = EntityType.GENRE
K = EntityType.KEYWORD
C = EntityType.COUNTRY_OR_CONTINENT
P = EntityType.PERSON
Y = EntityType.RELEASE_YEAR


def q(include=None, exclude=None, limit=0):
    return Query(include=include or {}, exclude=exclude or {}, limit=limit)


BASE = {
    "id": "t1",
    "title": "T",
    "release_year": 2000,
    "audience_age": "pg",
    "quality_rating": 7.0,
    "genre_ids": [1],
    "directors": ["Ada Lovelace"],
    "actors": ["Grace Hopper"],
    "countries": ["usa"],
    "continents": ["north america"],
    "main_country": "usa",
    "main_continent": "north america",
    "keywords": ["math"],
}


def make_movie(**overrides):
    return MovieDoc.from_json({**BASE, **overrides})


# --- ingestion -----------------------------------------------------------------

def test_fixture_count(store):
    assert store.count == 200
    assert store.errors == []


def test_fixture_portman_indexed(store):
    movies = store.person_index.get("NTL PRTMN", [])
    assert len(movies) >= 2
    for m in movies:
        assert "NTL PRTMN" in m.person_keys


def test_ingest_computes_missing_keys(tmp_path):
    doc = dict(BASE)
    doc.pop("keywords")
    path = tmp_path / "movies.jsonl"
    path.write_text(json.dumps(doc) + "\n")
    store = ingest(path)
    assert store.count == 1
    movie = store.movies[0]
    assert movie.director_keys == (person_key("Ada Lovelace"),)
    assert movie.keywords == ()


def test_ingest_rejects_bad_lines_with_line_numbers(tmp_path):
    good = json.dumps(BASE)
    invalid_invariant = json.dumps({**BASE, "id": "t2", "main_country": "france"})
    path = tmp_path / "movies.jsonl"
    path.write_text(f"{good}\nnot json\n{invalid_invariant}\n")
    store = ingest(path)
    assert store.count == 1
    assert sorted(e.line_no for e in store.errors) == [2, 3]


def test_ingest_duplicate_id_last_wins(tmp_path):
    first = json.dumps(BASE)
    second = json.dumps({**BASE, "title": "T2"})
    path = tmp_path / "movies.jsonl"
    path.write_text(f"{first}\n{second}\n")
    store = ingest(path)
    assert store.count == 1
    assert store.movies[0].title == "T2"


def test_dump_round_trip(tmp_path, store):
    out = tmp_path / "normalized.jsonl"
    store.dump(out)
    again = ingest(out)
    assert again.count == store.count
    assert [m.to_json() for m in again.movies] == [m.to_json() for m in store.movies]


def test_movie_key_length_invariants():
    with pytest.raises(ValueError):
        make_movie(director_keys=["X", "Y"])  # one director, two keys


# --- build_query -------------------------------------------------------------------

def test_build_query_includes_positive():
    state = new_conversation()
    state.add_value(G, 1, 0.9)
    built = build_query(state)
    assert built.include[G] == frozenset({1})
    assert G not in built.exclude


def test_build_query_empty_state_matches_all(store):
    state = new_conversation()
    built = build_query(state, limit=0)
    assert built.is_empty()
    assert len(execute(built, store)) == store.count


def test_build_query_negative_to_exclude():
    state = new_conversation()
    state.add_value(G, 3, -0.8)
    built = build_query(state)
    assert built.exclude[G] == frozenset({3})
    assert G not in built.include


def test_query_include_exclude_overlap_rejected():
    with pytest.raises(ValueError):
        Query(include={G: frozenset({1})}, exclude={G: frozenset({1})})


# --- clause semantics -----------------------------------------------------------------

def test_country_include_matches_main_only():
    co_production = make_movie(
        id="c1", countries=["usa", "france"],
        continents=["north america", "europe"],
        main_country="usa", main_continent="north america",
    )
    truly_french = make_movie(
        id="c2", countries=["france"], continents=["europe"],
        main_country="france", main_continent="europe",
    )
    inc = q(include={C: frozenset({"france"})})
    assert not matches(co_production, inc)
    assert matches(truly_french, inc)


def test_country_exclude_matches_arrays():
    co_production = make_movie(
        id="c1", countries=["usa", "france"],
        continents=["north america", "europe"],
        main_country="usa", main_continent="north america",
    )
    control = make_movie(id="c3")
    exc = q(exclude={C: frozenset({"france"})})
    assert not matches(co_production, exc)
    assert matches(control, exc)


def test_continent_include_matches_main_continent():
    movie = make_movie(id="c4", countries=["japan"], continents=["asia"],
                       main_country="japan", main_continent="asia")
    assert matches(movie, q(include={C: frozenset({"asia"})}))
    assert not matches(movie, q(include={C: frozenset({"europe"})}))


def test_genre_disjunction_within_type():
    movie = make_movie(genre_ids=[2, 5])
    assert matches(movie, q(include={G: frozenset({1, 2})}))
    assert not matches(movie, q(include={G: frozenset({1, 3})}))


def test_exclude_any_hit_drops():
    movie = make_movie(genre_ids=[1, 3])
    assert not matches(movie, q(exclude={G: frozenset({3})}))


def test_person_matches_directors_and_actors():
    movie = make_movie()
    assert matches(movie, q(include={P: frozenset({"ada lovelace"})}))
    assert matches(movie, q(include={P: frozenset({"grace hopper"})}))
    assert not matches(movie, q(include={P: frozenset({"alan turing"})}))


def test_person_match_is_phonetic():
    movie = make_movie(actors=["Natalie Portman"])
    assert matches(movie, q(include={P: frozenset({"nataly portman"})}))


def test_year_clauses():
    movie = make_movie(release_year=1994)
    assert matches(movie, q(include={Y: frozenset({"1994"})}))
    assert not matches(movie, q(include={Y: frozenset({"1995"})}))
    assert matches(movie, q(include={Y: frozenset({"1990s"})}))
    assert matches(movie, q(include={Y: frozenset({"after 1990"})}))
    assert not matches(movie, q(include={Y: frozenset({"after 1994"})}))
    assert matches(movie, q(include={Y: frozenset({"before 1995"})}))
    assert not matches(movie, q(include={Y: frozenset({"before 1994"})}))
    assert not matches(movie, q(include={Y: frozenset({"garbled"})}))


def test_audience_age_at_or_below():
    g_movie = make_movie(audience_age="g")
    r_movie = make_movie(audience_age="r")
    kids = q(include={A: frozenset({"pg"})})
    assert matches(g_movie, kids)
    assert not matches(r_movie, kids)
    # excludes are exact-tier
    assert matches(g_movie, q(exclude={A: frozenset({"r"})}))
    assert not matches(r_movie, q(exclude={A: frozenset({"r"})}))


def test_keyword_matches_array():
    movie = make_movie(keywords=["space", "time travel"])
    assert matches(movie, q(include={K: frozenset({"space"})}))
    assert not matches(movie, q(include={K: frozenset({"ocean"})}))


# --- execution and ranking ---------------------------------------------------------------

def test_ranking_rating_then_year(store):
    results = execute(q(limit=0), store)
    ranks = [(-m.quality_rating, -m.release_year, m.id) for m in results]
    assert ranks == sorted(ranks)


def test_limit_truncates(store):
    assert len(execute(q(limit=7), store)) == 7


def _brute_force(store, query):
    out = [m for m in store.movies if matches(m, query)]
    out.sort(key=lambda m: (-m.quality_rating, -m.release_year, m.id))
    return out


def _random_query(rng, store):
    names = sorted(store.person_names())
    include = {P: frozenset(rng.sample(names, rng.randint(1, 2)))}
    exclude = {}
    if rng.random() < 0.5:
        include[G] = frozenset(rng.sample(range(1, 17), rng.randint(1, 3)))
    if rng.random() < 0.4:
        exclude[C] = frozenset(rng.sample(["france", "usa", "japan", "europe"], 2))
    if rng.random() < 0.3:
        include[Y] = frozenset({rng.choice(["1990s", "after 2000", "before 1980", "2011"])})
    if rng.random() < 0.3:
        exclude[G] = frozenset(
            rng.sample([g for g in range(1, 17) if g not in include.get(G, frozenset())], 2)
        )
    return Query(include=include, exclude=exclude, limit=0)


def test_index_path_equals_scan_path(store):
    rng = random.Random(42)
    for _ in range(200):
        query = _random_query(rng, store)
        via_index = execute(query, store, use_index=True)
        via_scan = execute(query, store, use_index=False)
        assert [m.id for m in via_index] == [m.id for m in via_scan]


def test_monotonicity_includes_grow_excludes_shrink(store):
    rng = random.Random(43)
    for _ in range(50):
        base_genres = set(rng.sample(range(1, 17), 2))
        base = q(include={G: frozenset(base_genres)})
        wider = q(include={G: frozenset(base_genres | {rng.randint(1, 16)})})
        base_ids = {m.id for m in execute(base, store)}
        wider_ids = {m.id for m in execute(wider, store)}
        assert base_ids <= wider_ids
        tighter = q(
            include={G: frozenset(base_genres)},
            exclude={C: frozenset({rng.choice(["france", "japan", "usa"])})},
        )
        tighter_ids = {m.id for m in execute(tighter, store)}
        assert tighter_ids <= base_ids
