#!/usr/bin/env python3
"""Regenerate the bundled 200-movie sample database (deterministic).

Usage: python scripts/generate_fixture.py [out_path]

A dozen hand-written anchor movies cover the behaviors the test suite
leans on (a mistypable actress name, co-productions for the country
semantics, a spread of horror titles); the rest are generated from a
fixed seed. Output is stable byte-for-byte for a given script version.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from slotforge.phonetics import person_key  # noqa: E402

SEED = 20240511
TARGET = 200

CONTINENT = {
    "france": "europe",
    "usa": "north america",
    "uk": "europe",
    "germany": "europe",
    "italy": "europe",
    "spain": "europe",
    "japan": "asia",
    "india": "asia",
    "korea": "asia",
    "brazil": "south america",
    "canada": "north america",
    "australia": "oceania",
    "china": "asia",
    "russia": "europe",
    "mexico": "north america",
    "sweden": "europe",
    "argentina": "south america",
}

GENRES = list(range(1, 17))
TIERS = ["g", "pg", "pg-13", "r", "nc-17"]
KEYWORDS = [
    "space", "revenge", "friendship", "time travel", "road trip", "survival",
    "music", "chess", "dreams", "memory", "justice", "desert", "ocean",
    "mountains", "robots", "magic", "circus", "trains", "painting", "islands",
]

FIRST = [
    "Steven", "Natalie", "Marco", "Helena", "Viktor", "Amelia", "Rajan",
    "Yuki", "Carlos", "Ingrid", "Tomas", "Beatrice", "Felix", "Mariana",
    "Oskar", "Lucia", "Andrei", "Paloma", "Kenji", "Greta", "Diego",
    "Clara", "Henrik", "Rosa", "Pavel", "Noemi", "Bruno", "Elsa",
    "Mateo", "Irene", "Simone", "Tariq", "Vera", "Anders", "Chiara",
]
LAST = [
    "Spielberg", "Portman", "Valdis", "Okafor", "Lindqvist", "Moreau",
    "Tanaka", "Rossi", "Novak", "Silva", "Petrov", "Haas", "Iyer",
    "Fontaine", "Berg", "Castillo", "Weiss", "Nakamura", "Costa",
    "Lang", "Vidal", "Sorensen", "Marchetti", "Duarte", "Klein",
    "Aubert", "Vance", "Holm", "Reyes", "Falk", "Baptiste", "Onda",
]

ADJ = [
    "Silent", "Crimson", "Endless", "Broken", "Golden", "Hidden", "Midnight",
    "Paper", "Burning", "Frozen", "Electric", "Hollow", "Distant", "Wild",
    "Quiet", "Savage", "Velvet", "Iron", "Glass", "Scarlet",
]
NOUN = [
    "Harbor", "Garden", "Mirror", "River", "Empire", "Letters", "Orchard",
    "Voyage", "Carnival", "Winter", "Shadows", "Engine", "Meridian",
    "Lantern", "Archive", "Horizon", "Colony", "Parade", "Station", "Tides",
]

ANCHORS = [
    # Portman titles: two comedies and a drama, so person+genre conjunctions
    # have something to find and something to exclude.
    dict(title="The Paper Harbor", year=2011, tier="pg-13", rating=8.1, genres=[1, 6],
         directors=["Marco Valdis"], actors=["Natalie Portman", "Felix Haas"],
         countries=["usa"], keywords=["friendship", "road trip"]),
    dict(title="Lantern Summer", year=2004, tier="pg", rating=7.4, genres=[1],
         directors=["Helena Moreau"], actors=["Natalie Portman", "Diego Castillo"],
         countries=["usa", "canada"], keywords=["music"]),
    dict(title="Glass Meridian", year=2016, tier="r", rating=8.6, genres=[4, 5],
         directors=["Viktor Petrov"], actors=["Natalie Portman", "Ingrid Lindqvist"],
         countries=["usa", "uk"], keywords=["memory", "justice"]),
    dict(title="The Endless Voyage", year=1993, tier="pg", rating=8.8, genres=[15, 4],
         directors=["Steven Spielberg"], actors=["Tomas Novak", "Clara Fontaine"],
         countries=["usa"], keywords=["ocean", "survival"]),
    dict(title="Electric Colony", year=2002, tier="pg-13", rating=8.2, genres=[9, 15],
         directors=["Steven Spielberg"], actors=["Amelia Okafor", "Kenji Tanaka"],
         countries=["usa", "japan"], keywords=["robots", "space"]),
    # Country-semantics trio: main-country france, france-only-co-producer,
    # and a france-free control.
    dict(title="Les Jardins Perdus", year=1987, tier="pg", rating=7.9, genres=[4, 6],
         directors=["Beatrice Aubert"], actors=["Lucia Vidal", "Bruno Baptiste"],
         countries=["france", "italy"], keywords=["painting"], main="france"),
    dict(title="Crimson Parade", year=2008, tier="r", rating=7.2, genres=[5, 13],
         directors=["Oskar Berg"], actors=["Mariana Silva", "Andrei Klein"],
         countries=["usa", "france"], keywords=["justice"], main="usa"),
    dict(title="Quiet Tides", year=2014, tier="pg-13", rating=7.0, genres=[4],
         directors=["Yuki Nakamura"], actors=["Greta Holm", "Mateo Reyes"],
         countries=["japan"], keywords=["ocean", "memory"]),
    # Horror spread for the negation checks.
    dict(title="Hollow Orchard", year=1999, tier="r", rating=6.8, genres=[3],
         directors=["Pavel Weiss"], actors=["Noemi Duarte", "Henrik Sorensen"],
         countries=["germany"], keywords=["dreams"]),
    dict(title="Midnight Archive", year=2019, tier="r", rating=7.6, genres=[3, 5],
         directors=["Irene Costa"], actors=["Simone Marchetti", "Vera Falk"],
         countries=["italy", "spain"], keywords=["memory"]),
    dict(title="The Burning Station", year=1978, tier="r", rating=6.5, genres=[3, 13],
         directors=["Carlos Reyes"], actors=["Paloma Castillo", "Anders Berg"],
         countries=["mexico"], keywords=["trains"]),
    dict(title="Winter Carnival", year=1962, tier="g", rating=7.7, genres=[1, 12],
         directors=["Rosa Marchetti"], actors=["Elsa Holm", "Tariq Iyer"],
         countries=["sweden", "france"], keywords=["circus", "music"], main="sweden"),
]


def _doc(idx, title, year, tier, rating, genres, directors, actors, countries, keywords, main=None):
    main_country = main or countries[0]
    continents = sorted({CONTINENT[c] for c in countries})
    return {
        "id": f"m{idx:04d}",
        "title": title,
        "release_year": year,
        "audience_age": tier,
        "quality_rating": rating,
        "genre_ids": genres,
        "directors": directors,
        "actors": actors,
        "director_keys": [person_key(d) for d in directors],
        "actor_keys": [person_key(a) for a in actors],
        "countries": countries,
        "continents": continents,
        "main_country": main_country,
        "main_continent": CONTINENT[main_country],
        "keywords": keywords,
    }


def generate() -> list[dict]:
    rng = random.Random(SEED)
    docs = []
    for i, a in enumerate(ANCHORS, start=1):
        docs.append(
            _doc(i, a["title"], a["year"], a["tier"], a["rating"], a["genres"],
                 a["directors"], a["actors"], a["countries"], a["keywords"], a.get("main"))
        )
    used_titles = {d["title"] for d in docs}
    idx = len(docs) + 1
    while len(docs) < TARGET:
        title = f"{rng.choice(ADJ)} {rng.choice(NOUN)}"
        if title in used_titles:
            title = f"The {rng.choice(ADJ)} {rng.choice(NOUN)}"
        if title in used_titles:
            continue
        used_titles.add(title)
        n_countries = rng.randint(1, 3)
        countries = rng.sample(sorted(CONTINENT), n_countries)
        genres = sorted(rng.sample(GENRES, rng.randint(1, 3)))
        directors = [f"{rng.choice(FIRST)} {rng.choice(LAST)}"]
        actors = [f"{rng.choice(FIRST)} {rng.choice(LAST)}" for _ in range(rng.randint(2, 4))]
        docs.append(
            _doc(
                idx,
                title,
                rng.randint(1950, 2023),
                rng.choice(TIERS),
                round(rng.uniform(3.0, 9.5), 1),
                genres,
                directors,
                actors,
                countries,
                sorted(rng.sample(KEYWORDS, rng.randint(1, 3))),
            )
        )
        idx += 1
    return docs


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "slotforge" / "data" / "movies_sample.jsonl"
    )
    docs = generate()
    with open(out, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, sort_keys=True) + "\n")
    print(f"wrote {len(docs)} movies to {out}")


if __name__ == "__main__":
    main()
