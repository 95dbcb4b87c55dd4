"""Command line entry points: serve, ingest, query, chat, simulate."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import click

from .config import ServiceSettings, load_settings
from .dialog import BotDeps, DialogConfig, DialogSession
from .estimators import EstimatorModel
from .lexicons import default_lexicons
from .model import ENTITY_TYPES, EntityType
from .moviedb import Query, execute, ingest
from .providers import BuiltinProvider
from .simulate import (
    CorrelationRule,
    Persona,
    SimulationOptions,
    simulate,
)


@click.group()
def main() -> None:
    """Adaptive slot-filling movie chat engine."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None, help="JSON config file.")
@click.option("--port", type=int, default=None, help="Override the port.")
def serve(config_path: Optional[str], port: Optional[int]) -> None:
    """Run the HTTP session service."""
    settings = load_settings(config_path)
    if port is not None:
        settings.port = port
    from .service import run

    run(settings)


@main.command("ingest")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def ingest_cmd(input_path: str, out_dir: str) -> None:
    """Validate a movie JSONL file and write a normalized store."""
    store = ingest(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    store.dump(out / "movies.jsonl")
    click.echo(f"loaded {store.count} movies, rejected {len(store.errors)} lines")
    for err in store.errors:
        click.echo(f"  line {err.line_no}: {err.reason}", err=True)
    click.echo(f"store written to {out / 'movies.jsonl'}")


def _collect(values: tuple[str, ...]) -> frozenset:
    return frozenset(v.strip().lower() for v in values if v.strip())


@main.command("query")
@click.option("--movies", "movies_path", type=click.Path(exists=True), default=None)
@click.option("--genre", multiple=True, help="Genre name, e.g. comedy.")
@click.option("--not-genre", multiple=True)
@click.option("--person", multiple=True)
@click.option("--not-person", multiple=True)
@click.option("--country", multiple=True)
@click.option("--not-country", multiple=True)
@click.option("--year", multiple=True, help='"1999", "1990s", "after 2000", "before 1990".')
@click.option("--not-year", multiple=True)
@click.option("--age", multiple=True, help="Audience tier or word: g, pg, kids, adults...")
@click.option("--not-age", multiple=True)
@click.option("--keyword", multiple=True)
@click.option("--not-keyword", multiple=True)
@click.option("--limit", type=int, default=10)
def query_cmd(movies_path, genre, not_genre, person, not_person, country, not_country,
              year, not_year, age, not_age, keyword, not_keyword, limit) -> None:
    """Run one query and print the ranked matches as JSON rows."""
    settings = ServiceSettings(movies_path=movies_path)
    store = ingest(settings.resolve_movies_path())
    lexicons = default_lexicons()

    def genre_ids(names: tuple[str, ...]) -> frozenset:
        lex = lexicons[EntityType.GENRE]
        ids = set()
        for name in names:
            gid = lex.get(name.strip().lower())
            if gid is None:
                raise click.BadParameter(f"unknown genre {name!r}")
            ids.add(gid)
        return frozenset(ids)

    def ages(names: tuple[str, ...]) -> frozenset:
        lex = lexicons[EntityType.AUDIENCE_AGE]
        return frozenset(lex.get(n.strip().lower(), n.strip().lower()) for n in names)

    def countries(names: tuple[str, ...]) -> frozenset:
        lex = lexicons[EntityType.COUNTRY_OR_CONTINENT]
        return frozenset(lex.get(n.strip().lower(), n.strip().lower()) for n in names)

    include: dict[EntityType, frozenset] = {}
    exclude: dict[EntityType, frozenset] = {}
    for target, raw, mapper in (
        (include, genre, genre_ids),
        (exclude, not_genre, genre_ids),
    ):
        if raw:
            target[EntityType.GENRE] = mapper(raw)
    for target, raw in ((include, person), (exclude, not_person)):
        if raw:
            target[EntityType.PERSON] = _collect(raw)
    for target, raw in ((include, country), (exclude, not_country)):
        if raw:
            target[EntityType.COUNTRY_OR_CONTINENT] = countries(raw)
    for target, raw in ((include, year), (exclude, not_year)):
        if raw:
            target[EntityType.RELEASE_YEAR] = _collect(raw)
    for target, raw in ((include, age), (exclude, not_age)):
        if raw:
            target[EntityType.AUDIENCE_AGE] = ages(raw)
    for target, raw in ((include, keyword), (exclude, not_keyword)):
        if raw:
            target[EntityType.KEYWORD] = _collect(raw)

    q = Query(include=include, exclude=exclude, limit=limit)
    for movie in execute(q, store):
        click.echo(
            json.dumps(
                {
                    "id": movie.id,
                    "title": movie.title,
                    "year": movie.release_year,
                    "rating": movie.quality_rating,
                },
                sort_keys=True,
            )
        )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def chat(config_path: Optional[str]) -> None:
    """Interactive terminal conversation; 'quit' exits."""
    settings = load_settings(config_path)
    store = ingest(settings.resolve_movies_path())
    lexicons = settings.resolve_lexicons()
    provider = BuiltinProvider(lexicons, known_people=store.person_names())
    deps = BotDeps(provider=provider, lexicons=lexicons, store=store)
    session = DialogSession(deps, settings.dialog)
    click.echo(f"bot> {session.greeting()}")
    while True:
        try:
            line = input("you> ")
        except EOFError:
            break
        text = line.strip()
        if not text:
            click.echo("bot> I didn't catch that - say something, or 'quit' to leave.")
            continue
        if text.lower() in ("quit", "exit"):
            click.echo("bot> Bye!")
            break
        turn = session.step(text)
        click.echo(f"bot> {turn.utterance}")


def _persona_from_json(data: dict) -> Persona:
    propensities = {
        EntityType.from_key(k): float(v) for k, v in data.get("skip_propensity", {}).items()
    }
    order = tuple(
        EntityType.from_key(k) for k in data.get("order_preference", [t.key for t in ENTITY_TYPES])
    )
    rules = tuple(
        CorrelationRule(
            kind=r["kind"],
            source=EntityType.from_key(r["source"]),
            target=EntityType.from_key(r["target"]),
            prob=float(r.get("prob", 1.0)),
        )
        for r in data.get("correlations", [])
    )
    return Persona(
        name=str(data.get("name", "persona")),
        skip_propensity=propensities,
        order_preference=order,
        correlations=rules,
        volunteer_prob=float(data.get("volunteer_prob", 0.0)),
    )


DEFAULT_PERSONAS = [
    Persona(
        "curious",
        skip_propensity={t: 0.2 for t in ENTITY_TYPES},
        volunteer_prob=0.3,
    ),
    Persona(
        "terse",
        skip_propensity={
            EntityType.AUDIENCE_AGE: 0.8,
            EntityType.GENRE: 0.1,
            EntityType.KEYWORD: 0.8,
            EntityType.COUNTRY_OR_CONTINENT: 0.7,
            EntityType.PERSON: 0.4,
            EntityType.RELEASE_YEAR: 0.6,
        },
    ),
]


@main.command("simulate")
@click.option("--seed", type=int, default=0)
@click.option("--conversations", type=int, default=50)
@click.option("--model", type=click.Choice([m.value for m in EstimatorModel if m.value != "value_aware"]), default="intra_type")
@click.option("--personas", "personas_path", type=click.Path(exists=True), default=None,
              help="JSON list of persona definitions.")
@click.option("--direct", is_flag=True, help="Bypass the NLU, drive the estimators directly.")
@click.option("--adaptive-bias", is_flag=True, help="Feed skip estimates back into extraction scores.")
@click.option("--bias-alpha", type=float, default=0.4)
@click.option("--report", "report_path", type=click.Path(), default=None, help="Write the JSON report here.")
def simulate_cmd(seed, conversations, model, personas_path, direct, adaptive_bias, bias_alpha, report_path) -> None:
    """Run scripted personas against the engine and report estimator quality."""
    if personas_path:
        with open(personas_path, encoding="utf-8") as fh:
            personas = [_persona_from_json(p) for p in json.load(fh)]
    else:
        personas = DEFAULT_PERSONAS
    from .model import EstimatorConfig

    dialog = DialogConfig(
        adaptive_score_bias=adaptive_bias,
        estimator=EstimatorConfig(bias_alpha=bias_alpha),
    )
    opts = SimulationOptions(
        conversations_per_persona=conversations,
        model=EstimatorModel(model),
        dialog=dialog,
        direct=direct,
    )
    report = simulate(personas, seed, opts)
    blob = json.dumps(report, sort_keys=True, indent=2)
    if report_path:
        Path(report_path).write_text(blob + "\n", encoding="utf-8")
        click.echo(f"report written to {report_path}")
    _print_table(report)


def _print_table(report: dict) -> None:
    for persona in report["personas"]:
        click.echo(f"persona {persona['name']} ({persona['conversations']} conversations)")
        click.echo(f"  {'type':<22}{'propensity':>11}{'empirical':>11}{'final p':>9}")
        for t in ENTITY_TYPES:
            k = t.key
            click.echo(
                f"  {k:<22}{persona['propensities'][k]:>11.2f}"
                f"{persona['empirical_skip_rate'][k]:>11.2f}"
                f"{persona['final_intra_estimates'][k]:>9.2f}"
            )
        if persona["brier"]:
            parts = ", ".join(f"{m}={v:.4f}" for m, v in sorted(persona["brier"].items()))
            click.echo(f"  brier: {parts}")


if __name__ == "__main__":
    main()
