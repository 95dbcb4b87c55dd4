"""CLI entry points via click's test runner."""

import json
import subprocess
import sys
import time

import httpx
import pytest
from click.testing import CliRunner

from slotforge.cli import main
from slotforge.config import bundled_movies_path
from slotforge.model import EntityType
from slotforge.moviedb import Query, execute


@pytest.fixture
def runner():
    return CliRunner()


def test_ingest_creates_loadable_store(runner, tmp_path):
    result = runner.invoke(
        main,
        ["ingest", "--input", str(bundled_movies_path()), "--out", str(tmp_path / "store")],
    )
    assert result.exit_code == 0, result.output
    assert "loaded 200 movies" in result.output
    assert (tmp_path / "store" / "movies.jsonl").exists()


def test_query_matches_library_execute(runner, store):
    result = runner.invoke(
        main,
        ["query", "--genre", "comedy", "--not-country", "france", "--limit", "5"],
    )
    assert result.exit_code == 0, result.output
    rows = [json.loads(line) for line in result.output.strip().splitlines()]
    expected = execute(
        Query(
            include={EntityType.GENRE: frozenset({1})},
            exclude={EntityType.COUNTRY_OR_CONTINENT: frozenset({"france"})},
            limit=5,
        ),
        store,
    )
    assert [r["id"] for r in rows] == [m.id for m in expected]


def test_query_person_flag(runner):
    result = runner.invoke(main, ["query", "--person", "nataly portman", "--limit", "3"])
    assert result.exit_code == 0
    rows = [json.loads(line) for line in result.output.strip().splitlines()]
    assert rows, "phonetic person match should find the Portman titles"


def test_query_unknown_genre_fails_cleanly(runner):
    result = runner.invoke(main, ["query", "--genre", "zzz"])
    assert result.exit_code != 0
    assert "unknown genre" in result.output


def test_chat_transcript_with_typo_finds_movie(runner):
    lines = ["movies with Nataly Portman"] + ["doesn't matter"] * 5 + ["that's all", "quit"]
    result = runner.invoke(main, ["chat"], input="\n".join(lines) + "\n")
    assert result.exit_code == 0, result.output
    assert "Glass Meridian" in result.output  # top-rated Portman title
    assert "Bye!" in result.output


def test_chat_empty_line_reprompts(runner):
    result = runner.invoke(main, ["chat"], input="\n\nquit\n")
    assert result.exit_code == 0
    assert result.output.count("didn't catch") == 2


def test_simulate_report_roundtrip(runner, tmp_path):
    report_path = tmp_path / "report.json"
    args = ["simulate", "--seed", "3", "--conversations", "6", "--report", str(report_path)]
    first = runner.invoke(main, args)
    assert first.exit_code == 0, first.output
    blob1 = report_path.read_bytes()
    second = runner.invoke(main, args)
    assert second.exit_code == 0
    assert report_path.read_bytes() == blob1  # bit-reproducible
    report = json.loads(blob1)
    assert {p["name"] for p in report["personas"]} == {"curious", "terse"}
    assert "persona curious" in first.output


def test_simulate_direct_flag(runner, tmp_path):
    report_path = tmp_path / "direct.json"
    result = runner.invoke(
        main,
        ["simulate", "--seed", "1", "--conversations", "4", "--direct", "--report", str(report_path)],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(report_path.read_text())
    assert report["direct"] is True


def test_serve_binds_and_answers_health():
    port = 18733
    proc = subprocess.Popen(
        [sys.executable, "-m", "slotforge.cli", "serve", "--port", str(port)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        deadline = time.monotonic() + 30
        body = None
        while time.monotonic() < deadline:
            try:
                resp = httpx.get(f"http://127.0.0.1:{port}/health", timeout=1.0)
                if resp.status_code == 200:
                    body = resp.json()
                    break
            except httpx.HTTPError:
                time.sleep(0.25)
        assert body is not None, "server never answered /health"
        assert body["status"] == "ok"
        assert body["movie_count"] == 200
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_simulate_personas_file(runner, tmp_path):
    personas = [
        {
            "name": "custom",
            "skip_propensity": {"genre": 0.0, "person": 1.0},
            "correlations": [
                {"kind": "tie", "source": "person", "target": "release_year"}
            ],
        }
    ]
    path = tmp_path / "personas.json"
    path.write_text(json.dumps(personas))
    report_path = tmp_path / "report.json"
    result = runner.invoke(
        main,
        ["simulate", "--seed", "2", "--conversations", "5", "--personas", str(path),
         "--direct", "--report", str(report_path)],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(report_path.read_text())
    entry = report["personas"][0]
    assert entry["name"] == "custom"
    assert entry["empirical_skip_rate"]["person"] == 1.0
    assert entry["empirical_skip_rate"]["release_year"] == 1.0
