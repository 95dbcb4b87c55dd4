"""HTTP session service: endpoints, schemas, serialization contracts."""

import json
import threading
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import pytest
from fastapi.testclient import TestClient
from jsonschema import validate

from slotforge.config import ServiceSettings
from slotforge.providers import BuiltinProvider
from slotforge.service import create_app


def _schema(name):
    ref = resources.files("slotforge.data.schemas") / f"{name}.schema.json"
    return json.loads(ref.read_text(encoding="utf-8"))


TURN_SCHEMA = _schema("message_turn")
CREATE_SCHEMA = _schema("session_create")
STATE_SCHEMA = _schema("session_state")
HEALTH_SCHEMA = _schema("health")


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def _new_session(client):
    resp = client.post("/v1/sessions")
    assert resp.status_code == 201
    validate(resp.json(), CREATE_SCHEMA)
    return resp.json()["session_id"]


def test_create_session(client):
    body = client.post("/v1/sessions").json()
    assert "movie" in body["greeting"].lower()


def test_sessions_are_distinct(client):
    assert _new_session(client) != _new_session(client)


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    validate(body, HEALTH_SCHEMA)
    assert body["status"] == "ok"
    assert body["movie_count"] == 200


def test_health_degraded_when_store_missing(tmp_path):
    settings = ServiceSettings(movies_path=str(tmp_path / "missing.jsonl"))
    with TestClient(create_app(settings)) as c:
        body = c.get("/health").json()
        assert body["status"] == "degraded"
        assert c.post("/v1/sessions").status_code == 503


def test_message_flow_updates_state(client):
    sid = _new_session(client)
    resp = client.post(f"/v1/sessions/{sid}/messages", json={"text": "I want a comedy movie"})
    assert resp.status_code == 200
    turn = resp.json()
    validate(turn, TURN_SCHEMA)
    assert turn["kind"] == "ask"
    assert turn["estimates"]
    assert turn["assumed"]["genre"] == {"skipped": False, "order": 0}
    state = client.get(f"/v1/sessions/{sid}/state").json()
    validate(state, STATE_SCHEMA)
    assert state["slots"]["genre"]["values"] == {"1": pytest.approx(0.9)}


def test_results_payload_shape(client):
    sid = _new_session(client)
    client.post(f"/v1/sessions/{sid}/messages", json={"text": "movies with Natalie Portman"})
    turn = None
    for _ in range(6):
        turn = client.post(f"/v1/sessions/{sid}/messages", json={"text": "doesn't matter"}).json()
        validate(turn, TURN_SCHEMA)
        if turn["kind"] == "results":
            break
    assert turn["kind"] == "results"
    assert turn["results"], "expected at least one Portman movie"
    for row in turn["results"]:
        assert set(row) == {"id", "title", "year", "rating"}


def test_empty_text_rejected(client):
    sid = _new_session(client)
    for text in ("", "   "):
        resp = client.post(f"/v1/sessions/{sid}/messages", json={"text": text})
        assert resp.status_code == 422


def test_unknown_session_404(client):
    assert client.post("/v1/sessions/nope/messages", json={"text": "x"}).status_code == 404
    assert client.get("/v1/sessions/nope/state").status_code == 404


def test_expired_session_404():
    settings = ServiceSettings(session_ttl_seconds=0.0)
    with TestClient(create_app(settings)) as c:
        sid = c.post("/v1/sessions").json()["session_id"]
        import time

        time.sleep(0.01)
        resp = c.post(f"/v1/sessions/{sid}/messages", json={"text": "hello"})
        assert resp.status_code == 404


class BlockingProvider(BuiltinProvider):
    """Blocks inside parse() when told to, so tests can hold a session busy."""

    def __init__(self):
        super().__init__()
        self.gate = threading.Event()
        self.entered = threading.Event()

    def parse(self, text):
        if text == "__block__":
            self.entered.set()
            assert self.gate.wait(timeout=10)
        return super().parse(text)


def test_concurrent_double_post_yields_exactly_one_409():
    provider = BlockingProvider()
    app = create_app(provider=provider)
    with TestClient(app) as client:
        sid = _new_session(client)
        codes = []

        def slow():
            codes.append(client.post(f"/v1/sessions/{sid}/messages", json={"text": "__block__"}).status_code)

        t = threading.Thread(target=slow)
        t.start()
        assert provider.entered.wait(timeout=10)
        fast = client.post(f"/v1/sessions/{sid}/messages", json={"text": "hello"})
        provider.gate.set()
        t.join(timeout=10)
        assert fast.status_code == 409
        assert codes == [200]


def test_hundred_parallel_sessions_no_cross_contamination():
    app = create_app()
    genres = ["comedy", "action", "horror", "drama", "thriller", "romance"]
    years = ["1999", "2015", "1982", "2008", "1975", "1964"]
    with TestClient(app) as client:
        sids = [_new_session(client) for _ in range(100)]

        def script(i):
            sid = sids[i]
            genre = genres[i % len(genres)]
            year = years[i % len(years)]
            r1 = client.post(f"/v1/sessions/{sid}/messages", json={"text": f"I want a {genre} movie"})
            r2 = client.post(f"/v1/sessions/{sid}/messages", json={"text": year})
            assert r1.status_code == 200 and r2.status_code == 200
            return i

        with ThreadPoolExecutor(max_workers=16) as pool:
            list(pool.map(script, range(100)))

        lexicon = {"comedy": 1, "action": 2, "horror": 3, "drama": 4, "thriller": 5, "romance": 6}
        for i, sid in enumerate(sids):
            state = client.get(f"/v1/sessions/{sid}/state").json()
            expected_genre = str(lexicon[genres[i % len(genres)]])
            assert set(state["slots"]["genre"]["values"]) == {expected_genre}, f"session {i}"
            year_values = set(state["slots"]["release_year"]["values"])
            assert year_values == {years[i % len(years)]}, f"session {i}"


def test_remote_provider_mode_wiring(monkeypatch):
    """provider.mode=remote routes parsing through the configured endpoint."""
    import httpx

    from slotforge.config import ProviderSettings

    seen = {}

    def fake_post(url, **kwargs):
        seen["url"] = url
        seen["text"] = kwargs["json"]["text"]
        return httpx.Response(
            200,
            json={
                "intent": "specify",
                "score": 0.9,
                "entities": [
                    {"type": "genre", "value": "comedy", "score": 0.9, "start": 9, "end": 15}
                ],
            },
        )

    monkeypatch.setattr(httpx, "post", fake_post)
    settings = ServiceSettings(
        provider=ProviderSettings(mode="remote", url="http://parser.local/parse")
    )
    with TestClient(create_app(settings)) as client:
        sid = _new_session(client)
        turn = client.post(
            f"/v1/sessions/{sid}/messages", json={"text": "I want a comedy movie"}
        ).json()
    assert seen["url"] == "http://parser.local/parse"
    assert seen["text"] == "I want a comedy movie"
    assert turn["assumed"]["genre"] == {"skipped": False, "order": 0}
