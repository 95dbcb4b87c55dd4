"""History store: aggregation, snapshots, the estimate cache, the trie."""

import datetime as dt
import json
import threading

import pytest

from conftest import EPOCH, make_record
from slotforge.estimators import EstimatorModel
from slotforge.history import (
    HistoryStore,
    context_key,
    metadata_key,
    parse_metadata_key,
)
from slotforge.model import AssumptionRecord, EntityType, EstimatorConfig

P = EntityType.PERSON


class FakeClock:
    def __init__(self, start=EPOCH):
        self.now = start

    def __call__(self):
        return self.now

    def advance(self, seconds):
        self.now += dt.timedelta(seconds=seconds)


def test_metadata_key_ignores_timestamp_and_user():
    r1 = make_record([True] * 6, ts=EPOCH, user="a")
    r2 = make_record([True] * 6, ts=EPOCH + dt.timedelta(days=1), user="b")
    assert metadata_key(r1) == metadata_key(r2)


def test_metadata_key_round_trip():
    rec = make_record([True, False, True, False, True, False], [0, 0, 1, 1, 2, 2])
    skips, orders = parse_metadata_key(metadata_key(rec))
    assert skips == rec.skips
    assert orders == rec.orders


def test_record_counts():
    store = HistoryStore()
    rec = make_record([True] * 6)
    store.record(rec)
    store.record(rec)
    assert store.counts()[metadata_key(rec)] == 2
    assert len(store) == 2


def test_cross_user_aggregation():
    store = HistoryStore()
    store.record(make_record([True] * 6, user="alice"))
    store.record(make_record([True] * 6, user="bob"))
    assert list(store.counts().values()) == [2]


def test_count_conservation_under_concurrency(tmp_path):
    store = HistoryStore(tmp_path)
    rec = make_record([False] * 6)

    def worker():
        for _ in range(50):
            store.record(rec)

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sum(store.counts().values()) == 400
    lines = (tmp_path / "metadata.jsonl").read_text().strip().splitlines()
    assert len(lines) == 400


def test_persistence_reload(tmp_path):
    store = HistoryStore(tmp_path)
    store.record(make_record([True] * 6, ts=EPOCH, user="u1"))
    store.record(make_record([False] * 6, ts=EPOCH + dt.timedelta(hours=1), user="u2"))
    reloaded = HistoryStore(tmp_path)
    assert len(reloaded) == 2
    assert reloaded.counts() == store.counts()


def test_snapshot_user_scope():
    store = HistoryStore()
    for i in range(3):
        store.record(make_record([True] * 6, ts=EPOCH + dt.timedelta(minutes=i), user="u1"))
    store.record(make_record([False] * 6, ts=EPOCH, user="u2"))
    view = store.history_snapshot(10, user_id="u1")
    assert len(view) == 3
    assert all(r.user_id == "u1" for r in view)


def test_snapshot_global_merges_by_recency():
    store = HistoryStore()
    for i in range(7):
        store.record(make_record([True] * 6, ts=EPOCH + dt.timedelta(minutes=2 * i), user="a"))
    for i in range(8):
        store.record(make_record([False] * 6, ts=EPOCH + dt.timedelta(minutes=2 * i + 1), user="b"))
    view = store.history_snapshot(10)
    assert len(view) == 10
    times = [r.timestamp for r in view]
    assert times == sorted(times, reverse=True)


def test_snapshot_empty():
    assert len(HistoryStore().history_snapshot(10)) == 0


# --- estimate cache -------------------------------------------------------------

CFG = EstimatorConfig()
ASSUMED = {EntityType.GENRE: AssumptionRecord(skipped=False, order=0)}


def _seed(store, n=6):
    for i in range(n):
        store.record(
            make_record([i % 2 == 0] * 6, ts=EPOCH + dt.timedelta(minutes=i), user="u")
        )


def test_cache_hit_skips_recompute():
    clock = FakeClock()
    store = HistoryStore(clock=clock)
    _seed(store)
    first = store.estimate_with_cache(P, ASSUMED, EstimatorModel.WEIGHTED_NN, CFG, 600)
    clock.advance(10)
    second = store.estimate_with_cache(P, ASSUMED, EstimatorModel.WEIGHTED_NN, CFG, 600)
    assert first.p_hat == second.p_hat
    assert store.computations == 1


def test_cache_zero_max_age_always_recomputes():
    clock = FakeClock()
    store = HistoryStore(clock=clock)
    _seed(store)
    store.estimate_with_cache(P, ASSUMED, EstimatorModel.WEIGHTED_NN, CFG, 0)
    store.estimate_with_cache(P, ASSUMED, EstimatorModel.WEIGHTED_NN, CFG, 0)
    assert store.computations == 2


def test_cache_stale_entry_recomputed_and_refreshed(tmp_path):
    clock = FakeClock()
    store = HistoryStore(tmp_path, clock=clock)
    _seed(store)
    store.estimate_with_cache(P, ASSUMED, EstimatorModel.WEIGHTED_NN, CFG, 60)
    clock.advance(120)
    store.estimate_with_cache(P, ASSUMED, EstimatorModel.WEIGHTED_NN, CFG, 60)
    assert store.computations == 2
    lines = (tmp_path / "estimates.jsonl").read_text().strip().splitlines()
    entries = [json.loads(l) for l in lines]
    assert len(entries) == 2
    assert entries[1]["ts"] > entries[0]["ts"]


def test_cache_idempotent_for_fixed_contents():
    clock = FakeClock()
    store = HistoryStore(clock=clock)
    _seed(store)
    a = store.estimate_with_cache(P, ASSUMED, EstimatorModel.NN, CFG, float("inf"))
    clock.advance(10**6)
    b = store.estimate_with_cache(P, ASSUMED, EstimatorModel.NN, CFG, float("inf"))
    assert a.p_hat == b.p_hat
    assert store.computations == 1


def test_cache_key_distinguishes_context():
    k1 = context_key(P, ASSUMED, EstimatorModel.NN, CFG)
    k2 = context_key(P, {}, EstimatorModel.NN, CFG)
    k3 = context_key(P, ASSUMED, EstimatorModel.WEIGHTED_NN, CFG)
    k4 = context_key(P, ASSUMED, EstimatorModel.NN, EstimatorConfig(weight_alpha=2.0))
    assert len({k1, k2, k3, k4}) == 4


def test_cache_empty_history_uses_prior():
    store = HistoryStore()
    est = store.estimate_with_cache(P, {}, EstimatorModel.NN, CFG, 600)
    assert est.p_hat == pytest.approx(0.5)


# --- trie compaction ---------------------------------------------------------------

def test_trie_round_trips_counts():
    store = HistoryStore()
    records = [
        make_record([False, True, True, True, True, True], [0, 1, 1, 1, 1, 1]),
        make_record([False, True, True, True, True, True], [0, 1, 1, 1, 1, 1]),
        make_record([False, False, True, True, True, True], [0, 1, 2, 2, 2, 2]),
        make_record([True] * 6, [0] * 6),
    ]
    for r in records:
        store.record(r)
    assert store.trie_counts() == store.counts()


def test_trie_levels_are_batches():
    store = HistoryStore()
    store.record(make_record([False, False, True, True, True, True], [0, 0, 2, 2, 2, 2]))
    trie = store.metadata_trie()
    # one root child: the first input assumed types 0 and 1 together
    (batch, node), = trie["children"].items()
    assert batch == ((0, False), (1, False))
    assert node["count"] == 0  # conversation continues to the terminal batch
    (leaf,) = node["children"].values()
    assert leaf["count"] == 1
