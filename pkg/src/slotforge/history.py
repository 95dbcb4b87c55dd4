"""Durable skip/order history shared across users, plus an estimate cache.

Two append-only JSONL files back the store: metadata.jsonl (one finished
conversation per line) and estimates.jsonl (computed skip probabilities
with timestamps). An in-memory index is rebuilt on startup. Entity values
never enter this store; only skip flags, orders and timestamps do.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import threading
from collections import Counter
from pathlib import Path
from typing import Callable, Mapping, Optional, Union

from .estimators import (
    Assumptions,
    EstimatorModel,
    HistoryView,
    SkipEstimate,
    estimate_skip,
)
from .model import ConversationRecord, EntityType, EstimatorConfig

logger = logging.getLogger(__name__)

Clock = Callable[[], dt.datetime]


def _utcnow() -> dt.datetime:
    return dt.datetime.now(dt.timezone.utc)


class HistoryWriteError(RuntimeError):
    """Raised when persisting fails; the conversation itself is unaffected."""


def metadata_key(record: ConversationRecord) -> str:
    """Canonical serialization of (skips, orders); excludes user and time."""
    return json.dumps(
        {"orders": list(record.orders), "skips": list(record.skips)},
        sort_keys=True,
        separators=(",", ":"),
    )


def parse_metadata_key(key: str) -> tuple[tuple[bool, ...], tuple[int, ...]]:
    data = json.loads(key)
    return tuple(bool(s) for s in data["skips"]), tuple(int(o) for o in data["orders"])


def config_digest(config: EstimatorConfig) -> str:
    blob = json.dumps(vars(config), sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def context_key(
    i: EntityType,
    assumptions: Assumptions,
    model: EstimatorModel,
    config: EstimatorConfig,
) -> str:
    """Canonical cache key for one estimation context."""
    assumed = sorted(
        (t.key, bool(a.skipped), int(a.order)) for t, a in assumptions.items()
    )
    return json.dumps(
        {
            "assumed": [list(entry) for entry in assumed],
            "config": config_digest(config),
            "i": i.key,
            "model": model.value,
        },
        sort_keys=True,
        separators=(",", ":"),
    )


class HistoryStore:
    """Aggregated conversation metadata plus the timestamped estimate cache.

    directory=None keeps everything in memory (tests, default server). All
    mutation goes through one lock, so concurrent record() calls serialize
    and estimate_with_cache is linearizable per context key.
    """

    def __init__(
        self,
        directory: Optional[Union[str, Path]] = None,
        clock: Clock = _utcnow,
    ) -> None:
        self._lock = threading.Lock()
        self._clock = clock
        self._records: list[ConversationRecord] = []  # append order = arrival order
        self._counts: Counter[str] = Counter()
        self._estimates: dict[str, tuple[float, dt.datetime]] = {}
        self.computations = 0  # estimate cache misses, observable in tests
        self._dir: Optional[Path] = None
        if directory is not None:
            self._dir = Path(directory)
            self._dir.mkdir(parents=True, exist_ok=True)
            self._load()

    # persistence ----------------------------------------------------------

    @property
    def _metadata_path(self) -> Optional[Path]:
        return self._dir / "metadata.jsonl" if self._dir else None

    @property
    def _estimates_path(self) -> Optional[Path]:
        return self._dir / "estimates.jsonl" if self._dir else None

    def _load(self) -> None:
        if self._metadata_path and self._metadata_path.exists():
            with open(self._metadata_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        data = json.loads(line)
                        rec = ConversationRecord(
                            skips=tuple(bool(s) for s in data["skips"]),
                            orders=tuple(int(o) for o in data["orders"]),
                            timestamp=dt.datetime.fromisoformat(data["ts"]),
                            user_id=data.get("user"),
                        )
                    except (KeyError, ValueError, TypeError) as exc:
                        logger.warning("skipping bad metadata line: %s", exc)
                        continue
                    self._records.append(rec)
                    self._counts[metadata_key(rec)] += 1
        if self._estimates_path and self._estimates_path.exists():
            with open(self._estimates_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        data = json.loads(line)
                        ts = dt.datetime.fromisoformat(data["ts"])
                        self._estimates[data["context_key"]] = (float(data["p"]), ts)
                    except (KeyError, ValueError, TypeError) as exc:
                        logger.warning("skipping bad estimate line: %s", exc)

    # recording ------------------------------------------------------------

    def record(self, record: ConversationRecord) -> None:
        """Aggregate one finished conversation and append it to the log."""
        with self._lock:
            self._records.append(record)
            self._counts[metadata_key(record)] += 1
            path = self._metadata_path
            if path is None:
                return
            line = json.dumps(
                {
                    "skips": list(record.skips),
                    "orders": list(record.orders),
                    "ts": record.timestamp.isoformat(),
                    "user": record.user_id,
                },
                sort_keys=True,
            )
            try:
                with open(path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
            except OSError as exc:
                raise HistoryWriteError(str(exc)) from exc

    def counts(self) -> Mapping[str, int]:
        with self._lock:
            return dict(self._counts)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    # views ----------------------------------------------------------------

    def history_snapshot(self, k: int, user_id: Optional[str] = None) -> HistoryView:
        """Newest-first view truncated to k; global scope merges all users."""
        with self._lock:
            records = [r for r in self._records if user_id is None or r.user_id == user_id]
        records.sort(key=lambda r: r.timestamp)
        newest_first = tuple(reversed(records))[:k]
        return HistoryView(newest_first)

    def all_records(self) -> HistoryView:
        with self._lock:
            return HistoryView(tuple(reversed(self._records)))

    # estimate cache ---------------------------------------------------------

    def estimate_with_cache(
        self,
        i: EntityType,
        assumptions: Assumptions,
        model: EstimatorModel,
        config: EstimatorConfig,
        max_age_seconds: float,
    ) -> SkipEstimate:
        """Cached skip estimate over the aggregated cross-user history.

        A cached value younger than max_age_seconds is returned as-is;
        otherwise the estimate is recomputed from the full aggregate and the
        cache entry (and its timestamp) refreshed. Read failures fall back
        to computing; write failures still return the computed value.
        """
        if max_age_seconds < 0:
            raise ValueError("max_age_seconds must be >= 0")
        key = context_key(i, assumptions, model, config)
        with self._lock:
            now = self._clock()
            cached = self._estimates.get(key)
            if cached is not None:
                p, ts = cached
                if (now - ts).total_seconds() < max_age_seconds:
                    return SkipEstimate(p, model)
            history = tuple(reversed(self._records))
            est = estimate_skip(i, history, assumptions, config, model)
            self.computations += 1
            self._estimates[key] = (est.p_hat, now)
            path = self._estimates_path
            if path is not None:
                line = json.dumps(
                    {"context_key": key, "p": est.p_hat, "ts": now.isoformat()},
                    sort_keys=True,
                )
                try:
                    with open(path, "a", encoding="utf-8") as fh:
                        fh.write(line + "\n")
                except OSError as exc:
                    logger.warning("estimate cache write failed: %s", exc)
            return est

    # optional compact representation ---------------------------------------

    def metadata_trie(self) -> dict:
        """Counted trie of assumption batches, an alternative to the flat map.

        Each level of the trie is one user input: the set of (type, skipped)
        pairs assumed by that input, recovered from the shared order values.
        Node counts tally conversations whose full batch sequence ends there.
        """
        root: dict = {"count": 0, "children": {}}
        with self._lock:
            counts = dict(self._counts)
        for key, n in counts.items():
            skips, orders = parse_metadata_key(key)
            node = root
            for batch in _batches(skips, orders):
                node = node["children"].setdefault(batch, {"count": 0, "children": {}})
            node["count"] += n
        return root

    def trie_counts(self) -> Counter:
        """Expand the trie back into the flat metadata-key counter."""
        out: Counter = Counter()

        def walk(node: dict, path: tuple) -> None:
            if node["count"]:
                skips, orders = _batches_to_record(path)
                out[
                    json.dumps(
                        {"orders": list(orders), "skips": list(skips)},
                        sort_keys=True,
                        separators=(",", ":"),
                    )
                ] += node["count"]
            for batch, child in node["children"].items():
                walk(child, path + (batch,))

        walk(self.metadata_trie(), ())
        return out


def _batches(skips: tuple[bool, ...], orders: tuple[int, ...]) -> tuple:
    """Group type positions by their shared order value, ascending."""
    by_order: dict[int, list[tuple[int, bool]]] = {}
    for pos, (s, o) in enumerate(zip(skips, orders)):
        by_order.setdefault(o, []).append((pos, s))
    return tuple(
        tuple(sorted(by_order[o])) for o in sorted(by_order)
    )


def _batches_to_record(path: tuple) -> tuple[tuple[bool, ...], tuple[int, ...]]:
    n = sum(len(batch) for batch in path)
    skips = [False] * n
    orders = [0] * n
    placed = 0
    for batch in path:
        for pos, s in batch:
            skips[pos] = s
            orders[pos] = placed
        placed += len(batch)
    return tuple(skips), tuple(orders)
