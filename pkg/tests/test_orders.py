"""Order-vector enumeration against an independent brute-force oracle.

The oracle enumerates assumption sequences recursively (first block chosen
via itertools.combinations), a different construction from the iterative
frontier walk in the implementation. Cardinalities are additionally checked
against the ordered-Bell recurrence.
"""

import itertools
import math
import time

import pytest

from slotforge.estimators import orders_set

ORDERED_BELL = [1, 1, 3, 13, 75, 541]


def oracle_orders(m: int, offset: int) -> set:
    """Enumerate every sequence of simulated inputs over m items."""
    if m == 0:
        return {()}
    results = set()

    def recurse(remaining: tuple, placed: int, assigned: dict) -> None:
        if not remaining:
            results.add(tuple(offset + assigned[k] for k in range(m)))
            return
        for size in range(1, len(remaining) + 1):
            for block in itertools.combinations(remaining, size):
                nxt = dict(assigned)
                for k in block:
                    nxt[k] = placed
                rest = tuple(x for x in remaining if x not in block)
                recurse(rest, placed + size, nxt)

    recurse(tuple(range(m)), 0, {})
    return results


def fubini(n: int) -> int:
    """Ordered-Bell numbers via the binomial recurrence."""
    a = [1]
    for k in range(1, n + 1):
        a.append(sum(math.comb(k, j) * a[k - j] for j in range(1, k + 1)))
    return a[n]


def test_paper_case_two_remaining_three_assumed():
    assert orders_set(2, 3) == {(3, 4), (4, 3), (3, 3)}


def test_single_remaining():
    for c in range(5):
        assert orders_set(1, c) == {(c,)}


def test_zero_remaining():
    assert orders_set(0, 4) == {()}


def test_cardinalities_and_oracle_match():
    start = time.monotonic()
    for m in range(6):
        got = orders_set(m, 0)
        assert len(got) == ORDERED_BELL[m]
        assert len(got) == fubini(m)
        assert got == oracle_orders(m, 0)
    assert time.monotonic() - start < 10.0


def test_oracle_match_with_offset():
    for m in range(4):
        assert orders_set(m, 3) == oracle_orders(m, 3)


def test_elements_distinct_and_achievable():
    for m in range(1, 6):
        for offset in (0, 2):
            got = orders_set(m, offset)
            assert len(got) == len(set(got))  # set type, but assert intent
            for vec in got:
                assert all(v >= offset for v in vec)
                for v in set(vec):
                    # types ordered strictly before value v must number v-offset
                    assert sum(1 for x in vec if x < v) == v - offset


def test_rejects_negative_arguments():
    with pytest.raises(ValueError):
        orders_set(-1, 0)
    with pytest.raises(ValueError):
        orders_set(2, -1)
