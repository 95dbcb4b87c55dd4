import datetime as dt

import pytest

from slotforge.config import bundled_movies_path
from slotforge.lexicons import default_lexicons
from slotforge.model import ENTITY_TYPES, ConversationRecord
from slotforge.moviedb import ingest
from slotforge.providers import BuiltinProvider

EPOCH = dt.datetime(2020, 1, 1, tzinfo=dt.timezone.utc)


def make_record(skips, orders=None, *, ts=None, user=None) -> ConversationRecord:
    """Record builder: pads/truncates to the six types for terse fixtures."""
    skips = tuple(bool(s) for s in skips)
    if len(skips) != len(ENTITY_TYPES):
        skips = skips + (False,) * (len(ENTITY_TYPES) - len(skips))
    if orders is None:
        orders = (0,) * len(ENTITY_TYPES)
    else:
        orders = tuple(int(o) for o in orders)
        if len(orders) != len(ENTITY_TYPES):
            orders = orders + (0,) * (len(ENTITY_TYPES) - len(orders))
    return ConversationRecord(skips, orders, ts or EPOCH, user)


@pytest.fixture(scope="session")
def store():
    return ingest(bundled_movies_path())


@pytest.fixture(scope="session")
def lexicons():
    return default_lexicons()


@pytest.fixture(scope="session")
def provider(store, lexicons):
    return BuiltinProvider(lexicons, known_people=store.person_names())
