import json

import pytest
from hypothesis import given, strategies as st

from bpliveness.events import (
    ALL_EVENTS,
    NO_EVENTS,
    STUTTER,
    Event,
    EventSet,
    canonical_events,
)

scalars = st.one_of(st.booleans(), st.integers(-50, 50), st.text(max_size=6))
attr_dicts = st.dictionaries(st.text(min_size=1, max_size=4), scalars, max_size=3)
events = st.builds(lambda n, a: Event(n, a), st.text(min_size=1, max_size=5), attr_dicts)


def test_equality_ignores_attr_order():
    assert Event("Move", dir="up", speed=2) == Event("Move", speed=2, dir="up")
    assert hash(Event("Move", dir="up")) == hash(Event("Move", {"dir": "up"}))


def test_events_are_immutable():
    e = Event("x", k=1)
    with pytest.raises(AttributeError):
        e.name = "y"


def test_attr_access():
    e = Event("Push", box=2, dir="left")
    assert e["box"] == 2
    assert e.get("dir") == "left"
    assert e.get("missing") is False
    assert e.attrs == {"box": 2, "dir": "left"}


def test_str_forms():
    assert str(Event("Tick")) == "Tick"
    assert str(Event("Approaching", railway="Freight")) == "Approaching(Freight)"
    assert str(Event("Move", dir="up", steps=2)) == "Move(dir=up, steps=2)"


def test_sort_key_orders_by_name_then_attrs():
    evs = [Event("b"), Event("a", n=2), Event("a", n=1), Event("a")]
    assert canonical_events(evs) == [Event("a"), Event("a", n=1), Event("a", n=2), Event("b")]


def test_sort_key_mixed_value_types_do_not_collide():
    # bool/int/str values sort by type rank instead of raising
    evs = [Event("e", v="1"), Event("e", v=1), Event("e", v=True)]
    ordered = canonical_events(evs)
    assert [e["v"] for e in ordered] == [True, 1, "1"]


def test_canonical_events_deduplicates():
    assert canonical_events([Event("a"), Event("a")]) == [Event("a")]


@given(events)
def test_json_round_trip(e):
    assert Event.from_json(json.loads(json.dumps(e.to_json()))) == e


@given(st.lists(events, max_size=8))
def test_canonical_is_idempotent(evs):
    once = canonical_events(evs)
    assert canonical_events(once) == once


def test_explicit_set_membership_and_iteration():
    s = EventSet.of(Event("a"), Event("b"), Event("a"))
    assert Event("a") in s
    assert Event("c") not in s
    assert list(s) == [Event("a"), Event("b")]
    assert len(s) == 2


def test_predicate_set():
    moves = EventSet.where(lambda e: e.name == "Move", "any move")
    assert Event("Move", dir="up") in moves
    assert Event("Stop") not in moves
    assert not moves.is_explicit


def test_all_and_none():
    assert Event("anything") in ALL_EVENTS
    assert Event("anything") not in NO_EVENTS


def test_stutter_is_reserved():
    assert STUTTER.name == "STUTTER"
    assert STUTTER.attrs == {}
