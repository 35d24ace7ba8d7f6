"""Events and event sets: the vocabulary b-threads synchronize over.

Events are immutable values identified by a name plus a finite map of
scalar attributes.  Event sets come in two kinds: explicit finite sets
(enumerable, used for requests and most waits) and pure predicates
(used for attribute-level waits and blocks).
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Mapping

Scalar = bool | int | str

#: Reserved event name for the self-loop injected at deadlock states.
#: User alphabets must not contain it.
STUTTER_NAME = "STUTTER"

_TYPE_RANK = {bool: 0, int: 1, str: 2}


def _value_key(v: Scalar) -> tuple[int, object]:
    # bool is an int subclass; test it first so True/False rank separately.
    if isinstance(v, bool):
        return (0, int(v))
    if isinstance(v, int):
        return (1, v)
    if isinstance(v, str):
        return (2, v)
    raise TypeError(f"event attribute values must be bool/int/str, got {type(v).__name__}")


class Event:
    """A named event with attributes; equality covers name and all attributes."""

    __slots__ = ("name", "_items", "_hash", "_key")

    def __init__(self, name: str, attrs: Mapping[str, Scalar] | None = None, **kw: Scalar):
        if not isinstance(name, str) or not name:
            raise TypeError("event name must be a non-empty string")
        merged: dict[str, Scalar] = dict(attrs) if attrs else {}
        merged.update(kw)
        items = tuple(sorted(merged.items()))
        for k, v in items:
            if not isinstance(k, str):
                raise TypeError("event attribute keys must be strings")
            _value_key(v)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_items", items)
        # hash/eq go through the type-ranked key so True and 1 stay distinct
        object.__setattr__(self, "_hash", hash((name, tuple((k, *_value_key(v)) for k, v in items))))
        object.__setattr__(self, "_key", (name, tuple((k, *_value_key(v)) for k, v in items)))

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("Event is immutable")

    @property
    def attrs(self) -> dict[str, Scalar]:
        return dict(self._items)

    def get(self, key: str, default: Scalar = False) -> Scalar:
        for k, v in self._items:
            if k == key:
                return v
        return default

    def __getitem__(self, key: str) -> Scalar:
        for k, v in self._items:
            if k == key:
                return v
        raise KeyError(key)

    def sort_key(self):
        """Canonical total order: lexicographic on (name, sorted attrs)."""
        return self._key

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Event)
            and self._hash == other._hash
            and self._key == other._key
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self._items:
            return f"Event({self.name!r})"
        kv = ", ".join(f"{k}={v!r}" for k, v in self._items)
        return f"Event({self.name!r}, {kv})"

    def __str__(self) -> str:
        if not self._items:
            return self.name
        if len(self._items) == 1:
            return f"{self.name}({self._items[0][1]})"
        kv = ", ".join(f"{k}={v}" for k, v in self._items)
        return f"{self.name}({kv})"

    def to_json(self) -> dict:
        return {"name": self.name, "attrs": dict(self._items)}

    @staticmethod
    def from_json(obj: Mapping) -> "Event":
        return Event(obj["name"], obj.get("attrs") or {})


#: The reserved stutter event (attribute-free).
STUTTER = Event(STUTTER_NAME)


def canonical_events(events: Iterable[Event]) -> list[Event]:
    """Deduplicate and sort events into the canonical order."""
    return sorted(dict.fromkeys(events), key=Event.sort_key)


class EventSet:
    """Base class for sets of events; supports membership tests only."""

    is_explicit = False

    def __contains__(self, event: Event) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    @staticmethod
    def of(*events: Event) -> "ExplicitEvents":
        return ExplicitEvents(events)

    @staticmethod
    def where(predicate: Callable[[Event], bool], label: str = "<predicate>") -> "PredicateEvents":
        return PredicateEvents(predicate, label)


class ExplicitEvents(EventSet):
    """A finite, enumerable event set."""

    is_explicit = True
    __slots__ = ("events", "_set")

    def __init__(self, events: Iterable[Event]):
        self.events = tuple(canonical_events(events))
        self._set = frozenset(self.events)

    def __contains__(self, event: Event) -> bool:
        return event in self._set

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __repr__(self) -> str:
        return "{" + ", ".join(str(e) for e in self.events) + "}"


class PredicateEvents(EventSet):
    """An event set defined by a pure, deterministic predicate."""

    __slots__ = ("predicate", "label")

    def __init__(self, predicate: Callable[[Event], bool], label: str = "<predicate>"):
        self.predicate = predicate
        self.label = label

    def __contains__(self, event: Event) -> bool:
        return bool(self.predicate(event))

    def __repr__(self) -> str:
        return f"<events: {self.label}>"


class _AllEvents(EventSet):
    __slots__ = ()

    def __contains__(self, event: Event) -> bool:
        return True

    def __repr__(self) -> str:
        return "<all events>"


#: Matches every event (the catch-all wait / alphabet filter).
ALL_EVENTS = _AllEvents()

#: The empty event set.
NO_EVENTS = ExplicitEvents(())
