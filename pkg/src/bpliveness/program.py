"""B-thread state machines and their composition into a b-program.

A b-thread is an explicit state machine over hashable local states: a
statement function mapping a local state to its synchronization
statement, and an advance function mapping (local state, event) to the
next local state.  A b-program is a fixed tuple of such threads plus an
explicit event alphabet.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

from .events import ALL_EVENTS, Event, EventSet, NO_EVENTS, STUTTER_NAME, canonical_events

LocalState = Hashable


class ModelError(ValueError):
    """A structural problem with a thread, program, or model input."""


@dataclass(frozen=True)
class SyncStatement:
    """One synchronization point: requested events, waits, blocks, and the
    must-finish label of the state declaring it."""

    request: tuple[Event, ...] = ()
    wait_for: EventSet = NO_EVENTS
    block: EventSet = NO_EVENTS
    must_finish: bool = False

    def __post_init__(self):
        req = (self.request,) if isinstance(self.request, Event) else tuple(self.request)
        for e in req:
            if not isinstance(e, Event):
                raise ModelError(f"request entries must be Events, got {e!r}")
        object.__setattr__(self, "request", req)

    def matches(self, event: Event) -> bool:
        """True when the event is in request-or-wait (the resume condition)."""
        return event in self.request or event in self.wait_for


@dataclass(frozen=True, eq=False)
class BThreadDef:
    """A single b-thread: id, initial local state, and its two pure functions.

    advance_fn is only consulted for events inside alphabet_filter that
    match the current statement's request-or-wait set; every other event
    leaves the local state unchanged.
    """

    id: str
    initial: LocalState
    statement_fn: Callable[[LocalState], SyncStatement]
    advance_fn: Callable[[LocalState, Event], LocalState]
    alphabet_filter: EventSet = ALL_EVENTS
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def statement(self, local: LocalState) -> SyncStatement:
        """Memoized statement lookup; statement_fn must be pure."""
        stmt = self._cache.get(local)
        if stmt is None:
            stmt = self.statement_fn(local)
            if not isinstance(stmt, SyncStatement):
                raise ModelError(f"thread {self.id!r}: statement_fn must return SyncStatement")
            self._cache[local] = stmt
        return stmt

    def reacts_to(self, local: LocalState, event: Event) -> bool:
        return event in self.alphabet_filter and self.statement(local).matches(event)

    def advance(self, local: LocalState, event: Event) -> LocalState:
        if self.reacts_to(local, event):
            return self.advance_fn(local, event)
        return local


class CompositeState:
    """A tuple of per-thread local states; hashable, with a stable digest."""

    __slots__ = ("locals", "_hash")

    def __init__(self, locals: Iterable[LocalState]):
        object.__setattr__(self, "locals", tuple(locals))
        object.__setattr__(self, "_hash", hash(self.locals))

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("CompositeState is immutable")

    def __eq__(self, other) -> bool:
        return isinstance(other, CompositeState) and self.locals == other.locals

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "State" + repr(self.locals)

    def stable_digest(self) -> str:
        """Content hash independent of the process hash seed."""
        return hashlib.sha1(repr(self.locals).encode()).hexdigest()[:16]


class BProgram:
    """A fixed set of b-threads with an explicit event alphabet."""

    def __init__(self, threads: Iterable[BThreadDef], alphabet: Iterable[Event]):
        self.threads = tuple(threads)
        self.alphabet = tuple(canonical_events(alphabet))
        ids = [t.id for t in self.threads]
        if len(set(ids)) != len(ids):
            raise ModelError(f"duplicate thread ids: {ids}")
        for e in self.alphabet:
            if e.name == STUTTER_NAME:
                raise ModelError("the STUTTER event name is reserved and cannot appear in an alphabet")
        self._index = {t.id: i for i, t in enumerate(self.threads)}
        self._alphabet_set = frozenset(self.alphabet)

    @property
    def thread_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.threads)

    def thread_index(self, thread_id: str) -> int:
        return self._index[thread_id]

    def in_alphabet(self, event: Event) -> bool:
        return event in self._alphabet_set

    def initial_state(self) -> CompositeState:
        return CompositeState(t.initial for t in self.threads)

    def __repr__(self) -> str:
        return f"BProgram(threads={list(self.thread_ids)}, |alphabet|={len(self.alphabet)})"
