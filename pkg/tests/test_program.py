import pytest

from bpliveness.events import ALL_EVENTS, STUTTER, Event, EventSet
from bpliveness.program import (
    BProgram,
    BThreadDef,
    CompositeState,
    ModelError,
    SyncStatement,
)

from .helpers import A, B, graph_thread


def test_sync_statement_coerces_single_request():
    st = SyncStatement(request=A)
    assert st.request == (A,)


def test_sync_statement_rejects_non_events():
    with pytest.raises(ModelError):
        SyncStatement(request=("a",))


def test_sync_statement_matches_request_or_wait():
    st = SyncStatement(request=(A,), wait_for=EventSet.of(B))
    assert st.matches(A)
    assert st.matches(B)
    assert not st.matches(Event("c"))


def test_thread_statement_memoized_and_validated():
    calls = []

    def stmt(s):
        calls.append(s)
        return SyncStatement(request=(A,))

    t = BThreadDef(id="t", initial=0, statement_fn=stmt, advance_fn=lambda s, e: s)
    t.statement(0)
    t.statement(0)
    assert calls == [0]

    bad = BThreadDef(id="bad", initial=0, statement_fn=lambda s: None, advance_fn=lambda s, e: s)
    with pytest.raises(ModelError):
        bad.statement(0)


def test_advance_is_identity_outside_alphabet():
    t = BThreadDef(
        id="t",
        initial=0,
        statement_fn=lambda s: SyncStatement(wait_for=ALL_EVENTS),
        advance_fn=lambda s, e: s + 1,
        alphabet_filter=EventSet.of(A),
    )
    assert t.advance(0, B) == 0
    assert t.advance(0, A) == 1


def test_composite_state_identity():
    a = CompositeState((0, "x"))
    b = CompositeState((0, "x"))
    assert a == b
    assert hash(a) == hash(b)
    assert a != CompositeState((1, "x"))
    assert len(a.stable_digest()) == 16
    assert a.stable_digest() == b.stable_digest()


def test_program_rejects_duplicate_thread_ids():
    t1 = graph_thread("same", {0: [(A, 0)]}, set(), 0)
    t2 = graph_thread("same", {0: [(B, 0)]}, set(), 0)
    with pytest.raises(ModelError, match="duplicate"):
        BProgram([t1, t2], [A, B])


def test_program_rejects_stutter_in_alphabet():
    t = graph_thread("t", {0: [(A, 0)]}, set(), 0)
    with pytest.raises(ModelError):
        BProgram([t], [A, STUTTER])


def test_program_initial_state_and_alphabet():
    t1 = graph_thread("one", {0: [(A, 1)]}, set(), 0)
    t2 = graph_thread("two", {"p": [(B, "q")]}, set(), "p")
    prog = BProgram([t1, t2], [B, A, A])
    assert prog.initial_state().locals == (0, "p")
    assert prog.alphabet == (A, B)  # canonical, deduplicated
    assert prog.in_alphabet(A)
    assert not prog.in_alphabet(Event("zz"))
    assert prog.thread_index("two") == 1
    with pytest.raises(KeyError):
        prog.thread_index("missing")
