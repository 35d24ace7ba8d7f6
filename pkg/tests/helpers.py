"""Tiny hand-built threads and programs shared across test modules."""

from __future__ import annotations

from bpliveness.events import Event, canonical_events
from bpliveness.program import BProgram, BThreadDef, SyncStatement


def graph_thread(
    tid: str,
    transitions: dict,
    hot: set,
    init,
) -> BThreadDef:
    """A single thread walking an explicit graph.

    transitions maps local state -> [(event, next_state), ...]; each
    state requests exactly its outgoing events.  States in `hot` carry
    the must-finish obligation.  States without outgoing edges request
    nothing (the program deadlocks there if no other thread requests).
    """

    def statement(s):
        outgoing = transitions.get(s, [])
        return SyncStatement(
            request=tuple(e for e, _ in outgoing),
            must_finish=s in hot,
        )

    def advance(s, event):
        for e, nxt in transitions.get(s, []):
            if e == event:
                return nxt
        return s

    return BThreadDef(id=tid, initial=init, statement_fn=statement, advance_fn=advance)


def graph_program(transitions: dict, hot: set, init, tid: str = "walker") -> BProgram:
    """One-thread program over the alphabet mentioned in the graph."""
    alphabet = canonical_events(e for edges in transitions.values() for e, _ in edges)
    return BProgram([graph_thread(tid, transitions, hot, init)], alphabet)


A, B, C, D = Event("a"), Event("b"), Event("c"), Event("d")


def cold_hot_cold_chain() -> BProgram:
    """0 (cold) -a-> 1 (hot) -b-> 2 (cold, deadlock)."""
    return graph_program({0: [(A, 1)], 1: [(B, 2)]}, hot={1}, init=0)


def hot_request_chain(n: int = 3) -> BProgram:
    """n hot requesting states then a cold terminal; starts hot."""
    trans = {i: [(Event(f"e{i}"), i + 1)] for i in range(n)}
    return graph_program(trans, hot=set(range(n)), init=0)


def dead_branch_program() -> BProgram:
    """A losing branch whose label dips to 0 once more before the trap.

    init (cold) -a-> s1 (hot) -b-> s2 (cold) -c-> s3 (hot, deadlock)
                \\-d-> win (cold) -d-> win
    """
    trans = {
        "init": [(A, "s1"), (D, "win")],
        "s1": [(B, "s2")],
        "s2": [(C, "s3")],
        "win": [(D, "win")],
    }
    return graph_program(trans, hot={"s1", "s3"}, init="init")
