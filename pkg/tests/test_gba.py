import numpy as np
import pytest

from bpliveness.engine import RandomArbiter, is_live_finite, run
from bpliveness.events import Event, EventSet
from bpliveness.explore import explore
from bpliveness.gba import (
    UnrealizableError,
    WinningSetArbiter,
    acceptance_sets,
    gba_arbiter,
    report_json,
    solve,
    solve_or_raise,
)
from bpliveness.program import BProgram, BThreadDef, SyncStatement

from .helpers import A, B, C, D, cold_hot_cold_chain, graph_program


def test_acceptance_sets_are_complement_of_labels():
    lts = explore(cold_hot_cold_chain())
    assert acceptance_sets(lts).tolist() == [[True], [False], [True]]


def test_chain_is_realizable_everywhere():
    lts = explore(cold_hot_cold_chain())
    ws = solve(lts)
    assert ws.realizable
    assert ws.winning.all()
    # only the cold terminal stutter component accepts
    assert ws.accepting_sccs == (ws.scc_of[2],)


def test_hot_deadlock_is_unrealizable():
    lts = explore(graph_program({0: [(A, 1)]}, hot={1}, init=0))
    ws = solve(lts)
    assert not ws.realizable
    assert ws.accepting_sccs == ()
    with pytest.raises(UnrealizableError) as exc:
        solve_or_raise(lts)
    assert exc.value.winning_set is ws or exc.value.winning_set.realizable == ws.realizable


def _choice_model():
    # a leads to a cycle that keeps discharging; b leads to a hot trap
    trans = {
        0: [(A, 1), (B, 9)],
        1: [(C, 2)],
        2: [(C, 1)],
        9: [(D, 9)],
    }
    return graph_program(trans, hot={1, 9}, init=0)


def test_winning_set_excludes_trap():
    lts = explore(_choice_model())
    ws = solve(lts)
    trap = lts.state_index[[s for s in lts.state_index if s.locals == (9,)][0]]
    assert not ws.winning[trap]
    assert ws.winning.sum() == lts.n_states - 1
    assert ws.realizable


def test_arbiter_never_enters_trap():
    lts = explore(_choice_model())
    arb = gba_arbiter(lts)
    for seed in range(20):
        trace = run(lts.program, arb, max_steps=60, seed=seed)
        assert trace.terminated_reason == "step-limit"
        assert B not in trace.events
        # obligation discharged over and over
        assert sum(1 for labs in trace.labels if not any(labs)) > 10


def test_random_arbiter_can_enter_trap():
    prog = _choice_model()
    hit = False
    for seed in range(20):
        trace = run(prog, RandomArbiter(), max_steps=60, seed=seed)
        hit = hit or B in trace.events
    assert hit


def test_every_winning_node_keeps_a_winning_successor():
    for prog in (_choice_model(), cold_hot_cold_chain()):
        lts = explore(prog)
        ws = solve(lts)
        for i in range(lts.n_states):
            if ws.winning[i]:
                assert any(ws.winning[j] for _, j in lts.adj[i])


def test_multi_thread_coverage_requires_all_sets():
    # cycler alternates a/b; sentinel stays hot until it sees c
    cycler = BThreadDef(
        id="cycler",
        initial=0,
        statement_fn=lambda s: SyncStatement(request=(A if s == 0 else B,)),
        advance_fn=lambda s, e: 1 - s,
    )

    def sentinel(requests_c):
        return BThreadDef(
            id="sentinel",
            initial="hot",
            statement_fn=lambda s: SyncStatement(
                request=(C,) if requests_c and s == "hot" else (),
                wait_for=EventSet.of(C),
                must_finish=s == "hot",
            ),
            advance_fn=lambda s, e: "done",
        )

    starved = BProgram([cycler, sentinel(False)], [A, B, C])
    assert not solve(explore(starved)).realizable

    fixed = BProgram([cycler, sentinel(True)], [A, B, C])
    lts = explore(fixed)
    assert solve(lts).realizable
    trace = run(fixed, gba_arbiter(lts), max_steps=30, seed=1)
    assert Event("c") in trace.events


def test_arbiter_tracks_through_initial_copy():
    # hot entry state revisited forever; still realizable because the
    # cycle dips through a cold state
    prog = graph_program({0: [(A, 1)], 1: [(B, 0)]}, hot={0}, init=0)
    lts = explore(prog)
    assert lts.normalized_init
    arb = gba_arbiter(lts)
    trace = run(prog, arb, max_steps=40, seed=7)
    assert trace.terminated_reason == "step-limit"
    assert len(trace) == 40


def test_arbiter_rejects_foreign_program():
    lts = explore(cold_hot_cold_chain())
    arb = gba_arbiter(lts)
    with pytest.raises(ValueError):
        run(cold_hot_cold_chain(), arb, max_steps=5, seed=0)


def test_report_json():
    lts = explore(_choice_model())
    ws = solve(lts)
    rep = report_json(lts, ws)
    assert rep["realizable"] is True
    assert rep["n_states"] == 4
    assert rep["n_winning"] == 3
    assert len(rep["accepting_sccs"]) == 1
    assert rep["accepting_sccs"][0]["size"] == 2


def test_live_runs_under_winning_arbiter_on_terminating_model():
    lts = explore(cold_hot_cold_chain())
    trace = run(lts.program, gba_arbiter(lts), max_steps=10, seed=0)
    assert trace.terminated_reason == "deadlock"
    assert is_live_finite(trace)
