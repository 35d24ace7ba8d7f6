"""Level crossing models: frozen shapes, the starvation witnesses, the
maintenance trap, and both fix patches."""

import pytest

from bpliveness.engine import RandomArbiter, enabled_events, is_live_finite, run
from bpliveness.explore import explore
from bpliveness.gba import gba_arbiter, solve
from bpliveness.lasso import find_hot_lassos, replay_lasso, walk
from bpliveness.models.level_crossing import (
    FREIGHT,
    LOWER,
    MAINTENANCE,
    PASSENGER,
    RAISE,
    LevelCrossingConfig,
    approaching,
    classic_crossing,
    crossing_with_maintenance,
    entering,
    leaving,
    maintenance_railways,
    requesters_only,
    schedule_patch,
    starvation_patch,
)
from bpliveness.program import ModelError


def strs(events):
    return [str(e) for e in events]


def test_classic_enabled_walk():
    from bpliveness.engine import step

    prog = classic_crossing(3)
    state = prog.initial_state()
    assert strs(enabled_events(prog, state)) == [
        "Approaching(Freight)",
        "Approaching(Passenger)",
    ]
    state = step(prog, state, approaching(FREIGHT))
    # barrier controller now asks to lower; entering stays blocked
    assert strs(enabled_events(prog, state)) == ["Approaching(Passenger)", "Lower"]
    state = step(prog, state, LOWER)
    assert strs(enabled_events(prog, state)) == [
        "Approaching(Passenger)",
        "Entering(Freight)",
    ]


def test_classic_frozen_shape():
    lts = explore(classic_crossing(3))
    assert (lts.n_states, lts.n_transitions) == (45, 86)
    assert lts.normalized_init
    ws = solve(lts)
    assert ws.realizable
    # every reachable state can still serve the freight obligation
    assert ws.n_winning() == 45


def test_classic_starvation_witnesses():
    lts = explore(classic_crossing(3))
    witnesses = find_hot_lassos(lts)
    assert len(witnesses) == 7
    assert {w.thread_id for w in witnesses} == {"freight-progress"}
    for w in witnesses:
        replay_lasso(lts, w.lasso)

    # one witness per hot stratum; the second is the classic starvation run:
    # freight announces itself, the barrier drops, and passenger traffic
    # cycles forever while the freight never enters
    assert witnesses[1].lasso.render() == (
        "Approaching(Freight) Lower "
        "( Approaching(Passenger) Entering(Passenger) Leaving(Passenger) )^w"
    )


def test_classic_witness_renders_frozen():
    lts = explore(classic_crossing(3))
    renders = [w.lasso.render() for w in find_hot_lassos(lts)]
    passenger_loop = "( Approaching(Passenger) Entering(Passenger) Leaving(Passenger) )^w"
    assert renders == [
        "Approaching(Passenger) ( Lower Entering(Passenger) Leaving(Passenger) "
        "Raise Approaching(Passenger) )^w",
        f"Approaching(Freight) Lower {passenger_loop}",
        f"Approaching(Freight) Lower Entering(Freight) {passenger_loop}",
        f"Approaching(Freight) Lower Entering(Freight) Leaving(Freight) {passenger_loop}",
        "Approaching(Freight) Lower Entering(Freight) Leaving(Freight) "
        f"Approaching(Freight) {passenger_loop}",
        "Approaching(Freight) Lower Entering(Freight) Leaving(Freight) "
        f"Approaching(Freight) Entering(Freight) {passenger_loop}",
        "Approaching(Freight) Lower Entering(Freight) Leaving(Freight) "
        f"Approaching(Freight) Entering(Freight) Leaving(Freight) {passenger_loop}",
    ]


def _maintenance_cycle():
    return [
        approaching(MAINTENANCE),
        LOWER,
        entering(MAINTENANCE),
        leaving(MAINTENANCE),
        RAISE,
    ]


def test_maintenance_frozen_shape():
    lts = explore(crossing_with_maintenance())
    assert (lts.n_states, lts.n_transitions) == (520, 1336)
    ws = solve(lts)
    assert ws.realizable
    assert lts.n_states - ws.n_winning() == 158


def test_premature_maintenance_is_losing():
    # with three maintenances and a gap of two, every freight approach
    # consumes one maintenance before the next; burning two maintenance
    # cycles before any freight caps the freight budget below the goal
    lts = explore(crossing_with_maintenance())
    ws = solve(lts)
    mcyc = _maintenance_cycle()
    one = walk(lts, 0, mcyc)
    assert ws.winning[one[-1]]
    dead = walk(lts, 0, mcyc + mcyc)
    assert not ws.winning[dead[-1]]
    fcyc = [approaching(FREIGHT), LOWER, entering(FREIGHT), leaving(FREIGHT), RAISE]
    alive = walk(lts, 0, fcyc + mcyc + mcyc)
    assert ws.winning[alive[-1]]


def test_gba_arbiter_avoids_premature_maintenance():
    prog = crossing_with_maintenance()
    lts = explore(prog)
    ws = solve(lts)
    arbiter = gba_arbiter(lts)
    app_f, app_m = approaching(FREIGHT), approaching(MAINTENANCE)
    for seed in range(30):
        trace = run(prog, arbiter, max_steps=150, seed=seed)
        assert trace.terminated_reason == "step-limit"
        nodes = walk(lts, 0, trace.events)
        assert all(ws.winning[n] for n in nodes)
        first_f = trace.events.index(app_f)
        assert sum(1 for e in trace.events[:first_f] if e == app_m) <= 1


def test_tiny_requesters_labels():
    lts = explore(requesters_only(1, 1, 1))
    assert lts.n_states == 4
    assert lts.normalized_init
    # node 0 is the relabeled entry copy; threads are (freight, maintenance,
    # spacing) and the spacing thread at gap 1 never labels anything
    assert [tuple(bool(x) for x in row) for row in lts.labels] == [
        (False, False, False),
        (False, True, False),
        (True, False, False),
        (False, False, False),
    ]


@pytest.mark.parametrize(
    "n,states,transitions",
    [(2, 11, 14), (4, 29, 39), (8, 89, 125), (16, 305, 441)],
)
def test_requesters_family_sizes(n, states, transitions):
    lts = explore(requesters_only(n, n, 2))
    assert (lts.n_states, lts.n_transitions) == (states, transitions)
    assert solve(lts).realizable


def test_starvation_patch():
    prog = classic_crossing(3, patches=(starvation_patch(),))
    lts = explore(prog)
    assert lts.n_states == 268
    assert solve(lts).realizable
    assert find_hot_lassos(lts) == []
    for seed in range(20):
        trace = run(prog, RandomArbiter(), max_steps=300, seed=seed)
        # the window patch plus the finite requester dry the model out
        assert trace.terminated_reason == "deadlock"
        assert is_live_finite(trace)


def test_schedule_patch():
    prog = classic_crossing(3, patches=(schedule_patch((FREIGHT, PASSENGER), 3),))
    lts = explore(prog)
    assert lts.n_states == 98
    assert solve(lts).realizable
    assert find_hot_lassos(lts) == []
    for seed in range(20):
        trace = run(prog, RandomArbiter(), max_steps=300, seed=seed)
        assert trace.terminated_reason == "step-limit"
        assert not any(trace.labels[-1])


def test_maintenance_line_naming():
    assert maintenance_railways(1) == ["Maintenance"]
    assert maintenance_railways(3) == [
        "Maintenance(1)",
        "Maintenance(2)",
        "Maintenance(3)",
    ]
    with pytest.raises(ModelError):
        maintenance_railways(0)


def test_two_maintenance_lines():
    prog = requesters_only(2, 1, 2, maintenance_lines=2)
    ids = [t.id for t in prog.threads]
    assert ids == [
        "freight-progress",
        "maintenance-progress-1",
        "maintenance-progress-2",
        "freight-spacing",
    ]
    lts = explore(prog)
    assert solve(lts).realizable
    # either line's approach resets the freight burst
    spacing = prog.threads[-1]
    for line in ("Maintenance(1)", "Maintenance(2)"):
        assert spacing.advance_fn(1, approaching(line)) == 0


def test_config_validation():
    with pytest.raises(ModelError):
        LevelCrossingConfig(railways=(PASSENGER,), freight_goal=1)
    with pytest.raises(ModelError):
        LevelCrossingConfig(freight_gap=2)
    with pytest.raises(ModelError):
        LevelCrossingConfig(drivers=("Tram",))
    with pytest.raises(ModelError):
        LevelCrossingConfig(maintenance_goal=2)
    with pytest.raises(ModelError):
        LevelCrossingConfig(maintenance_lines=1)
