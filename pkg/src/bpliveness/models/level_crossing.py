"""Level crossing: trains on named railways cross a road guarded by
barriers, with optional progress obligations layered on top.

Safety structure (always present):

* per railway, a train protocol: once a train approaches, it must enter
  and then leave before the next train of that railway approaches;
* a barrier controller that lowers the barriers after an approach and
  raises them again;
* a safety thread blocking every Entering while the barriers are up;
* per railway, a hold thread blocking Raise between an approach and the
  matching Leaving.

Progress structure (optional):

* a must-finish requester demanding a number of freight approaches;
* per maintenance line, a must-finish requester demanding a number of
  maintenance approaches on that line;
* a spacing thread that only lets a limited burst of freight trains
  through between consecutive maintenance approaches.

Maintenance lines are railways like any other: their trains approach,
enter, and leave through the same barrier protocol.  Railway names ride
along as an event attribute, so "Approaching(Freight)" and
"Approaching(Maintenance)" are distinct events.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..events import Event, EventSet
from ..program import BProgram, BThreadDef, ModelError, SyncStatement

FREIGHT = "Freight"
PASSENGER = "Passenger"
MAINTENANCE = "Maintenance"

LOWER = Event("Lower")
RAISE = Event("Raise")


def approaching(railway: str) -> Event:
    return Event("Approaching", railway=railway)


def entering(railway: str) -> Event:
    return Event("Entering", railway=railway)


def leaving(railway: str) -> Event:
    return Event("Leaving", railway=railway)


def maintenance_railways(lines: int) -> list[str]:
    """Names of the maintenance lines, individually identifiable when
    there is more than one."""
    if lines < 1:
        raise ModelError("need at least one maintenance line")
    if lines == 1:
        return [MAINTENANCE]
    return [f"Maintenance({i})" for i in range(1, lines + 1)]


def train_protocol(railway: str) -> BThreadDef:
    """Approach, then enter, then leave; repeat.  Blocks the railway's
    next approach until the current train has left."""
    app, ent, lea = approaching(railway), entering(railway), leaving(railway)

    def statement(s):
        if s == 0:
            return SyncStatement(wait_for=EventSet.of(app))
        if s == 1:
            return SyncStatement(request=(ent,), block=EventSet.of(app))
        return SyncStatement(request=(lea,), block=EventSet.of(app))

    return BThreadDef(
        id=f"protocol-{railway}",
        initial=0,
        statement_fn=statement,
        advance_fn=lambda s, e: (s + 1) % 3,
        alphabet_filter=EventSet.of(app, ent, lea),
    )


def barrier_controller(railways) -> BThreadDef:
    """Lower after any approach, then raise (once the holds let go)."""
    apps = EventSet.of(*[approaching(r) for r in railways])

    def statement(s):
        if s == 0:
            return SyncStatement(wait_for=apps)
        if s == 1:
            return SyncStatement(request=(LOWER,))
        return SyncStatement(request=(RAISE,))

    def advance(s, e):
        return s + 1 if s < 2 else 0

    return BThreadDef(
        id="barrier-controller",
        initial=0,
        statement_fn=statement,
        advance_fn=advance,
        alphabet_filter=EventSet.where(
            lambda e: e.name == "Approaching" or e in (LOWER, RAISE), "controller events"
        ),
    )


def barrier_safety(railways) -> BThreadDef:
    """No train enters while the barriers are up."""
    entries = EventSet.of(*[entering(r) for r in railways])

    def statement(s):
        if s == "up":
            return SyncStatement(wait_for=EventSet.of(LOWER), block=entries)
        return SyncStatement(wait_for=EventSet.of(RAISE))

    return BThreadDef(
        id="barrier-safety",
        initial="up",
        statement_fn=statement,
        advance_fn=lambda s, e: "down" if s == "up" else "up",
        alphabet_filter=EventSet.of(LOWER, RAISE),
    )


def barrier_hold(railway: str) -> BThreadDef:
    """Keep the barriers down while this railway has a train inside."""
    app, lea = approaching(railway), leaving(railway)

    def statement(s):
        if s == 0:
            return SyncStatement(wait_for=EventSet.of(app))
        return SyncStatement(wait_for=EventSet.of(lea), block=EventSet.of(RAISE))

    return BThreadDef(
        id=f"hold-{railway}",
        initial=0,
        statement_fn=statement,
        advance_fn=lambda s, e: 1 - s,
        alphabet_filter=EventSet.of(app, lea),
    )


def approach_driver(railway: str) -> BThreadDef:
    """Keeps offering this railway's next approach."""
    app = approaching(railway)
    return BThreadDef(
        id=f"driver-{railway}",
        initial=0,
        statement_fn=lambda s: SyncStatement(request=(app,)),
        advance_fn=lambda s, e: s,
        alphabet_filter=EventSet.of(app),
    )


def must_finish_requester(tid: str, events) -> BThreadDef:
    """Requests the given events one after another and stays marked
    must-finish until the last one happened."""
    seq = tuple(events)
    if not seq:
        raise ModelError("requester needs at least one event")

    def statement(s):
        if s == len(seq):
            return SyncStatement()
        return SyncStatement(request=(seq[s],), must_finish=True)

    return BThreadDef(
        id=tid,
        initial=0,
        statement_fn=statement,
        advance_fn=lambda s, e: s + 1,
        alphabet_filter=EventSet.of(*seq),
    )


def freight_spacing(gap: int, maintenances, railway: str = FREIGHT) -> BThreadDef:
    """Between consecutive maintenance approaches (on any line), block
    the gap-th freight approach.  gap == 1 places no constraint at all."""
    if gap < 1:
        raise ModelError("gap must be at least 1")
    app = approaching(railway)
    maint = tuple(maintenances)
    watched = EventSet.of(app, *maint)

    if gap == 1:
        return BThreadDef(
            id="freight-spacing",
            initial=0,
            statement_fn=lambda s: SyncStatement(),
            advance_fn=lambda s, e: s,
            alphabet_filter=EventSet.of(),
        )

    def statement(s):
        if s == gap - 1:
            return SyncStatement(wait_for=watched, block=EventSet.of(app))
        return SyncStatement(wait_for=watched)

    def advance(s, e):
        if e == app:
            return s + 1
        return 0  # any maintenance resets the burst

    return BThreadDef(
        id="freight-spacing",
        initial=0,
        statement_fn=statement,
        advance_fn=advance,
        alphabet_filter=watched,
    )


def starvation_patch(window: int = 6, starved: str = FREIGHT, greedy: str = PASSENGER) -> BThreadDef:
    """Fairness fix: after `window` consecutive approaches of the greedy
    railway, block it until the starved railway approaches."""
    if window < 1:
        raise ModelError("window must be at least 1")
    g, s_ = approaching(greedy), approaching(starved)

    def statement(s):
        if s == window:
            return SyncStatement(wait_for=EventSet.of(s_), block=EventSet.of(g))
        return SyncStatement(wait_for=EventSet.of(g, s_))

    def advance(s, e):
        return 0 if e == s_ else s + 1

    return BThreadDef(
        id="starvation-patch",
        initial=0,
        statement_fn=statement,
        advance_fn=advance,
        alphabet_filter=EventSet.of(g, s_),
    )


def schedule_patch(railways, rounds: int) -> BThreadDef:
    """Scheduling fix: for a fixed number of rounds, every railway must
    approach exactly once per round (already-approached ones are blocked
    until the round completes); afterwards the patch steps aside."""
    rails = tuple(railways)
    apps = {r: approaching(r) for r in rails}
    all_apps = EventSet.of(*apps.values())

    def statement(s):
        if s == "done":
            return SyncStatement()
        _, seen = s
        return SyncStatement(
            wait_for=all_apps,
            block=EventSet.of(*[apps[r] for r in seen]),
        )

    def advance(s, e):
        rnd, seen = s
        seen = tuple(sorted(set(seen) | {e["railway"]}))
        if len(seen) < len(rails):
            return (rnd, seen)
        if rnd + 1 >= rounds:
            return "done"
        return (rnd + 1, ())

    return BThreadDef(
        id="schedule-patch",
        initial=(0, ()),
        statement_fn=statement,
        advance_fn=advance,
        alphabet_filter=all_apps,
    )


def _maintenance_requesters(lines, goal: int) -> list[BThreadDef]:
    reqs = []
    for i, line in enumerate(lines, start=1):
        tid = "maintenance-progress" if len(lines) == 1 else f"maintenance-progress-{i}"
        reqs.append(must_finish_requester(tid, [approaching(line)] * goal))
    return reqs


@dataclass(frozen=True)
class LevelCrossingConfig:
    railways: tuple[str, ...] = (FREIGHT, PASSENGER)
    drivers: tuple[str, ...] = (PASSENGER,)
    freight_goal: int = 0  # 0 disables the freight progress requester
    maintenance_goal: int = 0
    maintenance_lines: int = 0
    freight_gap: int = 1  # 1 disables the spacing constraint
    patches: tuple[BThreadDef, ...] = ()

    def __post_init__(self):
        if self.freight_goal and FREIGHT not in self.railways:
            raise ModelError("freight requester needs a Freight railway")
        for d in self.drivers:
            if d not in self.railways:
                raise ModelError(f"driver for unknown railway {d!r}")
        if bool(self.maintenance_goal) != bool(self.maintenance_lines):
            raise ModelError("maintenance goal and maintenance lines come together")
        if self.freight_gap > 1 and not self.maintenance_goal:
            raise ModelError("spacing constraint without any maintenance is a dead end")


def build(config: LevelCrossingConfig) -> BProgram:
    maint_lines = maintenance_railways(config.maintenance_lines) if config.maintenance_lines else []
    railways = tuple(config.railways) + tuple(maint_lines)
    threads: list[BThreadDef] = []
    alphabet: list[Event] = [LOWER, RAISE]
    for r in railways:
        alphabet += [approaching(r), entering(r), leaving(r)]
        threads.append(train_protocol(r))
        threads.append(barrier_hold(r))
    threads.append(barrier_controller(railways))
    threads.append(barrier_safety(railways))
    for r in config.drivers:
        threads.append(approach_driver(r))

    if config.freight_goal:
        threads.append(
            must_finish_requester(
                "freight-progress", [approaching(FREIGHT)] * config.freight_goal
            )
        )
    threads.extend(_maintenance_requesters(maint_lines, config.maintenance_goal))
    if config.freight_gap > 1:
        threads.append(freight_spacing(config.freight_gap, [approaching(l) for l in maint_lines]))
    threads.extend(config.patches)
    return BProgram(threads, alphabet)


def classic_crossing(freight_goal: int = 3, patches=()) -> BProgram:
    """Two railways, a passenger driver, and a freight progress
    obligation; the model whose random runs can starve the freight."""
    return build(LevelCrossingConfig(freight_goal=freight_goal, patches=tuple(patches)))


def crossing_with_maintenance(
    freight_goal: int = 3,
    maintenance_goal: int = 3,
    freight_gap: int = 2,
    maintenance_lines: int = 1,
) -> BProgram:
    """Classic crossing plus maintenance lines, their approach
    obligations, and the spacing constraint tying freight bursts to
    maintenance."""
    return build(
        LevelCrossingConfig(
            freight_goal=freight_goal,
            maintenance_goal=maintenance_goal,
            maintenance_lines=maintenance_lines,
            freight_gap=freight_gap,
        )
    )


def requesters_only(
    freight_goal: int,
    maintenance_goal: int = 1,
    freight_gap: int = 2,
    maintenance_lines: int = 1,
) -> BProgram:
    """Just the progress obligations and the spacing constraint, without
    the physical crossing; a small family that grows with the goals."""
    app = approaching(FREIGHT)
    maint_apps = [approaching(l) for l in maintenance_railways(maintenance_lines)]
    threads = [must_finish_requester("freight-progress", [app] * freight_goal)]
    threads.extend(_maintenance_requesters(maintenance_railways(maintenance_lines), maintenance_goal))
    threads.append(freight_spacing(freight_gap, maint_apps))
    return BProgram(threads, [app] + maint_apps)
