"""One-stop check of a b-program's liveness obligations.

verify() explores the program, runs the acceptance analysis, and collects
one starvation witness per trapped region, so a report answers both
"can an arbiter keep every obligation satisfiable" and "which runs are
the counterexamples when it cannot be left to chance".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .explore import ExploredLts, explore
from .gba import WinningSet, solve
from .lasso import HotLassoWitness, find_hot_lassos
from .program import BProgram


@dataclass
class VerificationReport:
    lts: ExploredLts
    winning_set: WinningSet
    witnesses: list

    @property
    def realizable(self) -> bool:
        return self.winning_set.realizable

    def summary(self) -> str:
        lts, ws = self.lts, self.winning_set
        sizes = np.bincount(ws.scc_of)
        lines = [
            f"states: {lts.n_states}   transitions: {lts.n_transitions}"
            f"   threads: {lts.n_threads}",
            f"realizable: {'yes' if ws.realizable else 'no'}"
            f"   winning: {ws.n_winning()}/{lts.n_states}",
            "accepting components: "
            + (
                f"{len(ws.accepting_sccs)} (sizes "
                + ", ".join(str(int(sizes[c])) for c in ws.accepting_sccs)
                + ")"
                if ws.accepting_sccs
                else "none"
            ),
            f"starvation witnesses: {len(self.witnesses)}",
        ]
        for w in self.witnesses:
            lines.append(f"  [{w.thread_id}] {w.lasso.render()}")
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        ws = self.winning_set
        sizes = np.bincount(ws.scc_of)
        return {
            "schema": "bpliveness/report/1",
            "n_states": self.lts.n_states,
            "n_transitions": self.lts.n_transitions,
            "n_threads": self.lts.n_threads,
            "realizable": ws.realizable,
            "n_winning": ws.n_winning(),
            "accepting_sccs": [
                {"id": int(c), "size": int(sizes[c])} for c in ws.accepting_sccs
            ],
            "witnesses": [
                {
                    "thread": w.thread_id,
                    "stem": [e.to_json() for e in w.lasso.stem],
                    "loop": [e.to_json() for e in w.lasso.loop],
                    "render": w.lasso.render(),
                }
                for w in self.witnesses
            ],
        }


def verify(
    program,
    max_states: int = 1_000_000,
    max_transitions: int = 10_000_000,
    witnesses: bool = True,
    witness_limit: int = None,
) -> VerificationReport:
    """Explore (unless handed an already explored graph), solve, and
    gather starvation witnesses; witness_limit caps the list."""
    if isinstance(program, ExploredLts):
        lts = program
    elif isinstance(program, BProgram):
        lts = explore(program, max_states=max_states, max_transitions=max_transitions)
    else:
        raise TypeError(f"expected a BProgram or ExploredLts, got {type(program)!r}")
    ws = solve(lts)
    found = find_hot_lassos(lts) if witnesses else []
    if witness_limit is not None:
        found = found[:witness_limit]
    return VerificationReport(lts=lts, winning_set=ws, witnesses=found)
