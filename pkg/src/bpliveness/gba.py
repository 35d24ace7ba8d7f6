"""Winning-set arbitration.

Viewing the explored system as a Buchi automaton with one acceptance set
per thread (the states where that thread's obligation is discharged), a
run satisfies every must-finish obligation infinitely often exactly when
it eventually stays inside a strongly connected component that touches
all acceptance sets.  States from which such a component is reachable
are winning; an arbiter that only moves within the winning set can
always extend the run to a live one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .engine import Arbiter
from .events import Event
from .explore import ExploredLts


class UnrealizableError(RuntimeError):
    """No arbitration strategy from the initial state keeps all
    obligations satisfiable; carries the analysis for reporting."""

    def __init__(self, message: str, winning_set: "WinningSet" = None):
        super().__init__(message)
        self.winning_set = winning_set


@dataclass
class WinningSet:
    """Result of the acceptance analysis over an explored system."""

    winning: np.ndarray  # bool per node
    scc_of: np.ndarray  # canonical component id per node
    accepting_sccs: tuple[int, ...]
    nontrivial_sccs: tuple[int, ...]

    @property
    def realizable(self) -> bool:
        return bool(self.winning[0])

    def n_winning(self) -> int:
        return int(self.winning.sum())


def acceptance_sets(lts: ExploredLts) -> np.ndarray:
    """(n_states, n_threads) bool: True where the thread's obligation is
    discharged (label 0), i.e. membership in that thread's acceptance set."""
    return ~lts.label_matrix()


def solve(lts: ExploredLts) -> WinningSet:
    indptr, indices = lts.csr()
    n = lts.n_states
    comp = _kernels.scc_labels(indptr, indices)
    ncomp = int(comp.max()) + 1 if n else 0

    sizes = np.bincount(comp, minlength=ncomp)
    has_self_loop = np.zeros(ncomp, dtype=bool)
    for i in range(n):
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] == i:
                has_self_loop[comp[i]] = True
    nontrivial = (sizes > 1) | has_self_loop

    # a component accepts when, for every thread, some member discharges it
    discharged = acceptance_sets(lts)
    coverage = np.zeros((ncomp, lts.n_threads), dtype=bool)
    np.logical_or.at(coverage, comp, discharged)
    accepting = nontrivial & coverage.all(axis=1)

    # winning = can reach a node of an accepting component
    winning = accepting[comp].copy()
    if winning.any():
        rev: list[list[int]] = [[] for _ in range(n)]
        for i in range(n):
            for k in range(indptr[i], indptr[i + 1]):
                rev[indices[k]].append(i)
        queue = deque(np.flatnonzero(winning).tolist())
        while queue:
            v = queue.popleft()
            for u in rev[v]:
                if not winning[u]:
                    winning[u] = True
                    queue.append(u)

    return WinningSet(
        winning=winning,
        scc_of=comp,
        accepting_sccs=tuple(int(c) for c in np.flatnonzero(accepting)),
        nontrivial_sccs=tuple(int(c) for c in np.flatnonzero(nontrivial)),
    )


def solve_or_raise(lts: ExploredLts) -> WinningSet:
    ws = solve(lts)
    if not ws.realizable:
        raise UnrealizableError(
            "no strategy from the initial state can keep every must-finish "
            "obligation satisfiable",
            ws,
        )
    return ws


class WinningSetArbiter(Arbiter):
    """Chooses uniformly among enabled events whose successor stays winning.

    Tracks its position in the explored system by node index, starting
    at the entry node, so it works whether or not the entry node is the
    unlabeled initial copy.
    """

    def __init__(self, lts: ExploredLts, winning_set: WinningSet):
        self.lts = lts
        self.winning_set = winning_set
        self._node = lts.init_index

    def reset(self, program, seed):
        super().reset(program, seed)
        if program is not self.lts.program:
            raise ValueError("arbiter was solved for a different program")
        self._node = self.lts.init_index

    def choose(self, state, enabled):
        winning = self.winning_set.winning
        allowed = [e for e in enabled if winning[self.lts.target(self._node, e)]]
        if not allowed:
            # unreachable from a winning node; fail loudly if it ever happens
            raise RuntimeError(f"no winning successor at node {self._node}")
        return allowed[self._rng.randrange(len(allowed))]

    def observe(self, state, event, next_state):
        self._node = self.lts.target(self._node, event)


def gba_arbiter(lts: ExploredLts) -> WinningSetArbiter:
    """Solve and wrap; raises UnrealizableError when the entry loses."""
    return WinningSetArbiter(lts, solve_or_raise(lts))


def report_json(lts: ExploredLts, ws: WinningSet) -> dict:
    comp_sizes = np.bincount(ws.scc_of)
    return {
        "schema": "bpliveness/winning/1",
        "n_states": lts.n_states,
        "n_transitions": lts.n_transitions,
        "n_winning": ws.n_winning(),
        "realizable": ws.realizable,
        "accepting_sccs": [
            {"id": c, "size": int(comp_sizes[c])} for c in ws.accepting_sccs
        ],
    }
