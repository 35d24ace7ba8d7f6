"""Exhaustive state-space exploration of a b-program.

The result is a finite labeled transition system over composite states.
Two fixed-ups keep the downstream analyses uniform:

* Deadlocked states get a synthetic STUTTER self-loop, so every node has
  at least one outgoing transition and a finite run extends to a unique
  infinite one.

* If the initial state itself carries a must-finish obligation, node 0
  is an unlabeled copy of it with the same outgoing transitions.  The
  obligation only constrains what happens after a step is taken, so the
  copy preserves which runs are live while giving analyses a clean
  obligation-free entry point; the labeled original appears as its own
  node only when some path returns to it.
"""

from __future__ import annotations

import json
from collections import deque

import numpy as np

from .engine import enabled_events, local_labels, step
from .events import STUTTER, Event
from .program import BProgram, CompositeState


class LimitExceeded(RuntimeError):
    """Exploration hit the state or transition budget."""


class ExploredLts:
    """Reachable transition system: states, per-thread labels, adjacency.

    adj[i] lists (event, target) in canonical event order.  init_index
    is always 0.  normalized_init records whether node 0 is the
    unlabeled copy described in the module docstring.
    """

    def __init__(self, program: BProgram, states, labels, adj, stutter_states, normalized_init):
        self.program = program
        self.states: list[CompositeState] = states
        self.labels: list[tuple[bool, ...]] = labels
        self.adj: list[list[tuple[Event, int]]] = adj
        self.init_index: int = 0
        self.stutter_states: frozenset[int] = frozenset(stutter_states)
        self.normalized_init: bool = normalized_init
        self.state_index: dict[CompositeState, int] = {}
        for i, s in enumerate(states):
            if not (normalized_init and i == 0):
                self.state_index[s] = i
        self._csr = None
        self._label_matrix = None

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_transitions(self) -> int:
        return sum(len(edges) for edges in self.adj)

    @property
    def n_threads(self) -> int:
        return len(self.program.threads)

    def successors(self, i: int):
        return self.adj[i]

    def target(self, i: int, event: Event) -> int:
        for e, j in self.adj[i]:
            if e == event:
                return j
        raise KeyError(f"no transition on {event} from node {i}")

    def events_from(self, i: int) -> list[Event]:
        return [e for e, _ in self.adj[i]]

    def csr(self):
        """(indptr, indices) int64 arrays, edges in adjacency order."""
        if self._csr is None:
            indptr = np.zeros(self.n_states + 1, dtype=np.int64)
            for i, edges in enumerate(self.adj):
                indptr[i + 1] = indptr[i] + len(edges)
            indices = np.empty(indptr[-1], dtype=np.int64)
            k = 0
            for edges in self.adj:
                for _, j in edges:
                    indices[k] = j
                    k += 1
            self._csr = (indptr, indices)
        return self._csr

    def label_matrix(self) -> np.ndarray:
        """(n_states, n_threads) bool matrix of must-finish labels."""
        if self._label_matrix is None:
            self._label_matrix = np.array(self.labels, dtype=bool).reshape(
                self.n_states, self.n_threads
            )
        return self._label_matrix

    def combined_labels(self) -> np.ndarray:
        return self.label_matrix().any(axis=1)

    def to_json_dict(self) -> dict:
        return {
            "schema": "bpliveness/lts/1",
            "threads": list(self.program.thread_ids),
            "n_states": self.n_states,
            "n_transitions": self.n_transitions,
            "init": self.init_index,
            "normalized_init": self.normalized_init,
            "states": [
                {
                    "id": i,
                    "digest": self.states[i].stable_digest(),
                    "labels": [int(v) for v in self.labels[i]],
                }
                for i in range(self.n_states)
            ],
            "transitions": [
                {"from": i, "event": e.to_json(), "to": j}
                for i, edges in enumerate(self.adj)
                for e, j in edges
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def to_dot(self) -> str:
        lines = ["digraph lts {", "  rankdir=LR;", '  node [shape=circle, fontsize=10];']
        for i in range(self.n_states):
            hot = any(self.labels[i])
            style = ', style=filled, fillcolor="#f4c7c3"' if hot else ""
            mark = ", peripheries=2" if i == self.init_index else ""
            lines.append(f'  n{i} [label="{i}"{style}{mark}];')
        for i, edges in enumerate(self.adj):
            for e, j in edges:
                lines.append(f'  n{i} -> n{j} [label="{e}", fontsize=9];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def explore(
    program: BProgram,
    max_states: int = 1_000_000,
    max_transitions: int = 10_000_000,
) -> ExploredLts:
    """Breadth-first enumeration of all reachable composite states."""
    init = program.initial_state()
    init_labels = local_labels(program, init)
    normalized = any(init_labels)

    states: list[CompositeState] = []
    labels: list[tuple[bool, ...]] = []
    adj: list[list[tuple[Event, int]] | None] = []
    index: dict[CompositeState, int] = {}
    stutter: set[int] = set()
    n_transitions = 0

    def new_node(comp: CompositeState, labs: tuple[bool, ...]) -> int:
        if len(states) >= max_states:
            raise LimitExceeded(f"more than {max_states} states")
        states.append(comp)
        labels.append(labs)
        adj.append(None)
        return len(states) - 1

    if normalized:
        # copy shares the composite but not the labels; the labeled
        # original is only materialized if something transitions to it
        new_node(init, (False,) * len(init_labels))
    else:
        index[init] = new_node(init, init_labels)

    def lookup(comp: CompositeState) -> int:
        j = index.get(comp)
        if j is None:
            j = new_node(comp, local_labels(program, comp))
            index[comp] = j
            queue.append(j)
        return j

    queue: deque[int] = deque([0])
    while queue:
        i = queue.popleft()
        comp = states[i]
        enabled = enabled_events(program, comp)
        edges: list[tuple[Event, int]] = []
        if not enabled:
            stutter.add(i)
            if normalized and i == 0:
                edges.append((STUTTER, lookup(comp)))
            else:
                edges.append((STUTTER, i))
        else:
            for e in enabled:
                edges.append((e, lookup(step(program, comp, e))))
        n_transitions += len(edges)
        if n_transitions > max_transitions:
            raise LimitExceeded(f"more than {max_transitions} transitions")
        adj[i] = edges

    return ExploredLts(program, states, labels, adj, stutter, normalized)
