"""Lasso words (finite stem + repeated loop) over an explored system.

Used in two places: counterexample witnesses for stuck must-finish
obligations, and bounded enumeration for checking pattern threads
against temporal formulas.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .events import Event
from .explore import ExploredLts


@dataclass(frozen=True)
class Lasso:
    stem: tuple[Event, ...]
    loop: tuple[Event, ...]

    def __post_init__(self):
        if not self.loop:
            raise ValueError("a lasso needs a nonempty loop")

    def render(self) -> str:
        head = " ".join(str(e) for e in self.stem)
        body = " ".join(str(e) for e in self.loop)
        return (head + " " if head else "") + f"( {body} )^w"


@dataclass(frozen=True)
class HotLassoWitness:
    """One never-finishing run: thread, the trapped component, a word."""

    thread_id: str
    thread_index: int
    scc_nodes: tuple[int, ...]
    lasso: Lasso


def walk(lts: ExploredLts, start: int, events) -> list[int]:
    """Nodes visited by an event sequence; KeyError if it leaves the graph."""
    nodes = [start]
    for e in events:
        nodes.append(lts.target(nodes[-1], e))
    return nodes


def replay_lasso(lts: ExploredLts, lasso: Lasso) -> tuple[list[int], list[int]]:
    """Validate a lasso against the transition system.

    Returns (stem nodes, loop nodes); raises ValueError if the loop does
    not return to its entry node.
    """
    stem_nodes = walk(lts, lts.init_index, lasso.stem)
    loop_nodes = walk(lts, stem_nodes[-1], lasso.loop)
    if loop_nodes[-1] != stem_nodes[-1]:
        raise ValueError("loop does not close")
    return stem_nodes, loop_nodes


def lasso_is_live(lts: ExploredLts, lasso: Lasso) -> bool:
    """Every thread drops its label somewhere along the loop."""
    nodes = walk(lts, lts.init_index, list(lasso.stem) + list(lasso.loop))
    loop_nodes = nodes[len(lasso.stem) : -1] + [nodes[-1]]
    labels = lts.label_matrix()[loop_nodes]
    return bool((~labels).any(axis=0).all())


def _bfs_events(lts: ExploredLts, sources, goal) -> tuple[Event, ...] | None:
    """Shortest event path from any source to a goal node set.

    Deterministic: nodes dequeue in insertion order and edges scan in
    canonical event order, so ties break the same way every run.
    """
    goal = set(goal)
    parent: dict[int, tuple[int, Event] | None] = {}
    queue: deque[int] = deque()
    for s in sources:
        if s not in parent:
            parent[s] = None
            queue.append(s)
    while queue:
        u = queue.popleft()
        if u in goal:
            out: list[Event] = []
            while parent[u] is not None:
                u, e = parent[u][0], parent[u][1]
                out.append(e)
            return tuple(reversed(out))
        for e, v in lts.adj[u]:
            if v not in parent:
                parent[v] = (u, e)
                queue.append(v)
    return None


def _shortest_loop(lts: ExploredLts, entry: int, allowed: set[int]) -> tuple[Event, ...]:
    """Shortest nonempty cycle through entry using only allowed nodes."""
    parent: dict[int, tuple[int, Event]] = {}
    queue: deque[int] = deque()
    for e, v in lts.adj[entry]:
        if v == entry:
            return (e,)
        if v in allowed and v not in parent:
            parent[v] = (entry, e)
            queue.append(v)
    while queue:
        u = queue.popleft()
        for e, v in lts.adj[u]:
            if v == entry:
                out = [e]
                while u != entry:
                    u, pe = parent[u]
                    out.append(pe)
                return tuple(reversed(out))
            if v in allowed and v not in parent:
                parent[v] = (u, e)
                queue.append(v)
    raise AssertionError("entry node is in a strongly connected set but no cycle found")


def find_hot_lassos(lts: ExploredLts, thread_index: int | None = None) -> list[HotLassoWitness]:
    """One witness per region a thread can get trapped in while hot.

    For each thread, take the subgraph of states where its obligation is
    pending; every nontrivial strongly connected component of that
    subgraph admits a run that never discharges the obligation.  The
    witness uses the overall shortest stem from the initial state and
    the shortest loop through the stem's entry point.
    """
    which = range(lts.n_threads) if thread_index is None else [thread_index]
    label_matrix = lts.label_matrix()
    witnesses: list[HotLassoWitness] = []
    for ti in which:
        hot = [i for i in range(lts.n_states) if label_matrix[i, ti]]
        if not hot:
            continue
        sub_id = {node: k for k, node in enumerate(hot)}
        indptr = np.zeros(len(hot) + 1, dtype=np.int64)
        edges: list[int] = []
        self_loop = set()
        for k, node in enumerate(hot):
            for e, j in lts.adj[node]:
                if j in sub_id:
                    edges.append(sub_id[j])
                    if j == node:
                        self_loop.add(k)
            indptr[k + 1] = len(edges)
        comp = _kernels.scc_labels(indptr, np.array(edges, dtype=np.int64))
        sizes = np.bincount(comp, minlength=int(comp.max()) + 1 if len(comp) else 0)
        for c in range(len(sizes)):
            members = [hot[k] for k in range(len(hot)) if comp[k] == c]
            nontrivial = len(members) > 1 or sub_id[members[0]] in self_loop
            if not nontrivial:
                continue
            stem = _bfs_events(lts, [lts.init_index], members)
            if stem is None:
                continue  # hot cycle exists but is unreachable
            entry = walk(lts, lts.init_index, stem)[-1]
            loop = _shortest_loop(lts, entry, set(members))
            witnesses.append(
                HotLassoWitness(
                    thread_id=lts.program.threads[ti].id,
                    thread_index=ti,
                    scc_nodes=tuple(members),
                    lasso=Lasso(stem, loop),
                )
            )
    return witnesses


def enumerate_lassos(lts: ExploredLts, stem_bound: int, loop_bound: int):
    """Every lasso with |stem| <= stem_bound and 1 <= |loop| <= loop_bound.

    Walks may revisit nodes.  Intended for small pattern alphabets; the
    count grows as branching^(stem_bound + loop_bound).
    """
    if loop_bound < 1:
        raise ValueError("loop_bound must be at least 1")
    stems: list[tuple[int, tuple[Event, ...]]] = [(lts.init_index, ())]
    frontier = [(lts.init_index, ())]
    while frontier:
        nxt: list[tuple[int, tuple[Event, ...]]] = []
        for u, path in frontier:
            if len(path) < stem_bound:
                nxt.extend((v, path + (e,)) for e, v in lts.adj[u])
        stems.extend(nxt)
        frontier = nxt
    for u, stem in stems:
        stack = [(u, ())]
        while stack:
            v, path = stack.pop()
            if path and v == u:
                yield Lasso(stem, path)
            if len(path) < loop_bound:
                for e, w in lts.adj[v]:
                    stack.append((w, path + (e,)))
