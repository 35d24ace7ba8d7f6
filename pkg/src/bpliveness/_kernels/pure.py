"""Numpy reference kernels.

The compiled twin in _speedups.pyx mirrors these operation-for-operation
(same reduction order, no FMA contraction), so at a fixed sweep count the
two backends produce bit-identical floats.
"""

from __future__ import annotations

import numpy as np


def scc_labels(indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Strongly connected component id per node of a CSR digraph.

    Ids are canonical: component k is the k-th distinct component
    encountered when scanning nodes 0..n-1, so any correct SCC
    decomposition relabels to the same array.
    """
    n = len(indptr) - 1
    disc = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    comp = np.full(n, -1, dtype=np.int64)
    scc_stack: list[int] = []
    counter = 0
    ncomp = 0

    # Tarjan, iterative: work holds (node, next edge offset) frames.
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = counter
        counter += 1
        scc_stack.append(root)
        on_stack[root] = True
        work = [(root, int(indptr[root]))]
        while work:
            v, ptr = work[-1]
            if ptr < indptr[v + 1]:
                work[-1] = (v, ptr + 1)
                w = int(indices[ptr])
                if disc[w] == -1:
                    disc[w] = low[w] = counter
                    counter += 1
                    scc_stack.append(w)
                    on_stack[w] = True
                    work.append((w, int(indptr[w])))
                elif on_stack[w] and disc[w] < low[v]:
                    low[v] = disc[w]
            else:
                work.pop()
                if work and low[v] < low[work[-1][0]]:
                    low[work[-1][0]] = low[v]
                if low[v] == disc[v]:
                    while True:
                        w = scc_stack.pop()
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1

    remap = np.full(ncomp, -1, dtype=np.int64)
    nxt = 0
    for v in range(n):
        if remap[comp[v]] == -1:
            remap[comp[v]] = nxt
            nxt += 1
    return remap[comp]


def vi_sweeps(
    q: np.ndarray,
    pair_indptr: np.ndarray,
    succ: np.ndarray,
    reward: np.ndarray,
    gamma: float,
    sweeps: int,
) -> float:
    """Jacobi value-iteration sweeps over state-event pairs, in place.

    Pair p of state s lives at q[pair_indptr[s]:pair_indptr[s+1]]; succ
    and reward are per pair.  Each sweep recomputes every pair from the
    previous sweep's values.  Returns the max-abs update of the final
    sweep (0.0 when sweeps == 0).
    """
    if np.any(np.diff(pair_indptr) == 0):
        raise ValueError("every state needs at least one outgoing pair")
    starts = pair_indptr[:-1]
    residual = 0.0
    for _ in range(sweeps):
        v = np.maximum.reduceat(q, starts)
        q_new = reward + gamma * v[succ]
        residual = float(np.max(np.abs(q_new - q)))
        q[:] = q_new
    return residual
