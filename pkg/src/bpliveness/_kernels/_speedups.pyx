# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels, mirroring bpliveness._kernels.pure operation for
operation: same traversal order in the SCC labeling, same reduction and
update order in the value-iteration sweeps. Compiled with FMA contraction
off so a fixed number of sweeps produces bit-identical floats to the
numpy fallback.
"""

import numpy as np

from libc.math cimport fabs


def scc_labels(indptr, indices):
    """Strongly connected component id per node of a CSR digraph.

    Ids are canonical: component k is the k-th distinct component
    encountered when scanning nodes 0..n-1.
    """
    cdef long long[::1] iptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef long long[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t n = iptr.shape[0] - 1

    disc_arr = np.full(n, -1, dtype=np.int64)
    low_arr = np.zeros(n, dtype=np.int64)
    on_stack_arr = np.zeros(n, dtype=np.int8)
    comp_arr = np.full(n, -1, dtype=np.int64)
    scc_stack_arr = np.empty(n, dtype=np.int64)
    work_node_arr = np.empty(n, dtype=np.int64)
    work_ptr_arr = np.empty(n, dtype=np.int64)

    cdef long long[::1] disc = disc_arr
    cdef long long[::1] low = low_arr
    cdef signed char[::1] on_stack = on_stack_arr
    cdef long long[::1] comp = comp_arr
    cdef long long[::1] scc_stack = scc_stack_arr
    cdef long long[::1] work_node = work_node_arr
    cdef long long[::1] work_ptr = work_ptr_arr

    cdef Py_ssize_t scc_top = 0, work_top = 0
    cdef long long counter = 0, ncomp = 0
    cdef long long root, v, w, ptr

    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = counter
        low[root] = counter
        counter += 1
        scc_stack[scc_top] = root
        scc_top += 1
        on_stack[root] = 1
        work_node[work_top] = root
        work_ptr[work_top] = iptr[root]
        work_top += 1
        while work_top > 0:
            v = work_node[work_top - 1]
            ptr = work_ptr[work_top - 1]
            if ptr < iptr[v + 1]:
                work_ptr[work_top - 1] = ptr + 1
                w = idx[ptr]
                if disc[w] == -1:
                    disc[w] = counter
                    low[w] = counter
                    counter += 1
                    scc_stack[scc_top] = w
                    scc_top += 1
                    on_stack[w] = 1
                    work_node[work_top] = w
                    work_ptr[work_top] = iptr[w]
                    work_top += 1
                elif on_stack[w] and disc[w] < low[v]:
                    low[v] = disc[w]
            else:
                work_top -= 1
                if work_top > 0 and low[v] < low[work_node[work_top - 1]]:
                    low[work_node[work_top - 1]] = low[v]
                if low[v] == disc[v]:
                    while True:
                        w = scc_stack[scc_top - 1]
                        scc_top -= 1
                        on_stack[w] = 0
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1

    remap_arr = np.full(ncomp, -1, dtype=np.int64)
    cdef long long[::1] remap = remap_arr
    cdef long long nxt = 0
    for v in range(n):
        if remap[comp[v]] == -1:
            remap[comp[v]] = nxt
            nxt += 1
        comp[v] = remap[comp[v]]
    return comp_arr


def vi_sweeps(q, pair_indptr, succ, reward, double gamma, long long sweeps):
    """Jacobi value-iteration sweeps over state-event pairs, in place.

    Same contract as the numpy version: q is updated in place and the
    max-abs update of the final sweep comes back (0.0 when sweeps == 0).
    """
    cdef double[::1] qv = q
    cdef long long[::1] iptr = np.ascontiguousarray(pair_indptr, dtype=np.int64)
    cdef long long[::1] sv = np.ascontiguousarray(succ, dtype=np.int64)
    cdef double[::1] rv = np.ascontiguousarray(reward, dtype=np.float64)
    cdef Py_ssize_t n_states = iptr.shape[0] - 1
    cdef Py_ssize_t n_pairs = qv.shape[0]
    cdef Py_ssize_t s, p
    cdef long long k
    cdef double best, cand, residual = 0.0, diff

    for s in range(n_states):
        if iptr[s] == iptr[s + 1]:
            raise ValueError("every state needs at least one outgoing pair")

    v_arr = np.empty(n_states, dtype=np.float64)
    q_new_arr = np.empty(n_pairs, dtype=np.float64)
    cdef double[::1] v = v_arr
    cdef double[::1] q_new = q_new_arr

    for k in range(sweeps):
        for s in range(n_states):
            best = qv[iptr[s]]
            for p in range(iptr[s] + 1, iptr[s + 1]):
                cand = qv[p]
                if cand > best:
                    best = cand
            v[s] = best
        residual = 0.0
        for p in range(n_pairs):
            q_new[p] = rv[p] + gamma * v[sv[p]]
            diff = fabs(q_new[p] - qv[p])
            if diff > residual:
                residual = diff
        for p in range(n_pairs):
            qv[p] = q_new[p]
    return residual
