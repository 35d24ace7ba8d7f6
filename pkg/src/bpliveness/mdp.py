"""Reward-based arbitration.

Each transition earns the drop in the must-finish label (+1 for
discharging, -1 for taking an obligation on, 0 otherwise), so the
discounted optimal value of a state-event pair is above -1 exactly when
the pair can still lead to a live continuation.  An arbiter that keeps
the running reward sum plus the pair's optimal value above -1 picks only
events after which every obligation can still be met.

Three ways to fold the per-thread label vector into the scalar reward:

* "single": the OR of all labels.  Exact when a state discharging one
  obligation discharges all of them at once.
* "degeneralized": a round-robin counter is threaded through the state
  space (one copy of each state per pending-thread index) and the OR
  label of the product is used.  Exact for any number of threads, at the
  cost of up to a factor n_threads more states.
* "per_thread_sum": the sum of per-thread label drops.  A heuristic:
  cheap, but a gain for one thread can mask a loss for another.
"""

from __future__ import annotations

import json
import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .engine import Arbiter
from .events import Event
from .explore import ExploredLts

LABEL_MODES = ("single", "degeneralized", "per_thread_sum")

DEFAULT_GAMMA = 0.95
DEFAULT_EPSILON = 1e-6


def reward(labels_from, labels_to, mode: str = "single") -> int:
    """Reward of one transition from its endpoint label vectors."""
    if mode == "single":
        return int(any(labels_from)) - int(any(labels_to))
    if mode == "per_thread_sum":
        return sum(int(a) - int(b) for a, b in zip(labels_from, labels_to))
    raise ValueError(f"no label-vector reward for mode {mode!r}")


def _counter_step(labels_row, counter: int, n: int) -> tuple[bool, int]:
    """Round-robin acceptance counter.

    From thread index `counter` (1-based), skip past every consecutively
    discharged thread; passing the last one means a full round of
    obligations was discharged, which clears the product label and
    restarts the round.
    """
    j = counter
    while j <= n and not labels_row[j - 1]:
        j += 1
    if j > n:
        return False, 1
    return True, j


@dataclass
class MdpModel:
    """Deterministic decision process over (possibly counter-extended)
    explored states, flattened into per-pair arrays for value iteration."""

    lts: ExploredLts
    label_mode: str
    node_base: np.ndarray  # model node -> lts node
    node_counter: np.ndarray | None  # degeneralized only
    hot: np.ndarray  # bool per model node (label used for rewards)
    pair_indptr: np.ndarray
    pair_events: list[Event]
    pair_succ: np.ndarray
    pair_reward: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.node_base)

    @property
    def n_pairs(self) -> int:
        return len(self.pair_events)

    def pairs_at(self, node: int) -> range:
        return range(int(self.pair_indptr[node]), int(self.pair_indptr[node + 1]))

    def events_at(self, node: int) -> list[Event]:
        return [self.pair_events[p] for p in self.pairs_at(node)]

    def pair_of(self, node: int, event: Event) -> int:
        for p in self.pairs_at(node):
            if self.pair_events[p] == event:
                return p
        raise KeyError(f"no pair for {event} at model node {node}")


def build_mdp(lts: ExploredLts, label_mode: str = "single") -> MdpModel:
    if label_mode not in LABEL_MODES:
        raise ValueError(f"label_mode must be one of {LABEL_MODES}")

    if label_mode == "degeneralized":
        return _build_degeneralized(lts)

    n = lts.n_states
    if label_mode == "single":
        hot = lts.combined_labels()
        level = hot.astype(np.int64)
    else:  # per_thread_sum
        hot = lts.combined_labels()
        level = lts.label_matrix().sum(axis=1).astype(np.int64)

    pair_indptr = np.zeros(n + 1, dtype=np.int64)
    pair_events: list[Event] = []
    pair_succ: list[int] = []
    for i in range(n):
        for e, j in lts.adj[i]:
            pair_events.append(e)
            pair_succ.append(j)
        pair_indptr[i + 1] = len(pair_events)
    succ = np.array(pair_succ, dtype=np.int64)
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(pair_indptr))
    pair_reward = (level[src] - level[succ]).astype(np.float64)

    return MdpModel(
        lts=lts,
        label_mode=label_mode,
        node_base=np.arange(n, dtype=np.int64),
        node_counter=None,
        hot=hot,
        pair_indptr=pair_indptr,
        pair_events=pair_events,
        pair_succ=succ,
        pair_reward=pair_reward,
    )


def _build_degeneralized(lts: ExploredLts) -> MdpModel:
    n_threads = lts.n_threads
    labels = lts.labels

    index: dict[tuple[int, int], int] = {}
    nodes: list[tuple[int, int]] = []
    hot_list: list[bool] = []
    next_counter: list[int] = []

    def intern(base: int, counter: int) -> int:
        k = index.get((base, counter))
        if k is None:
            k = len(nodes)
            index[(base, counter)] = k
            nodes.append((base, counter))
            h, nc = _counter_step(labels[base], counter, n_threads)
            hot_list.append(h)
            next_counter.append(nc)
            queue.append(k)
        return k

    queue: deque[int] = deque()
    intern(lts.init_index, 1)
    adj_pairs: list[list[tuple[Event, int]]] = []
    while queue:
        k = queue.popleft()
        base, _ = nodes[k]
        nc = next_counter[k]
        edges = [(e, intern(j, nc)) for e, j in lts.adj[base]]
        while len(adj_pairs) <= k:
            adj_pairs.append([])
        adj_pairs[k] = edges

    m = len(nodes)
    hot = np.array(hot_list, dtype=bool)
    pair_indptr = np.zeros(m + 1, dtype=np.int64)
    pair_events: list[Event] = []
    pair_succ: list[int] = []
    for k in range(m):
        for e, j in adj_pairs[k]:
            pair_events.append(e)
            pair_succ.append(j)
        pair_indptr[k + 1] = len(pair_events)
    succ = np.array(pair_succ, dtype=np.int64)
    src = np.repeat(np.arange(m, dtype=np.int64), np.diff(pair_indptr))
    level = hot.astype(np.int64)
    pair_reward = (level[src] - level[succ]).astype(np.float64)

    return MdpModel(
        lts=lts,
        label_mode="degeneralized",
        node_base=np.array([b for b, _ in nodes], dtype=np.int64),
        node_counter=np.array([c for _, c in nodes], dtype=np.int64),
        hot=hot,
        pair_indptr=pair_indptr,
        pair_events=pair_events,
        pair_succ=succ,
        pair_reward=pair_reward,
    )


@dataclass
class QTable:
    """Per-pair action values plus the knobs they were computed with."""

    gamma: float
    epsilon: float
    label_mode: str
    residual: float
    pair_indptr: np.ndarray
    pair_events: list[Event]
    values: np.ndarray

    @property
    def n_pairs(self) -> int:
        return len(self.values)

    @property
    def n_nodes(self) -> int:
        return len(self.pair_indptr) - 1

    def q(self, node: int, event: Event) -> float:
        for p in range(int(self.pair_indptr[node]), int(self.pair_indptr[node + 1])):
            if self.pair_events[p] == event:
                return float(self.values[p])
        raise KeyError(f"no value for {event} at node {node}")

    def best_value(self, node: int) -> float:
        seg = self.values[self.pair_indptr[node] : self.pair_indptr[node + 1]]
        return float(seg.max())


def value_iteration(
    model: MdpModel,
    gamma: float = DEFAULT_GAMMA,
    epsilon: float = DEFAULT_EPSILON,
    tol: float = 1e-9,
    max_sweeps: int = 100_000,
    sweeps_per_check: int = 20,
) -> QTable:
    """Iterate the optimality equation to (near) fixed point.

    The final sweep's max update, shrunk by gamma/(1-gamma), bounds the
    distance to the true values; a warning fires if that bound is not
    comfortably below the compatibility margin epsilon.
    """
    if not (0.0 < gamma < 1.0):
        raise ValueError("gamma must be in (0, 1)")
    q = np.zeros(model.n_pairs)
    done = 0
    residual = np.inf
    while done < max_sweeps and residual > tol:
        chunk = min(sweeps_per_check, max_sweeps - done)
        residual = _kernels.vi_sweeps(
            q, model.pair_indptr, model.pair_succ, model.pair_reward, gamma, chunk
        )
        done += chunk
    error_bound = residual * gamma / (1.0 - gamma)
    if error_bound > epsilon / 10.0:
        warnings.warn(
            f"value iteration stopped with error bound {error_bound:.3g}, "
            f"not small against epsilon={epsilon:.3g}",
            RuntimeWarning,
        )
    return QTable(
        gamma=gamma,
        epsilon=epsilon,
        label_mode=model.label_mode,
        residual=float(residual),
        pair_indptr=model.pair_indptr,
        pair_events=model.pair_events,
        values=q,
    )


def compatible_events(
    qtable: QTable, node: int, cumulative: float, enabled=None
) -> list[Event]:
    """Events at the node whose value keeps a live continuation possible:
    running reward sum plus pair value strictly above -1 (margin epsilon)."""
    lo = int(qtable.pair_indptr[node])
    hi = int(qtable.pair_indptr[node + 1])
    out = []
    for p in range(lo, hi):
        e = qtable.pair_events[p]
        if enabled is not None and e not in enabled:
            continue
        if cumulative + float(qtable.values[p]) > -1.0 + qtable.epsilon:
            out.append(e)
    return out


def compatible_by_label(qtable: QTable, node: int, level: int, enabled=None) -> list[Event]:
    """Shortcut form: the running sum always telescopes to minus the
    current label level, so the test reduces to a per-state threshold."""
    threshold = level - 1.0 + qtable.epsilon
    lo = int(qtable.pair_indptr[node])
    hi = int(qtable.pair_indptr[node + 1])
    out = []
    for p in range(lo, hi):
        e = qtable.pair_events[p]
        if enabled is not None and e not in enabled:
            continue
        if float(qtable.values[p]) > threshold:
            out.append(e)
    return out


class RewardTracker:
    """Walks the model alongside a run, accumulating rewards.

    Starts at model node 0 with sum 0; because the explorer replaces a
    labeled entry state with an unlabeled copy, the sum after t steps
    automatically equals the label-drop telescoping with the entry label
    zeroed out.
    """

    def __init__(self, model: MdpModel):
        self.model = model
        self.reset()

    def reset(self):
        self.node = 0
        self.cumulative = 0.0

    def advance(self, event: Event) -> float:
        p = self.model.pair_of(self.node, event)
        r = float(self.model.pair_reward[p])
        self.cumulative += r
        self.node = int(self.model.pair_succ[p])
        return r


class QCompatibleArbiter(Arbiter):
    """Samples uniformly among the compatible enabled events.

    dead_end_policy controls what happens when no enabled event is
    compatible (possible: optimal values can stay above -1 along a path
    that nevertheless ends in a trap):

    * "report": give up; the run terminates as arbiter-stuck.
    * "fallback": take any enabled event and keep going.
    """

    def __init__(self, model: MdpModel, qtable: QTable, dead_end_policy: str = "report"):
        if dead_end_policy not in ("report", "fallback"):
            raise ValueError("dead_end_policy must be 'report' or 'fallback'")
        if qtable.n_pairs != model.n_pairs:
            raise ValueError("q-table does not match the model's pair layout")
        self.model = model
        self.qtable = qtable
        self.dead_end_policy = dead_end_policy
        self.tracker = RewardTracker(model)
        self.dead_ends_hit = 0
        self._msg = None

    def reset(self, program, seed):
        super().reset(program, seed)
        if program is not self.model.lts.program:
            raise ValueError("arbiter was solved for a different program")
        self.tracker.reset()
        self._msg = None

    def choose(self, state, enabled):
        compat = compatible_events(
            self.qtable, self.tracker.node, self.tracker.cumulative, enabled=set(enabled)
        )
        if not compat:
            self.dead_ends_hit += 1
            if self.dead_end_policy == "fallback":
                return enabled[self._rng.randrange(len(enabled))]
            self._msg = (
                f"no event keeps liveness reachable at model node "
                f"{self.tracker.node} (running sum {self.tracker.cumulative:+g})"
            )
            return None
        return compat[self._rng.randrange(len(compat))]

    def observe(self, state, event, next_state):
        self.tracker.advance(event)

    def conflict_message(self):
        return self._msg


def mdp_arbiter(
    lts: ExploredLts,
    label_mode: str = "single",
    gamma: float = DEFAULT_GAMMA,
    epsilon: float = DEFAULT_EPSILON,
    dead_end_policy: str = "report",
    qtable: QTable = None,
) -> QCompatibleArbiter:
    """Build the decision process, solve it (unless a table is supplied),
    and wrap the result in an arbiter."""
    model = build_mdp(lts, label_mode)
    if qtable is None:
        qtable = value_iteration(model, gamma=gamma, epsilon=epsilon)
    return QCompatibleArbiter(model, qtable, dead_end_policy=dead_end_policy)


def perturb_q(qtable: QTable, sigma: float, rng: np.random.Generator) -> QTable:
    """Fresh table with independent Gaussian noise added to every value."""
    noisy = qtable.values + sigma * rng.standard_normal(len(qtable.values))
    return QTable(
        gamma=qtable.gamma,
        epsilon=qtable.epsilon,
        label_mode=qtable.label_mode,
        residual=qtable.residual,
        pair_indptr=qtable.pair_indptr,
        pair_events=qtable.pair_events,
        values=noisy,
    )


def save_qtable(qtable: QTable, path: str) -> None:
    """Text export: one JSON header line, then node / event / value rows."""
    with open(path, "w") as fh:
        fh.write(
            json.dumps(
                {
                    "schema": "bpliveness/qtable/1",
                    "gamma": qtable.gamma,
                    "epsilon": qtable.epsilon,
                    "label_mode": qtable.label_mode,
                    "residual": qtable.residual,
                    "n_nodes": qtable.n_nodes,
                    "n_pairs": qtable.n_pairs,
                }
            )
            + "\n"
        )
        for node in range(qtable.n_nodes):
            for p in range(int(qtable.pair_indptr[node]), int(qtable.pair_indptr[node + 1])):
                event_json = json.dumps(qtable.pair_events[p].to_json())
                fh.write(f"{node}\t{event_json}\t{float(qtable.values[p])!r}\n")


def load_qtable(path: str, model: MdpModel = None) -> QTable:
    """Read a saved table; with a model, verify the pair layout matches
    (same nodes, same events in the same order) and bind to it."""
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("schema") != "bpliveness/qtable/1":
            raise ValueError("not a q-table file")
        rows = []
        for line in fh:
            if not line.strip():
                continue
            node_s, event_s, value_s = line.rstrip("\n").split("\t")
            rows.append((int(node_s), Event.from_json(json.loads(event_s)), float(value_s)))

    if len(rows) != header["n_pairs"]:
        raise ValueError("q-table row count does not match header")

    if model is not None:
        if model.label_mode != header["label_mode"]:
            raise ValueError(
                f"table was computed for label_mode {header['label_mode']!r}, "
                f"model uses {model.label_mode!r}"
            )
        if model.n_pairs != len(rows):
            raise ValueError("q-table does not match the model's pair layout")
        values = np.empty(len(rows))
        src = np.repeat(
            np.arange(model.n_nodes, dtype=np.int64), np.diff(model.pair_indptr)
        )
        for p, (node, event, value) in enumerate(rows):
            if int(src[p]) != node or model.pair_events[p] != event:
                raise ValueError(f"q-table row {p} does not match the model")
            values[p] = value
        pair_indptr = model.pair_indptr
        pair_events = model.pair_events
    else:
        n_nodes = header["n_nodes"]
        pair_indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        pair_events = []
        values = np.empty(len(rows))
        for p, (node, event, value) in enumerate(rows):
            if node < 0 or node >= n_nodes:
                raise ValueError(f"q-table row {p} has out-of-range node {node}")
            pair_indptr[node + 1] += 1
            pair_events.append(event)
            values[p] = value
        if not all(rows[p][0] <= rows[p + 1][0] for p in range(len(rows) - 1)):
            raise ValueError("q-table rows must be grouped by ascending node")
        pair_indptr = np.cumsum(pair_indptr)

    return QTable(
        gamma=header["gamma"],
        epsilon=header["epsilon"],
        label_mode=header["label_mode"],
        residual=header["residual"],
        pair_indptr=pair_indptr,
        pair_events=pair_events,
        values=values,
    )
