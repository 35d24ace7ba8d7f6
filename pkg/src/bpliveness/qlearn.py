"""Tabular Q-learning over an explored model.

The model graph is deterministic, so a full-step backup (alpha 1) is an
exact asynchronous value iteration update and the learned table converges
to the same fixed point the sweep-based solver finds, as long as
exploration keeps visiting every pair. The point of having this next to
value_iteration is that it only touches pairs along sampled runs, which
is the regime where a learned table, not an exact one, feeds the
compatibility arbiter.
"""

from __future__ import annotations

import random

import numpy as np

from . import _kernels
from .mdp import DEFAULT_EPSILON, DEFAULT_GAMMA, MdpModel, QTable


def bellman_residual(model: MdpModel, values: np.ndarray, gamma: float) -> float:
    """Max |one exact backup - values|, the table's distance from a fixed point."""
    probe = values.astype(np.float64, copy=True)
    return float(
        _kernels.vi_sweeps(
            probe,
            model.pair_indptr,
            model.pair_succ,
            model.pair_reward,
            gamma,
            1,
        )
    )


def q_learning(
    model: MdpModel,
    gamma: float = DEFAULT_GAMMA,
    episodes: int = 500,
    horizon: int = 100,
    alpha: float = 1.0,
    explore_rate: float = 0.2,
    seed: int = 0,
    epsilon: float = DEFAULT_EPSILON,
    restart: str = "sweep",
) -> QTable:
    """Learn a Q table by masked epsilon-greedy rollouts.

    Episodes walk `horizon` steps; illegal events never appear because
    actions are drawn from the node's pair segment. With restart "sweep"
    episode i opens by taking pair i mod n_pairs from its source node, so
    every pair keeps getting backups even when the greedy policy would
    never pick it; "entry" always restarts at node 0 and learns only what
    rollouts from the entry can reach. Returns the same table shape
    value_iteration produces, with the true Bellman residual of the
    learned values in `residual`.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not 0.0 <= explore_rate <= 1.0:
        raise ValueError(f"explore_rate must be in [0, 1], got {explore_rate}")
    if episodes <= 0 or horizon <= 0:
        raise ValueError("episodes and horizon must be positive")
    if restart not in ("sweep", "entry"):
        raise ValueError(f"restart must be 'sweep' or 'entry', got {restart!r}")

    rng = random.Random(seed)
    indptr = model.pair_indptr
    n_pairs = len(model.pair_events)
    values = np.zeros(n_pairs, dtype=np.float64)

    def backup(pair: int) -> int:
        succ = int(model.pair_succ[pair])
        target = model.pair_reward[pair] + gamma * float(
            values[indptr[succ] : indptr[succ + 1]].max()
        )
        values[pair] += alpha * (target - values[pair])
        return succ

    for episode in range(episodes):
        if restart == "sweep":
            first = episode % n_pairs
            node = backup(first)
            remaining = horizon - 1
        else:
            node = 0
            remaining = horizon
        for _ in range(remaining):
            lo, hi = int(indptr[node]), int(indptr[node + 1])
            if rng.random() < explore_rate:
                pair = rng.randrange(lo, hi)
            else:
                pair = lo + int(np.argmax(values[lo:hi]))
            node = backup(pair)

    return QTable(
        gamma=gamma,
        epsilon=epsilon,
        label_mode=model.label_mode,
        residual=bellman_residual(model, values, gamma),
        pair_indptr=model.pair_indptr,
        pair_events=model.pair_events,
        values=values,
    )
