"""Behavioral programs with must-finish liveness: execution, model
checking, and reward-based event arbitration."""

from .events import ALL_EVENTS, NO_EVENTS, STUTTER, Event, EventSet, canonical_events
from .program import BProgram, BThreadDef, CompositeState, ModelError, SyncStatement
from .engine import (
    Arbiter,
    RandomArbiter,
    Trace,
    enabled_events,
    is_live_finite,
    local_labels,
    run,
    step,
    trace_to_jsonl,
)
from .explore import ExploredLts, LimitExceeded, explore
from .gba import UnrealizableError, WinningSet, WinningSetArbiter, gba_arbiter, solve
from .lasso import HotLassoWitness, Lasso, enumerate_lassos, find_hot_lassos, lasso_is_live
from .mdp import (
    MdpModel,
    QCompatibleArbiter,
    QTable,
    build_mdp,
    compatible_events,
    load_qtable,
    mdp_arbiter,
    perturb_q,
    save_qtable,
    value_iteration,
)
from .qlearn import bellman_residual, q_learning
from .verifier import VerificationReport, verify

__version__ = "0.1.0"

__all__ = [
    "ALL_EVENTS",
    "NO_EVENTS",
    "STUTTER",
    "Event",
    "EventSet",
    "canonical_events",
    "BProgram",
    "BThreadDef",
    "CompositeState",
    "ModelError",
    "SyncStatement",
    "Arbiter",
    "RandomArbiter",
    "Trace",
    "enabled_events",
    "is_live_finite",
    "local_labels",
    "run",
    "step",
    "trace_to_jsonl",
    "ExploredLts",
    "LimitExceeded",
    "explore",
    "UnrealizableError",
    "WinningSet",
    "WinningSetArbiter",
    "gba_arbiter",
    "solve",
    "HotLassoWitness",
    "Lasso",
    "enumerate_lassos",
    "find_hot_lassos",
    "lasso_is_live",
    "MdpModel",
    "QCompatibleArbiter",
    "QTable",
    "build_mdp",
    "compatible_events",
    "load_qtable",
    "mdp_arbiter",
    "perturb_q",
    "save_qtable",
    "value_iteration",
    "bellman_residual",
    "q_learning",
    "VerificationReport",
    "verify",
    "__version__",
]
