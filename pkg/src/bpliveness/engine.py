"""Synchronous execution semantics: enabled events, stepping, runs.

At every synchronization point the enabled events are the union of all
requested events minus all blocked events, in canonical order.  An
arbiter picks one; every thread whose filter and request-or-wait set
match the pick advances, all others keep their local state.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .events import Event, canonical_events
from .program import BProgram, CompositeState, ModelError


class NotEnabledError(ValueError):
    """step() was handed an event that is not enabled; an arbiter or
    back-end bug, never a legal model behavior."""


def _statements(program: BProgram, state: CompositeState):
    return [t.statement(s) for t, s in zip(program.threads, state.locals)]


def enabled_events(program: BProgram, state: CompositeState) -> list[Event]:
    """Requested-and-not-blocked events in canonical order (deduplicated)."""
    stmts = _statements(program, state)
    requested = canonical_events(e for st in stmts for e in st.request)
    if not requested:
        return []
    blocks = [st.block for st in stmts]
    return [e for e in requested if not any(e in b for b in blocks)]


def step(program: BProgram, state: CompositeState, event: Event) -> CompositeState:
    """Advance the composite state on one enabled event.

    Raises NotEnabledError if the event is not requested by any thread
    or is blocked by some thread.
    """
    stmts = _statements(program, state)
    if not any(event in st.request for st in stmts):
        raise NotEnabledError(f"{event} is not requested at {state!r}")
    for t, st in zip(program.threads, stmts):
        if event in st.block:
            raise NotEnabledError(f"{event} is blocked by thread {t.id!r} at {state!r}")
    return CompositeState(t.advance(s, event) for t, s in zip(program.threads, state.locals))


def local_labels(program: BProgram, state: CompositeState) -> tuple[bool, ...]:
    """Per-thread must-finish labels of a composite state."""
    return tuple(t.statement(s).must_finish for t, s in zip(program.threads, state.locals))


@dataclass
class Trace:
    """A finite run: visited states, chosen events, per-state label
    vectors, and the running single-mode reward sum.

    The reward convention treats the label at step 0 as 0 (the run
    starts from an extra unlabeled instant), so the running sum after
    step t is minus the combined label of the state reached.
    """

    program: BProgram
    states: list[CompositeState]
    events: list[Event]
    labels: list[tuple[bool, ...]]
    cumulative_reward: list[float]
    terminated_reason: str  # "deadlock" | "step-limit" | "arbiter-stuck"
    stuck_message: str | None = None

    def __len__(self) -> int:
        return len(self.events)


class Arbiter:
    """Event selection strategy; reset is called once per run with the seed."""

    def reset(self, program: BProgram, seed: int) -> None:
        self._rng = random.Random(seed)

    def choose(self, state: CompositeState, enabled: list[Event]) -> Event | None:
        raise NotImplementedError

    def observe(self, state: CompositeState, event: Event, next_state: CompositeState) -> None:
        pass

    def conflict_message(self) -> str | None:
        return None


class RandomArbiter(Arbiter):
    """Uniform choice over the enabled events."""

    def choose(self, state: CompositeState, enabled: list[Event]) -> Event | None:
        return enabled[self._rng.randrange(len(enabled))]


def run(program: BProgram, arbiter: Arbiter, max_steps: int, seed: int) -> Trace:
    """Execute up to max_steps events; identical inputs give identical traces."""
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    arbiter.reset(program, seed)
    state = program.initial_state()
    labels = local_labels(program, state)
    trace = Trace(program, [state], [], [labels], [0.0], "step-limit")
    prev_combined = False  # step-0 label convention
    for _ in range(max_steps):
        enabled = enabled_events(program, state)
        if not enabled:
            trace.terminated_reason = "deadlock"
            break
        event = arbiter.choose(state, enabled)
        if event is None:
            trace.terminated_reason = "arbiter-stuck"
            trace.stuck_message = arbiter.conflict_message()
            break
        nxt = step(program, state, event)
        arbiter.observe(state, event, nxt)
        labels = local_labels(program, nxt)
        combined = any(labels)
        reward = int(prev_combined) - int(combined)
        trace.states.append(nxt)
        trace.events.append(event)
        trace.labels.append(labels)
        trace.cumulative_reward.append(trace.cumulative_reward[-1] + reward)
        prev_combined = combined
        state = nxt
    return trace


def is_live_finite(trace: Trace) -> bool:
    """Liveness verdict for a deadlocked run: the final state stutters
    forever, so the run is live iff every label there is 0."""
    if trace.terminated_reason != "deadlock":
        raise ValueError("is_live_finite applies only to deadlocked traces")
    return not any(trace.labels[-1])


def trace_to_jsonl(trace: Trace) -> str:
    """Line-delimited export: header, one record per step, footer."""
    lines = [
        json.dumps(
            {
                "schema": "bpliveness/trace/1",
                "threads": list(trace.program.thread_ids),
                "init_state": trace.states[0].stable_digest(),
                "init_labels": [int(v) for v in trace.labels[0]],
            }
        )
    ]
    for t, event in enumerate(trace.events):
        lines.append(
            json.dumps(
                {
                    "step": t,
                    "event": event.to_json(),
                    "state": trace.states[t + 1].stable_digest(),
                    "labels": [int(v) for v in trace.labels[t + 1]],
                    "reward_sum": trace.cumulative_reward[t + 1],
                }
            )
        )
    lines.append(json.dumps({"terminated": trace.terminated_reason, "steps": len(trace.events)}))
    return "\n".join(lines) + "\n"
