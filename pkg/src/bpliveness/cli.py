"""Command line front end.

Models are named corpus entries (see `bpliveness explore --list`),
`board:PATH[:MODE]` for a Sokoban board file, or a parameterized level
crossing: `crossing:GOAL[,MAINTENANCE[,GAP]]` for the full crossing and
`requesters:GOAL[,MAINTENANCE[,GAP]]` for the requesters-only family.
Machine-readable outputs go to files via --json/--csv/--trace; the
terminal gets a short text account. Exit codes: 0 done, 1 usage error,
2 unrealizable model or a stuck arbiter.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import _kernels
from .engine import RandomArbiter, is_live_finite, run, trace_to_jsonl
from .explore import LimitExceeded, explore
from .gba import UnrealizableError, gba_arbiter, report_json, solve, solve_or_raise
from .lasso import walk
from .mdp import (
    DEFAULT_EPSILON,
    DEFAULT_GAMMA,
    LABEL_MODES,
    QCompatibleArbiter,
    build_mdp,
    load_qtable,
    perturb_q,
    save_qtable,
    value_iteration,
)
from .models import corpus, level_crossing
from .models.sokoban import sokoban_program
from .patterns import (
    EVENTUALLY_ALWAYS_FORMULA,
    EXISTENCE_FORMULA,
    RESPONSE_FORMULA,
    check_conformance,
    eventually_always,
    existence_after,
    pattern_program,
    response_in_scope,
    signal_alphabet,
)
from .program import ModelError
from .verifier import verify

NOISE_MODELS = (
    "sokoban-corridor",
    "sokoban-trap",
    "sokoban-room",
    "sokoban-two-boxes",
    "lc-classic",
    "lc-maintenance",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(1)


def _crossing_params(text: str) -> tuple[int, int, int]:
    # "goal" or "goal,maintenance" or "goal,maintenance,gap"
    parts = text.split(",")
    if len(parts) > 3:
        raise ValueError(f"expected GOAL[,MAINTENANCE[,GAP]], got {text!r}")
    nums = [int(p) for p in parts]
    n = nums[0]
    m = nums[1] if len(nums) > 1 else n
    k = nums[2] if len(nums) > 2 else 2
    return n, m, k


def resolve_model(spec: str):
    if spec.startswith("board:"):
        rest = spec[len("board:") :]
        path, _, mode = rest.partition(":")
        with open(path) as fh:
            return sokoban_program(fh.read(), liveness=mode or "all_boxes")
    if spec.startswith("crossing:"):
        n, m, k = _crossing_params(spec[len("crossing:") :])
        return level_crossing.crossing_with_maintenance(n, m, k)
    if spec.startswith("requesters:"):
        n, m, k = _crossing_params(spec[len("requesters:") :])
        return level_crossing.requesters_only(n, m, k)
    return corpus.build(spec)


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _explore_args(p: _Parser) -> None:
    p.add_argument(
        "model",
        help="corpus name, board:PATH[:MODE], crossing:N[,M[,K]], or requesters:N[,M[,K]]",
    )
    p.add_argument("--max-states", type=int, default=1_000_000)
    p.add_argument("--max-transitions", type=int, default=10_000_000)


def _explored(args):
    return explore(
        resolve_model(args.model),
        max_states=args.max_states,
        max_transitions=args.max_transitions,
    )


def cmd_explore(args) -> int:
    if args.list:
        for e in corpus.CORPUS:
            print(f"{e.name}  ({e.family})")
        return 0
    if args.model is None:
        print("error: a model is required unless --list is given", file=sys.stderr)
        return 1
    lts = _explored(args)
    print(
        f"states: {lts.n_states}  transitions: {lts.n_transitions}"
        f"  threads: {lts.n_threads}  entry-relabeled: {lts.normalized_init}"
    )
    if args.json:
        _write(args.json, json.dumps(lts.to_json_dict()))
        print(f"graph json: {args.json}")
    if args.dot:
        _write(args.dot, lts.to_dot())
        print(f"graph dot: {args.dot}")
    return 0


def cmd_solve(args) -> int:
    lts = _explored(args)
    ws = solve(lts)
    report = report_json(lts, ws)
    print(
        f"states: {report['n_states']}  winning: {report['n_winning']}"
        f"  realizable: {'yes' if ws.realizable else 'no'}"
    )
    if args.json:
        _write(args.json, json.dumps(report))
        print(f"report json: {args.json}")
    return 0 if ws.realizable else 2


def cmd_verify(args) -> int:
    lts = _explored(args)
    report = verify(lts, witness_limit=args.witness_limit)
    print(report.summary())
    if args.json:
        _write(args.json, json.dumps(report.to_json_dict()))
        print(f"report json: {args.json}")
    return 0 if report.realizable else 2


def cmd_run(args) -> int:
    prog = resolve_model(args.model)
    try:
        if args.arbiter == "random":
            arbiter = RandomArbiter()
        else:
            lts = explore(prog)
            if args.arbiter == "gba":
                arbiter = gba_arbiter(lts)
            else:
                model = build_mdp(lts, args.label_mode)
                if args.qtable:
                    qtable = load_qtable(args.qtable, model)
                else:
                    qtable = value_iteration(
                        model, gamma=args.gamma, epsilon=args.epsilon
                    )
                if args.save_qtable:
                    save_qtable(qtable, args.save_qtable)
                    print(f"q table: {args.save_qtable}")
                arbiter = QCompatibleArbiter(model, qtable)
    except UnrealizableError as exc:
        print(f"unrealizable: {exc}", file=sys.stderr)
        return 2
    trace = run(prog, arbiter, max_steps=args.steps, seed=args.seed)
    hot = sum(trace.labels[-1])
    print(
        f"steps: {len(trace)}  terminated: {trace.terminated_reason}"
        f"  unfinished-threads: {hot}  reward-sum: {trace.cumulative_reward[-1]:g}"
    )
    if trace.terminated_reason == "deadlock":
        print(f"finite run live: {'yes' if is_live_finite(trace) else 'no'}")
    if trace.terminated_reason == "arbiter-stuck":
        print(f"stuck: {trace.stuck_message}", file=sys.stderr)
    if args.trace:
        _write(args.trace, trace_to_jsonl(trace))
        print(f"trace jsonl: {args.trace}")
    return 2 if trace.terminated_reason == "arbiter-stuck" else 0


PATTERNS = {
    "existence": (
        lambda: pattern_program([existence_after()], signal_alphabet(("p", "q"))),
        EXISTENCE_FORMULA,
        None,
        (4, 4),
    ),
    "response": (
        lambda: pattern_program(
            [response_in_scope()], signal_alphabet(("p", "q", "r", "s"))
        ),
        RESPONSE_FORMULA,
        None,
        (2, 2),
    ),
    "eventually-always": (
        lambda: pattern_program(
            [eventually_always()], signal_alphabet(("p",), include_choice=True)
        ),
        EVENTUALLY_ALWAYS_FORMULA,
        "nd",
        (4, 4),
    ),
}


def cmd_patterns_check(args) -> int:
    selected = list(PATTERNS) if args.pattern == "all" else [args.pattern]
    failures = 0
    for name in selected:
        build, formula, choice, (stem, loop) = PATTERNS[name]
        stem = args.stem if args.stem is not None else stem
        loop = args.loop if args.loop is not None else loop
        report = check_conformance(
            explore(build()), formula, stem, loop, choice_prop=choice
        )
        parts = [f"{report.lassos} lassos"]
        if choice is not None:
            parts.append(f"{report.words} words, {report.skipped_tight} tight skipped")
        parts.append(f"{len(report.mismatches)} mismatches")
        print(f"{name} (stem<={stem}, loop<={loop}): " + ", ".join(parts))
        for m in report.mismatches[: args.show]:
            print(
                f"  formula={m.formula_says} live={m.run_is_live}"
                f"  {m.lasso.render()}"
            )
        failures += len(report.mismatches)
    return 2 if failures else 0


def _timed(fn, *a, **kw):
    t0 = time.perf_counter()
    out = fn(*a, **kw)
    return out, (time.perf_counter() - t0) * 1000.0


def bench_rows(model_names, kernel_backends=None, repeats: int = 1) -> list[dict]:
    """One row per (model, kernel backend): exploration time plus the
    winning-set (gba) and value-iteration (mdp) solve times in ms.
    With repeats > 1 each solve is timed that many times and the best
    run is kept."""
    rows = []
    for name in model_names:
        e = corpus.entry(name)
        lts, explore_ms = _timed(explore, e.build())
        for backend in kernel_backends or _kernels.backends():
            with _kernels.use_backend(backend):
                gba_ms = min(_timed(solve, lts)[1] for _ in range(repeats))
                model = build_mdp(lts)
                mdp_ms = min(
                    _timed(value_iteration, model)[1] for _ in range(repeats)
                )
            rows.append(
                {
                    "model": e.name,
                    "family": e.family,
                    "states": lts.n_states,
                    "transitions": lts.n_transitions,
                    "backend": backend,
                    "explore_ms": f"{explore_ms:.2f}",
                    "gba_ms": f"{gba_ms:.2f}",
                    "mdp_ms": f"{mdp_ms:.2f}",
                }
            )
    return rows


def cmd_bench(args) -> int:
    wanted = args.models.split(",") if args.models else corpus.names()
    rows = []
    for name in wanted:
        for row in bench_rows([name], repeats=args.repeats):
            rows.append(row)
            print(
                f"{row['model']:20s} {row['states']:7d} states  {row['backend']:8s}"
                f"  explore {row['explore_ms']:>9s} ms   gba {row['gba_ms']:>8s} ms"
                f"   mdp {row['mdp_ms']:>8s} ms"
            )
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"csv: {args.csv}")
    return 0


def cmd_kernel_bench(args) -> int:
    wanted = args.models.split(",") if args.models else corpus.names()
    rows = []
    for name in wanted:
        lts = explore(corpus.build(name))
        indptr, indices = lts.csr()
        model = build_mdp(lts)
        for backend, mod in _kernels.backends().items():
            _, scc_ms = _timed(mod.scc_labels, indptr, indices)
            q = np.zeros(len(model.pair_events))
            _, vi_ms = _timed(
                mod.vi_sweeps,
                q,
                model.pair_indptr,
                model.pair_succ,
                model.pair_reward,
                DEFAULT_GAMMA,
                args.sweeps,
            )
            rows.append(
                {
                    "model": name,
                    "states": lts.n_states,
                    "pairs": len(model.pair_events),
                    "backend": backend,
                    "scc_ms": f"{scc_ms:.3f}",
                    f"vi{args.sweeps}_ms": f"{vi_ms:.3f}",
                }
            )
            print(
                f"{name:20s} {backend:8s}  scc {scc_ms:9.3f} ms"
                f"   vi x{args.sweeps} {vi_ms:9.3f} ms"
            )
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"csv: {args.csv}")
    return 0


def noise_experiment(
    model_names,
    sigmas,
    runs: int,
    steps: int,
    seed: int,
    label_mode: str = "single",
):
    """Liveness of the compatibility arbiter as table noise grows.

    A run counts as live when it never leaves the winning set and the
    arbiter never gets stuck. Returns rows of
    (model, sigma, runs, live)."""
    rows = []
    for name in model_names:
        prog = corpus.build(name)
        lts = explore(prog)
        ws = solve(lts)
        model = build_mdp(lts, label_mode)
        base = value_iteration(model)
        for si, sigma in enumerate(sigmas):
            live = 0
            for ri in range(runs):
                rng = np.random.default_rng(
                    np.random.SeedSequence(entropy=(seed, si, ri))
                )
                table = perturb_q(base, sigma, rng) if sigma else base
                arbiter = QCompatibleArbiter(model, table)
                trace = run(
                    prog, arbiter, max_steps=steps, seed=int(rng.integers(2**31))
                )
                if trace.terminated_reason == "arbiter-stuck":
                    continue
                nodes = walk(lts, 0, trace.events)
                if all(ws.winning[n] for n in nodes):
                    live += 1
            rows.append(
                {"model": name, "sigma": sigma, "runs": runs, "live": live}
            )
    return rows


def cmd_noise_exp(args) -> int:
    names = args.models.split(",") if args.models else list(NOISE_MODELS)
    sigmas = [float(s) for s in args.sigmas.split(",")]
    rows = noise_experiment(
        names, sigmas, runs=args.runs, steps=args.steps, seed=args.seed
    )
    for row in rows:
        rate = row["live"] / row["runs"]
        print(
            f"{row['model']:20s} sigma={row['sigma']:<5g}"
            f" live {row['live']:4d}/{row['runs']}  ({rate:.1%})"
        )
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"csv: {args.csv}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="bpliveness", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("run", help="execute a model under an arbiter")
    p.add_argument("model")
    p.add_argument(
        "--arbiter", choices=("random", "gba", "qstar"), default="random"
    )
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label-mode", choices=LABEL_MODES, default="single")
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--qtable", help="load the q table instead of solving")
    p.add_argument("--save-qtable", help="write the q table used")
    p.add_argument("--trace", help="write the run as jsonl")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("explore", help="build the state graph")
    p.add_argument("model", nargs="?")
    p.add_argument("--list", action="store_true", help="list corpus models")
    p.add_argument("--max-states", type=int, default=1_000_000)
    p.add_argument("--max-transitions", type=int, default=10_000_000)
    p.add_argument("--json", help="write the graph as json")
    p.add_argument("--dot", help="write the graph as graphviz dot")
    p.set_defaults(fn=cmd_explore)

    p = sub.add_parser("solve", help="winning-set analysis")
    _explore_args(p)
    p.add_argument("--json", help="write the analysis as json")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="analysis plus starvation witnesses")
    _explore_args(p)
    p.add_argument("--json", help="write the report as json")
    p.add_argument("--witness-limit", type=int, default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser(
        "patterns-check", help="pattern threads against their formulas"
    )
    p.add_argument(
        "--pattern", choices=("all",) + tuple(PATTERNS), default="all"
    )
    p.add_argument("--stem", type=int, default=None)
    p.add_argument("--loop", type=int, default=None)
    p.add_argument("--show", type=int, default=5, help="mismatches to print")
    p.set_defaults(fn=cmd_patterns_check)

    p = sub.add_parser("bench", help="explore/solve timings over the corpus")
    p.add_argument("--models", help="comma separated corpus names")
    p.add_argument("--repeats", type=int, default=1, help="keep the best of this many solves")
    p.add_argument("--csv", help="write rows as csv")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("noise-exp", help="arbiter liveness under q-table noise")
    p.add_argument("--models", help="comma separated corpus names")
    p.add_argument("--sigmas", default="0,0.05,0.1,0.2,0.4")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--steps", type=int, default=150)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="write rows as csv")
    p.set_defaults(fn=cmd_noise_exp)

    p = sub.add_parser("kernel-bench", help="pure vs compiled kernel timings")
    p.add_argument("--models", help="comma separated corpus names")
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--csv", help="write rows as csv")
    p.set_defaults(fn=cmd_kernel_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "fn", None):
        parser.print_help()
        return 1
    try:
        return args.fn(args)
    except (ModelError, OSError, ValueError) as exc:
        # bad names, bad files, bad numbers: usage problems
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except LimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
