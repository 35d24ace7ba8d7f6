"""Liveness patterns as b-threads, checked against temporal formulas.

Each pattern here is a small thread over a signal alphabet: the events
are all truth assignments to a handful of boolean propositions, a driver
thread requests every signal all the time, and the pattern thread carries
the obligation (and sometimes a block). check_conformance then enumerates
every bounded lasso of the explored graph and compares, word by word, the
formula's verdict with the liveness of the run. A pattern thread is
correct exactly when the two never disagree.

Formulas use !  &  |  ->  X  U  W  F  G with true/false and lowercase
proposition names; W is expanded as (a U b) | G a during parsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Optional

from .events import Event, EventSet
from .explore import ExploredLts
from .lasso import Lasso, enumerate_lassos, lasso_is_live, walk
from .program import BProgram, BThreadDef, ModelError, SyncStatement

SIGNAL = "sig"


def signal_alphabet(props, include_choice: bool = False) -> list[Event]:
    """All truth assignments to the propositions, as one event each.

    include_choice doubles the alphabet with a boolean `nd` attribute,
    the arbiter-resolved guess some patterns need.
    """
    props = tuple(props)
    if not 0 < len(props) <= 6:
        raise ModelError("signal alphabets support 1 to 6 propositions")
    if len(set(props)) != len(props):
        raise ModelError("duplicate proposition name")
    names = props + (("nd",) if include_choice else ())
    out = []
    for bits in product((False, True), repeat=len(names)):
        out.append(Event(SIGNAL, dict(zip(names, bits))))
    return out


def holds(event: Event, prop: str) -> bool:
    return bool(event.get(prop, False))


def all_events_driver(alphabet) -> BThreadDef:
    """Keeps every signal requested so the graph carries the full language."""
    alphabet = tuple(alphabet)

    def statement(local):
        return SyncStatement(request=alphabet)

    return BThreadDef(
        id="signal-driver",
        initial=None,
        statement_fn=statement,
        advance_fn=lambda local, event: None,
    )


def existence_after(trigger: str = "q", fulfil: str = "p") -> BThreadDef:
    """One-shot obligation: after the first `trigger and not fulfil`
    signal, some strictly later signal must carry `fulfil`."""

    def statement(local):
        return SyncStatement(wait_for=EventSet.where(lambda e: True, "any"),
                             must_finish=local == "waiting")

    def advance(local, event):
        if local == "idle" and holds(event, trigger) and not holds(event, fulfil):
            return "waiting"
        if local == "waiting" and holds(event, fulfil):
            return "done"
        return local

    return BThreadDef(
        id=f"exists-{fulfil}-after-{trigger}",
        initial="idle",
        statement_fn=statement,
        advance_fn=advance,
    )


def response_in_scope(
    opens: str = "q", closes: str = "r", request: str = "p", answer: str = "s"
) -> BThreadDef:
    """Inside every scope opened by `opens` and closed by `closes`, each
    `request` must be answered by `answer` before the scope may close;
    while an answer is pending the thread blocks the closing signal."""

    def statement(local):
        if local == "pending":
            return SyncStatement(
                wait_for=EventSet.where(lambda e: True, "any"),
                block=EventSet.where(lambda e: holds(e, closes), f"{closes}-signals"),
                must_finish=True,
            )
        return SyncStatement(wait_for=EventSet.where(lambda e: True, "any"))

    def advance(local, event):
        if local == "outside":
            if not (holds(event, opens) and not holds(event, closes)):
                return local
            local = "clean"  # scope opens; same signal may already request
        elif holds(event, closes):
            return "outside"
        if local == "pending":
            return "clean" if holds(event, answer) else "pending"
        if holds(event, request) and not holds(event, answer):
            return "pending"
        return "clean"

    return BThreadDef(
        id=f"respond-{answer}-to-{request}",
        initial="outside",
        statement_fn=statement,
        advance_fn=advance,
    )


def eventually_always(prop: str = "p", choice: str = "nd") -> BThreadDef:
    """Hot until it commits on an arbiter-chosen `choice` signal; once
    committed it blocks every signal violating `prop`."""

    def statement(local):
        if local == "watching":
            return SyncStatement(
                wait_for=EventSet.where(lambda e: True, "any"), must_finish=True
            )
        return SyncStatement(
            wait_for=EventSet.where(lambda e: True, "any"),
            block=EventSet.where(lambda e: not holds(e, prop), f"not-{prop}"),
        )

    def advance(local, event):
        if local == "watching" and holds(event, choice):
            return "committed"
        return local

    return BThreadDef(
        id=f"settle-{prop}",
        initial="watching",
        statement_fn=statement,
        advance_fn=advance,
    )


def pattern_program(pattern_threads, alphabet) -> BProgram:
    threads = [all_events_driver(alphabet)]
    threads.extend(pattern_threads)
    return BProgram(threads, list(alphabet))


EXISTENCE_FORMULA = "(!(q & !p)) U ((q & !p) & X F p) | G !(q & !p)"
RESPONSE_FORMULA = "G ((q & !r) -> ((p -> (!r U (s & !r))) W r))"
EVENTUALLY_ALWAYS_FORMULA = "F G p"


# ---------------------------------------------------------------- formulas

_TOKEN = re.compile(r"\s*(->|[!&|()]|[XUWFG]\b|true\b|false\b|[a-z][a-z0-9_]*)")


@dataclass(frozen=True)
class Formula:
    op: str  # atom true false not and or imp next until ev alw
    args: tuple = ()
    name: Optional[str] = None

    def __str__(self) -> str:
        if self.op == "atom":
            return self.name
        if self.op in ("true", "false"):
            return self.op
        if self.op == "not":
            return f"!{self.args[0]}"
        sym = {"and": "&", "or": "|", "imp": "->", "until": "U"}
        if self.op in sym:
            return f"({self.args[0]} {sym[self.op]} {self.args[1]})"
        return f"{dict(next='X', ev='F', alw='G')[self.op]} {self.args[0]}"


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ModelError(f"bad formula syntax at {text[pos:]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_formula(text: str) -> Formula:
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ModelError(f"bad formula: expected {expected or 'more'}, got {tok!r}")
        pos += 1
        return tok

    def implication():
        left = disjunction()
        if peek() == "->":
            take()
            return Formula("imp", (left, implication()))
        return left

    def disjunction():
        left = conjunction()
        while peek() == "|":
            take()
            left = Formula("or", (left, conjunction()))
        return left

    def conjunction():
        left = until()
        while peek() == "&":
            take()
            left = Formula("and", (left, until()))
        return left

    def until():
        left = unary()
        if peek() in ("U", "W"):
            weak = take() == "W"
            right = until()
            strong = Formula("until", (left, right))
            return Formula("or", (strong, Formula("alw", (left,)))) if weak else strong
        return left

    def unary():
        tok = peek()
        if tok == "!":
            take()
            return Formula("not", (unary(),))
        if tok == "X":
            take()
            return Formula("next", (unary(),))
        if tok == "F":
            take()
            return Formula("ev", (unary(),))
        if tok == "G":
            take()
            return Formula("alw", (unary(),))
        return atom()

    def atom():
        tok = take()
        if tok == "(":
            inner = implication()
            take(")")
            return inner
        if tok in ("true", "false"):
            return Formula(tok)
        if re.fullmatch(r"[a-z][a-z0-9_]*", tok):
            return Formula("atom", name=tok)
        raise ModelError(f"bad formula: unexpected {tok!r}")

    result = implication()
    if pos != len(tokens):
        raise ModelError(f"bad formula: trailing {tokens[pos:]!r}")
    return result


def eval_on_lasso(formula, stem_letters, loop_letters) -> bool:
    """Truth of the formula on the word stem . loop^omega.

    Letters are sets of the propositions true at a position. Positions
    live in one bitmask per subformula: bit i is the value at position i
    of stem+loop, with the successor of the last position wrapping to the
    loop start. Until and always iterate to their fixed points, which the
    wraparound reaches in at most n passes.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula)
    if not loop_letters:
        raise ValueError("loop must be nonempty")
    stem_n, n = len(stem_letters), len(stem_letters) + len(loop_letters)
    letters = list(stem_letters) + list(loop_letters)
    full = (1 << n) - 1
    last = n - 1

    def shift(v: int) -> int:
        # value at i becomes value at successor(i)
        return (v >> 1) | (((v >> stem_n) & 1) << last)

    def ev(f: Formula) -> int:
        if f.op == "atom":
            return sum(1 << i for i, l in enumerate(letters) if f.name in l)
        if f.op == "true":
            return full
        if f.op == "false":
            return 0
        if f.op == "not":
            return full & ~ev(f.args[0])
        if f.op == "and":
            return ev(f.args[0]) & ev(f.args[1])
        if f.op == "or":
            return ev(f.args[0]) | ev(f.args[1])
        if f.op == "imp":
            return (full & ~ev(f.args[0])) | ev(f.args[1])
        if f.op == "next":
            return shift(ev(f.args[0]))
        if f.op == "until":
            a, b = ev(f.args[0]), ev(f.args[1])
            v = 0  # least fixed point
            while True:
                nv = b | (a & shift(v))
                if nv == v:
                    return v
                v = nv
        if f.op == "ev":
            a = ev(f.args[0])
            v = 0
            while True:
                nv = a | shift(v)
                if nv == v:
                    return v
                v = nv
        if f.op == "alw":
            a = ev(f.args[0])
            v = full  # greatest fixed point
            while True:
                nv = a & shift(v)
                if nv == v:
                    return v
                v = nv
        raise AssertionError(f.op)

    return bool(ev(formula) & 1)


def event_letter(event: Event, drop: str = None) -> frozenset:
    true_attrs = {k for k, v in event.attrs.items() if v}
    if drop is not None:
        true_attrs.discard(drop)
    return frozenset(true_attrs)


def canonical_word(stem_letters, loop_letters):
    """Unique (stem, loop) representation of the ultimately periodic word:
    primitive loop period, then trailing stem letters folded into the loop."""
    stem, loop = list(stem_letters), list(loop_letters)
    for d in range(1, len(loop) + 1):
        if len(loop) % d == 0 and loop == loop[: d] * (len(loop) // d):
            loop = loop[:d]
            break
    while stem and stem[-1] == loop[-1]:
        stem.pop()
        loop = loop[-1:] + loop[:-1]
    return tuple(stem), tuple(loop)


# ------------------------------------------------------------- conformance

@dataclass
class Mismatch:
    lasso: Lasso
    formula_says: bool
    run_is_live: bool


@dataclass
class ConformanceReport:
    lassos: int
    words: int
    mismatches: list
    skipped_tight: int = 0

    @property
    def ok(self) -> bool:
        return not self.mismatches


def check_conformance(
    lts: ExploredLts,
    formula,
    stem_bound: int,
    loop_bound: int,
    choice_prop: str = None,
) -> ConformanceReport:
    """Compare the formula against run liveness on every bounded lasso.

    Without a choice proposition each lasso must individually agree with
    the formula. With one, lassos collapse into words by erasing the
    choice bit, the formula reads the erased word, and agreement means
    some lasso of the word is live. Words whose canonical stem already
    fills the stem bound are skipped in choice mode: the committing step
    needs one position of slack, so the existence check is only fair with
    room for it.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula)
    mismatches = []
    words = {}
    n_lassos = 0
    for lasso in enumerate_lassos(lts, stem_bound, loop_bound):
        n_lassos += 1
        stem = [event_letter(e, drop=choice_prop) for e in lasso.stem]
        loop = [event_letter(e, drop=choice_prop) for e in lasso.loop]
        live = lasso_is_live(lts, lasso)
        if choice_prop is None:
            verdict = eval_on_lasso(formula, stem, loop)
            if verdict != live:
                mismatches.append(Mismatch(lasso, verdict, live))
            continue
        key = canonical_word(stem, loop)
        entry = words.get(key)
        if entry is None:
            entry = words[key] = [eval_on_lasso(formula, key[0], key[1]), False, lasso]
        entry[1] = entry[1] or live
    skipped = 0
    if choice_prop is not None:
        for (stem, loop), (verdict, any_live, sample) in words.items():
            if len(stem) >= stem_bound:
                skipped += 1  # no slack for the committing step
                continue
            if verdict != any_live:
                mismatches.append(Mismatch(sample, verdict, any_live))
    return ConformanceReport(
        lassos=n_lassos,
        words=len(words) if choice_prop is not None else n_lassos,
        mismatches=mismatches,
        skipped_tight=skipped,
    )
