"""Named ready-to-build models for the CLI and the benchmarks.

The unrealizable board stays out of the corpus on purpose; it is a test
fixture, not a benchmark subject.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..program import BProgram, ModelError
from .level_crossing import classic_crossing, crossing_with_maintenance, requesters_only
from .sokoban import load_board, sokoban_program


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    family: str
    build: Callable[[], BProgram]


def _board(name: str, liveness: str = "all_boxes"):
    return lambda: sokoban_program(load_board(name), liveness=liveness)


CORPUS: tuple[CorpusEntry, ...] = (
    CorpusEntry("lc-requesters-2", "lc-requesters", lambda: requesters_only(2, 2, 2)),
    CorpusEntry("lc-requesters-4", "lc-requesters", lambda: requesters_only(4, 4, 2)),
    CorpusEntry("lc-requesters-8", "lc-requesters", lambda: requesters_only(8, 8, 2)),
    CorpusEntry("lc-requesters-16", "lc-requesters", lambda: requesters_only(16, 16, 2)),
    CorpusEntry("lc-classic", "lc-crossing", lambda: classic_crossing(3)),
    CorpusEntry("lc-maintenance", "lc-crossing", lambda: crossing_with_maintenance(3, 3, 2)),
    CorpusEntry("sokoban-corridor", "sokoban-1box", _board("corridor")),
    CorpusEntry("sokoban-trap", "sokoban-1box", _board("trap")),
    CorpusEntry("sokoban-room", "sokoban-1box", _board("room")),
    CorpusEntry("sokoban-two-boxes", "sokoban-2box", _board("two_boxes")),
    CorpusEntry("sokoban-warehouse", "sokoban-2box", _board("warehouse")),
)

_BY_NAME = {e.name: e for e in CORPUS}


def names() -> list[str]:
    return [e.name for e in CORPUS]


def entry(name: str) -> CorpusEntry:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ModelError(
            f"unknown model {name!r}; known: {', '.join(names())}"
        ) from None


def build(name: str) -> BProgram:
    return entry(name).build()
