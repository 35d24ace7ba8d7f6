"""Sokoban as a b-program: one thread owns the physics, liveness threads
mirror it and carry the delivery obligations.

Board text uses the usual characters: '#' wall, ' ' floor, '.' target,
'$' box, '*' box on target, '@' player, '+' player on target.

The box tuple is ordered and the order is kept through pushes, so each
slot is one identifiable box; the per-box liveness mode hangs one
obligation on every slot, the all-boxes mode one obligation on the whole
configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from ..events import Event, EventSet
from ..program import BProgram, BThreadDef, ModelError, SyncStatement

MOVES = {
    Event("Up"): (-1, 0),
    Event("Down"): (1, 0),
    Event("Left"): (0, -1),
    Event("Right"): (0, 1),
}

LIVENESS_MODES = ("all_boxes", "per_box", "none")


@dataclass(frozen=True)
class Board:
    n_rows: int
    n_cols: int
    walls: frozenset
    targets: frozenset
    player: tuple
    boxes: tuple

    def is_wall(self, pos) -> bool:
        r, c = pos
        return (
            r < 0 or r >= self.n_rows or c < 0 or c >= self.n_cols or pos in self.walls
        )

    def solved(self, boxes) -> bool:
        return all(b in self.targets for b in boxes)


def parse_board(text: str) -> Board:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ModelError("empty board")

    walls, targets, boxes = set(), set(), []
    player = None
    for r, line in enumerate(lines):
        for c, ch in enumerate(line):
            pos = (r, c)
            if ch == "#":
                walls.add(pos)
            elif ch == " ":
                pass
            elif ch == ".":
                targets.add(pos)
            elif ch == "$":
                boxes.append(pos)
            elif ch == "*":
                boxes.append(pos)
                targets.add(pos)
            elif ch == "@" or ch == "+":
                if player is not None:
                    raise ModelError("more than one player")
                player = pos
                if ch == "+":
                    targets.add(pos)
            else:
                raise ModelError(f"unknown board character {ch!r} at {pos}")
    if player is None:
        raise ModelError("no player on the board")
    if len(boxes) != len(targets):
        raise ModelError(f"{len(boxes)} boxes but {len(targets)} targets")
    if not boxes:
        raise ModelError("no boxes on the board")
    return Board(
        n_rows=len(lines),
        n_cols=max(len(ln) for ln in lines),
        walls=frozenset(walls),
        targets=frozenset(targets),
        player=player,
        boxes=tuple(sorted(boxes)),
    )


def render_board(board: Board, player=None, boxes=None) -> str:
    player = board.player if player is None else player
    boxes = board.boxes if boxes is None else boxes
    box_set = set(boxes)
    out = []
    for r in range(board.n_rows):
        row = []
        for c in range(board.n_cols):
            pos = (r, c)
            if pos in board.walls:
                ch = "#"
            elif pos == player:
                ch = "+" if pos in board.targets else "@"
            elif pos in box_set:
                ch = "*" if pos in board.targets else "$"
            elif pos in board.targets:
                ch = "."
            else:
                ch = " "
            row.append(ch)
        out.append("".join(row).rstrip())
    return "\n".join(out) + "\n"


def legal_moves(board: Board, player, boxes):
    """(event, next player, next boxes) for every legal step or push."""
    out = []
    box_set = set(boxes)
    for event, (dr, dc) in MOVES.items():
        nxt = (player[0] + dr, player[1] + dc)
        if board.is_wall(nxt):
            continue
        if nxt in box_set:
            dest = (nxt[0] + dr, nxt[1] + dc)
            if board.is_wall(dest) or dest in box_set:
                continue
            moved = tuple(dest if b == nxt else b for b in boxes)
            out.append((event, nxt, moved))
        else:
            out.append((event, nxt, boxes))
    return out


def _advance(board: Board):
    def advance(local, event):
        player, boxes = local
        for e, np_, nb in legal_moves(board, player, boxes):
            if e == event:
                return (np_, nb)
        return local

    return advance


def dynamics_thread(board: Board) -> BThreadDef:
    def statement(local):
        player, boxes = local
        return SyncStatement(request=tuple(e for e, _, _ in legal_moves(board, player, boxes)))

    return BThreadDef(
        id="dynamics",
        initial=(board.player, board.boxes),
        statement_fn=statement,
        advance_fn=_advance(board),
    )


def deliver_all_thread(board: Board) -> BThreadDef:
    """Must-finish until every box sits on a target."""

    def statement(local):
        _, boxes = local
        return SyncStatement(
            wait_for=EventSet.of(*MOVES), must_finish=not board.solved(boxes)
        )

    return BThreadDef(
        id="deliver-all",
        initial=(board.player, board.boxes),
        statement_fn=statement,
        advance_fn=_advance(board),
    )


def deliver_box_thread(board: Board, k: int) -> BThreadDef:
    """Must-finish until box slot k sits on a target."""

    def statement(local):
        _, boxes = local
        return SyncStatement(
            wait_for=EventSet.of(*MOVES), must_finish=boxes[k] not in board.targets
        )

    return BThreadDef(
        id=f"deliver-box-{k}",
        initial=(board.player, board.boxes),
        statement_fn=statement,
        advance_fn=_advance(board),
    )


def sokoban_program(board, liveness: str = "all_boxes") -> BProgram:
    if isinstance(board, str):
        board = parse_board(board)
    if liveness not in LIVENESS_MODES:
        raise ModelError(f"liveness must be one of {LIVENESS_MODES}")
    threads = [dynamics_thread(board)]
    if liveness == "all_boxes":
        threads.append(deliver_all_thread(board))
    elif liveness == "per_box":
        threads.extend(deliver_box_thread(board, k) for k in range(len(board.boxes)))
    return BProgram(threads, list(MOVES))


def load_board(name: str) -> str:
    """Text of a board shipped with the package (see list_boards())."""
    path = resources.files("bpliveness.models") / "boards" / f"{name}.txt"
    try:
        return path.read_text()
    except FileNotFoundError:
        raise ModelError(f"no packaged board named {name!r}") from None


def list_boards() -> list[str]:
    folder = resources.files("bpliveness.models") / "boards"
    return sorted(p.name[: -len(".txt")] for p in folder.iterdir() if p.name.endswith(".txt"))
