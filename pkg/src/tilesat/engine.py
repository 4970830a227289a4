"""Board mechanics for the seven merge-game variants.

All state values are immutable snapshots; every operation is a pure function
of its inputs, so states can be shared freely across threads or search
workers.  Boards are small numpy grids: 0 marks an empty cell and -1 marks an
immovable block (1024! only).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from hashlib import blake2b
from typing import Iterator, Optional

import numpy as np

from .errors import (
    AmbiguousLocator,
    AngelChoiceRequired,
    IllegalMove,
    NoEmptyCell,
    OccupiedCell,
    ScriptExhausted,
)

EMPTY = 0
BLOCK = -1

# Distinct Fibonacci values; 1 stands for both F_1 and F_2.
_FIBS = [1, 2]
while _FIBS[-1] < 1 << 60:
    _FIBS.append(_FIBS[-1] + _FIBS[-2])
_FIB_ARRAY = np.array(_FIBS, dtype=np.int64)
_FIB_SET = frozenset(_FIBS)


class Direction(enum.Enum):
    UP = "U"
    DOWN = "D"
    LEFT = "L"
    RIGHT = "R"

    @property
    def letter(self) -> str:
        return self.value

    @classmethod
    def from_letter(cls, letter: str) -> "Direction":
        return cls(letter.upper())


MOVE_ORDER = (Direction.LEFT, Direction.UP, Direction.DOWN, Direction.RIGHT)


class Movement(enum.Enum):
    SLIDE_TO_WALL = "slide-to-wall"
    SHIFT_BY_ONE = "shift-by-one"
    SAMING_SCAN = "saming-scan"


class Variant(enum.Enum):
    CIRULLI_2048 = "cirulli-2048"
    SAMING_2048 = "saming-2048"
    THREES = "threes"
    FIVES = "fives"
    GAME_1024 = "game-1024"
    FIBONACCI = "fibonacci"

    @property
    def movement(self) -> Movement:
        if self in (Variant.THREES, Variant.FIVES):
            return Movement.SHIFT_BY_ONE
        if self is Variant.SAMING_2048:
            return Movement.SAMING_SCAN
        return Movement.SLIDE_TO_WALL

    @property
    def doubles_equal_tiles(self) -> bool:
        return self in (Variant.CIRULLI_2048, Variant.SAMING_2048, Variant.GAME_1024)


def merge_result(variant: Variant, a: int, b: int) -> Optional[int]:
    """Face of the tile formed when ``a`` and ``b`` combine, or None.

    Total and symmetric in (a, b); callers pass faces valid for the variant.
    """
    if a <= 0 or b <= 0:
        return None
    if variant.doubles_equal_tiles:
        return a + b if a == b else None
    if variant is Variant.THREES:
        if {a, b} == {1, 2}:
            return 3
        return a + b if a == b and a >= 3 else None
    if variant is Variant.FIVES:
        if {a, b} == {2, 3}:
            return 5
        return a + b if a == b and a >= 5 else None
    # Fibonacci: only successive values combine; F_1 = F_2 = 1 lets two 1s
    # merge, and for a, b in the sequence, a + b is Fibonacci iff successive.
    if a in _FIB_SET and b in _FIB_SET and (a + b) in _FIB_SET:
        if a == b and a != 1:
            return None
        return a + b
    return None


def _merge_mask(variant: Variant, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised merge predicate for adjacent face arrays."""
    occ = (a > 0) & (b > 0)
    if variant.doubles_equal_tiles:
        return occ & (a == b)
    if variant is Variant.THREES:
        return occ & (((a == 1) & (b == 2)) | ((a == 2) & (b == 1)) | ((a == b) & (a >= 3)))
    if variant is Variant.FIVES:
        return occ & (((a == 2) & (b == 3)) | ((a == 3) & (b == 2)) | ((a == b) & (a >= 5)))
    ia = np.searchsorted(_FIB_ARRAY, np.clip(a, 1, None))
    ib = np.searchsorted(_FIB_ARRAY, np.clip(b, 1, None))
    ia = np.clip(ia, 0, len(_FIB_ARRAY) - 1)
    ib = np.clip(ib, 0, len(_FIB_ARRAY) - 1)
    va = occ & (_FIB_ARRAY[ia] == a) & (_FIB_ARRAY[ib] == b)
    succ = np.abs(ia - ib) == 1
    ones = (a == 1) & (b == 1)
    return va & (succ | ones)


@dataclass(frozen=True)
class Board:
    """Rectangular grid of tiles.  Value-semantic; never mutated in place."""

    grid: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.int64)
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "_memo", {})  # per-axis move analysis cache

    @classmethod
    def from_rows(cls, rows) -> "Board":
        data = [[EMPTY if v is None else int(v) for v in row] for row in rows]
        return cls(np.array(data, dtype=np.int64))

    @classmethod
    def empty(cls, rows: int, cols: int) -> "Board":
        return cls(np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.grid.shape[0]

    @property
    def cols(self) -> int:
        return self.grid.shape[1]

    @property
    def blocks(self) -> frozenset:
        return frozenset(map(tuple, np.argwhere(self.grid == BLOCK).tolist()))

    def face(self, r: int, c: int) -> Optional[int]:
        v = int(self.grid[r, c])
        return v if v > 0 else None

    def tiles(self) -> Iterator[tuple[int, int, int]]:
        for r, c in np.argwhere(self.grid > 0).tolist():
            yield r, c, int(self.grid[r, c])

    def empty_cells(self) -> list[tuple[int, int]]:
        return [tuple(rc) for rc in np.argwhere(self.grid == EMPTY).tolist()]

    @property
    def is_full(self) -> bool:
        return not (self.grid == EMPTY).any()

    @property
    def tile_sum(self) -> int:
        g = self.grid
        return int(g[g > 0].sum())

    @property
    def max_face(self) -> int:
        m = int(self.grid.max(initial=0))
        return m if m > 0 else 0

    def with_tile(self, r: int, c: int, face: int) -> "Board":
        g = self.grid.copy()
        g[r, c] = face
        return Board(g)

    def to_lists(self) -> list[list[int]]:
        return self.grid.tolist()

    def digest(self) -> bytes:
        return blake2b(self.grid.tobytes(), digest_size=16).digest()

    def __eq__(self, other):
        return isinstance(other, Board) and np.array_equal(self.grid, other.grid)

    def __hash__(self):
        return hash(self.grid.tobytes())


@dataclass(frozen=True)
class MoveOutcome:
    board_after: Board
    score_delta: int
    merges: tuple[tuple[tuple[int, int], int], ...]
    moved: bool


class SpawnKind(enum.Enum):
    NONE = "none"
    SCRIPTED = "scripted"
    DETERMINISTIC_FIRST_EMPTY = "deterministic-first-empty"
    UNIQUE_EMPTY = "unique-empty"
    ANGEL = "angel"


@dataclass(frozen=True)
class Locator:
    """Spawn location: an anchor cell plus a resolution rule.

    ``exact`` errors if the anchor is occupied; ``first-empty`` scans cells in
    lexicographic order (leftmost column, then topmost row) starting at the
    anchor and wrapping around the board.
    """

    row: int
    col: int
    rule: str = "exact"


@dataclass(frozen=True)
class ScriptEntry:
    face: int
    locator: Locator


@dataclass(frozen=True)
class SpawnPolicy:
    kind: SpawnKind
    face: Optional[int] = None
    script: tuple[ScriptEntry, ...] = ()

    @classmethod
    def none(cls) -> "SpawnPolicy":
        return cls(SpawnKind.NONE)

    @classmethod
    def unique_empty(cls, face: int, script: tuple[ScriptEntry, ...] = ()) -> "SpawnPolicy":
        return cls(SpawnKind.UNIQUE_EMPTY, face=face, script=script)

    @classmethod
    def deterministic_first_empty(cls, face: int = 2) -> "SpawnPolicy":
        return cls(SpawnKind.DETERMINISTIC_FIRST_EMPTY, face=face)

    @classmethod
    def scripted(cls, entries) -> "SpawnPolicy":
        return cls(SpawnKind.SCRIPTED, script=tuple(entries))

    @classmethod
    def angel(cls) -> "SpawnPolicy":
        return cls(SpawnKind.ANGEL)


@dataclass(frozen=True)
class GameState:
    board: Board
    variant: Variant
    spawn_policy: SpawnPolicy
    goal: int
    running_score: int = 0
    move_count: int = 0
    spawn_cursor: int = 0


# --- line processors --------------------------------------------------------
# All operate on a list of faces with the wall at index 0.


def _slide_segment(seg: list[int], variant: Variant, offset: int,
                   merges: list[tuple[int, int]]) -> list[int]:
    out: list[int] = []
    fresh: list[bool] = []
    for f in seg:
        if f == EMPTY:
            continue
        if out and not fresh[-1]:
            m = merge_result(variant, out[-1], f)
            if m is not None:
                out[-1] = m
                fresh[-1] = True
                merges.append((offset + len(out) - 1, m))
                continue
        out.append(f)
        fresh.append(False)
    return out + [EMPTY] * (len(seg) - len(out))


def _slide_line(line: list[int], variant: Variant) -> tuple[list[int], list[tuple[int, int]]]:
    merges: list[tuple[int, int]] = []
    n = len(line)
    if BLOCK not in line:
        return _slide_segment(line, variant, 0, merges), merges
    result = list(line)
    start = 0
    for end in [i for i, v in enumerate(line) if v == BLOCK] + [n]:
        if end > start:
            result[start:end] = _slide_segment(line[start:end], variant, start, merges)
        start = end + 1
    return result, merges


def _shift_line(line: list[int], variant: Variant) -> tuple[list[int], list[tuple[int, int]]]:
    # Threes!/Fives movement: a wall-adjacent tile is blocked; a tile beside a
    # blocked one either merges into it or is blocked too; a tile beside one
    # that moved (or beside an empty cell) moves one cell toward the wall.
    n = len(line)
    res = list(line)
    merges: list[tuple[int, int]] = []
    BLOCKED, MOVED = 0, 1
    status: list[Optional[int]] = [None] * n
    merged_into = [False] * n
    for j in range(n):
        f = line[j]
        if f == BLOCK:
            status[j] = BLOCKED
            continue
        if f == EMPTY:
            continue
        if j == 0:
            status[j] = BLOCKED
            continue
        left = line[j - 1]
        if left == EMPTY or status[j - 1] == MOVED:
            res[j - 1] = f
            res[j] = EMPTY
            status[j] = MOVED
        elif left != BLOCK and status[j - 1] == BLOCKED and not merged_into[j - 1]:
            m = merge_result(variant, left, f)
            if m is not None:
                res[j - 1] = m
                merged_into[j - 1] = True
                res[j] = EMPTY
                status[j] = MOVED
                merges.append((j - 1, m))
            else:
                status[j] = BLOCKED
        else:
            status[j] = BLOCKED
    return res, merges


def _saming_line(line: list[int], variant: Variant) -> tuple[list[int], list[tuple[int, int]]]:
    # Saming's rules: tiles are considered from the far side toward the wall.
    # A tile moves only if its wall-side neighbour is empty or of identical
    # value; a merged tile keeps its cell and does not move again this turn.
    n = len(line)
    res = list(line)
    merges: list[tuple[int, int]] = []
    merged = [False] * n
    for j in range(n - 1, 0, -1):
        f = res[j]
        if f <= 0 or merged[j]:
            continue
        left = res[j - 1]
        if left != EMPTY and left != f:
            continue
        k = j - 1
        while k >= 0 and res[k] == EMPTY:
            k -= 1
        if k < 0:
            res[0] = f
            res[j] = EMPTY
        elif res[k] == f and res[k] != BLOCK and not merged[k]:
            res[k] = 2 * f
            merged[k] = True
            res[j] = EMPTY
            merges.append((k, 2 * f))
        elif k + 1 != j:
            res[k + 1] = f
            res[j] = EMPTY
    return res, merges


_PROCESSORS = {
    Movement.SLIDE_TO_WALL: _slide_line,
    Movement.SHIFT_BY_ONE: _shift_line,
    Movement.SAMING_SCAN: _saming_line,
}


def _axis_analysis(grid: np.ndarray, variant: Variant, horizontal: bool, memo: Optional[dict]):
    """Per-line booleans shared by both directions along one axis: which
    lines hold a mergeable adjacent pair or a block, and whether the board
    has empty cells at all (direction-independent)."""
    key = (variant, horizontal)
    if memo is not None and key in memo:
        return memo[key]
    aligned = grid if horizontal else grid.T
    pairs = _merge_mask(variant, aligned[:, :-1], aligned[:, 1:]).any(axis=1)
    blocked = (aligned == BLOCK).any(axis=1)
    has_empty = bool((grid == EMPTY).any())
    result = (pairs, blocked, has_empty)
    if memo is not None:
        memo[key] = result
    return result


def _move_grid(grid: np.ndarray, variant: Variant, direction: Direction,
               memo: Optional[dict] = None):
    """Returns (new_grid or None, merges as ((r, c), face) board coords)."""
    horizontal = direction in (Direction.LEFT, Direction.RIGHT)
    flipped = direction in (Direction.RIGHT, Direction.DOWN)
    aligned = grid if horizontal else grid.T
    view = aligned[:, ::-1] if flipped else aligned

    pairs, blocked, has_empty = _axis_analysis(grid, variant, horizontal, memo)
    if has_empty:
        occupied = view > 0
        empties = view == EMPTY
        slid = (occupied & (np.cumsum(empties, axis=1) > 0)).any(axis=1)
        candidates = np.flatnonzero(slid | pairs | blocked)
    else:
        candidates = np.flatnonzero(pairs | blocked)
    if candidates.size == 0:
        return None, ()

    process = _PROCESSORS[variant.movement]
    width = view.shape[1]
    new_lines: dict[int, list[int]] = {}
    merges: list[tuple[tuple[int, int], int]] = []
    for i in candidates.tolist():
        line = view[i].tolist()
        new_line, line_merges = process(line, variant)
        if new_line != line:
            new_lines[i] = new_line
        for j, face in line_merges:
            col = width - 1 - j if flipped else j
            pos = (i, col) if horizontal else (col, i)
            merges.append((pos, face))
    if not new_lines:
        return None, ()

    out = view.copy()
    for i, new_line in new_lines.items():
        out[i] = new_line
    if flipped:
        out = out[:, ::-1]
    if not horizontal:
        out = out.T
    return np.ascontiguousarray(out), tuple(merges)


def move_board(board: Board, variant: Variant, direction: Direction) -> MoveOutcome:
    new_grid, merges = _move_grid(board.grid, variant, direction, getattr(board, "_memo", None))
    if new_grid is None:
        return MoveOutcome(board, 0, (), False)
    score = sum(face for _, face in merges)
    return MoveOutcome(Board(new_grid), score, merges, True)


def apply_move(state: GameState, direction: Direction) -> MoveOutcome:
    """Pure move application: no spawn, no score bookkeeping on the state."""
    return move_board(state.board, state.variant, direction)


def legal_moves(state: GameState) -> frozenset:
    return frozenset(d for d in Direction if apply_move(state, d).moved)


def is_forbidden(state: GameState) -> bool:
    """Full board with no valid move: the losing configuration."""
    return state.board.is_full and not legal_moves(state)


def reached_goal(state: GameState) -> bool:
    return state.board.max_face >= state.goal


def status(state: GameState) -> str:
    if reached_goal(state):
        return "goal"
    if is_forbidden(state):
        return "game_over"
    return "playing"


def _first_empty_lexicographic(board: Board, start_row: int = 0, start_col: int = 0):
    """First empty cell scanning leftmost column then topmost row, starting
    at the anchor and wrapping around the whole board."""
    grid = board.grid
    rows, cols = grid.shape
    order = [(c, r) for c in range(cols) for r in range(rows)]
    try:
        pivot = order.index((start_col, start_row))
    except ValueError:
        pivot = 0
    for c, r in order[pivot:] + order[:pivot]:
        if grid[r, c] == EMPTY:
            return r, c
    return None


def _resolve_locator(board: Board, locator: Locator) -> tuple[int, int]:
    if locator.rule == "exact":
        if board.grid[locator.row, locator.col] != EMPTY:
            raise OccupiedCell(f"cell ({locator.row}, {locator.col}) is occupied")
        return locator.row, locator.col
    cell = _first_empty_lexicographic(board, locator.row, locator.col)
    if cell is None:
        raise NoEmptyCell("no empty cell for spawn")
    return cell


def spawn(state: GameState, angel_choice: Optional[tuple[int, tuple[int, int]]] = None) -> GameState:
    """Place the post-move tile dictated by the state's spawn policy."""
    policy = state.spawn_policy
    if policy.kind is SpawnKind.NONE:
        return state

    board = state.board
    empties = board.empty_cells()

    if policy.kind is SpawnKind.ANGEL:
        if angel_choice is None:
            raise AngelChoiceRequired("angel policy needs (face, (row, col))")
        face, (r, c) = angel_choice
        if board.grid[r, c] != EMPTY:
            raise OccupiedCell(f"cell ({r}, {c}) is occupied")
        return replace(state, board=board.with_tile(r, c, face))

    if policy.kind is SpawnKind.DETERMINISTIC_FIRST_EMPTY:
        if not empties:
            raise NoEmptyCell("board is full")
        r, c = _first_empty_lexicographic(board)
        return replace(state, board=board.with_tile(r, c, policy.face or 2))

    if policy.kind is SpawnKind.UNIQUE_EMPTY:
        if len(empties) == 1:
            r, c = empties[0]
            return replace(state, board=board.with_tile(r, c, policy.face))
        if not empties:
            raise NoEmptyCell("board is full")
        # Trailing script: consumed once fullness lapses (pot-of-gold phase).
        if state.spawn_cursor < len(policy.script):
            entry = policy.script[state.spawn_cursor]
            r, c = _resolve_locator(board, entry.locator)
            return replace(state, board=board.with_tile(r, c, entry.face),
                           spawn_cursor=state.spawn_cursor + 1)
        if policy.script:
            return state
        raise AmbiguousLocator(f"unique-empty spawn with {len(empties)} empty cells")

    # SCRIPTED
    if state.spawn_cursor >= len(policy.script):
        raise ScriptExhausted("spawn script exhausted")
    if not empties:
        raise NoEmptyCell("board is full")
    entry = policy.script[state.spawn_cursor]
    r, c = _resolve_locator(board, entry.locator)
    return replace(state, board=board.with_tile(r, c, entry.face),
                   spawn_cursor=state.spawn_cursor + 1)


def step(state: GameState, direction: Direction,
         angel_choice: Optional[tuple[int, tuple[int, int]]] = None) -> GameState:
    """One turn: apply the move, then spawn.  Goal is judged pre-spawn, but
    the created tile survives the spawn so ``reached_goal`` sees it either way."""
    outcome = apply_move(state, direction)
    if not outcome.moved:
        raise IllegalMove(f"move {direction.letter} does not change the board")
    return advance(state, outcome, angel_choice)


def advance(state: GameState, outcome: MoveOutcome,
            angel_choice: Optional[tuple[int, tuple[int, int]]] = None) -> GameState:
    """Finish a turn from a precomputed MoveOutcome (search fast path)."""
    ns = replace(
        state,
        board=outcome.board_after,
        running_score=state.running_score + outcome.score_delta,
        move_count=state.move_count + 1,
    )
    if ns.spawn_policy.kind is not SpawnKind.NONE:
        ns = spawn(ns, angel_choice)
    return ns


def final_score_threes(board: Board, variant: Variant = Variant.THREES) -> int:
    """End-of-game Threes! score: 3^(i+1) points per tile of value 3*2^i.

    Fives boards score analogously over 5*2^i (base tiles 2 and 3 score 0).
    """
    base = 3 if variant is Variant.THREES else 5
    total = 0
    for _, _, face in board.tiles():
        if face < base or face % base:
            continue
        ratio = face // base
        if ratio & (ratio - 1) == 0:
            total += 3 ** (ratio.bit_length())
    return total
