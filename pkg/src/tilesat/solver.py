"""Goal reachability: DPLL on the formula side, game search on the board
side, the scripted strategy that plays a satisfying assignment, and the
auditor that checks the construction's invariants along a trace."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .engine import (
    MOVE_ORDER,
    Board,
    Direction,
    GameState,
    advance,
    apply_move,
    reached_goal,
)
from .errors import (
    BudgetExceeded,
    MissingAnnotations,
    ReplayMismatch,
    SpawnError,
    UnsatisfiedClause,
)
from .reduction import CnfFormula, Instance, Layout, apply_flips

Assignment = dict[int, bool]


@dataclass(frozen=True)
class Trace:
    moves: tuple[Direction, ...]
    score_per_move: tuple[int, ...]
    reached_goal: bool
    snapshots: Optional[tuple[Board, ...]] = None


@dataclass(frozen=True)
class SearchBudget:
    max_moves: Optional[int] = None  # defaults to goal * b^2 / 4
    max_states: int = 2_000_000


def move_budget(goal: int, b: int) -> int:
    """Upper bound on moves before the goal tile appears: goal * b^2 / 4."""
    return goal * b * b // 4


# --- DPLL -------------------------------------------------------------------

def dpll(formula: CnfFormula) -> Optional[Assignment]:
    """Satisfying assignment or None.  Deterministic: unit propagation, then
    branch on the lowest unassigned variable, true first.  The returned
    assignment is total; variables the search never constrained are false."""

    def propagate(clauses, assignment):
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned = [l for l in clause if abs(l) not in assignment]
                if any(assignment.get(abs(l)) == (l > 0) for l in clause):
                    continue
                if not unassigned:
                    return None
                if len(unassigned) == 1:
                    lit = unassigned[0]
                    assignment[abs(lit)] = lit > 0
                    changed = True
        return assignment

    def solve(clauses, assignment):
        assignment = propagate(clauses, dict(assignment))
        if assignment is None:
            return None
        remaining = []
        for clause in clauses:
            if any(assignment.get(abs(l)) == (l > 0) for l in clause):
                continue
            remaining.append([l for l in clause if abs(l) not in assignment])
        if not remaining:
            return assignment
        var = min(abs(l) for clause in remaining for l in clause)
        for value in (True, False):
            result = solve(remaining, {**assignment, var: value})
            if result is not None:
                return result
        return None

    result = solve(list(formula.clauses), {})
    if result is None:
        return None
    return {v: result.get(v, False) for v in range(1, formula.num_vars + 1)}


# --- canonical strategy ------------------------------------------------------

L, R, U, D = Direction.LEFT, Direction.RIGHT, Direction.UP, Direction.DOWN

_SELECTOR_MOVES = {0: [U], 1: [D, L, U], 2: [D, L, D, L, U]}
_COLLECTOR_MOVES = {0: [L, U, L, U, L], 1: [L, U, L], 2: [L]}


def canonical_moves(layout: Layout, formula: CnfFormula, assignment: Assignment) -> list[Direction]:
    """The gadget-by-gadget move script for a (normalized) assignment.

    Raises UnsatisfiedClause if some clause has no true literal; variables
    with no positive occurrence after normalization are unused and must play
    the false branch, whose up-propagation runs through the E/F pair.
    """
    n, m = layout.num_vars, layout.num_clauses
    moves: list[Direction] = [L]
    for i in range(1, n + 1):
        kp, km = layout.k_plus[i - 1], layout.k_minus[i - 1]
        last = D if i == n else U
        if assignment.get(i, False) and kp > 0:
            moves.append(D)
            for k in range(1, kp + 1):
                moves.append(L)
                moves.append(D if k < kp else last)
        else:
            moves += [U, L]
            if km == 0:
                moves.append(last)
            else:
                moves.append(D)
                for k in range(1, km + 1):
                    moves.append(L)
                    moves.append(D if k < km else last)
        moves.append(L)
    for j, clause in enumerate(formula.clauses, start=1):
        chosen = None
        for p, lit in enumerate(clause):
            if assignment.get(abs(lit), False) == (lit > 0):
                chosen = p
                break
        if chosen is None:
            raise UnsatisfiedClause(j)
        moves += _SELECTOR_MOVES[chosen]
        moves += [R, D]
        moves += _COLLECTOR_MOVES[chosen]
    moves.append(D)  # goal merge; also drops the pot-of-gold trigger pair
    return moves


def replay(instance: Instance, moves, keep_snapshots: bool = False) -> Trace:
    """Run a move list through the engine, failing loudly on an illegal move."""
    state = instance.initial_state()
    scores = []
    snapshots = [state.board] if keep_snapshots else None
    goal = False
    for idx, direction in enumerate(moves):
        outcome = apply_move(state, direction)
        if not outcome.moved:
            raise ReplayMismatch(f"move {idx} ({direction.letter}) is not legal")
        if not goal and outcome.board_after.max_face >= state.goal:
            goal = True
        scores.append(outcome.score_delta)
        state = advance(state, outcome)
        if keep_snapshots:
            snapshots.append(state.board)
    return Trace(
        moves=tuple(moves),
        score_per_move=tuple(scores),
        reached_goal=goal,
        snapshots=tuple(snapshots) if keep_snapshots else None,
    )


def canonical_play(instance: Instance, assignment: Assignment) -> Trace:
    """Play the construction's intended strategy for a satisfying assignment
    of the instance's original formula."""
    meta = instance.meta
    if meta is None:
        raise MissingAnnotations("instance carries no compilation metadata")
    normalized_assignment = apply_flips(assignment, meta.flips)
    moves = canonical_moves(meta.layout, meta.normalized, normalized_assignment)
    trace = replay(instance, moves)
    if not trace.reached_goal:
        raise ReplayMismatch("canonical strategy failed to reach the goal tile")
    return trace


# --- search ------------------------------------------------------------------

_HASH_VECTORS: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _state_key(state: GameState) -> tuple[int, int, int]:
    """128-bit universal hash of the board (two independent random-vector
    dot products modulo 2^64) plus the spawn-script cursor."""
    flat = state.board.grid.ravel()
    vectors = _HASH_VECTORS.get(flat.size)
    if vectors is None:
        rng = np.random.default_rng(0x2048_5EED)
        vectors = tuple(
            rng.integers(1, 1 << 62, flat.size, dtype=np.int64) | 1 for _ in range(2)
        )
        _HASH_VECTORS[flat.size] = vectors
    return int(flat @ vectors[0]), int(flat @ vectors[1]), state.spawn_cursor


def search(instance: Instance, budget: Optional[SearchBudget] = None) -> Optional[Trace]:
    """Depth-first reachability search.

    Returns a goal-reaching trace, or None when the whole reachable space was
    exhausted.  Raises BudgetExceeded when the search was cut off, which is
    inconclusive rather than a proof of unreachability.
    """
    budget = budget or SearchBudget()
    board = instance.board
    max_moves = budget.max_moves
    if max_moves is None:
        max_moves = move_budget(instance.goal, max(board.rows, board.cols))

    start = instance.initial_state()
    if reached_goal(start):
        return Trace((), (), True)
    if max_moves <= 0:
        raise BudgetExceeded("move budget exhausted at the root")

    visited = {_state_key(start)}
    stack = [(start, iter(MOVE_ORDER))]
    move_path: list[Direction] = []
    expanded = 0
    truncated = False

    while stack:
        state, directions = stack[-1]
        pushed = False
        for direction in directions:
            outcome = apply_move(state, direction)
            if not outcome.moved:
                continue
            if outcome.board_after.max_face >= instance.goal:
                return replay(instance, move_path + [direction])
            try:
                child = advance(state, outcome)
            except SpawnError:
                continue  # the offline tile sequence cannot continue here
            key = _state_key(child)
            if key in visited:
                continue
            visited.add(key)
            expanded += 1
            if expanded > budget.max_states:
                raise BudgetExceeded(f"explored more than {budget.max_states} states")
            if len(move_path) + 1 >= max_moves:
                truncated = True
                continue
            stack.append((child, iter(MOVE_ORDER)))
            move_path.append(direction)
            pushed = True
            break
        if not pushed:
            stack.pop()
            if move_path:
                move_path.pop()

    if truncated:
        raise BudgetExceeded("move budget reached before exhausting the space")
    return None


# --- audit -------------------------------------------------------------------

@dataclass
class AuditReport:
    fullness_ok: bool = True
    one_move_ok: bool = True
    shift_once_ok: bool = True
    adjacent_column_ok: bool = True
    adjacent_row_ok: bool = True
    violations: list[tuple[int, str, tuple]] = field(default_factory=list)
    row_shifts: dict[int, int] = field(default_factory=dict)
    col_shifts: dict[int, int] = field(default_factory=dict)

    def record(self, move_index: int, rule: str, location) -> None:
        self.violations.append((move_index, rule, tuple(location) if isinstance(location, (list, tuple)) else (location,)))
        if rule == "fullness":
            self.fullness_ok = False
        elif rule == "one-move":
            self.one_move_ok = False
        elif rule == "shift-once":
            self.shift_once_ok = False
        elif rule == "adjacent-columns":
            self.adjacent_column_ok = False
        elif rule == "adjacent-rows":
            self.adjacent_row_ok = False

    @property
    def passed(self) -> bool:
        return not self.violations


def _mergeable_adjacent_pairs(board: Board, variant) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    from .reduction import _mergeable_adjacencies

    return _mergeable_adjacencies(board, variant)


def audit(instance: Instance, trace: Trace) -> AuditReport:
    """Replay a trace and check the construction's driving invariants.

    After every step: the board is full again, at most one mergeable pair is
    adjacent (pair tiles, or the goal pair right before the final move), each
    row/column has shifted at most once, no two adjacent columns ever shift,
    and adjacent rows shift only inside literal/clause gadget regions.
    """
    report = AuditReport()
    state = instance.initial_state()
    clause_rows = set()
    for ann in instance.annotations:
        if ann.group in ("literal", "clause"):
            rows = {r for r, _ in ann.cells}
            clause_rows.add((ann.label, min(rows), max(rows)))

    goal_faces = set()
    for ann in instance.annotations:
        if ann.group == "goal":
            goal_faces = {instance.board.face(r, c) for r, c in ann.cells}

    from .reduction import _PAIR_FACE

    pair_face = _PAIR_FACE.get(instance.variant, 2)
    last_move = len(trace.moves) - 1
    for idx, direction in enumerate(trace.moves):
        outcome = apply_move(state, direction)
        if not outcome.moved:
            raise ReplayMismatch(f"move {idx} ({direction.letter}) is not legal")
        horizontal = direction in (Direction.LEFT, Direction.RIGHT)
        for (r, c), _ in outcome.merges:
            if horizontal:
                report.row_shifts[r] = report.row_shifts.get(r, 0) + 1
                if report.row_shifts[r] > 1:
                    report.record(idx, "shift-once", ("row", r))
            else:
                report.col_shifts[c] = report.col_shifts.get(c, 0) + 1
                if report.col_shifts[c] > 1:
                    report.record(idx, "shift-once", ("col", c))
        state = advance(state, outcome)
        if trace.snapshots is not None and state.board != trace.snapshots[idx + 1]:
            raise ReplayMismatch(f"snapshot mismatch after move {idx}")

        if not state.board.is_full:
            report.record(idx, "fullness", ())
        pairs = _mergeable_adjacent_pairs(state.board, instance.variant)
        allowed = 0
        for (a, b) in pairs:
            fa, fb = state.board.face(*a), state.board.face(*b)
            if fa == pair_face and fb == pair_face:
                allowed += 1
            elif {fa, fb} <= goal_faces and idx >= last_move - 1:
                allowed += 1
            else:
                report.record(idx, "one-move", (a, b))
        if allowed > 1:
            report.record(idx, "one-move", tuple(pairs))

    for c in sorted(report.col_shifts):
        if c + 1 in report.col_shifts:
            report.record(last_move, "adjacent-columns", ("cols", c, c + 1))
    for r in sorted(report.row_shifts):
        if r + 1 not in report.row_shifts:
            continue
        inside = any(lo <= r and r + 1 <= hi for _, lo, hi in clause_rows)
        if not inside:
            report.record(last_move, "adjacent-rows", ("rows", r, r + 1))
    return report


# --- equivalence --------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceResult:
    sat: bool
    reachable: Optional[bool]  # None when the search budget ran out
    trace: Optional[Trace] = None

    @property
    def conclusive(self) -> bool:
        return self.reachable is not None

    @property
    def agree(self) -> Optional[bool]:
        if not self.conclusive:
            return None
        return self.sat == self.reachable


def equivalence_check(formula: CnfFormula, options=None,
                      budget: Optional[SearchBudget] = None,
                      prefer_witness: bool = True) -> EquivalenceResult:
    """Cross-check the reduction: goal reachable iff formula satisfiable.

    When ``prefer_witness`` is set, a satisfying assignment is played through
    the canonical strategy instead of searching.  Budget exhaustion yields an
    inconclusive result rather than a disagreement.
    """
    from .reduction import ReductionOptions, compile_instance

    options = options or ReductionOptions()
    instance = compile_instance(formula, options)
    model = dpll(formula)
    sat = model is not None
    if sat and prefer_witness:
        trace = canonical_play(instance, model)
        return EquivalenceResult(sat, trace.reached_goal, trace)
    try:
        trace = search(instance, budget)
    except BudgetExceeded:
        return EquivalenceResult(sat, None)
    return EquivalenceResult(sat, trace is not None, trace)
