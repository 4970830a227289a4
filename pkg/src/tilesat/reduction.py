"""Compiler from 3-CNF formulas to merge-game instances.

Coordinates inside this module follow the construction's frame: x grows to
the right, y grows upward, and variable gadgets live at negative y.  The
compiled board uses (row, col) with row 0 at the top; the translation vector
is recorded in the instance metadata so annotations line up either way.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .engine import Board, GameState, Locator, ScriptEntry, SpawnPolicy, Variant, merge_result
from .errors import (
    ConstructionError,
    EmptyClauseList,
    GoalTooSmall,
    InvalidParameters,
    OverlappingGadgets,
    UnsupportedVariant,
)

Cell = tuple[int, int]  # (x, y) in construction coordinates


@dataclass(frozen=True)
class CnfFormula:
    """CNF over variables 1..num_vars; literals are signed DIMACS integers."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range for {self.num_vars} variables")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def is_three_cnf(self) -> bool:
        return all(len(c) == 3 for c in self.clauses)

    def evaluate(self, assignment: dict[int, bool]) -> bool:
        return all(
            any(assignment[abs(l)] == (l > 0) for l in clause) for clause in self.clauses
        )


def normalize(formula: CnfFormula) -> tuple[CnfFormula, frozenset[int]]:
    """Flip variables with no positive occurrence so each used variable
    appears at least once positively.  Returns (formula, flipped variables);
    an input assignment is recovered by negating the flipped variables."""
    if not formula.clauses:
        raise EmptyClauseList("formula has no clauses")
    positive = set()
    negative = set()
    for clause in formula.clauses:
        for lit in clause:
            (positive if lit > 0 else negative).add(abs(lit))
    flips = frozenset(v for v in negative if v not in positive)
    if not flips:
        return formula, flips
    clauses = tuple(
        tuple(-lit if abs(lit) in flips else lit for lit in clause) for clause in formula.clauses
    )
    return CnfFormula(formula.num_vars, clauses), flips


def apply_flips(assignment: dict[int, bool], flips: frozenset[int]) -> dict[int, bool]:
    return {v: (not val if v in flips else val) for v, val in assignment.items()}


@dataclass(frozen=True)
class Occurrence:
    clause: int  # 1-based
    position: int  # 0, 1 or 2


@dataclass(frozen=True)
class Layout:
    """All offset sequences of the construction for a normalized formula."""

    num_vars: int
    num_clauses: int
    k_plus: tuple[int, ...]
    k_minus: tuple[int, ...]
    pos_occurrences: tuple[tuple[Occurrence, ...], ...]
    neg_occurrences: tuple[tuple[Occurrence, ...], ...]
    xv: tuple[int, ...]  # X^V_0 .. X^V_n
    yv: tuple[int, ...]  # Y^V_0 .. Y^V_{n-1}
    xl: tuple[int, ...]  # X^L_0 .. X^L_{n+m}

    def yl(self, j: int) -> int:
        return 12 * (j - 1) + 4

    def yt(self, j: int) -> int:
        return 12 * self.num_clauses + 12 + 15 * (j - 1)

    def xt(self, j: int) -> int:
        return self.xl[self.num_vars + j]


def compute_layout(formula: CnfFormula) -> Layout:
    if not formula.is_three_cnf:
        raise InvalidParameters("reduction requires exactly-3-literal clauses")
    n, m = formula.num_vars, formula.num_clauses
    pos: list[list[Occurrence]] = [[] for _ in range(n + 1)]
    neg: list[list[Occurrence]] = [[] for _ in range(n + 1)]
    for j, clause in enumerate(formula.clauses, start=1):
        for p, lit in enumerate(clause):
            (pos if lit > 0 else neg)[abs(lit)].append(Occurrence(j, p))
    for occs in (pos, neg):
        for lst in occs:
            lst.sort(key=lambda o: (o.clause, o.position))
    k_plus = tuple(len(pos[i]) for i in range(1, n + 1))
    k_minus = tuple(len(neg[i]) for i in range(1, n + 1))
    xv = [0]
    for i in range(1, n + 1):
        xv.append(xv[-1] + 3 * (k_plus[i - 1] + k_minus[i - 1]) + 7)
    yv = tuple(-6 * i for i in range(n))
    xl = list(xv)
    for _ in range(1, m + 1):
        xl.append(xl[-1] + 25)
    return Layout(
        num_vars=n,
        num_clauses=m,
        k_plus=k_plus,
        k_minus=k_minus,
        pos_occurrences=tuple(tuple(p) for p in pos[1:]),
        neg_occurrences=tuple(tuple(p) for p in neg[1:]),
        xv=tuple(xv),
        yv=yv,
        xl=tuple(xl),
    )


@dataclass(frozen=True)
class GadgetPlacement:
    """Tiles contributed by one gadget.

    ``pairs`` hold same-face tile pairs (face None means the variant's pair
    tile); ``extra_cells`` carry explicitly faced singles (goal, pot rows).
    """

    role: str
    label: str
    pairs: tuple[tuple[Cell, Cell], ...] = ()
    face: Optional[int] = None
    extra_cells: tuple[tuple[Cell, int], ...] = ()

    def cells(self) -> list[Cell]:
        out = [c for pair in self.pairs for c in pair]
        out.extend(c for c, _ in self.extra_cells)
        return out


# Per-variant substitution table: pair tile, base pattern, spawn face, goal.
_PAIR_FACE = {Variant.CIRULLI_2048: 2, Variant.THREES: 3, Variant.FIBONACCI: 1}
_SPAWN_FACE = {Variant.CIRULLI_2048: 2, Variant.THREES: 1, Variant.FIBONACCI: 1}
_DEFAULT_GOAL = {Variant.CIRULLI_2048: 8192, Variant.THREES: 12, Variant.FIBONACCI: 34}
_SUPPORTED = tuple(_PAIR_FACE)


@dataclass(frozen=True)
class ReductionOptions:
    variant: Variant = Variant.CIRULLI_2048
    goal: Optional[int] = None
    margin: int = 3
    pot_of_gold: Optional[tuple[int, int]] = None

    def resolved_goal(self) -> int:
        return self.goal if self.goal is not None else _DEFAULT_GOAL[self.variant]

    def validate(self) -> None:
        if self.variant not in _SUPPORTED:
            raise UnsupportedVariant(
                f"no reduction implemented for {self.variant.value}"
            )
        if self.margin < 3:
            raise InvalidParameters("margin must be at least 3")
        goal = self.resolved_goal()
        if self.variant is Variant.CIRULLI_2048:
            if goal <= 2048 or goal & (goal - 1):
                raise GoalTooSmall("2048-family goal must be a power of two above 2048")
        elif self.variant is Variant.THREES and goal != 12:
            raise InvalidParameters("Threes reduction targets goal tile 12")
        elif self.variant is Variant.FIBONACCI and goal != 34:
            raise InvalidParameters("Fibonacci reduction targets goal tile 34")
        if self.pot_of_gold is not None:
            if self.variant is not Variant.CIRULLI_2048:
                raise UnsupportedVariant("pot of gold is defined for the 2048 reduction")
            p, q = self.pot_of_gold
            if p < 1 or q < 0:
                raise InvalidParameters("pot of gold needs p >= 1 and q >= 0")
            if q >= (1 << p):
                raise InvalidParameters("pot of gold needs q < K = 2^p")


def base_pattern_face(i: int, j: int, variant: Variant) -> int:
    """Filler tile for cell (i, j): high powers of two arranged so equal
    faces are at least 3 apart; uniform non-merging tiles for the variants."""
    if variant is Variant.THREES:
        return 1
    if variant is Variant.FIBONACCI:
        return 5
    return 2 ** (3 * (i % 3) + (j % 3) + 3)


def _goal_shift(layout: Layout, options: ReductionOptions) -> int:
    """Column offset for the goal pair.

    With goal 4096 the goal tiles have face 2048, which also appears in the
    base pattern; the displayed goal cells sit beside a base 2048 unless
    n + m = 1 (mod 3).  Sliding the pair right by 0..2 columns keeps the
    mechanics identical and restores the spacing invariant.
    """
    if options.variant is Variant.CIRULLI_2048 and options.resolved_goal() == 4096:
        return (1 - (layout.num_vars + layout.num_clauses)) % 3
    return 0


def place_variable_gadgets(layout: Layout) -> list[GadgetPlacement]:
    out = []
    for i in range(1, layout.num_vars + 1):
        x = layout.xv[i - 1]
        y = layout.yv[i - 1]
        kp = layout.k_plus[i - 1]
        pairs = (
            ((x + 1, y + 1), (x + 2, y)),          # A, B: the true/false choice
            ((x + 2, y - 2), (x + 1, y - 3)),      # C, D: false branch
            ((x + 3 * kp + 5, y - 2), (x + 3 * kp + 4, y - 3)),  # E, F
        )
        out.append(GadgetPlacement("variable", f"variable-{i}", pairs))
    return out


def place_literal_gadgets(layout: Layout, formula: CnfFormula) -> list[GadgetPlacement]:
    out = []
    for i in range(1, layout.num_vars + 1):
        x = layout.xl[i - 1]
        kp = layout.k_plus[i - 1]
        for sign, occs, col0 in (
            ("pos", layout.pos_occurrences[i - 1], 0),
            ("neg", layout.neg_occurrences[i - 1], 3 * kp + 3),
        ):
            for k, occ in enumerate(occs, start=1):
                j, p = occ.clause, occ.position
                y = layout.yl(j)
                cx = x + col0 + 3 * (k - 1)
                tx = layout.xl[layout.num_vars + j - 1]
                pairs = (
                    ((cx + 1, y + 4 * p + 1), (cx + 2, y + 4 * p)),      # A, B
                    ((cx + 4, y + 4 * p - 1), (cx + 5, y + 4 * p)),      # C, D
                    ((tx + 6 * p + 1, y + 4 * p + 1), (tx + 6 * p + 2, y + 4 * p + 2)),  # E, F
                    ((tx + 3 * p + 16, y + 4 * p + 1), (tx + 3 * p + 18, y + 4 * p)),    # G, H
                )
                out.append(
                    GadgetPlacement("literal", f"literal-c{j}-p{p}-{sign}x{i}", pairs)
                )
    return out


def _propagation_columns(layout: Layout, i: int) -> tuple[int, int]:
    """Columns whose vertical shift ends variable i's chain: the final
    positive occurrence's second pair, and the final negative one (the
    variable gadget's E/F pair when the variable is never negated)."""
    x = layout.xl[i - 1]
    kp = layout.k_plus[i - 1]
    km = layout.k_minus[i - 1]
    c_pos = x + 3 * (kp - 1) + 4
    c_neg = x + 3 * (kp + km) + 4
    return c_pos, c_neg


def place_activation(layout: Layout, formula: CnfFormula) -> list[GadgetPlacement]:
    out = [
        GadgetPlacement("activation", "activation-start", (((-3, 0), (-2, 0)),))
    ]
    m = layout.num_clauses
    for i in range(1, layout.num_vars + 1):
        c_pos, c_neg = _propagation_columns(layout, i)
        if i < layout.num_vars:
            y_hi, y_lo = -6 * i, -6 * i - 1
            label = f"activation-{i}"
        else:
            y_hi, y_lo = 12 * m + 4, 12 * m + 5
            label = "activation-final"
        pairs = []
        if layout.k_plus[i - 1] > 0:
            # The displayed orientation puts this pair's inner tile adjacent
            # to the c_neg pair when k_minus = 0; mirroring it keeps every
            # initial pair-tile distance at 3 while receiving the same shift.
            if layout.k_minus[i - 1] > 0:
                pairs.append(((c_pos, y_lo), (c_pos + 1, y_hi)))
            else:
                pairs.append(((c_pos - 1, y_hi), (c_pos, y_lo)))
        pairs.append(((c_neg - 1, y_hi), (c_neg, y_lo)))
        out.append(GadgetPlacement("activation", label, tuple(pairs)))
    return out


def place_clause_gadgets(layout: Layout) -> list[GadgetPlacement]:
    out = []
    for j in range(1, layout.num_clauses + 1):
        x = layout.xt(j - 1)
        y = layout.yt(j)
        selector = (
            ((x + 17, y - 7), (x + 18, y - 8)),
            ((x + 17, y + 2), (x + 18, y + 1)),
            ((x + 20, y + 2), (x + 21, y + 1)),
            ((x + 20, y + 5), (x + 21, y + 4)),
            ((x + 23, y + 5), (x + 24, y + 4)),
        )
        collector = (
            ((x + 1, y + 13), (x + 2, y + 14)),
            ((x + 4, y + 14), (x + 5, y + 13)),
            ((x + 4, y + 9), (x + 5, y + 10)),
            ((x + 7, y + 10), (x + 8, y + 11)),
            ((x + 10, y + 11), (x + 11, y + 10)),
            ((x + 10, y + 6), (x + 11, y + 7)),
            ((x + 13, y + 7), (x + 14, y + 8)),
        )
        out.append(GadgetPlacement("clause", f"clause-{j}", selector + collector))
    return out


def place_goal(layout: Layout, options: ReductionOptions) -> GadgetPlacement:
    options.validate()
    shift = _goal_shift(layout, options)
    x = layout.xt(layout.num_clauses) + shift
    y = layout.yt(layout.num_clauses)
    if options.variant is Variant.CIRULLI_2048:
        faces = (options.resolved_goal() // 2,) * 2
    elif options.variant is Variant.THREES:
        faces = (6, 6)
    else:
        faces = (13, 21)
    cells = (((x + 1, y + 8), faces[0]), ((x + 2, y + 7), faces[1]))
    return GadgetPlacement("goal", "goal", extra_cells=cells)


def place_pot_of_gold(layout: Layout, p: int, q: int, *,
                      left_edge: int, goal_shift: int = 0) -> list[GadgetPlacement]:
    """Pot-of-gold tiles: the trigger pair above the goal column plus K + 1
    columns of alternating cash tiles hugging the (new) left wall.

    ``left_edge`` is the leftmost column of the board before extension.  The
    row of 8/16 tiles needs an extra leading 8 so that after the alignment
    shift exactly K sixteens line up; base-pattern 8s in the two neighbouring
    rows are replaced with inert 256s to keep the rows merge-free.
    """
    if p < 1:
        raise InvalidParameters("pot of gold needs p >= 1")
    if q >= (1 << p):
        raise InvalidParameters("pot of gold needs q < K = 2^p")
    k = 1 << p
    x = layout.xt(layout.num_clauses) + goal_shift
    y = layout.yt(layout.num_clauses)
    trigger = GadgetPlacement(
        "pot-of-gold", "pot-of-gold-trigger",
        (((x + 1, y + 21), (x + 2, y + 20)),),
    )
    cash: list[tuple[Cell, int]] = []
    cols = [left_edge - (k + 1) + j for j in range(k + 1)]
    for j, cx in enumerate(cols):
        upper = 8 if j % 2 == 0 else 16   # row y+20
        lower = 32 if j % 2 == 0 else 8   # row y+19
        cash.append(((cx, y + 20), upper))
        cash.append(((cx, y + 19), lower))
        for ry in (y + 18, y + 21):
            if base_pattern_face(cx, ry, Variant.CIRULLI_2048) == 8:
                cash.append(((cx, ry), 256))
    # The alignment shift slides the rightmost 8 one column past the
    # extension; neutralise the base 8 above its landing cell as well.
    if base_pattern_face(left_edge, y + 21, Variant.CIRULLI_2048) == 8:
        cash.append(((left_edge, y + 21), 256))
    rows_gadget = GadgetPlacement("pot-of-gold", "pot-of-gold-rows",
                                  extra_cells=tuple(cash))
    return [trigger, rows_gadget]


@dataclass(frozen=True)
class Annotation:
    label: str
    cells: tuple[tuple[int, int], ...]  # board (row, col)

    @property
    def group(self) -> str:
        return self.label.split("-", 1)[0]


@dataclass(frozen=True)
class InstanceMeta:
    formula: CnfFormula
    normalized: CnfFormula
    flips: frozenset[int]
    layout: Layout
    translation: tuple[int, int]  # col = x + dx ; row = dy - y
    options: ReductionOptions

    def to_board(self, cell: Cell) -> tuple[int, int]:
        dx, dy = self.translation
        return dy - cell[1], cell[0] + dx

    def to_paper(self, row: int, col: int) -> Cell:
        dx, dy = self.translation
        return col - dx, dy - row


@dataclass(frozen=True)
class Instance:
    board: Board
    variant: Variant
    spawn: SpawnPolicy
    goal: int
    annotations: tuple[Annotation, ...]
    meta: Optional[InstanceMeta]

    def initial_state(self) -> GameState:
        return GameState(self.board, self.variant, self.spawn, self.goal)


def _validate_goal_zone(variant: Variant, placed: dict[Cell, int],
                        goal_cells: tuple[tuple[Cell, int], ...]) -> None:
    """The goal tiles are the only placed tiles whose face can also occur in
    the base pattern (face 2048 when the target is 4096).  They move exactly
    once: the lower tile shifts one cell left, then the pair merges.  Check
    every base cell orthogonally adjacent to the tiles or to that landing
    cell; everything else is covered by the single-initial-adjacency scan
    and by the trace auditor.
    """
    (a_cell, a_face), (b_cell, b_face) = goal_cells
    landing = (b_cell[0] - 1, b_cell[1])
    spots = ((a_cell, a_face), (b_cell, b_face), (landing, b_face))
    for (x, y), face in spots:
        for ox, oy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            other = (x + ox, y + oy)
            if other in placed or other == landing:
                continue
            if merge_result(variant, face, base_pattern_face(*other, variant)) is not None:
                raise ConstructionError(
                    f"goal tile {face}@{(x, y)} meets an equal base tile at {other}"
                )


def compile_instance(formula: CnfFormula, options: ReductionOptions = ReductionOptions()) -> Instance:
    """Build the full game instance realizing the hardness construction."""
    options.validate()
    if options.goal is None:
        options = ReductionOptions(options.variant, options.resolved_goal(),
                                   options.margin, options.pot_of_gold)
    if not formula.clauses:
        raise EmptyClauseList("formula has no clauses")
    if not formula.is_three_cnf:
        raise InvalidParameters("reduction requires exactly-3-literal clauses")

    normalized, flips = normalize(formula)
    layout = compute_layout(normalized)
    variant = options.variant
    pair_face = _PAIR_FACE[variant]

    placements = []
    placements += place_activation(layout, normalized)
    placements += place_variable_gadgets(layout)
    placements += place_literal_gadgets(layout, normalized)
    placements += place_clause_gadgets(layout)
    placements.append(place_goal(layout, options))

    # Bounding box of the main construction, then the margin of filler that
    # keeps new wall tiles away from the gadget tiles.
    xs = [c[0] for g in placements for c in g.cells()]
    ys = [c[1] for g in placements for c in g.cells()]
    min_x, max_x = min(xs) - options.margin, max(xs) + options.margin
    min_y, max_y = min(ys) - options.margin, max(ys) + options.margin

    if options.pot_of_gold is not None:
        p, q = options.pot_of_gold
        placements += place_pot_of_gold(
            layout, p, q, left_edge=min_x, goal_shift=_goal_shift(layout, options)
        )
        min_x -= (1 << p) + 1
        max_y = max(max_y, layout.yt(layout.num_clauses) + 21 + options.margin)

    placed: dict[Cell, int] = {}
    owner: dict[Cell, str] = {}
    for g in placements:
        face = g.face if g.face is not None else pair_face
        for pair in g.pairs:
            for cell in pair:
                if cell in placed:
                    raise OverlappingGadgets(f"cell {cell} placed twice")
                placed[cell] = face
                owner[cell] = g.label
        for cell, f in g.extra_cells:
            if cell in placed:
                raise OverlappingGadgets(f"cell {cell} placed twice")
            placed[cell] = f
            owner[cell] = g.label

    cols = max_x - min_x + 1
    rows = max_y - min_y + 1
    # The base pattern is phased in construction coordinates so gadget
    # formulas stay aligned with it regardless of the bounding box.
    if variant is Variant.CIRULLI_2048:
        xs_mod = (min_x + np.arange(cols)) % 3
        ys_mod = (max_y - np.arange(rows)) % 3
        grid = 2 ** (3 * xs_mod[None, :] + ys_mod[:, None] + 3)
        grid = grid.astype(np.int64)
    else:
        grid = np.full((rows, cols), base_pattern_face(0, 0, variant), dtype=np.int64)
    for (x, y), face in placed.items():
        grid[max_y - y, x - min_x] = face

    goal_gadget = next(g for g in placements if g.role == "goal")
    _validate_goal_zone(variant, placed, goal_gadget.extra_cells)

    board = Board(grid)
    meta = InstanceMeta(
        formula=formula,
        normalized=normalized,
        flips=flips,
        layout=layout,
        translation=(-min_x, max_y),
        options=options,
    )
    annotations = tuple(
        Annotation(g.label, tuple(sorted(meta.to_board(c) for c in g.cells())))
        for g in placements
    )

    script: tuple[ScriptEntry, ...] = ()
    if options.pot_of_gold is not None:
        pot_row = max_y - (layout.yt(layout.num_clauses) + 20)
        entries = ScriptEntry(pair_face, Locator(pot_row, 0, "first-empty"))
        script = (entries,) * (1 << options.pot_of_gold[1])
    spawn = SpawnPolicy.unique_empty(_SPAWN_FACE[variant], script)

    instance = Instance(
        board=board,
        variant=variant,
        spawn=spawn,
        goal=options.resolved_goal(),
        annotations=annotations,
        meta=meta,
    )
    _check_initial_adjacency(instance)
    return instance


def _mergeable_adjacencies(board: Board, variant: Variant) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    from .engine import _merge_mask  # adjacency predicate shared with moves

    g = board.grid
    out = []
    horiz = _merge_mask(variant, g[:, :-1], g[:, 1:])
    for r, c in np.argwhere(horiz).tolist():
        out.append(((r, c), (r, c + 1)))
    vert = _merge_mask(variant, g[:-1, :], g[1:, :])
    for r, c in np.argwhere(vert).tolist():
        out.append(((r, c), (r + 1, c)))
    return out


def _check_initial_adjacency(instance: Instance) -> None:
    adj = _mergeable_adjacencies(instance.board, instance.variant)
    if len(adj) != 1:
        raise ConstructionError(
            f"expected exactly one initial mergeable pair, found {len(adj)}: {adj[:4]}"
        )
    if not instance.board.is_full:
        raise ConstructionError("compiled board has empty cells")
