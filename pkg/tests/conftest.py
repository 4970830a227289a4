import itertools
import random

import pytest

from tilesat.engine import Board, Variant
from tilesat.reduction import CnfFormula

FIG8 = CnfFormula(4, ((1, -2, 3), (2, 3, -4), (-1, -2, 4)))

# All eight sign patterns over three variables: unsatisfiable by exhaustion.
UNSAT8 = CnfFormula(3, tuple(
    tuple(s * v for s, v in zip(signs, (1, 2, 3)))
    for signs in itertools.product((1, -1), repeat=3)
))

TINY_SAT = CnfFormula(1, ((1, 1, 1),))

VARIANT_FACES = {
    Variant.CIRULLI_2048: [2 ** k for k in range(1, 12)],
    Variant.SAMING_2048: [2 ** k for k in range(1, 12)],
    Variant.GAME_1024: [2 ** k for k in range(1, 11)],
    Variant.THREES: [1, 2] + [3 * 2 ** i for i in range(8)],
    Variant.FIVES: [2, 3] + [5 * 2 ** i for i in range(8)],
    Variant.FIBONACCI: [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144],
}


def random_board(rng: random.Random, variant: Variant,
                 rows: int | None = None, cols: int | None = None,
                 density: float | None = None) -> Board:
    rows = rows or rng.randint(2, 7)
    cols = cols or rng.randint(2, 7)
    density = density if density is not None else rng.uniform(0.2, 1.0)
    faces = VARIANT_FACES[variant]
    grid = [[0] * cols for _ in range(rows)]
    for r in range(rows):
        for c in range(cols):
            if rng.random() < density:
                grid[r][c] = rng.choice(faces)
    if variant is Variant.GAME_1024 and rng.random() < 0.5:
        grid[rows // 2][cols // 2] = -1
    return Board.from_rows(grid)


def brute_force_sat(formula: CnfFormula):
    """Exhaustive satisfiability oracle, independent of the DPLL path."""
    for bits in itertools.product((False, True), repeat=formula.num_vars):
        assignment = {i + 1: bits[i] for i in range(formula.num_vars)}
        if formula.evaluate(assignment):
            return assignment
    return None


def random_formula(rng: random.Random, max_vars: int = 4, max_clauses: int = 4) -> CnfFormula:
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_clauses)
    clauses = tuple(
        tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(3))
        for _ in range(m)
    )
    return CnfFormula(n, clauses)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
