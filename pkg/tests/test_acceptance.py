"""Acceptance suite: one test per acceptance criterion, exact tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.
"""
import random
import time

import pytest

from tilesat.cli import main
from tilesat.engine import Direction, Variant, advance, apply_move, move_board, reached_goal
from tilesat.reduction import CnfFormula, ReductionOptions, apply_flips, compile_instance
from tilesat.solver import (
    SearchBudget,
    audit,
    canonical_moves,
    canonical_play,
    dpll,
    move_budget,
    search,
)

from conftest import FIG8, TINY_SAT, UNSAT8, VARIANT_FACES, random_board, random_formula

L, R, U, D = Direction.LEFT, Direction.RIGHT, Direction.UP, Direction.DOWN


def report(n, text):
    print(f"\nACCEPTANCE {n}: PASS - {text}")


def test_acceptance_1_fig8_end_to_end(tmp_path):
    """Compiling the example formula for 2048 with T=4096 and solving finds a
    goal-reaching trace in well under a minute."""
    started = time.time()
    cnf = tmp_path / "fig8.cnf"
    cnf.write_text("p cnf 4 3\n1 -2 3 0\n2 3 -4 0\n-1 -2 4 0\n")
    out = tmp_path / "fig8.json"
    trace_path = tmp_path / "fig8.trace.json"
    assert main(["compile", str(cnf), "--goal", "4096", "-o", str(out)]) == 0
    assert main(["solve", str(out), "--emit-trace", str(trace_path)]) == 0
    elapsed = time.time() - started
    assert elapsed < 60.0
    report(1, f"Fig.8 compile+solve reached tile 4096 in {elapsed:.1f}s")


def test_acceptance_2_unsat_control(tmp_path):
    """The eight-sign-pattern contradiction compiles and solve exhausts."""
    cnf = tmp_path / "unsat8.cnf"
    lines = ["p cnf 3 8"] + [
        f"{a} {b} {c} 0"
        for a in (1, -1) for b in (2, -2) for c in (3, -3)
    ]
    cnf.write_text("\n".join(lines) + "\n")
    out = tmp_path / "unsat8.json"
    assert main(["compile", str(cnf), "-o", str(out)]) == 0
    started = time.time()
    assert main(["solve", str(out)]) == 1
    report(2, f"8-clause contradiction proven unreachable in {time.time() - started:.1f}s")


def test_acceptance_3_sat_equivalence_oracle():
    """Fifty random 3-CNFs with n <= 4, m <= 4: depth-first reachability
    matches DPLL satisfiability in every conclusive case."""
    rng = random.Random(0x35A7)
    checked = 0
    for _ in range(50):
        formula = random_formula(rng, max_vars=4, max_clauses=4)
        sat = dpll(formula) is not None
        instance = compile_instance(formula, ReductionOptions())
        trace = search(instance)  # full search for both answers
        reachable = trace is not None and trace.reached_goal
        assert sat == reachable, (formula.num_vars, formula.clauses)
        checked += 1
    assert checked == 50
    report(3, "search reachability == DPLL satisfiability on 50/50 random formulas")


def _satisfiable_fixtures():
    rng = random.Random(0xF1D0)
    fixtures = [
        (FIG8, ReductionOptions(goal=4096)),
        (FIG8, ReductionOptions(goal=8192)),
        (FIG8, ReductionOptions(variant=Variant.THREES)),
        (FIG8, ReductionOptions(variant=Variant.FIBONACCI)),
        (TINY_SAT, ReductionOptions()),
        (CnfFormula(2, ((-1, -1, 2), (-1, 2, 2))), ReductionOptions()),
        (CnfFormula(3, ((1, 2, 1),)), ReductionOptions()),
    ]
    while len(fixtures) < 15:
        formula = random_formula(rng)
        if dpll(formula) is not None:
            fixtures.append((formula, ReductionOptions()))
    return fixtures


def test_acceptance_4_invariant_audit():
    """Canonical play of a DPLL witness reaches the goal on every satisfiable
    fixture, and the audit reports zero violations of any rule."""
    count = 0
    for formula, options in _satisfiable_fixtures():
        instance = compile_instance(formula, options)
        witness = dpll(formula)
        trace = canonical_play(instance, witness)
        assert trace.reached_goal
        rep = audit(instance, trace)
        assert rep.fullness_ok and rep.one_move_ok, rep.violations[:4]
        assert rep.shift_once_ok and rep.adjacent_column_ok, rep.violations[:4]
        assert rep.adjacent_row_ok, rep.violations[:4]
        assert rep.violations == []
        count += 1
    report(4, f"fullness/one-move/shift-once/adjacency audits clean on {count} fixtures")


def test_acceptance_5_engine_conservation():
    """1,000 randomized (variant, board, direction) cases: the tile-face sum
    never changes across a move (before any spawn)."""
    rng = random.Random(0xCAFE)
    variants = [Variant.CIRULLI_2048, Variant.THREES, Variant.FIBONACCI,
                Variant.SAMING_2048, Variant.FIVES, Variant.GAME_1024]
    for i in range(1000):
        variant = variants[i % len(variants)]
        board = random_board(rng, variant)
        direction = rng.choice(list(Direction))
        outcome = move_board(board, variant, direction)
        assert outcome.board_after.tile_sum == board.tile_sum
    report(5, "tile-face sum conserved across 1000 random moves in all variants")


def test_acceptance_6_variant_substitution():
    """The same satisfiable formula reaches tile 12 under Threes! rules and
    tile 34 under Fibonacci rules."""
    witness = dpll(FIG8)
    threes = compile_instance(FIG8, ReductionOptions(variant=Variant.THREES))
    assert threes.goal == 12
    assert canonical_play(threes, witness).reached_goal
    fib = compile_instance(FIG8, ReductionOptions(variant=Variant.FIBONACCI))
    assert fib.goal == 34
    assert canonical_play(fib, witness).reached_goal
    report(6, "Threes reaches goal 12 and Fibonacci reaches goal 34 on Fig.8")


def test_acceptance_7_pot_of_gold():
    """With K = 2^3 and S = 2^2 the post-goal cascade condenses the cash rows
    into a single tile of value 16K = 128 after log K right moves."""
    instance = compile_instance(FIG8, ReductionOptions(goal=4096, pot_of_gold=(3, 2)))
    meta = instance.meta
    moves = canonical_moves(meta.layout, meta.normalized,
                            apply_flips(dpll(FIG8), meta.flips))
    state = instance.initial_state()
    for move in moves:
        state = advance(state, apply_move(state, move))
    assert reached_goal(state)
    k = 8
    row = meta.translation[1] - (meta.layout.yt(meta.layout.num_clauses) + 20)
    assert int((state.board.grid[row, 0:k + 1] == 128).sum()) == 0
    for move in [R, U] + [R] * 3:  # alignment, merge the 8s, log K rights
        outcome = apply_move(state, move)
        assert outcome.moved
        state = advance(state, outcome)
    assert int((state.board.grid[row, 0:k + 1] == 128).sum()) == 1
    report(7, "pot-of-gold cascade produced a single 16K = 128 tile after log K rights")


def test_acceptance_8_size_bound():
    """Board side lengths scale linearly in n+m (area quadratic)."""
    ratios = []
    for n, m in ((3, 1), (3, 3), (4, 4)):
        clauses = tuple(
            tuple((v + k) % n + 1 for k in range(3)) for v in range(m)
        )
        instance = compile_instance(CnfFormula(n, clauses), ReductionOptions())
        size = n + m
        ratios += [instance.board.rows / size, instance.board.cols / size]
    spread = max(ratios) / min(ratios)
    assert spread < 3.0, ratios
    report(8, f"side/(n+m) ratios stay within a {spread:.2f}x band across n+m in {{4,6,8}}")


def test_acceptance_9_budget_formula():
    """Move budget follows goal * b^2 / 4 exactly."""
    assert move_budget(2048, 4) == 8192
    report(9, "move_budget(2048, 4) == 8192")
