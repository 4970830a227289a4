"""Merge-game engine, 3-CNF-to-instance compiler, solver and auditor."""

from .engine import (
    Board,
    Direction,
    GameState,
    MoveOutcome,
    SpawnKind,
    SpawnPolicy,
    Variant,
    apply_move,
    final_score_threes,
    is_forbidden,
    legal_moves,
    merge_result,
    move_board,
    reached_goal,
    spawn,
    status,
    step,
)
from .reduction import (
    Annotation,
    CnfFormula,
    Instance,
    Layout,
    ReductionOptions,
    base_pattern_face,
    compile_instance,
    compute_layout,
    normalize,
)
from .solver import (
    AuditReport,
    SearchBudget,
    Trace,
    audit,
    canonical_play,
    dpll,
    equivalence_check,
    move_budget,
    replay,
    search,
)

__version__ = "0.1.0"
