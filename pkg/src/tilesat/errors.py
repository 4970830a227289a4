"""Exception hierarchy shared by the engine, reduction, solver and IO layers."""


class TilesatError(Exception):
    """Base class for all package errors."""


# --- engine ---------------------------------------------------------------

class GameError(TilesatError):
    pass


class IllegalMove(GameError):
    pass


class SpawnError(GameError):
    pass


class NoEmptyCell(SpawnError):
    pass


class AmbiguousLocator(SpawnError):
    """Unique-empty spawn requested while the board has != 1 empty cell."""


class ScriptExhausted(SpawnError):
    pass


class OccupiedCell(SpawnError):
    """An exact spawn locator resolved to an occupied cell."""


class AngelChoiceRequired(SpawnError):
    """Angel policy needs an explicit (face, cell) choice from the caller."""


# --- reduction ------------------------------------------------------------

class ReductionError(TilesatError):
    pass


class EmptyClauseList(ReductionError):
    pass


class GoalTooSmall(ReductionError):
    pass


class UnsupportedVariant(ReductionError):
    pass


class OverlappingGadgets(ReductionError):
    pass


class InvalidParameters(ReductionError):
    pass


class ConstructionError(ReductionError):
    """A compiled instance failed its defensive structural validation."""


# --- solver ---------------------------------------------------------------

class SolverError(TilesatError):
    pass


class UnsatisfiedClause(SolverError):
    def __init__(self, clause_index: int):
        super().__init__(f"assignment leaves clause {clause_index} false")
        self.clause_index = clause_index


class MissingAnnotations(SolverError):
    pass


class BudgetExceeded(SolverError):
    pass


class ReplayMismatch(SolverError):
    pass


# --- io -------------------------------------------------------------------

class IoError(TilesatError):
    pass


class DimacsSyntaxError(IoError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ClauseArityError(IoError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DocumentError(IoError):
    pass
