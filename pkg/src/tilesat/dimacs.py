"""DIMACS CNF parsing and formatting."""
from __future__ import annotations

from .errors import ClauseArityError, DimacsSyntaxError
from .reduction import CnfFormula


def parse_dimacs(text: str, lenient: bool = False) -> CnfFormula:
    """Parse DIMACS CNF text.

    Clauses must have exactly three literals; with ``lenient`` set, shorter
    clauses are padded by repeating their last literal (longer ones are
    always rejected).
    """
    num_vars = None
    declared_clauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    clause_line = 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsSyntaxError("duplicate problem line", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsSyntaxError(f"malformed problem line {line!r}", lineno)
            try:
                num_vars, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsSyntaxError(f"malformed problem line {line!r}", lineno)
            if num_vars < 0 or declared_clauses < 0:
                raise DimacsSyntaxError("negative counts in problem line", lineno)
            continue
        if num_vars is None:
            raise DimacsSyntaxError("clause before problem line", lineno)
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise DimacsSyntaxError(f"bad token {token!r}", lineno)
            if lit == 0:
                clauses.append(_close_clause(current, clause_line, lenient))
                current = []
                clause_line = lineno
            else:
                if not current:
                    clause_line = lineno
                if abs(lit) > num_vars:
                    raise DimacsSyntaxError(
                        f"literal {lit} exceeds declared {num_vars} variables", lineno
                    )
                current.append(lit)

    if current:
        clauses.append(_close_clause(current, clause_line, lenient))
    if num_vars is None:
        raise DimacsSyntaxError("missing problem line", 1)
    if declared_clauses != len(clauses):
        raise DimacsSyntaxError(
            f"header declares {declared_clauses} clauses, found {len(clauses)}", 1
        )
    return CnfFormula(num_vars, tuple(clauses))


def _close_clause(lits: list[int], lineno: int, lenient: bool) -> tuple[int, ...]:
    if not lits:
        raise ClauseArityError("empty clause", lineno)
    if len(lits) > 3:
        raise ClauseArityError(f"clause has {len(lits)} literals", lineno)
    if len(lits) < 3:
        if not lenient:
            raise ClauseArityError(f"clause has {len(lits)} literals", lineno)
        lits = lits + [lits[-1]] * (3 - len(lits))
    return tuple(lits)


def format_dimacs(formula: CnfFormula, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines += [f"c {c}" for c in comment.splitlines()]
    lines.append(f"p cnf {formula.num_vars} {formula.num_clauses}")
    lines += [" ".join(map(str, clause)) + " 0" for clause in formula.clauses]
    return "\n".join(lines) + "\n"
