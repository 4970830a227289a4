import pytest

from tilesat.dimacs import format_dimacs, parse_dimacs
from tilesat.documents import (
    instance_digest,
    instance_from_document,
    instance_to_document,
    trace_from_document,
    trace_to_document,
)
from tilesat.engine import Board, Direction, Variant
from tilesat.errors import ClauseArityError, DimacsSyntaxError, DocumentError
from tilesat.reduction import CnfFormula, ReductionOptions, compile_instance
from tilesat.render import render_ascii, render_svg

from conftest import FIG8, TINY_SAT

FIG8_DIMACS = """c example reduction formula
p cnf 4 3
1 -2 3 0
2 3 -4 0
-1 -2 4 0
"""


def test_parse_basic():
    formula = parse_dimacs("p cnf 3 1\n1 -2 3 0\n")
    assert formula.num_vars == 3
    assert formula.clauses == ((1, -2, 3),)


def test_parse_fig8_round_trip():
    formula = parse_dimacs(FIG8_DIMACS)
    assert formula == FIG8
    assert parse_dimacs(format_dimacs(formula)) == formula


def test_parse_multiline_clauses_and_comments():
    text = "c header\np cnf 2 2\n1 2\n-1 0\n% odd comment\n2 2 2 0\n"
    formula = parse_dimacs(text)
    assert formula.clauses == ((1, 2, -1), (2, 2, 2))


def test_strict_arity():
    with pytest.raises(ClauseArityError):
        parse_dimacs("p cnf 2 1\n1 -2 0\n")
    lenient = parse_dimacs("p cnf 2 1\n1 -2 0\n", lenient=True)
    assert lenient.clauses == ((1, -2, -2),)
    with pytest.raises(ClauseArityError):
        parse_dimacs("p cnf 4 1\n1 2 3 4 0\n", lenient=True)


@pytest.mark.parametrize("text,line", [
    ("p cnf 2 1\n1 x 0\n", 2),
    ("1 2 3 0\n", 1),
    ("p cnf 2 1\n1 2 5 0\n", 2),
    ("p cnf nope 1\n", 1),
])
def test_syntax_errors_carry_line_numbers(text, line):
    with pytest.raises(DimacsSyntaxError) as err:
        parse_dimacs(text)
    assert err.value.line == line


def test_clause_count_mismatch():
    with pytest.raises(DimacsSyntaxError):
        parse_dimacs("p cnf 2 2\n1 2 2 0\n")


def test_instance_document_round_trip():
    instance = compile_instance(TINY_SAT, ReductionOptions(goal=4096))
    doc = instance_to_document(instance)
    restored = instance_from_document(doc)
    assert restored == instance
    assert instance_to_document(restored) == doc


def test_instance_document_round_trip_with_pot():
    instance = compile_instance(TINY_SAT, ReductionOptions(goal=4096, pot_of_gold=(2, 1)))
    restored = instance_from_document(instance_to_document(instance))
    assert restored == instance


def test_unknown_fields_rejected():
    instance = compile_instance(TINY_SAT, ReductionOptions())
    doc = instance_to_document(instance)
    doc["surprise"] = 1
    with pytest.raises(DocumentError):
        instance_from_document(doc)


def test_version_checked():
    instance = compile_instance(TINY_SAT, ReductionOptions())
    doc = instance_to_document(instance)
    doc["version"] = 9
    with pytest.raises(DocumentError):
        instance_from_document(doc)


def test_digest_binds_traces():
    instance = compile_instance(TINY_SAT, ReductionOptions())
    doc = instance_to_document(instance)
    digest = instance_digest(doc)
    other = instance_to_document(compile_instance(FIG8, ReductionOptions()))
    assert digest != instance_digest(other)
    trace_doc = trace_to_document(digest, [Direction.LEFT, Direction.UP], False, 8)
    parsed = trace_from_document(trace_doc)
    assert parsed["moves"] == (Direction.LEFT, Direction.UP)
    assert parsed["instance_digest"] == digest
    trace_doc["moves"] = ["L", "X"]
    with pytest.raises(DocumentError):
        trace_from_document(trace_doc)


def test_render_ascii_examples():
    board = Board.from_rows([[2, 0], [0, 4]])
    text = render_ascii(board)
    lines = text.splitlines()
    assert len(lines) == 2
    assert lines[0].split() == ["2", "."]
    assert lines[1].split() == [".", "4"]
    assert render_ascii(Board.empty(2, 3)).split() == ["."] * 6


def test_render_ascii_blocks():
    board = Board.from_rows([[2, -1]])
    assert "#" in render_ascii(board)


def test_render_svg_structure():
    instance = compile_instance(TINY_SAT, ReductionOptions())
    svg = render_svg(instance, cell_size=6)
    assert svg.startswith("<svg")
    assert svg.rstrip().endswith("</svg>")
    assert "#eee4da" in svg  # the tile-2 colour from the original stylesheet
    assert "activation-start" in svg
    import xml.etree.ElementTree as ET

    ET.fromstring(svg)  # well-formed XML


def test_render_svg_respects_alternate_board():
    instance = compile_instance(TINY_SAT, ReductionOptions())
    board = Board.empty(2, 2)
    svg = render_svg(instance, board, cell_size=10, show_annotations=False)
    assert svg.count("<rect") == 1 + 4  # backdrop plus four empty cells
