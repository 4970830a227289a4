import json

import pytest

from tilesat.cli import main

FIG8_DIMACS = "p cnf 4 3\n1 -2 3 0\n2 3 -4 0\n-1 -2 4 0\n"
UNSAT_DIMACS = "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n"


@pytest.fixture
def fig8_cnf(tmp_path):
    path = tmp_path / "fig8.cnf"
    path.write_text(FIG8_DIMACS)
    return path


def test_compile_solve_round_trip(tmp_path, fig8_cnf, capsys):
    out = tmp_path / "fig8.json"
    trace = tmp_path / "fig8.trace.json"
    assert main(["compile", str(fig8_cnf), "--goal", "4096", "-o", str(out)]) == 0
    assert main(["solve", str(out), "--emit-trace", str(trace)]) == 0
    assert main(["replay", str(out), str(trace)]) == 0
    payload = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert payload["reached_goal"] is True


def test_solve_unreachable_exits_one(tmp_path):
    cnf = tmp_path / "unsat.cnf"
    cnf.write_text(UNSAT_DIMACS)
    out = tmp_path / "unsat.json"
    assert main(["compile", str(cnf), "-o", str(out)]) == 0
    assert main(["solve", str(out)]) == 1


def test_solve_budget_exceeded_exits_two(tmp_path, fig8_cnf):
    out = tmp_path / "fig8.json"
    main(["compile", str(fig8_cnf), "--goal", "4096", "-o", str(out)])
    assert main(["solve", str(out), "--budget", "3"]) == 2


def test_sat_exit_codes(tmp_path, fig8_cnf):
    assert main(["sat", str(fig8_cnf)]) == 0
    unsat = tmp_path / "u.cnf"
    unsat.write_text(UNSAT_DIMACS)
    assert main(["sat", str(unsat)]) == 1


def test_verify_small_sample(tmp_path, capsys):
    assert main(["verify", "--samples", "6", "--max-vars", "3",
                 "--max-clauses", "3", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "0 disagreements" in out


def test_verify_single_formula(fig8_cnf):
    assert main(["verify", str(fig8_cnf), "--goal", "4096"]) == 0


def test_render_svg_output(tmp_path, fig8_cnf):
    out = tmp_path / "fig8.json"
    svg = tmp_path / "fig8.svg"
    main(["compile", str(fig8_cnf), "--goal", "4096", "-o", str(out)])
    assert main(["render", str(out), "--svg", str(svg), "--cell-size", "6"]) == 0
    assert svg.read_text().startswith("<svg")


def test_render_with_trace_step(tmp_path, fig8_cnf):
    out = tmp_path / "fig8.json"
    trace = tmp_path / "t.json"
    svg = tmp_path / "s.svg"
    main(["compile", str(fig8_cnf), "--goal", "4096", "-o", str(out)])
    main(["solve", str(out), "--emit-trace", str(trace)])
    assert main(["render", str(out), "--svg", str(svg),
                 "--trace", str(trace), "--step", "1"]) == 0


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["compile"])  # missing required arguments
    assert err.value.code == 64


def test_missing_file_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["solve", "/nonexistent/instance.json"])
    assert err.value.code == 66


def test_malformed_cnf_exit_code(tmp_path):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 1 1\n1 zz 0\n")
    with pytest.raises(SystemExit) as err:
        main(["compile", str(bad), "-o", str(tmp_path / "x.json")])
    assert err.value.code == 66


def test_lenient_padding(tmp_path):
    cnf = tmp_path / "short.cnf"
    cnf.write_text("p cnf 2 1\n1 -2 0\n")
    out = tmp_path / "short.json"
    with pytest.raises(SystemExit) as err:
        main(["compile", str(cnf), "-o", str(out)])
    assert err.value.code == 66
    assert main(["compile", str(cnf), "--lenient", "-o", str(out)]) == 0


def test_play_session(tmp_path, fig8_cnf, capsys, monkeypatch):
    out = tmp_path / "fig8.json"
    main(["compile", str(fig8_cnf), "--goal", "4096", "-o", str(out)])
    inputs = iter(["L", "X", "R", "q"])  # L valid, X nonsense, R illegal here
    monkeypatch.setattr("builtins.input", lambda prompt="": next(inputs))
    assert main(["play", str(out)]) == 0
    output = capsys.readouterr().out
    assert "unrecognised move" in output
    assert "illegal move" in output
