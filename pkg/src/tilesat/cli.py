"""Command-line surface: compile, solve, play, verify, render, replay, sat, serve.

Exit codes: 0 success, 64 usage error, 66 unreadable or malformed input
file, 70 internal invariant violation.  ``solve`` additionally uses 0/1/2
for reachable/unreachable/budget-exceeded and ``sat`` uses 0/1 for SAT/UNSAT.
"""
from __future__ import annotations

import argparse
import random
import sys

from . import documents
from .dimacs import parse_dimacs
from .engine import Direction, legal_moves, status, step
from .errors import IllegalMove, IoError, ReductionError, SolverError, TilesatError
from .reduction import CnfFormula, Instance, ReductionOptions, compile_instance
from .render import render_ascii, render_svg
from .solver import SearchBudget, dpll, equivalence_check, replay, search
from .engine import Variant

EX_USAGE = 64
EX_DATA = 66
EX_INTERNAL = 70

_VARIANTS = {
    "2048": Variant.CIRULLI_2048,
    "cirulli-2048": Variant.CIRULLI_2048,
    "threes": Variant.THREES,
    "fibonacci": Variant.FIBONACCI,
    "saming-2048": Variant.SAMING_2048,
    "fives": Variant.FIVES,
    "game-1024": Variant.GAME_1024,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EX_USAGE)


def _read_formula(path: str, lenient: bool = False) -> CnfFormula:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EX_DATA)
    try:
        return parse_dimacs(text, lenient=lenient)
    except IoError as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        raise SystemExit(EX_DATA)


def _read_instance(path: str) -> Instance:
    try:
        doc = documents.load_json(path)
    except (OSError, ValueError) as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EX_DATA)
    try:
        return documents.instance_from_document(doc)
    except (IoError, TilesatError) as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        raise SystemExit(EX_DATA)


def _options_from_args(args) -> ReductionOptions:
    pot = None
    if args.pot_of_gold:
        try:
            p, q = (int(v) for v in args.pot_of_gold.split(","))
        except ValueError:
            print("--pot-of-gold expects p,q", file=sys.stderr)
            raise SystemExit(EX_USAGE)
        pot = (p, q)
    return ReductionOptions(
        variant=_VARIANTS[args.variant],
        goal=args.goal,
        margin=args.margin,
        pot_of_gold=pot,
    )


def cmd_compile(args) -> int:
    formula = _read_formula(args.cnf, lenient=args.lenient)
    instance = compile_instance(formula, _options_from_args(args))
    doc = documents.instance_to_document(instance)
    documents.save_json(args.output, doc)
    print(
        f"compiled {args.cnf}: {instance.board.rows}x{instance.board.cols} board, "
        f"goal {instance.goal}, digest {documents.instance_digest(doc)[:12]}"
    )
    return 0


def cmd_solve(args) -> int:
    instance = _read_instance(args.instance)
    budget = SearchBudget(max_moves=args.budget) if args.budget else SearchBudget()
    try:
        trace = search(instance, budget)
    except SolverError as exc:
        print(f"budget exceeded: {exc}")
        return 2
    if trace is None:
        print("goal unreachable: search exhausted the reachable state space")
        return 1
    print(f"goal reachable in {len(trace.moves)} moves: "
          + "".join(m.letter for m in trace.moves))
    if args.emit_trace:
        doc = documents.instance_to_document(instance)
        digest = documents.instance_digest(doc)
        documents.save_json(
            args.emit_trace,
            documents.trace_to_document(digest, trace.moves, trace.reached_goal,
                                        sum(trace.score_per_move)),
        )
    return 0


def cmd_play(args) -> int:
    instance = _read_instance(args.instance)
    state = instance.initial_state()
    print(render_ascii(state.board))
    while True:
        st = status(state)
        print(f"score={state.running_score} moves={state.move_count} "
              f"status={st} legal={''.join(sorted(d.letter for d in legal_moves(state)))}")
        if st == "game_over":
            print("game over")
            return 0
        try:
            line = input("move [L/R/U/D, q quits]> ").strip().upper()
        except EOFError:
            return 0
        if line in ("Q", "QUIT", "EXIT"):
            return 0
        try:
            direction = Direction.from_letter(line)
        except ValueError:
            print("unrecognised move")
            continue
        try:
            state = step(state, direction)
        except IllegalMove:
            print("illegal move")
            continue
        print(render_ascii(state.board))
        if status(state) == "goal":
            print(f"goal tile {instance.goal} reached!")


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    formulas: list[CnfFormula] = []
    if args.cnf:
        formulas.append(_read_formula(args.cnf))
    else:
        for _ in range(args.samples):
            n = rng.randint(1, args.max_vars)
            m = rng.randint(1, args.max_clauses)
            clauses = tuple(
                tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(3))
                for _ in range(m)
            )
            formulas.append(CnfFormula(n, clauses))
    options = _options_from_args(args)
    disagreements = inconclusive = 0
    for idx, formula in enumerate(formulas):
        result = equivalence_check(formula, options)
        if not result.conclusive:
            inconclusive += 1
            verdict = "inconclusive (budget)"
        elif result.agree:
            verdict = "agree"
        else:
            disagreements += 1
            verdict = "DISAGREE"
        print(f"[{idx + 1}/{len(formulas)}] sat={result.sat} "
              f"reachable={result.reachable} -> {verdict}")
    print(f"checked {len(formulas)}: {disagreements} disagreements, "
          f"{inconclusive} inconclusive")
    return 1 if disagreements else 0


def cmd_render(args) -> int:
    instance = _read_instance(args.instance)
    board = instance.board
    if args.trace:
        trace_doc = documents.trace_from_document(documents.load_json(args.trace))
        doc = documents.instance_to_document(instance)
        if trace_doc["instance_digest"] != documents.instance_digest(doc):
            print("trace digest does not match the instance", file=sys.stderr)
            return EX_DATA
        moves = trace_doc["moves"]
        upto = len(moves) if args.step is None else min(args.step, len(moves))
        trace = replay(instance, moves[:upto], keep_snapshots=True)
        board = trace.snapshots[-1]
    svg = render_svg(instance, board, cell_size=args.cell_size,
                     show_annotations=not args.plain)
    with open(args.svg, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.svg}")
    return 0


def cmd_replay(args) -> int:
    instance = _read_instance(args.instance)
    trace_doc = documents.trace_from_document(documents.load_json(args.trace))
    doc = documents.instance_to_document(instance)
    if trace_doc["instance_digest"] != documents.instance_digest(doc):
        print("trace digest does not match the instance", file=sys.stderr)
        return EX_DATA
    trace = replay(instance, trace_doc["moves"], keep_snapshots=True)
    final = trace.snapshots[-1]
    payload = {
        "moves": len(trace.moves),
        "reached_goal": trace.reached_goal,
        "final_score": sum(trace.score_per_move),
        "board": {
            "rows": final.rows,
            "cols": final.cols,
            "cells": [{"r": r, "c": c, "v": v} for r, c, v in final.tiles()],
        },
    }
    print(documents.json.dumps(payload))
    return 0


def cmd_sat(args) -> int:
    formula = _read_formula(args.cnf, lenient=args.lenient)
    model = dpll(formula)
    if model is None:
        print("UNSATISFIABLE")
        return 1
    assignment = " ".join(str(v if model[v] else -v) for v in sorted(model))
    print("SATISFIABLE")
    print(f"v {assignment} 0")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    instance = _read_instance(args.instance)
    serve(instance, port=args.port, static_dir=args.static)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="tilesat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_reduction_flags(p):
        p.add_argument("--variant", choices=sorted(_VARIANTS), default="2048")
        p.add_argument("--goal", type=int, default=None)
        p.add_argument("--margin", type=int, default=3)
        p.add_argument("--pot-of-gold", default=None, metavar="p,q")

    p = sub.add_parser("compile", help="compile a DIMACS 3-CNF into a game instance")
    p.add_argument("cnf")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--lenient", action="store_true",
                   help="pad short clauses by repeating the last literal")
    add_reduction_flags(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("solve", help="search an instance for a goal-reaching trace")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, default=None, help="maximum moves")
    p.add_argument("--emit-trace", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("play", help="interactive terminal session")
    p.add_argument("instance")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("verify", help="cross-check search reachability against DPLL")
    p.add_argument("cnf", nargs="?", default=None)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--max-vars", type=int, default=4)
    p.add_argument("--max-clauses", type=int, default=4)
    p.add_argument("--seed", type=int, default=2048)
    add_reduction_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="render an instance (optionally mid-trace) to SVG")
    p.add_argument("instance")
    p.add_argument("--svg", required=True)
    p.add_argument("--trace", default=None)
    p.add_argument("--step", type=int, default=None)
    p.add_argument("--cell-size", type=int, default=14)
    p.add_argument("--plain", action="store_true", help="omit annotation outlines")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("replay", help="replay a trace and print the final state")
    p.add_argument("instance")
    p.add_argument("trace")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("sat", help="run the DPLL decision procedure only")
    p.add_argument("cnf")
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("serve", help="HTTP/JSON bridge for the web debugger")
    p.add_argument("instance")
    p.add_argument("--port", type=int, default=8325)
    p.add_argument("--static", default=None, help="directory of web assets to serve")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ReductionError, IoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATA
    except TilesatError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EX_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
