"""Versioned JSON documents for instances and traces.

The formats are frozen at version 1 and documented in docs/formats.md;
unknown keys are rejected so round-trips are exact.
"""
from __future__ import annotations

import json
from hashlib import sha256
from typing import Any

from .dimacs import format_dimacs, parse_dimacs
from .engine import Board, Direction, Locator, ScriptEntry, SpawnKind, SpawnPolicy, Variant
from .errors import DocumentError
from .reduction import (
    Annotation,
    Instance,
    InstanceMeta,
    ReductionOptions,
    compute_layout,
    normalize,
)

VERSION = 1

_INSTANCE_KEYS = {
    "version", "variant", "rows", "cols", "cells", "blocks", "spawn", "goal",
    "annotations", "meta",
}
_SPAWN_KEYS = {"policy", "face", "script"}
_META_KEYS = {"formula", "flips", "translation", "options"}
_TRACE_KEYS = {"version", "instance_digest", "moves", "reached_goal", "final_score"}


def _require_keys(obj: dict, allowed: set, required: set, what: str) -> None:
    keys = set(obj)
    unknown = keys - allowed
    if unknown:
        raise DocumentError(f"{what}: unknown fields {sorted(unknown)}")
    missing = required - keys
    if missing:
        raise DocumentError(f"{what}: missing fields {sorted(missing)}")


def instance_digest(doc: dict) -> str:
    """Content hash binding traces to the instance they were played on."""
    cells = sorted((c["r"], c["c"], c["v"]) for c in doc["cells"])
    payload = json.dumps(
        [doc["rows"], doc["cols"], cells, doc["goal"], doc["variant"]],
        separators=(",", ":"),
    )
    return sha256(payload.encode()).hexdigest()


def instance_to_document(instance: Instance) -> dict:
    board = instance.board
    cells = [
        {"r": r, "c": c, "v": v} for r, c, v in board.tiles()
    ]
    blocks = [{"r": r, "c": c} for r, c in sorted(board.blocks)]
    spawn: dict[str, Any] = {"policy": instance.spawn.kind.value}
    if instance.spawn.face is not None:
        spawn["face"] = instance.spawn.face
    if instance.spawn.script:
        spawn["script"] = [
            {"face": e.face, "r": e.locator.row, "c": e.locator.col, "rule": e.locator.rule}
            for e in instance.spawn.script
        ]
    doc = {
        "version": VERSION,
        "variant": instance.variant.value,
        "rows": board.rows,
        "cols": board.cols,
        "cells": cells,
        "blocks": blocks,
        "spawn": spawn,
        "goal": instance.goal,
        "annotations": [
            {"label": a.label, "cells": [[r, c] for r, c in a.cells]}
            for a in instance.annotations
        ],
        "meta": _meta_to_json(instance.meta),
    }
    return doc


def _meta_to_json(meta: InstanceMeta | None) -> dict | None:
    if meta is None:
        return None
    options = meta.options
    return {
        "formula": format_dimacs(meta.formula),
        "flips": sorted(meta.flips),
        "translation": {"dx": meta.translation[0], "dy": meta.translation[1]},
        "options": {
            "variant": options.variant.value,
            "goal": options.resolved_goal(),
            "margin": options.margin,
            "pot_of_gold": list(options.pot_of_gold) if options.pot_of_gold else None,
        },
    }


def instance_from_document(doc: dict) -> Instance:
    _require_keys(doc, _INSTANCE_KEYS, _INSTANCE_KEYS - {"blocks", "meta"}, "instance")
    if doc["version"] != VERSION:
        raise DocumentError(f"unsupported instance version {doc['version']}")
    try:
        variant = Variant(doc["variant"])
    except ValueError:
        raise DocumentError(f"unknown variant {doc['variant']!r}")
    rows, cols = doc["rows"], doc["cols"]
    board = Board.empty(rows, cols)
    grid = board.grid.copy()
    for cell in doc["cells"]:
        _require_keys(cell, {"r", "c", "v"}, {"r", "c", "v"}, "cell")
        if not (0 <= cell["r"] < rows and 0 <= cell["c"] < cols):
            raise DocumentError(f"cell {cell} out of bounds")
        if cell["v"] <= 0:
            raise DocumentError(f"cell {cell} must hold a positive face")
        grid[cell["r"], cell["c"]] = cell["v"]
    for cell in doc.get("blocks", []):
        _require_keys(cell, {"r", "c"}, {"r", "c"}, "block")
        if grid[cell["r"], cell["c"]] != 0:
            raise DocumentError(f"block {cell} overlaps a tile")
        grid[cell["r"], cell["c"]] = -1

    spawn_doc = doc["spawn"]
    _require_keys(spawn_doc, _SPAWN_KEYS, {"policy"}, "spawn")
    try:
        kind = SpawnKind(spawn_doc["policy"])
    except ValueError:
        raise DocumentError(f"unknown spawn policy {spawn_doc['policy']!r}")
    script = tuple(
        ScriptEntry(e["face"], Locator(e["r"], e["c"], e["rule"]))
        for e in spawn_doc.get("script", [])
    )
    spawn = SpawnPolicy(kind, face=spawn_doc.get("face"), script=script)

    annotations = []
    for a in doc.get("annotations", []):
        _require_keys(a, {"label", "cells"}, {"label", "cells"}, "annotation")
        annotations.append(Annotation(a["label"], tuple((r, c) for r, c in a["cells"])))

    meta = _meta_from_json(doc.get("meta"))
    return Instance(
        board=Board(grid),
        variant=variant,
        spawn=spawn,
        goal=doc["goal"],
        annotations=tuple(annotations),
        meta=meta,
    )


def _meta_from_json(meta_doc: dict | None) -> InstanceMeta | None:
    if meta_doc is None:
        return None
    _require_keys(meta_doc, _META_KEYS, {"formula", "flips", "translation"}, "meta")
    formula = parse_dimacs(meta_doc["formula"])
    flips = frozenset(meta_doc["flips"])
    normalized, derived_flips = normalize(formula)
    if derived_flips != flips:
        raise DocumentError("recorded polarity flips do not match the formula")
    layout = compute_layout(normalized)
    tr = meta_doc["translation"]
    opts_doc = meta_doc.get("options") or {}
    options = ReductionOptions(
        variant=Variant(opts_doc.get("variant", Variant.CIRULLI_2048.value)),
        goal=opts_doc.get("goal"),
        margin=opts_doc.get("margin", 3),
        pot_of_gold=tuple(opts_doc["pot_of_gold"]) if opts_doc.get("pot_of_gold") else None,
    )
    return InstanceMeta(
        formula=formula,
        normalized=normalized,
        flips=flips,
        layout=layout,
        translation=(tr["dx"], tr["dy"]),
        options=options,
    )


def trace_to_document(digest: str, moves, reached_goal: bool, final_score: int) -> dict:
    return {
        "version": VERSION,
        "instance_digest": digest,
        "moves": [m.letter if isinstance(m, Direction) else str(m) for m in moves],
        "reached_goal": bool(reached_goal),
        "final_score": int(final_score),
    }


def trace_from_document(doc: dict) -> dict:
    _require_keys(doc, _TRACE_KEYS, _TRACE_KEYS, "trace")
    if doc["version"] != VERSION:
        raise DocumentError(f"unsupported trace version {doc['version']}")
    try:
        moves = tuple(Direction.from_letter(m) for m in doc["moves"])
    except ValueError as exc:
        raise DocumentError(f"bad move letter: {exc}")
    return {
        "instance_digest": doc["instance_digest"],
        "moves": moves,
        "reached_goal": doc["reached_goal"],
        "final_score": doc["final_score"],
    }


def save_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
