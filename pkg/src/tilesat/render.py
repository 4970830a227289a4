"""ASCII and SVG board rendering."""
from __future__ import annotations

from xml.sax.saxutils import escape

from .engine import BLOCK, Board
from .reduction import Instance

# Tile palette from the original 2048 stylesheet; variant tiles reuse the
# nearest power-of-two bucket.
_TILE_COLORS = {
    2: "#eee4da", 4: "#ede0c8", 8: "#f2b179", 16: "#f59563", 32: "#f67c5f",
    64: "#f65e3b", 128: "#edcf72", 256: "#edcc61", 512: "#edc850",
    1024: "#edc53f", 2048: "#edc22e",
}
_BOARD_COLOR = "#bbada0"
_EMPTY_COLOR = "#cdc1b4"
_BLOCK_COLOR = "#776e65"
_DARK_TEXT = "#776e65"
_LIGHT_TEXT = "#f9f6f2"
_SUPER_COLOR = "#3c3a32"

_ANNOTATION_COLORS = {
    "activation": "#1f77b4", "variable": "#2ca02c", "literal": "#9467bd",
    "clause": "#d62728", "goal": "#ff7f0e", "pot": "#17becf",
}


def tile_color(face: int) -> str:
    if face in _TILE_COLORS:
        return _TILE_COLORS[face]
    # bucket odd variant faces (1, 3, 5, 13, ...) by magnitude
    bucket = 2
    while bucket < face and bucket < 2048:
        bucket *= 2
    return _TILE_COLORS.get(bucket, _SUPER_COLOR)


def render_ascii(board: Board) -> str:
    width = max((len(str(f)) for _, _, f in board.tiles()), default=1)
    width = max(width, 1)
    rows = []
    for r in range(board.rows):
        cells = []
        for c in range(board.cols):
            v = int(board.grid[r, c])
            if v == BLOCK:
                text = "#" * width
            elif v == 0:
                text = "." .rjust(width)
            else:
                text = str(v).rjust(width)
            cells.append(text)
        rows.append(" ".join(cells))
    return "\n".join(rows)


def render_svg(instance: Instance, board: Board | None = None,
               cell_size: int = 14, show_annotations: bool = True) -> str:
    """SVG picture of an instance (optionally at an alternate board state,
    e.g. mid-trace) with one outline per gadget annotation."""
    board = board if board is not None else instance.board
    cs = cell_size
    w, h = board.cols * cs, board.rows * cs
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="{_BOARD_COLOR}"/>',
    ]
    font = max(4, cs // 3)
    for r in range(board.rows):
        for c in range(board.cols):
            v = int(board.grid[r, c])
            x, y = c * cs, r * cs
            if v == BLOCK:
                fill = _BLOCK_COLOR
            elif v == 0:
                fill = _EMPTY_COLOR
            else:
                fill = tile_color(v)
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cs - 1}" height="{cs - 1}" fill="{fill}"/>'
            )
            if v > 0:
                color = _DARK_TEXT if v < 8 else _LIGHT_TEXT
                parts.append(
                    f'<text x="{x + cs // 2}" y="{y + cs // 2 + font // 2}" '
                    f'font-size="{font}" text-anchor="middle" fill="{color}">{v}</text>'
                )
    if show_annotations:
        for ann in instance.annotations:
            rows = [r for r, _ in ann.cells]
            cols = [c for _, c in ann.cells]
            color = _ANNOTATION_COLORS.get(ann.group, "#000000")
            x, y = min(cols) * cs, min(rows) * cs
            aw = (max(cols) - min(cols) + 1) * cs
            ah = (max(rows) - min(rows) + 1) * cs
            parts.append(
                f'<rect x="{x - 1}" y="{y - 1}" width="{aw + 1}" height="{ah + 1}" '
                f'fill="none" stroke="{color}" stroke-width="1.5">'
                f'<title>{escape(ann.label)}</title></rect>'
            )
    parts.append("</svg>")
    return "\n".join(parts)
