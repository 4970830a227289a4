/**
 * Canvas grid renderer with viewport virtualization: reduction boards have
 * O((n+m)^2) cells, so only the cells inside the scrolled viewport are drawn.
 */

import type { ViewState } from "./store.js";
import { cellKey, faceMap, visibleAnnotations } from "./store.js";

const TILE_COLORS: Record<number, string> = {
  2: "#eee4da", 4: "#ede0c8", 8: "#f2b179", 16: "#f59563", 32: "#f67c5f",
  64: "#f65e3b", 128: "#edcf72", 256: "#edcc61", 512: "#edc850",
  1024: "#edc53f", 2048: "#edc22e",
};
const BOARD_BG = "#bbada0";
const EMPTY_BG = "#cdc1b4";
const BLOCK_BG = "#776e65";
const GROUP_COLORS: Record<string, string> = {
  activation: "#1f77b4", variable: "#2ca02c", literal: "#9467bd",
  clause: "#d62728", goal: "#ff7f0e", pot: "#17becf",
};

export function tileColor(face: number): string {
  if (face in TILE_COLORS) return TILE_COLORS[face];
  let bucket = 2;
  while (bucket < face && bucket < 2048) bucket *= 2;
  return TILE_COLORS[bucket] ?? "#3c3a32";
}

export interface Viewport {
  width: number;
  height: number;
  scrollX: number;
  scrollY: number;
  cellSize: number;
}

export interface CellRange {
  r0: number;
  r1: number; // exclusive
  c0: number;
  c1: number; // exclusive
}

/** Rows/columns intersecting the viewport; the virtualization window. */
export function visibleRange(view: Viewport, rows: number, cols: number): CellRange {
  const cs = view.cellSize;
  const r0 = Math.max(0, Math.floor(view.scrollY / cs));
  const c0 = Math.max(0, Math.floor(view.scrollX / cs));
  const r1 = Math.min(rows, Math.ceil((view.scrollY + view.height) / cs));
  const c1 = Math.min(cols, Math.ceil((view.scrollX + view.width) / cs));
  return { r0, r1: Math.max(r0, r1), c0, c1: Math.max(c0, c1) };
}

/** The 2D-context subset the renderer needs; tests inject a recorder. */
export interface Ctx2DLike {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  textBaseline: CanvasTextBaseline;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export function render(ctx: Ctx2DLike | null, view: ViewState, viewport: Viewport): CellRange {
  const state = view.state;
  const rows = state?.board.rows ?? 0;
  const cols = state?.board.cols ?? 0;
  const range = visibleRange(viewport, rows, cols);
  if (!ctx) return range;
  const cs = viewport.cellSize;
  ctx.fillStyle = BOARD_BG;
  ctx.fillRect(0, 0, viewport.width, viewport.height);
  if (!state) return range;

  const faces = faceMap(state);
  ctx.font = `${Math.max(5, Math.floor(cs / 3))}px sans-serif`;
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  for (let r = range.r0; r < range.r1; r++) {
    for (let c = range.c0; c < range.c1; c++) {
      const x = c * cs - viewport.scrollX;
      const y = r * cs - viewport.scrollY;
      const face = faces.get(cellKey(r, c)) ?? 0;
      ctx.fillStyle = face === -1 ? BLOCK_BG : face === 0 ? EMPTY_BG : tileColor(face);
      ctx.fillRect(x, y, cs - 1, cs - 1);
      if (view.highlights.has(cellKey(r, c))) {
        ctx.strokeStyle = "#ff3333";
        ctx.lineWidth = 2;
        ctx.strokeRect(x + 1, y + 1, cs - 3, cs - 3);
      }
      if (face > 0 && cs >= 9) {
        ctx.fillStyle = face < 8 ? "#776e65" : "#f9f6f2";
        ctx.fillText(String(face), x + cs / 2, y + cs / 2);
      }
    }
  }

  for (const annotation of visibleAnnotations(view)) {
    let rMin = Infinity, rMax = -Infinity, cMin = Infinity, cMax = -Infinity;
    for (const [r, c] of annotation.cells) {
      rMin = Math.min(rMin, r); rMax = Math.max(rMax, r);
      cMin = Math.min(cMin, c); cMax = Math.max(cMax, c);
    }
    if (rMax < range.r0 - 1 || rMin > range.r1 || cMax < range.c0 - 1 || cMin > range.c1) {
      continue;
    }
    const group = annotation.label.split("-", 1)[0];
    ctx.strokeStyle = GROUP_COLORS[group] ?? "#000";
    ctx.lineWidth = 1.5;
    ctx.strokeRect(
      cMin * cs - viewport.scrollX - 1,
      rMin * cs - viewport.scrollY - 1,
      (cMax - cMin + 1) * cs + 1,
      (rMax - rMin + 1) * cs + 1,
    );
  }
  return range;
}
