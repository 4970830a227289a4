/**
 * View-model for the debugger.  The board snapshot is always the verbatim
 * server response: no game rules are evaluated on the client, so the model
 * can never drift from the engine.
 */

import type { AnnotationDoc, InstanceDoc, StateDoc } from "./types.js";
import { annotationGroup } from "./types.js";

export type Banner =
  | { kind: "playing" }
  | { kind: "goal" }
  | { kind: "game_over" }
  | { kind: "error"; message: string }
  | { kind: "flash"; message: string };

export interface ViewState {
  instance: InstanceDoc | null;
  state: StateDoc | null;
  /** server history length; always equals state.move_count */
  historyCursor: number;
  banner: Banner;
  /** cells whose face changed in the last applied server update */
  highlights: Set<string>;
  /** enabled annotation groups */
  filters: Set<string>;
}

export const cellKey = (r: number, c: number): string => `${r},${c}`;

export function initialViewState(): ViewState {
  return {
    instance: null,
    state: null,
    historyCursor: 0,
    banner: { kind: "playing" },
    highlights: new Set(),
    filters: new Set(["variable", "literal", "clause", "goal", "activation", "pot"]),
  };
}

/** Board cells as a face lookup; 0 is empty, -1 a block. */
export function faceMap(state: StateDoc | null): Map<string, number> {
  const map = new Map<string, number>();
  if (!state) return map;
  for (const cell of state.board.cells) map.set(cellKey(cell.r, cell.c), cell.v);
  for (const block of state.board.blocks) map.set(cellKey(block.r, block.c), -1);
  return map;
}

/** Display-only diff between two server snapshots (never used for rules). */
export function diffCells(before: StateDoc | null, after: StateDoc): Set<string> {
  const changed = new Set<string>();
  const previous = faceMap(before);
  const next = faceMap(after);
  for (const [key, face] of next) {
    if (previous.get(key) !== face) changed.add(key);
  }
  for (const key of previous.keys()) {
    if (!next.has(key)) changed.add(key);
  }
  return changed;
}

export function applyServerState(view: ViewState, state: StateDoc): ViewState {
  return {
    ...view,
    state,
    historyCursor: state.move_count,
    highlights: diffCells(view.state, state),
    banner: state.status === "playing" ? { kind: "playing" } : { kind: state.status },
  };
}

export function applyInstance(view: ViewState, instance: InstanceDoc): ViewState {
  return { ...view, instance };
}

export function flash(view: ViewState, message: string): ViewState {
  return { ...view, banner: { kind: "flash", message } };
}

export function connectionError(view: ViewState, message: string): ViewState {
  // keep no stale board around when the bridge is gone
  return { ...view, state: null, banner: { kind: "error", message } };
}

export function toggleFilter(view: ViewState, group: string): ViewState {
  const filters = new Set(view.filters);
  if (filters.has(group)) filters.delete(group);
  else filters.add(group);
  return { ...view, filters };
}

export function visibleAnnotations(view: ViewState): AnnotationDoc[] {
  if (!view.instance) return [];
  return view.instance.annotations.filter((a) =>
    view.filters.has(annotationGroup(a.label)),
  );
}
