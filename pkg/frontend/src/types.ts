/** Wire types mirrored from the HTTP bridge (documented in docs/formats.md). */

export interface CellTile {
  r: number;
  c: number;
  v: number;
}

export interface BoardDoc {
  rows: number;
  cols: number;
  cells: CellTile[];
  blocks: { r: number; c: number }[];
}

export interface StateDoc {
  board: BoardDoc;
  move_count: number;
  running_score: number;
  legal_moves: string[];
  status: "playing" | "goal" | "game_over";
}

export interface AnnotationDoc {
  label: string;
  cells: [number, number][];
}

export interface InstanceDoc {
  version: number;
  variant: string;
  rows: number;
  cols: number;
  cells: CellTile[];
  blocks: { r: number; c: number }[];
  spawn: { policy: string; face?: number };
  goal: number;
  annotations: AnnotationDoc[];
  meta: unknown;
}

export interface TraceDoc {
  version: number;
  instance_digest: string;
  moves: string[];
  reached_goal: boolean;
  final_score: number;
}

export type MoveDir = "L" | "R" | "U" | "D";

export function annotationGroup(label: string): string {
  const dash = label.indexOf("-");
  return dash < 0 ? label : label.slice(0, dash);
}
