/**
 * App wiring: server-authoritative debugger UI.  Every board pixel comes
 * from a /api/state response; arrow keys post moves through a coalescing
 * single-in-flight queue; gadget annotations toggle by group.
 */

import { ApiClient, ApiError, FetchLike } from "./api.js";
import { InputQueue } from "./queue.js";
import { Ctx2DLike, Viewport, render } from "./renderer.js";
import {
  ViewState,
  applyInstance,
  applyServerState,
  connectionError,
  flash,
  initialViewState,
  toggleFilter,
} from "./store.js";
import type { MoveDir, StateDoc, TraceDoc } from "./types.js";

const KEY_TO_DIR: Record<string, MoveDir> = {
  ArrowLeft: "L",
  ArrowRight: "R",
  ArrowUp: "U",
  ArrowDown: "D",
};

const GROUPS = ["variable", "literal", "clause", "goal", "activation", "pot"];

export interface AppOptions {
  baseUrl?: string;
  fetchImpl?: FetchLike;
  createContext?: (canvas: HTMLCanvasElement) => Ctx2DLike | null;
  cellSize?: number;
}

export interface App {
  getView(): ViewState;
  viewport: Viewport;
  queue: InputQueue<MoveDir>;
  refresh(): Promise<void>;
  undo(): Promise<void>;
  reset(): Promise<void>;
  exportTrace(): Promise<TraceDoc>;
  renderNow(): void;
  dispose(): void;
}

export function initApp(doc: Document, options: AppOptions = {}): App {
  const client = new ApiClient(options.baseUrl ?? "", options.fetchImpl);
  let view: ViewState = initialViewState();

  const root = doc.getElementById("app") ?? doc.body;
  root.innerHTML = "";
  const banner = doc.createElement("div");
  banner.id = "banner";
  const toolbar = doc.createElement("div");
  toolbar.id = "toolbar";
  const canvas = doc.createElement("canvas");
  canvas.id = "board";
  canvas.width = 960;
  canvas.height = 640;
  canvas.tabIndex = 0;
  root.append(banner, toolbar, canvas);

  const viewport: Viewport = {
    width: canvas.width,
    height: canvas.height,
    scrollX: 0,
    scrollY: 0,
    cellSize: options.cellSize ?? 16,
  };

  const getContext = options.createContext ?? ((c: HTMLCanvasElement) => {
    const ctx = c.getContext("2d");
    return ctx as Ctx2DLike | null;
  });
  const ctx = getContext(canvas);

  const renderNow = () => {
    render(ctx, view, viewport);
    banner.dataset.kind = view.banner.kind;
    banner.textContent = bannerText(view);
  };

  const setView = (next: ViewState) => {
    view = next;
    renderNow();
  };

  const applyState = (state: StateDoc) => setView(applyServerState(view, state));

  const handleFailure = (err: unknown) => {
    if (err instanceof ApiError) {
      if (err.status === 409 || err.status === 410) {
        setView(flash(view, err.message));
        return;
      }
      setView(connectionError(view, err.message));
    } else {
      setView(connectionError(view, String(err)));
    }
  };

  const queue = new InputQueue<MoveDir>(async (dir) => {
    if (view.state && view.state.status !== "playing") {
      setView(flash(view, `board frozen: ${view.state.status}`));
      return;
    }
    try {
      applyState(await client.move(dir));
    } catch (err) {
      handleFailure(err);
    }
  });

  const onKeyDown = (event: Event) => {
    const key = (event as KeyboardEvent).key;
    const dir = KEY_TO_DIR[key];
    if (dir) {
      event.preventDefault();
      queue.enqueue(dir);
    } else if (key === "u") {
      void app.undo();
    }
  };
  doc.defaultView?.addEventListener("keydown", onKeyDown);

  // toolbar: undo / reset / export / zoom / annotation group toggles
  const mkButton = (label: string, onClick: () => void) => {
    const button = doc.createElement("button");
    button.textContent = label;
    button.addEventListener("click", onClick);
    toolbar.append(button);
    return button;
  };
  mkButton("undo", () => void app.undo());
  mkButton("reset", () => void app.reset());
  mkButton("export trace", () => void downloadTrace());
  mkButton("-", () => {
    viewport.cellSize = Math.max(4, viewport.cellSize - 2);
    renderNow();
  });
  mkButton("+", () => {
    viewport.cellSize = Math.min(48, viewport.cellSize + 2);
    renderNow();
  });
  for (const group of GROUPS) {
    const label = doc.createElement("label");
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.dataset.group = group;
    box.addEventListener("change", () => setView(toggleFilter(view, group)));
    label.append(box, doc.createTextNode(group));
    toolbar.append(label);
  }

  // drag to pan the virtualized viewport
  let dragging: { x: number; y: number } | null = null;
  canvas.addEventListener("mousedown", (e) => {
    dragging = { x: (e as MouseEvent).clientX, y: (e as MouseEvent).clientY };
  });
  canvas.addEventListener("mousemove", (e) => {
    if (!dragging || !view.state) return;
    const me = e as MouseEvent;
    const maxX = Math.max(0, view.state.board.cols * viewport.cellSize - viewport.width);
    const maxY = Math.max(0, view.state.board.rows * viewport.cellSize - viewport.height);
    viewport.scrollX = Math.min(maxX, Math.max(0, viewport.scrollX - (me.clientX - dragging.x)));
    viewport.scrollY = Math.min(maxY, Math.max(0, viewport.scrollY - (me.clientY - dragging.y)));
    dragging = { x: me.clientX, y: me.clientY };
    renderNow();
  });
  canvas.addEventListener("mouseup", () => {
    dragging = null;
  });

  const downloadTrace = async () => {
    const trace = await app.exportTrace();
    const blob = new Blob([JSON.stringify(trace, null, 1)], { type: "application/json" });
    const link = doc.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "trace.json";
    link.click();
    URL.revokeObjectURL(link.href);
  };

  const app: App = {
    getView: () => view,
    viewport,
    queue,
    async refresh() {
      try {
        const instance = await client.getInstance();
        setView(applyInstance(view, instance));
        applyState(await client.getState());
      } catch (err) {
        handleFailure(err);
      }
    },
    async undo() {
      try {
        applyState(await client.undo());
      } catch (err) {
        handleFailure(err);
      }
    },
    async reset() {
      try {
        applyState(await client.reset());
      } catch (err) {
        handleFailure(err);
      }
    },
    exportTrace: () => client.getTrace(),
    renderNow,
    dispose() {
      doc.defaultView?.removeEventListener("keydown", onKeyDown);
    },
  };
  return app;
}

function bannerText(view: ViewState): string {
  switch (view.banner.kind) {
    case "playing": {
      const s = view.state;
      return s
        ? `playing - move ${s.move_count}, score ${s.running_score}, legal ${s.legal_moves.join("")}`
        : "loading";
    }
    case "goal":
      return "goal reached - board frozen (undo or reset to continue)";
    case "game_over":
      return "game over";
    case "flash":
      return view.banner.message;
    case "error":
      return `connection error: ${view.banner.message}`;
  }
}

declare const window: (Window & typeof globalThis) | undefined;

if (typeof window !== "undefined" && typeof document !== "undefined" &&
    document.getElementById("app") && !("__TILESAT_TEST__" in window)) {
  const app = initApp(document);
  void app.refresh();
}
