"""Single-session HTTP/JSON bridge for interactive play and the web debugger.

The server owns one game history; requests mutate it sequentially, so every
response is a deterministic function of the move sequence so far.
"""
from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .documents import instance_digest, instance_to_document, trace_to_document
from .engine import Direction, GameState, legal_moves, status, step
from .errors import IllegalMove
from .reduction import Instance


class GameSession:
    """Full-history game session: undo pops, reset rewinds to the start.

    Browsers open several connections, so requests are served from threads;
    the lock serialises them, keeping every response a deterministic function
    of the request order.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self.document = instance_to_document(instance)
        self.digest = instance_digest(self.document)
        self.history: list[GameState] = [instance.initial_state()]
        self.moves: list[Direction] = []
        self.lock = threading.Lock()

    @property
    def state(self) -> GameState:
        return self.history[-1]

    def play(self, direction: Direction) -> GameState:
        new_state = step(self.state, direction)
        self.history.append(new_state)
        self.moves.append(direction)
        return new_state

    def undo(self) -> GameState:
        if len(self.history) == 1:
            raise IndexError("nothing to undo")
        self.history.pop()
        self.moves.pop()
        return self.state

    def reset(self) -> GameState:
        self.history = self.history[:1]
        self.moves = []
        return self.state

    def state_payload(self) -> dict:
        st = self.state
        board = st.board
        return {
            "board": {
                "rows": board.rows,
                "cols": board.cols,
                "cells": [{"r": r, "c": c, "v": v} for r, c, v in board.tiles()],
                "blocks": [{"r": r, "c": c} for r, c in sorted(board.blocks)],
            },
            "move_count": st.move_count,
            "running_score": st.running_score,
            "legal_moves": sorted(d.letter for d in legal_moves(st)),
            "status": status(st),
        }

    def trace_payload(self) -> dict:
        return trace_to_document(
            self.digest, self.moves,
            status(self.state) == "goal", self.state.running_score,
        )


def make_handler(session: GameSession, static_dir: str | None = None):
    static_root = Path(static_dir).resolve() if static_dir else None

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send(self, code: int, payload: dict) -> None:
            body = json.dumps(payload).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()
            self.wfile.write(body)

        def _send_file(self, path: Path) -> None:
            data = path.read_bytes()
            ctype = mimetypes.guess_type(str(path))[0] or "application/octet-stream"
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_OPTIONS(self):
            self._send(200, {})

        def _read_body(self) -> bytes:
            # always drain the request body, or the unread bytes corrupt the
            # next request on a kept-alive connection
            length = int(self.headers.get("Content-Length", 0) or 0)
            return self.rfile.read(length) if length else b""

        def do_GET(self):
            with session.lock:
                self._get()

        def do_POST(self):
            with session.lock:
                self._post()

        def _get(self):
            if self.path == "/api/instance":
                self._send(200, session.document)
            elif self.path == "/api/state":
                self._send(200, session.state_payload())
            elif self.path == "/api/trace":
                self._send(200, session.trace_payload())
            elif static_root is not None:
                rel = self.path.lstrip("/") or "index.html"
                target = (static_root / rel).resolve()
                if static_root in target.parents or target == static_root:
                    if target.is_file():
                        self._send_file(target)
                        return
                self._send(404, {"error": "not found"})
            else:
                self._send(404, {"error": "not found"})

        def _post(self):
            raw = self._read_body()
            if self.path == "/api/move":
                self._move(raw)
            elif self.path == "/api/undo":
                try:
                    session.undo()
                    self._send(200, session.state_payload())
                except IndexError:
                    self._send(409, {"error": "nothing to undo"})
            elif self.path == "/api/reset":
                session.reset()
                self._send(200, session.state_payload())
            else:
                self._send(404, {"error": "not found"})

        def _move(self, raw: bytes):
            try:
                body = json.loads(raw or b"{}")
                direction = Direction.from_letter(body["dir"])
            except (ValueError, KeyError, TypeError, json.JSONDecodeError):
                self._send(400, {"error": "body must be {\"dir\": \"L|R|U|D\"}"})
                return
            current = status(session.state)
            if current == "game_over":
                self._send(410, {"error": "game over"})
                return
            if current == "goal":
                self._send(409, {"error": "goal reached; undo or reset to continue"})
                return
            try:
                session.play(direction)
            except IllegalMove:
                self._send(409, {"error": f"illegal move {direction.letter}"})
                return
            self._send(200, session.state_payload())

    return Handler


def create_server(instance: Instance, port: int = 0,
                  static_dir: str | None = None) -> tuple[ThreadingHTTPServer, GameSession]:
    session = GameSession(instance)
    httpd = ThreadingHTTPServer(("127.0.0.1", port), make_handler(session, static_dir))
    httpd.daemon_threads = True
    return httpd, session


def serve(instance: Instance, port: int = 8325, static_dir: str | None = None) -> None:
    httpd, _ = create_server(instance, port, static_dir)
    host, actual_port = httpd.server_address
    print(f"serving on http://{host}:{actual_port} (Ctrl-C to stop)")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
