import json
import threading
import urllib.error
import urllib.request

import pytest

from tilesat.engine import Direction, GameState, legal_moves, status, step
from tilesat.reduction import ReductionOptions, compile_instance
from tilesat.server import create_server
from tilesat.solver import dpll, canonical_play

from conftest import FIG8


@pytest.fixture(scope="module")
def instance():
    return compile_instance(FIG8, ReductionOptions(goal=4096))


@pytest.fixture
def server(instance):
    httpd, session = create_server(instance, port=0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{httpd.server_address[1]}"
    yield base, session
    httpd.shutdown()
    httpd.server_close()
    thread.join(timeout=5)


def request(base, path, payload=None):
    data = json.dumps(payload).encode() if payload is not None else None
    req = urllib.request.Request(
        base + path, data=data, method="POST" if data is not None else "GET",
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def post(base, path, payload=None):
    data = json.dumps(payload or {}).encode()
    req = urllib.request.Request(base + path, data=data,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def board_cells(state: GameState):
    return [{"r": r, "c": c, "v": v} for r, c, v in state.board.tiles()]


def test_instance_and_state_endpoints(server, instance):
    base, _ = server
    code, doc = request(base, "/api/instance")
    assert code == 200
    assert doc["goal"] == 4096
    assert doc["variant"] == "cirulli-2048"
    code, state = request(base, "/api/state")
    assert code == 200
    assert state["move_count"] == 0
    assert state["status"] == "playing"
    # the activation pair lies horizontally, so only L and R can merge it
    assert state["legal_moves"] == ["L", "R"]


def test_move_undo_reset_cycle(server, instance):
    base, _ = server
    post(base, "/api/reset")
    code, state = post(base, "/api/move", {"dir": "L"})
    assert code == 200
    assert state["move_count"] == 1
    expected = step(instance.initial_state(), Direction.LEFT)
    assert state["board"]["cells"] == board_cells(expected)
    assert state["running_score"] == expected.running_score
    code, state = post(base, "/api/undo")
    assert code == 200
    assert state["move_count"] == 0
    code, body = post(base, "/api/undo")
    assert code == 409
    code, state = post(base, "/api/move", {"dir": "L"})
    assert code == 200
    code, state = post(base, "/api/reset")
    assert code == 200
    assert state["board"]["cells"] == board_cells(instance.initial_state())


def test_illegal_move_409(server):
    base, _ = server
    post(base, "/api/reset")
    code, body = post(base, "/api/move", {"dir": "U"})
    assert code == 409
    assert "illegal" in body["error"]


def test_malformed_body_400(server):
    base, _ = server
    code, body = post(base, "/api/move", {"dir": "sideways"})
    assert code == 400
    code, body = post(base, "/api/move", {"nope": 1})
    assert code == 400


def test_server_replays_like_engine(server, instance):
    """The state after an arbitrary request sequence equals the engine state
    after the corresponding step sequence."""
    base, _ = server
    post(base, "/api/reset")
    trace = canonical_play(instance, dpll(FIG8))
    engine_state = instance.initial_state()
    for move in trace.moves[:12]:
        code, payload = post(base, "/api/move", {"dir": move.letter})
        assert code == 200
        engine_state = step(engine_state, move)
        assert payload["board"]["cells"] == board_cells(engine_state)
        assert payload["legal_moves"] == sorted(d.letter for d in legal_moves(engine_state))
        assert payload["status"] == status(engine_state)
    code, tr = request(base, "/api/trace")
    assert code == 200
    assert tr["moves"] == [m.letter for m in trace.moves[:12]]
    post(base, "/api/reset")


def test_goal_freezes_board(server, instance):
    base, _ = server
    post(base, "/api/reset")
    trace = canonical_play(instance, dpll(FIG8))
    for move in trace.moves:
        code, payload = post(base, "/api/move", {"dir": move.letter})
        assert code == 200
    assert payload["status"] == "goal"
    code, body = post(base, "/api/move", {"dir": "L"})
    assert code == 409
    code, tr = request(base, "/api/trace")
    assert tr["reached_goal"] is True
    code, state = post(base, "/api/undo")
    assert code == 200 and state["status"] == "playing"
    post(base, "/api/reset")
