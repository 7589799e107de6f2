"""Session service: the store, the action log, and the HTTP routes."""

import json
import threading
import urllib.error
import urllib.request

import pytest

from relim.core import DomainError, serialize_problem, parse_problem
from relim.service import SessionStore, apply_action, make_server

from conftest import load_fixture

SINKLESS = load_fixture("sinkless.problem")
MIS = load_fixture("mis.problem")
FREE = "delta: 3\nnodes:\nX^3\nedges:\nX X\n"


# ---------------------------------------------------------------------------
# the store and its logs


def test_create_roots_the_tree(tmp_path):
    store = SessionStore(tmp_path)
    session, node = store.create(SINKLESS)
    assert node.id == "n0"
    assert node.parent is None
    assert node.action is None
    assert node.text == serialize_problem(parse_problem(SINKLESS))


def test_apply_extends_the_tree(tmp_path):
    store = SessionStore(tmp_path)
    session, root = store.create(SINKLESS)
    session, child = store.apply(session.id, root.id, {"kind": "re"})
    assert child.id == "n1"
    assert child.parent == "n0"
    assert child.action == {"kind": "re"}
    assert "I^2 O" in child.text


def test_log_records_are_sorted_json_lines(tmp_path):
    store = SessionStore(tmp_path)
    session, root = store.create(SINKLESS)
    store.apply(session.id, root.id, {"kind": "speedup"})
    lines = session.path.read_text().splitlines()
    assert lines[0] == json.dumps(
        {"kind": "create", "problem": SINKLESS}, sort_keys=True)
    assert lines[1] == json.dumps(
        {"action": {"kind": "speedup"}, "kind": "apply", "node": "n0"},
        sort_keys=True)


def test_replay_reproduces_every_node_byte_for_byte(tmp_path):
    store = SessionStore(tmp_path)
    session, root = store.create(MIS)
    session, a = store.apply(session.id, root.id, {"kind": "re"})
    session, b = store.apply(session.id, a.id, {"kind": "rere"})
    store.apply(session.id, root.id, {"kind": "speedup"})

    reloaded = SessionStore(tmp_path).get(session.id)
    assert set(reloaded.nodes) == {"n0", "n1", "n2", "n3"}
    for nid, node in session.nodes.items():
        twin = reloaded.nodes[nid]
        assert (twin.parent, twin.action, twin.text) == (
            node.parent, node.action, node.text)


@pytest.mark.parametrize("content, diagnostic", [
    ("{not json\n", "not valid JSON"),
    (json.dumps({"kind": "create", "problem": FREE}) + "\n"
     + json.dumps({"kind": "apply", "node": "n5",
                   "action": {"kind": "re"}}) + "\n",
     "apply names unknown node 'n5'"),
    (json.dumps({"kind": "create", "problem": FREE}) + "\n"
     + json.dumps({"kind": "create", "problem": FREE}) + "\n",
     "second create record"),
    ("", "no create record"),
    (json.dumps({"kind": "destroy"}) + "\n", "unknown record kind 'destroy'"),
])
def test_broken_logs_refuse_with_a_diagnostic(tmp_path, content, diagnostic):
    (tmp_path / "abcd.jsonl").write_text(content)
    store = SessionStore(tmp_path)
    assert "abcd" in store.sessions  # broken state stays visible
    with pytest.raises(DomainError) as exc:
        store.get("abcd")
    message = str(exc.value)
    assert message.startswith("session state refused:")
    assert diagnostic in message


def test_unknown_session_is_a_key_error(tmp_path):
    with pytest.raises(KeyError):
        SessionStore(tmp_path).get("nope")


@pytest.mark.parametrize("action", [
    None,
    {"kind": "frobnicate"},
    {"kind": "relax"},
    {"kind": "relax", "configs": []},
    {"kind": "merge-labels", "pairs": [["only-one"]]},
])
def test_bad_actions_are_domain_errors(action):
    with pytest.raises(DomainError):
        apply_action(parse_problem(SINKLESS), action)


def test_discard_action_drops_an_edge_config():
    out = apply_action(parse_problem(MIS),
                       {"kind": "discard", "configs": ["O O"],
                        "side": "edges"})
    text = serialize_problem(out)
    assert text.split("edges:\n")[1] == "M [O P]\n"


# ---------------------------------------------------------------------------
# the HTTP surface


def _post(base, path, payload):
    req = urllib.request.Request(
        base + path, data=json.dumps(payload).encode("utf-8"),
        headers={"Content-Type": "application/json"}, method="POST")
    try:
        with urllib.request.urlopen(req, timeout=10) as resp:
            return resp.status, json.loads(resp.read()), dict(resp.headers)
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read()), dict(exc.headers)


def _get(base, path):
    with urllib.request.urlopen(base + path, timeout=10) as resp:
        return resp.status, json.loads(resp.read())


@pytest.fixture
def server(tmp_path):
    srv = make_server(0, tmp_path / "state")
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    host, port = srv.server_address[:2]
    yield f"http://{host}:{port}"
    srv.shutdown()
    srv.server_close()
    thread.join(timeout=5)


def test_create_session_route_returns_the_root(server):
    status, body, headers = _post(server, "/api/create-session",
                                  {"problem": SINKLESS})
    assert status == 200
    assert set(body) == {"session", "node", "parent", "action",
                         "problem", "alphabet", "delta"}
    assert body["node"] == "n0"
    assert body["parent"] is None
    assert body["alphabet"] == ["I", "O"]
    assert body["delta"] == 3
    assert headers["Access-Control-Allow-Origin"] == "*"


def test_apply_route_builds_children(server):
    _, root, _ = _post(server, "/api/create-session", {"problem": SINKLESS})
    status, child, _ = _post(server, "/api/apply", {
        "session": root["session"], "node": "n0",
        "action": {"kind": "speedup"}})
    assert status == 200
    assert child["node"] == "n1"
    assert child["parent"] == "n0"
    assert "I_O^2 O" in child["problem"]

    status, tree = _post(server, "/api/get-tree",
                         {"session": root["session"]})[:2]
    assert status == 200
    assert [n["node"] for n in tree["nodes"]] == ["n0", "n1"]


def test_zero_round_route_reports_witnesses(server):
    _, root, _ = _post(server, "/api/create-session", {"problem": FREE})
    status, body, _ = _post(server, "/api/zero-round",
                            {"session": root["session"], "node": "n0"})
    assert status == 200
    assert body["solvable"] is True
    assert body["witness"] == ["X", "X", "X"]

    _, root, _ = _post(server, "/api/create-session", {"problem": MIS})
    _, body, _ = _post(server, "/api/zero-round",
                       {"session": root["session"], "node": "n0"})
    assert body["solvable"] is False
    assert body["witness"] is None


def test_diagram_route_orders_labels(server):
    _, root, _ = _post(server, "/api/create-session", {"problem": MIS})
    status, body, _ = _post(server, "/api/diagram", {
        "session": root["session"], "node": "n0", "side": "edge"})
    assert status == 200
    assert body["labels"] == ["M", "O", "P"]
    assert body["arrows"] == [["P", "O"]]
    assert body["classes"] == [["M"], ["O"], ["P"]]


def test_family_gen_route_matches_the_generator(server):
    status, body, _ = _post(server, "/api/family-gen",
                            {"delta": 3, "beta": 1, "v": [1, 0], "x": 0})
    assert status == 200
    assert body["problem"] == (
        "delta: 3\n"
        "nodes:\n"
        "A1 B1^2\n"
        "C0_1^3\n"
        "edges:\n"
        "A1 C0_1\n"
        "B1^2\n"
        "B1 C0_1\n")


def test_simulate_route_runs_the_algorithm(server):
    status, body, _ = _post(server, "/api/simulate", {
        "graph": "cycle", "n": 7, "beta": 1, "seed": 11})
    assert status == 200
    assert body["nodes"] == 7
    assert body["colors"] == 3
    assert body["rounds"] == 2
    assert body["ok"] is True
    assert len(body["ruling_set"]) == 3


def test_sessions_listing(server):
    _, a, _ = _post(server, "/api/create-session", {"problem": SINKLESS})
    _, b, _ = _post(server, "/api/create-session", {"problem": MIS})
    status, body = _get(server, "/api/sessions")
    assert status == 200
    listed = {row["session"] for row in body["sessions"]}
    assert {a["session"], b["session"]} <= listed
    assert all(row["corrupt"] is None for row in body["sessions"])


def test_state_survives_a_restart(tmp_path):
    state = tmp_path / "state"
    first = make_server(0, state)
    thread = threading.Thread(target=first.serve_forever, daemon=True)
    thread.start()
    base = f"http://{first.server_address[0]}:{first.server_address[1]}"
    _, root, _ = _post(base, "/api/create-session", {"problem": SINKLESS})
    _, child, _ = _post(base, "/api/apply", {
        "session": root["session"], "node": "n0", "action": {"kind": "re"}})
    first.shutdown()
    first.server_close()
    thread.join(timeout=5)

    second = make_server(0, state)
    thread = threading.Thread(target=second.serve_forever, daemon=True)
    thread.start()
    base = f"http://{second.server_address[0]}:{second.server_address[1]}"
    status, tree = _post(base, "/api/get-tree",
                         {"session": root["session"]})[:2]
    second.shutdown()
    second.server_close()
    thread.join(timeout=5)
    assert status == 200
    texts = {n["node"]: n["problem"] for n in tree["nodes"]}
    assert texts["n1"] == child["problem"]


def test_error_statuses(server):
    status, body, _ = _post(server, "/api/get-tree", {"session": "missing"})
    assert status == 404
    assert "unknown id" in body["error"]

    _, root, _ = _post(server, "/api/create-session", {"problem": SINKLESS})
    status, body, _ = _post(server, "/api/apply", {
        "session": root["session"], "node": "n0",
        "action": {"kind": "frobnicate"}})
    assert status == 400
    assert "unknown action kind" in body["error"]

    status, body, _ = _post(server, "/api/no-such-route", {})
    assert status == 404

    status, body, _ = _post(server, "/api/create-session",
                            {"problem": "delta: x\n"})
    assert status == 400


def test_cors_preflight(server):
    req = urllib.request.Request(server + "/api/apply", method="OPTIONS")
    with urllib.request.urlopen(req, timeout=10) as resp:
        assert resp.status == 204
        assert resp.headers["Access-Control-Allow-Origin"] == "*"
        assert "POST" in resp.headers["Access-Control-Allow-Methods"]
