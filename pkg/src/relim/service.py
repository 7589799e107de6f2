"""Local HTTP service exposing the engine to interactive front ends.

Each session holds a tree of problems: the root is a problem the client
submitted, every other node is the result of an action (a rewrite, a
relaxation, a label merge, a discard) applied to its parent.  Nodes are
never recomputed once built; navigating the tree is a pure read.

Sessions persist as JSON-lines action logs under the state directory, one
file per session: a ``create`` record with the root problem text followed
by one ``apply`` record per action.  Loading replays the log, which
reproduces every node byte for byte since all engine operations are
deterministic.  A log that fails to replay marks its session corrupt; the
session stays visible and every request against it returns the diagnostic,
so broken state is never silently dropped.

All request and response bodies are JSON.  The server binds loopback only;
this is single-researcher tooling, not a deployment target.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .core import (
    DomainError,
    Problem,
    compute_strength,
    discard_configs,
    merge_labels,
    parse_problem,
    relax_node_constraint,
    serialize_problem,
)
from .roundelim import DEFAULT_BUDGET, re, rere, speedup, zero_round_solvable
from .core import DEFAULT_DERIVED_CAP
from . import family as fam
from . import simulator as sim


@dataclass
class TreeNode:
    id: str
    parent: Optional[str]
    action: Optional[dict]
    problem: Problem
    text: str  # canonical serialization, cached


@dataclass
class Session:
    id: str
    path: Path
    nodes: dict[str, TreeNode] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    corrupt: Optional[str] = None  # diagnostic when the log failed to replay


def apply_action(problem: Problem, action: dict) -> Problem:
    """Run one tree action against a problem; pure and deterministic."""
    if not isinstance(action, dict) or "kind" not in action:
        raise DomainError("action must be an object with a 'kind'")
    kind = action["kind"]
    if kind in ("re", "rere", "speedup"):
        budget = int(action.get("budget", DEFAULT_BUDGET))
        cap = int(action.get("max_labels", DEFAULT_DERIVED_CAP))
        op = {"re": re, "rere": rere, "speedup": speedup}[kind]
        return op(problem, budget, max_labels=cap).problem
    if kind == "relax":
        return relax_node_constraint(problem, _text_list(action, "configs"))
    if kind == "discard":
        side = action.get("side", "nodes")
        return discard_configs(problem, _text_list(action, "configs"), side)
    if kind == "merge-labels":
        pairs = action.get("pairs")
        if (not isinstance(pairs, list) or not pairs
                or not all(isinstance(p, list) and len(p) == 2
                           and all(isinstance(s, str) for s in p) for p in pairs)):
            raise DomainError("merge-labels needs 'pairs': [[old, new], ...]")
        return merge_labels(problem, [(a, b) for a, b in pairs])
    raise DomainError(f"unknown action kind {kind!r}")


def _text_list(action: dict, key: str) -> list[str]:
    value = action.get(key)
    if (not isinstance(value, list) or not value
            or not all(isinstance(t, str) for t in value)):
        raise DomainError(f"{action['kind']} needs '{key}': [text, ...]")
    return value


class SessionStore:
    """All sessions, their trees, and their on-disk logs."""

    def __init__(self, state_dir: str | Path) -> None:
        self.state_dir = Path(state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        for path in sorted(self.state_dir.glob("*.jsonl")):
            self._load(path)

    # -- loading ----------------------------------------------------------

    def _load(self, path: Path) -> None:
        sid = path.stem
        session = Session(sid, path)
        self.sessions[sid] = session
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            session.corrupt = f"cannot read {path.name}: {exc.strerror}"
            return
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                session.corrupt = (f"{path.name} line {lineno}: "
                                   f"not valid JSON ({exc.msg})")
                return
            try:
                self._replay(session, record, lineno)
            except DomainError as exc:
                session.corrupt = f"{path.name} line {lineno}: {exc}"
                return
        if not session.nodes:
            session.corrupt = f"{path.name}: no create record"

    def _replay(self, session: Session, record: dict, lineno: int) -> None:
        kind = record.get("kind") if isinstance(record, dict) else None
        if kind == "create":
            if session.nodes:
                raise DomainError("second create record")
            problem = parse_problem(record["problem"])
            self._add_node(session, None, None, problem)
        elif kind == "apply":
            parent = record.get("node")
            if parent not in session.nodes:
                raise DomainError(f"apply names unknown node {parent!r}")
            problem = apply_action(session.nodes[parent].problem,
                                   record.get("action"))
            self._add_node(session, parent, record.get("action"), problem)
        else:
            raise DomainError(f"unknown record kind {kind!r}")

    # -- mutation ---------------------------------------------------------

    @staticmethod
    def _add_node(session: Session, parent: Optional[str],
                  action: Optional[dict], problem: Problem) -> TreeNode:
        node = TreeNode(f"n{len(session.nodes)}", parent, action, problem,
                        serialize_problem(problem))
        session.nodes[node.id] = node
        return node

    def create(self, problem_text: str) -> tuple[Session, TreeNode]:
        problem = parse_problem(problem_text)
        with self._lock:
            sid = secrets.token_hex(8)
            while sid in self.sessions:
                sid = secrets.token_hex(8)
            session = Session(sid, self.state_dir / f"{sid}.jsonl")
            self.sessions[sid] = session
        with session.lock:
            node = self._add_node(session, None, None, problem)
            self._append(session, {"kind": "create", "problem": problem_text})
        return session, node

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self.sessions.get(sid)
        if session is None:
            raise KeyError(sid)
        if session.corrupt:
            raise DomainError(f"session state refused: {session.corrupt}")
        return session

    def apply(self, sid: str, node_id: str, action: dict) -> tuple[Session, TreeNode]:
        session = self.get(sid)
        with session.lock:
            if node_id not in session.nodes:
                raise KeyError(node_id)
            problem = apply_action(session.nodes[node_id].problem, action)
            node = self._add_node(session, node_id, action, problem)
            self._append(session, {"kind": "apply", "node": node_id,
                                   "action": action})
        return session, node

    @staticmethod
    def _append(session: Session, record: dict) -> None:
        with open(session.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            fh.flush()


# ---------------------------------------------------------------------------
# request handling


def _node_payload(session: Session, node: TreeNode) -> dict:
    return {
        "session": session.id,
        "node": node.id,
        "parent": node.parent,
        "action": node.action,
        "problem": node.text,
        "alphabet": list(node.problem.alphabet),
        "delta": node.problem.delta,
    }


def _diagram_payload(problem: Problem, side: str) -> dict:
    if side not in ("edge", "node"):
        raise DomainError("side must be 'edge' or 'node'")
    cons = problem.edges if side == "edge" else problem.nodes
    diagram = compute_strength(cons, len(problem.alphabet))
    names = problem.alphabet
    return {
        "side": side,
        "labels": list(names),
        "arrows": [[names[a], names[b]] for a, b in diagram.irreducible()],
        "classes": [[names[i] for i in cls] for cls in diagram.scc_classes()],
    }


def _family_gen_payload(body: dict) -> dict:
    params = fam.FamilyParams(int(body["delta"]), int(body["beta"]),
                              tuple(int(k) for k in body["v"]),
                              int(body.get("x", 0)))
    problem = fam.make_family_problem(params)
    return {"problem": serialize_problem(problem)}


def _simulate_payload(body: dict) -> dict:
    kind = body.get("graph")
    seed = int(body.get("seed", 0))
    beta = int(body.get("beta", 1))
    if kind == "tree":
        g = sim.gen_regular_tree(int(body["delta"]), int(body["depth"]))
    elif kind == "regular":
        g = sim.gen_random_regular(int(body["delta"]), int(body["n"]), seed)
    elif kind == "cycle":
        g = sim.gen_cycle(int(body["n"]))
    elif "edges" in body:
        g = sim.parse_port_graph(body["edges"])
    else:
        raise DomainError("pick graph: tree, regular, cycle, or pass edges text")
    coloring = sim.greedy_coloring(g, seed)
    result = sim.run_ruling_set_algorithm(g, coloring, beta)
    report = sim.check_ruling_set(g, result.ruling_set, beta)
    return {
        "nodes": g.n,
        "colors": max(coloring, default=0),
        "rounds": result.rounds,
        "ruling_set": sorted(result.ruling_set),
        "ok": report.ok,
        "violations": None if report.ok else report.summary(),
    }


class _Handler(BaseHTTPRequestHandler):
    store: SessionStore  # set by serve()
    protocol_version = "HTTP/1.1"

    # -- plumbing ---------------------------------------------------------

    def log_message(self, format: str, *args) -> None:  # noqa: A002
        pass  # requests stay quiet; errors surface in responses

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b"{}"
        try:
            body = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise DomainError("request body must be a JSON object")
        if not isinstance(body, dict):
            raise DomainError("request body must be a JSON object")
        return body

    def do_OPTIONS(self) -> None:  # CORS preflight for browser front ends
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    # -- routes -----------------------------------------------------------

    def do_GET(self) -> None:
        if self.path == "/api/sessions":
            rows = []
            for sid, session in sorted(self.store.sessions.items()):
                rows.append({"session": sid,
                             "nodes": len(session.nodes),
                             "corrupt": session.corrupt})
            self._send(200, {"sessions": rows})
            return
        self._send(404, {"error": f"no route for GET {self.path}"})

    def do_POST(self) -> None:
        try:
            body = self._body()
            handler = {
                "/api/create-session": self._create_session,
                "/api/get-tree": self._get_tree,
                "/api/apply": self._apply,
                "/api/zero-round": self._zero_round,
                "/api/diagram": self._diagram,
                "/api/family-gen": self._family_gen,
                "/api/simulate": self._simulate,
            }.get(self.path)
            if handler is None:
                self._send(404, {"error": f"no route for POST {self.path}"})
                return
            handler(body)
        except KeyError as exc:
            self._send(404, {"error": f"unknown id {exc.args[0]!r}"})
        except DomainError as exc:
            self._send(400, {"error": str(exc)})
        except (TypeError, ValueError) as exc:
            self._send(400, {"error": f"malformed request: {exc}"})

    @staticmethod
    def _field(body: dict, key: str) -> str:
        value = body.get(key)
        if not isinstance(value, str):
            raise DomainError(f"request needs {key!r}: string")
        return value

    def _session_node(self, body: dict) -> tuple[Session, TreeNode]:
        session = self.store.get(self._field(body, "session"))
        node_id = self._field(body, "node")
        with session.lock:
            node = session.nodes.get(node_id)
        if node is None:
            raise KeyError(node_id)
        return session, node

    def _create_session(self, body: dict) -> None:
        text = body.get("problem")
        if not isinstance(text, str):
            raise DomainError("create-session needs 'problem': text")
        session, node = self.store.create(text)
        self._send(200, _node_payload(session, node))

    def _get_tree(self, body: dict) -> None:
        session = self.store.get(self._field(body, "session"))
        with session.lock:
            nodes = [_node_payload(session, n) for n in session.nodes.values()]
        self._send(200, {"session": session.id, "nodes": nodes})

    def _apply(self, body: dict) -> None:
        session, node = self.store.apply(self._field(body, "session"),
                                         self._field(body, "node"),
                                         body.get("action"))
        self._send(200, _node_payload(session, node))

    def _zero_round(self, body: dict) -> None:
        session, node = self._session_node(body)
        zr = zero_round_solvable(node.problem)
        names = zr.witness_names(node.problem)
        payload = _node_payload(session, node)
        payload.update({"solvable": zr.solvable,
                        "witness": list(names) if names else None})
        self._send(200, payload)

    def _diagram(self, body: dict) -> None:
        session, node = self._session_node(body)
        payload = _node_payload(session, node)
        payload.update(_diagram_payload(node.problem, str(body.get("side", "edge"))))
        self._send(200, payload)

    def _family_gen(self, body: dict) -> None:
        self._send(200, _family_gen_payload(body))

    def _simulate(self, body: dict) -> None:
        self._send(200, _simulate_payload(body))


def make_server(port: int, state_dir: str | Path,
                host: str = "127.0.0.1") -> ThreadingHTTPServer:
    """Build the HTTP server without starting it; tests drive it directly."""
    store = SessionStore(state_dir)
    handler = type("BoundHandler", (_Handler,), {"store": store})
    server = ThreadingHTTPServer((host, port), handler)
    return server


def serve(port: int, state_dir: str | Path) -> None:
    """Run the service until interrupted; state persists across restarts."""
    server = make_server(port, state_dir)
    host, bound_port = server.server_address[:2]
    print(f"serving on http://{host}:{bound_port} "
          f"(state in {Path(state_dir).resolve()})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
