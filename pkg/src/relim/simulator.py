"""Synchronous port-numbering simulator for the ruling set algorithm.

The graph substrate is a finite port graph: every node numbers its incident
edges 1..deg and the two endpoints of an edge know each other's port number.
The simulator runs the color reduction algorithm derived from the problem
family: starting from a proper c-coloring, colors are injected into the
family member whose color count is large enough, and each synchronous step
either keeps a node colored (with a color of the previous member) or turns
it into an inert pointer.  Colored survivors after the last step form a
(2, beta)-ruling set.

Converters translate between ruling sets and labelings of the base family
member, and a validator checks any labeling against any problem on a
regular substrate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import DomainError, Problem, expand_constraint
from .family import FamilyParams, color_name, color_pairing, prefix_sum
from .bounds import upper_bound_rounds

Color = tuple[int, int]


# ---------------------------------------------------------------------------
# port graphs


@dataclass(frozen=True)
class PortGraph:
    """Undirected graph with per-node port numbering.

    ``adjacency[v]`` lists, in port order (port ``k`` is entry ``k - 1``),
    pairs ``(neighbor, reverse_port)``: the edge leaves ``v`` through that
    port and enters the neighbor through ``reverse_port``.
    """

    adjacency: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self) -> None:
        n = len(self.adjacency)
        for v, ports in enumerate(self.adjacency):
            for k, (w, back) in enumerate(ports, start=1):
                if not 0 <= w < n:
                    raise DomainError(f"node {v} port {k} points outside the graph")
                ports_w = self.adjacency[w]
                if not 1 <= back <= len(ports_w):
                    raise DomainError(f"node {v} port {k} has no reverse port")
                if ports_w[back - 1] != (v, k):
                    raise DomainError(
                        f"ports disagree across the edge {v}:{k} and {w}:{back}")

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.adjacency)

    def edges(self) -> Iterable[tuple[int, int, int, int]]:
        """Each undirected edge once, as (u, port_u, v, port_v) with u <= v."""
        for u, ports in enumerate(self.adjacency):
            for k, (w, back) in enumerate(ports, start=1):
                if (u, k) <= (w, back):
                    yield (u, k, w, back)

    def is_regular(self, delta: int) -> bool:
        return all(len(p) == delta for p in self.adjacency)


def make_port_graph(neighbor_lists: Sequence[Sequence[int]]) -> PortGraph:
    """Build a PortGraph from plain neighbor lists (ports by list order)."""
    position: dict[tuple[int, int], int] = {}
    for v, nbrs in enumerate(neighbor_lists):
        for k, w in enumerate(nbrs, start=1):
            if (v, w) in position:
                raise DomainError(f"parallel edge between {v} and {w}")
            if v == w:
                raise DomainError(f"self-loop at {v}")
            position[(v, w)] = k
    adjacency = []
    for v, nbrs in enumerate(neighbor_lists):
        ports = []
        for w in nbrs:
            back = position.get((w, v))
            if back is None:
                raise DomainError(f"edge {v}->{w} has no reverse entry")
            ports.append((w, back))
        adjacency.append(tuple(ports))
    return PortGraph(tuple(adjacency))


def gen_regular_tree(delta: int, depth: int) -> PortGraph:
    """Tree whose internal nodes have degree ``delta``, to the given depth.

    The root has ``delta`` children, every other internal node ``delta - 1``;
    nodes at distance ``depth`` from the root are leaves.
    """
    if delta < 2:
        raise DomainError("delta must be at least 2")
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    nbrs: list[list[int]] = [[]]
    frontier = [0]
    for level in range(depth):
        nxt = []
        for v in frontier:
            want = delta if level == 0 else delta - 1
            for _ in range(want):
                w = len(nbrs)
                nbrs.append([v])
                nbrs[v].append(w)
                nxt.append(w)
        frontier = nxt
    return make_port_graph(nbrs)


def gen_cycle(n: int) -> PortGraph:
    """Cycle on ``n >= 3`` nodes; every node has degree 2."""
    if n < 3:
        raise DomainError("a cycle needs at least 3 nodes")
    nbrs = [[(v + 1) % n, (v - 1) % n] for v in range(n)]
    return make_port_graph(nbrs)


def gen_random_regular(delta: int, n: int, seed: int,
                       max_tries: int = 1000) -> PortGraph:
    """Simple ``delta``-regular graph via the pairing model.

    Stubs are shuffled and paired; pairs forming self-loops or parallel
    edges put their stubs back for another shuffle, and the whole attempt
    restarts when the leftover stubs cannot be completed.  Deterministic
    for a given seed.
    """
    if delta < 1 or n <= delta:
        raise DomainError("need 0 < delta < n")
    if (delta * n) % 2 != 0:
        raise DomainError("delta * n must be even")
    rng = random.Random(seed)
    for _ in range(max_tries):
        edges = _pairing_attempt(rng, delta, n)
        if edges is None:
            continue
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in sorted(edges):
            nbrs[u].append(v)
            nbrs[v].append(u)
        return make_port_graph(nbrs)
    raise DomainError(
        f"no simple {delta}-regular graph found in {max_tries} attempts")


def _pairing_attempt(rng: random.Random, delta: int, n: int
                     ) -> Optional[set[tuple[int, int]]]:
    edges: set[tuple[int, int]] = set()
    stubs = list(range(n)) * delta
    while stubs:
        rng.shuffle(stubs)
        retry: list[int] = []
        it = iter(stubs)
        for u, v in zip(it, it):
            if u > v:
                u, v = v, u
            if u == v or (u, v) in edges:
                retry.extend((u, v))
            else:
                edges.add((u, v))
        if retry and not _pairable(edges, retry):
            return None
        stubs = retry
    return edges


def _pairable(edges: set[tuple[int, int]], stubs: list[int]) -> bool:
    """Whether any pair of leftover stubs could still form a fresh edge."""
    distinct = sorted(set(stubs))
    for i, u in enumerate(distinct):
        for v in distinct[i + 1:]:
            if (u, v) not in edges:
                return True
    return False


# ---------------------------------------------------------------------------
# graph text format: one line per edge, "u pu v pv"


def parse_port_graph(text: str) -> PortGraph:
    """Read the edge-list format with explicit port columns."""
    entries: dict[tuple[int, int], tuple[int, int]] = {}
    top = -1
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise DomainError(f"line {ln}: expected 'u pu v pv'")
        try:
            u, pu, v, pv = (int(p) for p in parts)
        except ValueError:
            raise DomainError(f"line {ln}: ports and node ids must be integers")
        if u < 0 or v < 0 or pu < 1 or pv < 1:
            raise DomainError(f"line {ln}: node ids start at 0, ports at 1")
        for key, val in (((u, pu), (v, pv)), ((v, pv), (u, pu))):
            if key in entries and entries[key] != val:
                raise DomainError(f"line {ln}: port {key[1]} of node {key[0]} reused")
            entries[key] = val
        top = max(top, u, v)
    adjacency = []
    for v in range(top + 1):
        ports = []
        k = 1
        while (v, k) in entries:
            ports.append(entries[(v, k)])
            k += 1
        adjacency.append(tuple(ports))
    count = sum(len(p) for p in adjacency)
    if count != len(entries):
        gaps = sorted({v for v, k in entries
                       if k > len(adjacency[v])})
        raise DomainError(
            "port numbers must be 1..deg without gaps (nodes "
            + ", ".join(str(v) for v in gaps) + ")")
    return PortGraph(tuple(adjacency))


def serialize_port_graph(g: PortGraph) -> str:
    lines = [f"{u} {pu} {v} {pv}" for u, pu, v, pv in g.edges()]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# coloring


def greedy_coloring(g: PortGraph, seed: int) -> list[int]:
    """Proper coloring with colors 1..c, c <= max degree + 1.

    Nodes are visited in a seeded random order; each takes the smallest
    color unused by its already-colored neighbors.
    """
    order = list(range(g.n))
    random.Random(seed).shuffle(order)
    colors = [0] * g.n
    for v in order:
        used = {colors[w] for w, _ in g.adjacency[v] if colors[w]}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return colors


def check_proper_coloring(g: PortGraph, colors: Sequence[int]) -> bool:
    if len(colors) != g.n or any(c < 1 for c in colors):
        return False
    return all(colors[u] != colors[v] for u, _, v, _ in g.edges())


# ---------------------------------------------------------------------------
# the color reduction algorithm


@dataclass(frozen=True)
class NodeState:
    """Colored carries the node's color in the current family member;
    Pointer carries the pointer group and the port it points through."""

    kind: str  # "colored" | "pointer"
    color: Optional[Color] = None
    group: int = 0
    port: int = 0


@dataclass(frozen=True)
class RunResult:
    ruling_set: frozenset[int]
    rounds: int
    trace: tuple[tuple[NodeState, ...], ...]  # trace[j] = states after j steps
    chain: tuple[tuple[int, ...], ...]  # chain[r] = v vector with r steps left


def _colors_of(v: Sequence[int]) -> list[Color]:
    return [(g, j) for g in range(len(v)) for j in range(1, v[g] + 1)]


def _decode_table(beta: int, v_prev: Sequence[int]) -> dict[Color, tuple[Color, int]]:
    """Current-member color -> (previous-member color, level) per the fixed
    pairing order (level ascending, then source group, then source index)."""
    params = FamilyParams(2, beta, tuple(v_prev), 0)
    table: dict[Color, tuple[Color, int]] = {}
    index: dict[int, int] = {}
    for _name, old_color, level in color_pairing(params):
        index[level] = index.get(level, 0) + 1
        table[(level, index[level])] = (old_color, level)
    return table


def run_ruling_set_algorithm(g: PortGraph, coloring: Sequence[int],
                             beta: int) -> RunResult:
    """Run the color reduction on any graph, any degrees.

    The input coloring with c colors is injected into the member whose color
    count C(beta + t, beta) first reaches c; each of the t synchronous steps
    decodes every colored node's color to a pair (older color, level) and
    keeps the older color unless some colored neighbor decodes to the same
    older color at a strictly smaller level, in which case the node points
    (lowest such port) and stays a pointer from then on.
    """
    if beta < 1:
        raise DomainError("beta must be at least 1")
    if not check_proper_coloring(g, coloring):
        raise DomainError("coloring must be proper with colors 1..c")
    c = max(coloring, default=1)
    t = upper_bound_rounds(beta, c)
    base = (1,) + (0,) * beta
    chain = [base]
    for _ in range(t):
        chain.append(prefix_sum(chain[-1]))
    # chain[r] is the v vector of the member with r steps remaining
    palette = _colors_of(chain[t])
    states: list[NodeState] = [
        NodeState("colored", color=palette[coloring[v] - 1]) for v in range(g.n)
    ]
    trace = [tuple(states)]
    for r in range(t, 0, -1):
        decode = _decode_table(beta, chain[r - 1])
        pairs: list[Optional[tuple[Color, int]]] = [
            decode[s.color] if s.kind == "colored" else None for s in states
        ]
        nxt: list[NodeState] = []
        for v, s in enumerate(states):
            if s.kind == "pointer":
                nxt.append(s)
                continue
            old_color, level = pairs[v]
            hit = 0
            for k, (w, _back) in enumerate(g.adjacency[v], start=1):
                other = pairs[w]
                if other is not None and other[0] == old_color and other[1] < level:
                    hit = k
                    break
            if hit:
                nxt.append(NodeState("pointer", group=level, port=hit))
            else:
                nxt.append(NodeState("colored", color=old_color))
        states = nxt
        trace.append(tuple(states))
    ruling = frozenset(v for v, s in enumerate(states) if s.kind == "colored")
    return RunResult(ruling, t, tuple(trace), tuple(chain))


# ---------------------------------------------------------------------------
# ruling set checking and conversions


@dataclass(frozen=True)
class RulingSetReport:
    ok: bool
    adjacent_pairs: tuple[tuple[int, int], ...]  # independence violations
    uncovered: tuple[int, ...]  # nodes farther than beta from the set

    def summary(self) -> str:
        if self.ok:
            return "valid ruling set"
        return (f"{len(self.adjacent_pairs)} adjacent pairs, "
                f"{len(self.uncovered)} uncovered nodes")


def check_ruling_set(g: PortGraph, s: Iterable[int], beta: int) -> RulingSetReport:
    """Independence at distance 2 and domination within ``beta`` hops."""
    sset = set(s)
    bad_pairs = [(u, v) for u, _, v, _ in g.edges() if u in sset and v in sset]
    dist = {v: 0 for v in sset}
    frontier = sorted(sset)
    d = 0
    while frontier and d < beta:
        d += 1
        nxt = []
        for v in frontier:
            for w, _ in g.adjacency[v]:
                if w not in dist:
                    dist[w] = d
                    nxt.append(w)
        frontier = nxt
    uncovered = tuple(v for v in range(g.n) if v not in dist)
    return RulingSetReport(not bad_pairs and not uncovered,
                           tuple(bad_pairs), uncovered)


Labeling = tuple[tuple[int, ...], ...]  # per node, per port, label index


def states_to_labeling(problem: Problem, g: PortGraph,
                       states: Sequence[NodeState]) -> Labeling:
    """Render simulator states as a labeling of the given family member.

    Colored nodes put their color on every port; pointers put A{group} on
    the pointed port and B{group} elsewhere.
    """
    out = []
    for v, s in enumerate(states):
        deg = g.degree(v)
        if s.kind == "colored":
            lab = problem.label_index(color_name(s.color))
            out.append((lab,) * deg)
        else:
            a = problem.label_index(f"A{s.group}")
            b = problem.label_index(f"B{s.group}")
            out.append(tuple(a if k == s.port else b for k in range(1, deg + 1)))
    return tuple(out)


def solution_to_ruling_set(problem: Problem, labeling: Labeling) -> frozenset[int]:
    """Nodes whose every port carries the single group-0 color."""
    name = color_name((0, 1))
    if name not in problem.alphabet:
        raise DomainError("the problem has no group-0 color label")
    want = problem.label_index(name)
    return frozenset(v for v, ports in enumerate(labeling)
                     if ports and all(p == want for p in ports))


def ruling_set_to_solution(g: PortGraph, s: Iterable[int], beta: int,
                           problem: Problem) -> Labeling:
    """Labeling of the base member from a valid (2, beta)-ruling set.

    Set nodes output the color on all ports; a node at BFS distance d points
    with A{d} toward its shortest-path neighbor (smallest node index wins)
    and B{d} elsewhere.
    """
    report = check_ruling_set(g, s, beta)
    if not report.ok:
        raise DomainError(f"not a valid ruling set: {report.summary()}")
    sset = set(s)
    dist = {v: 0 for v in sset}
    frontier = sorted(sset)
    while frontier:
        nxt = []
        for v in frontier:
            for w, _ in g.adjacency[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = sorted(nxt)
    color = problem.label_index(color_name((0, 1)))
    out = []
    for v in range(g.n):
        d = dist[v]
        if d == 0:
            out.append((color,) * g.degree(v))
            continue
        best_port = 0
        best_w = -1
        for k, (w, _) in enumerate(g.adjacency[v], start=1):
            if dist[w] == d - 1 and (best_port == 0 or w < best_w):
                best_port, best_w = k, w
        a = problem.label_index(f"A{d}")
        b = problem.label_index(f"B{d}")
        out.append(tuple(a if k == best_port else b
                         for k in range(1, g.degree(v) + 1)))
    return tuple(out)


# ---------------------------------------------------------------------------
# labeling validation


@dataclass(frozen=True)
class LabelingReport:
    ok: bool
    bad_nodes: tuple[int, ...]
    bad_edges: tuple[tuple[int, int, int, int], ...]

    def summary(self) -> str:
        if self.ok:
            return "labeling valid"
        return (f"{len(self.bad_nodes)} node violations, "
                f"{len(self.bad_edges)} edge violations")


def validate_labeling(problem: Problem, g: PortGraph,
                      labeling: Labeling) -> LabelingReport:
    """Check every node's port multiset against the node constraint and
    every edge's pair against the edge constraint.  Needs a regular graph
    of the problem's degree."""
    if not g.is_regular(problem.delta):
        raise DomainError(f"graph must be {problem.delta}-regular for validation")
    if len(labeling) != g.n or any(len(p) != g.degree(v)
                                   for v, p in enumerate(labeling)):
        raise DomainError("labeling widths must match degrees")
    node_ok = expand_constraint(problem.nodes)
    edge_ok = expand_constraint(problem.edges)
    bad_nodes = tuple(v for v, ports in enumerate(labeling)
                      if tuple(sorted(ports)) not in node_ok)
    bad_edges = tuple((u, pu, v, pv) for u, pu, v, pv in g.edges()
                      if tuple(sorted((labeling[u][pu - 1],
                                       labeling[v][pv - 1]))) not in edge_ok)
    return LabelingReport(not bad_nodes and not bad_edges, bad_nodes, bad_edges)
