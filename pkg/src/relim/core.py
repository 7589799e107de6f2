"""Core model for locally checkable labeling problems on regular graphs.

A problem is a finite label alphabet together with two constraints: a node
constraint of width Delta (one slot per incident half-edge) and an edge
constraint of width 2 (one slot per endpoint).  Configurations are multisets
of slots; a slot is a nonempty set of labels, written ``[A B]`` when it offers
a choice and ``A`` when it is a single label.  A configuration with only
single-label slots is called expanded; a constraint is stored condensed and
compared by its expansion.

Label sets are bitmasks over the alphabet, configurations are sorted tuples of
masks, constraints are sorted tuples of configurations.  Everything is
hashable and canonical so that structural equality is meaningful.

The strength preorder over labels is central: B is at least as strong as A
with respect to a constraint when replacing one occurrence of A by B in any
expanded configuration containing A lands inside the constraint again.  The
right-closed (upward closed) subsets of that preorder drive the speedup
machinery in :mod:`relim.roundelim`.
"""

from __future__ import annotations

import json
import re as _regex
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Optional, Sequence

MAX_ALPHABET = 16384  # hard structural bound on any problem's alphabet
DEFAULT_DERIVED_CAP = 128  # default ceiling for alphabets built by rewrites
DEFAULT_BUDGET = 2_000_000  # default step allowance for the searches below

Config = tuple[int, ...]  # canonical configuration: sorted nonempty masks


class DomainError(ValueError):
    """A request that is well-formed but outside the model's domain."""


class BudgetError(DomainError):
    """A search exceeded its configured budget and was abandoned."""


class ParseError(DomainError):
    """Problem text that does not conform to the format.

    Carries 1-based ``line`` and ``column`` context when known.
    """

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None) -> None:
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.column = column


class Budget:
    """Mutable countdown of elementary search steps.

    Long searches spend from one of these and abandon with
    :class:`BudgetError` when it runs dry, so a pathological input degrades
    into a clean error instead of an unbounded computation.
    """

    __slots__ = ("left", "total")

    def __init__(self, total: int) -> None:
        self.left = total
        self.total = total

    def spend(self, k: int = 1) -> None:
        self.left -= k
        if self.left < 0:
            raise BudgetError(
                f"search budget of {self.total} steps exceeded; "
                "pass a larger budget to continue")

    @staticmethod
    def ensure(budget: "Budget | int | None") -> "Budget":
        if isinstance(budget, Budget):
            return budget
        return Budget(DEFAULT_BUDGET if budget is None else budget)


# ---------------------------------------------------------------------------
# bitmask helpers


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def canon_config(slots: Iterable[int]) -> Config:
    """Sort slots by bit pattern; reject empty slots."""
    out = tuple(sorted(slots))
    if not out:
        raise DomainError("configuration must have at least one slot")
    if out[0] <= 0:
        raise DomainError("configuration slot must be a nonempty label set")
    return out


# ---------------------------------------------------------------------------
# constraints


@dataclass(frozen=True)
class Constraint:
    """A set of condensed configurations of a fixed width."""

    width: int
    configs: tuple[Config, ...]

    def __post_init__(self) -> None:
        for cfg in self.configs:
            if len(cfg) != self.width:
                raise DomainError(
                    f"configuration width {len(cfg)} does not match constraint width {self.width}")

    def __iter__(self) -> Iterator[Config]:
        return iter(self.configs)

    def __len__(self) -> int:
        return len(self.configs)


def make_constraint(width: int, configs: Iterable[Iterable[int]]) -> Constraint:
    """Canonicalize: per-config slot sort, dedupe, sort the config list."""
    canon = sorted({canon_config(c) for c in configs})
    return Constraint(width, tuple(canon))


@lru_cache(maxsize=256)
def expand_constraint(cons: Constraint) -> frozenset[tuple[int, ...]]:
    """All expanded configurations, as sorted tuples of label indices."""
    out: set[tuple[int, ...]] = set()
    for cfg in cons.configs:
        out.update(_expand_config(cfg))
    return frozenset(out)


def _expand_config(cfg: Config) -> Iterator[tuple[int, ...]]:
    slots = [tuple(bits(m)) for m in cfg]
    # iterative product with per-step sorting collapses permutation duplicates
    acc: set[tuple[int, ...]] = {()}
    for choices in slots:
        acc = {tuple(sorted(prev + (c,))) for prev in acc for c in choices}
    return iter(acc)


def expand_config(cfg: Config) -> frozenset[tuple[int, ...]]:
    return frozenset(_expand_config(cfg))


# ---------------------------------------------------------------------------
# slot matching (containment and relaxation share it)


def match_slots(small: Sequence[int], big: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Match every slot of ``small`` to a distinct slot of ``big`` by subset.

    Returns the assignment (``out[i]`` is the index in ``big`` that slot ``i``
    landed on) or None.  Augmenting-path matching; widths must agree.
    """
    n = len(small)
    if len(big) != n:
        return None
    # candidate lists; fail fast when some slot has none
    cand: list[list[int]] = []
    for s in small:
        row = [j for j, b in enumerate(big) if s & ~b == 0]
        if not row:
            return None
        cand.append(row)
    matched_of_big: list[int] = [-1] * n

    def try_assign(i: int, seen: list[bool]) -> bool:
        for j in cand[i]:
            if not seen[j]:
                seen[j] = True
                if matched_of_big[j] < 0 or try_assign(matched_of_big[j], seen):
                    matched_of_big[j] = i
                    return True
        return False

    for i in range(n):
        if not try_assign(i, [False] * n):
            return None
    out = [-1] * n
    for j, i in enumerate(matched_of_big):
        out[i] = j
    return tuple(out)


def contained_in(c: Sequence[int], d: Sequence[int]) -> bool:
    """Can configuration ``c`` be matched into configuration ``d`` slotwise?

    Each slot of ``c`` must map to a distinct slot of ``d`` that includes it
    (label-set inclusion).  With ``c`` expanded this is the usual membership
    of a labeling in a condensed configuration.
    """
    return match_slots(c, d) is not None


def constraint_permits(cons: Constraint, c: Sequence[int]) -> bool:
    """Is ``c`` contained in some configuration of the constraint?"""
    return any(contained_in(c, d) for d in cons.configs)


# ---------------------------------------------------------------------------
# strength


@dataclass(frozen=True)
class StrengthDiagram:
    """The strength preorder of labels with respect to one constraint.

    ``stronger[a]`` is the mask of labels at least as strong as ``a``
    (always including ``a``).  Labels that occur in no configuration are
    vacuously below every label, so their row is the full mask.
    """

    n: int
    stronger: tuple[int, ...]

    def at_least_as_strong(self, b: int, a: int) -> bool:
        """Is ``b`` at least as strong as ``a``?"""
        return bool(self.stronger[a] >> b & 1)

    def equivalent(self, a: int, b: int) -> bool:
        return self.at_least_as_strong(a, b) and self.at_least_as_strong(b, a)

    def scc_classes(self) -> tuple[tuple[int, ...], ...]:
        """Equal-strength classes, each sorted, listed by smallest member."""
        seen = [False] * self.n
        out = []
        for a in range(self.n):
            if seen[a]:
                continue
            cls = [b for b in range(self.n)
                   if self.at_least_as_strong(b, a) and self.at_least_as_strong(a, b)]
            for b in cls:
                seen[b] = True
            out.append(tuple(cls))
        return tuple(out)

    def irreducible(self) -> tuple[tuple[int, int], ...]:
        """Covering relations (a, b) with b strictly stronger than a.

        Strictness is between equal-strength classes; pairs are between class
        representatives (smallest members) and exclude anything implied by
        transitivity.  This is what a diagram rendering should draw.
        """
        classes = self.scc_classes()
        reps = [c[0] for c in classes]
        above: dict[int, set[int]] = {}
        for r in reps:
            above[r] = {s for s in reps
                        if s != r and self.at_least_as_strong(s, r)
                        and not self.at_least_as_strong(r, s)}
        edges = []
        for r in reps:
            for s in above[r]:
                if not any(s in above[t] for t in above[r] if t != s):
                    edges.append((r, s))
        return tuple(sorted(edges))


def reduce_cover(cover: Iterable[Config], budget: "Budget | int | None" = None
                 ) -> frozenset[Config]:
    """Drop configurations that match slotwise into another one of the cover.

    The union of the expansions is preserved; what remains is an antichain
    under slotwise subset matching.
    """
    bud = Budget.ensure(budget)
    uniq = sorted(set(cover))
    out = []
    for p in uniq:
        bud.spend(len(uniq))
        if not any(p != q and match_slots(p, q) is not None for q in uniq):
            out.append(p)
    return frozenset(out)


def compute_strength(cons: Constraint, n_labels: int,
                     budget: "Budget | int | None" = None) -> StrengthDiagram:
    """Strength preorder of all ``n_labels`` labels under ``cons``.

    Label ``b`` is at least as strong as ``a`` when replacing one occurrence
    of ``a`` by ``b`` in any permitted expanded configuration lands inside
    the constraint again.  Grouping the expanded configurations containing
    ``a`` by the condensed configuration and slot they come from, the labels
    at least as strong as ``a`` are the intersection, over every slot
    offering ``a``, of the set of labels that complete the rest of that
    configuration no matter what the rest picks.  Completion sets are
    computed recursively on the condensed form, so wide slots are never
    expanded.
    """
    bud = Budget.ensure(budget)
    full = (1 << n_labels) - 1
    base = reduce_cover(cons.configs, bud)
    memo: dict[tuple[Config, frozenset[Config]], int] = {}

    def complete(rest: Config, cover: frozenset[Config]) -> int:
        """Labels b with every pick from ``rest`` plus b inside the cover."""
        bud.spend()
        if not cover:
            return 0
        if not rest:
            out = 0
            for box in cover:
                out |= box[0]
            return out
        key = (rest, cover)
        got = memo.get(key)
        if got is not None:
            return got
        head, tail = rest[0], rest[1:]
        acc = full
        seen_groups: set[frozenset[Config]] = set()
        for a in bits(head):
            residual: list[Config] = []
            for box in cover:
                bud.spend(len(box))
                for j, s in enumerate(box):
                    if j and box[j - 1] == s:
                        continue
                    if s >> a & 1:
                        residual.append(box[:j] + box[j + 1:])
            group = reduce_cover(residual, bud)
            if group in seen_groups:
                continue
            seen_groups.add(group)
            acc &= complete(tail, group)
            if acc == 0:
                break
        memo[key] = acc
        return acc

    stronger = [full] * n_labels
    for cfg in sorted(base):
        for i in range(len(cfg)):
            if i and cfg[i] == cfg[i - 1]:
                continue
            comp = complete(cfg[:i] + cfg[i + 1:], base)
            for a in bits(cfg[i]):
                stronger[a] &= comp
    return StrengthDiagram(n_labels, tuple(stronger))


def closure(labels: int, diagram: StrengthDiagram) -> int:
    """Smallest right-closed superset of the label set ``labels``."""
    out = 0
    for a in bits(labels):
        out |= diagram.stronger[a]
    return out


def is_right_closed(labels: int, diagram: StrengthDiagram) -> bool:
    return closure(labels, diagram) == labels


def enumerate_right_closed(diagram: StrengthDiagram, *,
                           limit: int = 1 << 20) -> tuple[int, ...]:
    """All nonempty right-closed label sets, ascending by mask.

    Equal-strength classes are contracted first, so two equivalent labels
    only ever appear together.  Raises :class:`BudgetError` past ``limit``
    results; the count is exponential in the worst case by nature.
    """
    classes = diagram.scc_classes()
    k = len(classes)
    cmask = [mask_of(c) for c in classes]
    rep = [c[0] for c in classes]
    # upward[i]: class indices at least as strong as class i (excluding i)
    upward = []
    for i in range(k):
        up = 0
        for j in range(k):
            if j != i and diagram.at_least_as_strong(rep[j], rep[i]):
                up |= 1 << j
        upward.append(up)
    # order classes so that stronger ones come first
    order = sorted(range(k), key=lambda i: (popcount(upward[i]), cmask[i]))
    out: list[int] = []
    chosen_stack: list[int] = [0]

    def walk(pos: int) -> None:
        if pos == k:
            chosen = chosen_stack[-1]
            if chosen:
                if len(out) >= limit:
                    raise BudgetError(
                        f"right-closed enumeration exceeded {limit} sets")
                m = 0
                for i in bits(chosen):
                    m |= cmask[i]
                out.append(m)
            return
        i = order[pos]
        chosen = chosen_stack[-1]
        # include class i only when everything above it is already in
        if upward[i] & ~chosen == 0:
            chosen_stack.append(chosen | (1 << i))
            walk(pos + 1)
            chosen_stack.pop()
        walk(pos + 1)

    walk(0)
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True)
class Problem:
    """An alphabet with a node constraint (width delta) and an edge constraint.

    ``provenance`` optionally records, per label, the names this label stands
    for in the source alphabet of the transformation that produced it; it is
    a tuple aligned with ``alphabet``.
    """

    alphabet: tuple[str, ...]
    delta: int
    nodes: Constraint
    edges: Constraint
    provenance: Optional[tuple[tuple[str, ...], ...]] = None

    def __post_init__(self) -> None:
        if self.delta < 2:
            raise DomainError("delta must be at least 2")
        if len(self.alphabet) > MAX_ALPHABET:
            raise DomainError(
                f"alphabet of {len(self.alphabet)} labels exceeds the {MAX_ALPHABET} limit")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise DomainError("alphabet contains a duplicate label")
        if self.nodes.width != self.delta:
            raise DomainError("node constraint width must equal delta")
        if self.edges.width != 2:
            raise DomainError("edge constraint width must be 2")
        full = (1 << len(self.alphabet)) - 1
        for cons in (self.nodes, self.edges):
            for cfg in cons.configs:
                for slot in cfg:
                    if slot & ~full:
                        raise DomainError("configuration slot uses an unknown label bit")
        if self.provenance is not None and len(self.provenance) != len(self.alphabet):
            raise DomainError("provenance must align with the alphabet")

    # -- label helpers ----------------------------------------------------

    def label_index(self, name: str) -> int:
        try:
            return self.alphabet.index(name)
        except ValueError:
            raise DomainError(f"unknown label {name!r}") from None

    def mask_of_names(self, names: Iterable[str]) -> int:
        return mask_of(self.label_index(n) for n in names)

    def names_of_mask(self, mask: int) -> tuple[str, ...]:
        return tuple(self.alphabet[i] for i in bits(mask))

    def config_of_names(self, slots: Iterable[Iterable[str] | str]) -> Config:
        out = []
        for slot in slots:
            if isinstance(slot, str):
                slot = [slot]
            out.append(self.mask_of_names(slot))
        return canon_config(out)


def make_problem(alphabet: Iterable[str], delta: int,
                 node_configs: Iterable[Iterable[int]],
                 edge_configs: Iterable[Iterable[int]],
                 provenance: Optional[Mapping[str, Iterable[str]]] = None) -> Problem:
    """Build a canonical problem: alphabet sorted by name, masks remapped."""
    names = tuple(alphabet)
    if len(set(names)) != len(names):
        raise DomainError("alphabet contains a duplicate label")
    order = tuple(sorted(names))
    remap = {old: order.index(name) for old, name in enumerate(names)}

    def remap_cfg(cfg: Iterable[int]) -> list[int]:
        out = []
        for slot in cfg:
            if slot < 0 or slot >> len(names):
                raise DomainError("configuration slot uses an unknown label bit")
            out.append(mask_of(remap[i] for i in bits(slot)))
        return out

    nodes = make_constraint(delta, (remap_cfg(c) for c in node_configs))
    edges = make_constraint(2, (remap_cfg(c) for c in edge_configs))
    prov: Optional[tuple[tuple[str, ...], ...]] = None
    if provenance is not None:
        for key in provenance:
            if key not in order:
                raise DomainError(f"provenance names unknown label {key!r}")
        prov = tuple(tuple(sorted(provenance.get(name, ()))) for name in order)
    return Problem(order, delta, nodes, edges, prov)


def prune_unused_labels(problem: Problem) -> Problem:
    """Drop labels that occur in no node and no edge configuration."""
    used = 0
    for cons in (problem.nodes, problem.edges):
        for cfg in cons.configs:
            for slot in cfg:
                used |= slot
    keep = [i for i in range(len(problem.alphabet)) if used >> i & 1]
    if len(keep) == len(problem.alphabet):
        return problem
    new_names = tuple(problem.alphabet[i] for i in keep)
    newpos = {old: new for new, old in enumerate(keep)}

    def remap_cfg(cfg: Config) -> list[int]:
        return [mask_of(newpos[i] for i in bits(slot)) for slot in cfg]

    nodes = make_constraint(problem.delta, (remap_cfg(c) for c in problem.nodes.configs))
    edges = make_constraint(2, (remap_cfg(c) for c in problem.edges.configs))
    prov = None
    if problem.provenance is not None:
        prov = tuple(problem.provenance[i] for i in keep)
    return Problem(new_names, problem.delta, nodes, edges, prov)


def problems_equivalent(a: Problem, b: Problem) -> bool:
    """Same alphabet, same degree, same allowed labelings on both constraints.

    Constraints are compared by expansion, so two presentations of the same
    configuration set (say ``M [O P]`` against the pair ``M O`` and ``M P``)
    count as equal.  Apply a renaming first to compare across alphabets.
    """
    return (a.alphabet == b.alphabet and a.delta == b.delta
            and expand_constraint(a.nodes) == expand_constraint(b.nodes)
            and expand_constraint(a.edges) == expand_constraint(b.edges))


def rename_labels(problem: Problem, mapping: Mapping[str, str]) -> Problem:
    """A copy of the problem with labels renamed through ``mapping``.

    Every alphabet label must be mapped, images must be distinct, and the
    result is canonical (sorted alphabet); provenance is dropped since it
    describes the old names' origin, not the new ones.
    """
    missing = [n for n in problem.alphabet if n not in mapping]
    if missing:
        raise DomainError("renaming misses labels: " + ", ".join(missing))
    names = [mapping[n] for n in problem.alphabet]
    return make_problem(names, problem.delta,
                        problem.nodes.configs, problem.edges.configs)


# ---------------------------------------------------------------------------
# text format

_TOKEN = _regex.compile(r"\s*(\[|\]|\^|[A-Za-z0-9_']+|=|\{|\}|,)")
_NAME = _regex.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")


def _tokenize(line: str, lineno: int) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            rest = line[pos:].strip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", lineno, pos + 1)
        out.append((m.group(1), m.start(1) + 1))
        pos = m.end()
    return out


def _parse_config_line(tokens: list[tuple[str, int]], lineno: int) -> list[list[str]]:
    """One configuration as a list of slots, each a list of label names."""
    slots: list[list[str]] = []
    i = 0
    n = len(tokens)

    def parse_exponent(after: int) -> tuple[int, int]:
        if after < n and tokens[after][0] == "^":
            if after + 1 >= n or not tokens[after + 1][0].isdigit():
                raise ParseError("exponent must be a positive integer",
                                 lineno, tokens[after][1])
            k = int(tokens[after + 1][0])
            if k < 1:
                raise ParseError("exponent must be a positive integer",
                                 lineno, tokens[after + 1][1])
            return k, after + 2
        return 1, after

    while i < n:
        tok, col = tokens[i]
        if tok == "[":
            group: list[str] = []
            i += 1
            while i < n and tokens[i][0] != "]":
                name, ncol = tokens[i]
                if not _NAME.match(name):
                    raise ParseError(f"bad label name {name!r}", lineno, ncol)
                group.append(name)
                i += 1
            if i >= n:
                raise ParseError("unclosed '['", lineno, col)
            if not group:
                raise ParseError("empty disjunction slot", lineno, col)
            i += 1
            k, i = parse_exponent(i)
            slots.extend([list(group)] * k)
        elif _NAME.match(tok):
            i += 1
            k, i = parse_exponent(i)
            slots.extend([[tok]] * k)
        else:
            raise ParseError(f"unexpected token {tok!r}", lineno, col)
    return slots


def parse_problem(text: str) -> Problem:
    """Parse the problem text format.

    Sections: a ``delta:`` header, then ``nodes:`` and ``edges:`` blocks of
    one configuration per line, then an optional ``provenance:`` block of
    ``name = { source ... }`` lines.  ``#`` starts a comment.  Slot syntax is
    a label name, a ``[A B]`` disjunction, either with an optional ``^k``
    exponent.
    """
    delta: Optional[int] = None
    section: Optional[str] = None
    node_lines: list[tuple[list[list[str]], int]] = []
    edge_lines: list[tuple[list[list[str]], int]] = []
    prov_lines: list[tuple[str, list[str], int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        low = stripped.lower()
        if low.startswith("delta:"):
            if delta is not None:
                raise ParseError("duplicate delta header", lineno)
            value = stripped[len("delta:"):].strip()
            if not value.isdigit():
                raise ParseError("delta must be an integer", lineno)
            delta = int(value)
            continue
        if low in ("nodes:", "edges:", "provenance:"):
            section = low[:-1]
            continue
        if section is None:
            raise ParseError("configuration before any section header", lineno)
        tokens = _tokenize(line, lineno)
        if section == "provenance":
            prov_lines.append(_parse_provenance_line(tokens, lineno) + (lineno,))
            continue
        cfg = _parse_config_line(tokens, lineno)
        if section == "nodes":
            node_lines.append((cfg, lineno))
        else:
            edge_lines.append((cfg, lineno))

    if delta is None:
        raise ParseError("missing delta header")
    if not node_lines:
        raise ParseError("missing nodes section")
    if not edge_lines:
        raise ParseError("missing edges section")

    names = sorted({n for cfg, _ in node_lines + edge_lines for slot in cfg for n in slot})
    index = {n: i for i, n in enumerate(names)}
    if len(names) > MAX_ALPHABET:
        raise ParseError(f"alphabet of {len(names)} labels exceeds the {MAX_ALPHABET} limit")

    def to_config(cfg: list[list[str]], width: int, lineno: int) -> Config:
        if len(cfg) != width:
            raise ParseError(
                f"configuration has width {len(cfg)}, expected {width}", lineno)
        return canon_config(mask_of(index[n] for n in slot) for slot in cfg)

    nodes = make_constraint(delta, [to_config(c, delta, ln) for c, ln in node_lines])
    edges = make_constraint(2, [to_config(c, 2, ln) for c, ln in edge_lines])

    prov: Optional[tuple[tuple[str, ...], ...]] = None
    if prov_lines:
        by_name: dict[str, tuple[str, ...]] = {}
        for name, sources, lineno in prov_lines:
            if name not in index:
                raise ParseError(f"provenance names unknown label {name!r}", lineno)
            if name in by_name:
                raise ParseError(f"duplicate provenance for {name!r}", lineno)
            by_name[name] = tuple(sorted(sources))
        prov = tuple(by_name.get(n, ()) for n in names)

    return Problem(tuple(names), delta, nodes, edges, prov)


def parse_config(problem: Problem, text: str) -> Config:
    """One configuration in the text syntax, over the problem's alphabet.

    Accepts whatever a constraint line accepts (``M [O P]^2``); unknown
    labels raise :class:`DomainError`, malformed syntax :class:`ParseError`.
    The width is not checked here; callers compare against the constraint
    they aim at.
    """
    slots = _parse_config_line(_tokenize(text, 1), 1)
    if not slots:
        raise ParseError("empty configuration")
    return problem.config_of_names(slots)


def merge_labels(problem: Problem, pairs: Sequence[tuple[str, str]]) -> Problem:
    """Replace labels by other labels, pair by pair, dropping the replaced.

    Each pair (a, b) rewrites every occurrence of ``a`` into ``b`` in both
    constraints and removes ``a`` from the alphabet; when provenance is
    tracked, ``b`` absorbs the sources of ``a``.  Pairs apply left to right,
    so a later pair may refer to the result of an earlier one.  Meant for
    collapsing labels the strength diagram shows equivalent, but sound for
    any pair: the result permits a subset of the original labelings with
    ``a`` read as ``b``.
    """
    for a, b in pairs:
        if a == b:
            raise DomainError(f"cannot merge {a!r} with itself")
        ia = problem.label_index(a)
        ib = problem.label_index(b)

        def remap_slot(slot: int) -> int:
            if slot >> ia & 1:
                slot = (slot & ~(1 << ia)) | (1 << ib)
            return slot

        names = tuple(n for n in problem.alphabet if n != a)
        prov = None
        if problem.provenance is not None:
            merged = tuple(sorted(set(problem.provenance[ia])
                                  | set(problem.provenance[ib])))
            prov = {n: (merged if n == b else problem.provenance[problem.label_index(n)])
                    for n in names}
        nodes = [[remap_slot(s) for s in cfg] for cfg in problem.nodes.configs]
        edges = [[remap_slot(s) for s in cfg] for cfg in problem.edges.configs]
        keep = {n: i for i, n in enumerate(names)}

        def shrink(cfgs: list[list[int]]) -> list[list[int]]:
            out = []
            for cfg in cfgs:
                out.append([mask_of(keep[problem.alphabet[i]] for i in bits(s))
                            for s in cfg])
            return out

        problem = make_problem(names, problem.delta,
                               shrink(nodes), shrink(edges), prov)
    return problem


def discard_configs(problem: Problem, texts: Sequence[str],
                    side: str = "nodes") -> Problem:
    """Remove the named configurations from one constraint.

    Each text must name an existing configuration of the chosen side
    (``"nodes"`` or ``"edges"``) exactly, up to canonical reordering;
    anything that names nothing raises.  Discarding strengthens the
    problem, so the caller decides whether that is wanted.
    """
    if side not in ("nodes", "edges"):
        raise DomainError("side must be 'nodes' or 'edges'")
    cons = problem.nodes if side == "nodes" else problem.edges
    remove = []
    for text in texts:
        cfg = parse_config(problem, text)
        if cfg not in cons.configs:
            raise DomainError(
                f"no {side} configuration matches {text.strip()!r}")
        remove.append(cfg)
    left = [c for c in cons.configs if c not in remove]
    if not left:
        raise DomainError(f"discarding would empty the {side} constraint")
    prov = None
    if problem.provenance is not None:
        prov = {n: problem.provenance[i] for i, n in enumerate(problem.alphabet)}
    if side == "nodes":
        return make_problem(problem.alphabet, problem.delta, left,
                            problem.edges.configs, prov)
    return make_problem(problem.alphabet, problem.delta,
                        problem.nodes.configs, left, prov)


def relax_node_constraint(problem: Problem, texts: Sequence[str]) -> Problem:
    """Replace the node constraint by the given configurations.

    Every current node configuration must relax into one of the new ones
    (slotwise inclusion), so the change only ever makes the problem easier;
    the offending configuration is named otherwise.
    """
    new_cfgs = [parse_config(problem, t) for t in texts]
    for cfg in new_cfgs:
        if len(cfg) != problem.delta:
            raise DomainError(
                f"replacement configuration has width {len(cfg)}, need {problem.delta}")
    for cfg in problem.nodes.configs:
        if not any(match_slots(cfg, new) is not None for new in new_cfgs):
            names = " ".join(_slot_text(problem, s) for s in cfg)
            raise DomainError(
                f"current configuration {names!r} does not relax into any replacement")
    prov = None
    if problem.provenance is not None:
        prov = {n: problem.provenance[i] for i, n in enumerate(problem.alphabet)}
    return make_problem(problem.alphabet, problem.delta, new_cfgs,
                        problem.edges.configs, prov)


def _parse_provenance_line(tokens: list[tuple[str, int]],
                           lineno: int) -> tuple[str, list[str]]:
    # shape: NAME = { NAME (,? NAME)* }   (empty braces allowed)
    if len(tokens) < 4 or tokens[1][0] != "=" or tokens[2][0] != "{" or tokens[-1][0] != "}":
        raise ParseError("provenance line must look like 'name = { a b }'", lineno)
    name = tokens[0][0]
    if not _NAME.match(name):
        raise ParseError(f"bad label name {name!r}", lineno, tokens[0][1])
    sources = []
    for tok, col in tokens[3:-1]:
        if tok == ",":
            continue
        if not _NAME.match(tok):
            raise ParseError(f"bad label name {tok!r}", lineno, col)
        sources.append(tok)
    return name, sources


def _slot_text(problem: Problem, slot: int) -> str:
    names = problem.names_of_mask(slot)
    if len(names) == 1:
        return names[0]
    return "[" + " ".join(names) + "]"


def _config_text(problem: Problem, cfg: Config) -> str:
    parts = []
    i = 0
    while i < len(cfg):
        j = i
        while j < len(cfg) and cfg[j] == cfg[i]:
            j += 1
        run = j - i
        text = _slot_text(problem, cfg[i])
        parts.append(text if run == 1 else f"{text}^{run}")
        i = j
    return " ".join(parts)


def serialize_problem(problem: Problem) -> str:
    """Canonical text: sections in fixed order, configurations sorted.

    Parsing the output of this function reproduces the problem exactly
    (provenance included) as long as the problem itself is canonical, i.e.
    its alphabet is sorted and its constraints deduplicated, which everything
    in this package produces.
    """
    lines = [f"delta: {problem.delta}", "nodes:"]
    lines.extend(_config_text(problem, c) for c in problem.nodes.configs)
    lines.append("edges:")
    lines.extend(_config_text(problem, c) for c in problem.edges.configs)
    if problem.provenance is not None:
        lines.append("provenance:")
        for name, sources in zip(problem.alphabet, problem.provenance):
            lines.append(f"{name} = {{ " + " ".join(sources) + " }"
                         if sources else f"{name} = {{ }}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON mirror


def problem_to_json(problem: Problem) -> dict:
    def cons_json(cons: Constraint) -> list[list[list[str]]]:
        return [[list(problem.names_of_mask(slot)) for slot in cfg]
                for cfg in cons.configs]

    out: dict = {
        "alphabet": list(problem.alphabet),
        "delta": problem.delta,
        "nodes": cons_json(problem.nodes),
        "edges": cons_json(problem.edges),
    }
    if problem.provenance is not None:
        out["provenance"] = {name: list(sources)
                             for name, sources in zip(problem.alphabet, problem.provenance)}
    return out


def problem_from_json(data: dict) -> Problem:
    try:
        alphabet = list(data["alphabet"])
        delta = int(data["delta"])
        index = {n: i for i, n in enumerate(alphabet)}
        def cons(rows: list) -> list[list[int]]:
            return [[mask_of(index[n] for n in slot) for slot in cfg] for cfg in rows]
        prov = data.get("provenance")
        return make_problem(alphabet, delta, cons(data["nodes"]), cons(data["edges"]),
                            {k: tuple(v) for k, v in prov.items()} if prov else None)
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed problem JSON: {exc}") from exc


def problem_json_text(problem: Problem) -> str:
    return json.dumps(problem_to_json(problem), indent=2, sort_keys=True) + "\n"
