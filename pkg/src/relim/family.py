"""A parameterized family of ruling-set style problems closed under speedup.

A member ``Pi(delta, beta, v, x)`` has three kinds of labels: colors
``C{g}_{j}`` arranged in groups ``g = 0..beta`` with ``v[g]`` colors in group
``g``; pointer labels ``A1..Abeta`` and ``B1..Bbeta``; and a wildcard ``X``
present exactly when ``x > 0``.  A node either commits to one color on
``delta - x`` ports with ``x`` wildcard ports, or points: one ``Ai`` port and
``delta - 1`` ports of ``Bi``.  On an edge, distinct colors coexist, ``B``
labels coexist with everything except that ``Ai`` tolerates only ``Bj`` with
``j > i`` and colors of groups strictly below ``i``; ``A`` labels never face
each other; ``X`` tolerates everything.

The family is closed under one round of speedup in a precise sense: the edge
constraint after the universal edge rewrite is exactly the good-pair
configurations (:func:`good_pairs`), the label strength order collapses to
set inclusion, and the node constraint after the full speedup relaxes into a
small schema set Z whose members translate back into the family with
parameters ``v' = prefix_sum(v)`` and ``x' = size(v) * (x + 1)``.  Those
translations are emitted as zero-round reductions (:func:`speedup_map`) and
checked by :func:`relim.roundelim.check_zero_round_reduction`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import (
    Config,
    DomainError,
    MAX_ALPHABET,
    Problem,
    StrengthDiagram,
    bits,
    canon_config,
    compute_strength,
    make_problem,
    mask_of,
)
from .roundelim import (
    SpeedupResult,
    re,
    relax_witness,
    speedup,
    zero_round_solvable,
)

Color = tuple[int, int]  # (group, index), index starting at 1


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class FamilyParams:
    """Parameters (delta, beta, v, x) of one family member."""

    delta: int
    beta: int
    v: tuple[int, ...]
    x: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "v", tuple(int(k) for k in self.v))
        if self.delta < 2:
            raise DomainError("delta must be at least 2")
        if self.beta < 1:
            raise DomainError("beta must be at least 1")
        if len(self.v) != self.beta + 1:
            raise DomainError("v must list one count per color group 0..beta")
        if any(k < 0 for k in self.v):
            raise DomainError("color counts must be nonnegative")
        if sum(self.v) < 1:
            raise DomainError("at least one color is required")
        if not 0 <= self.x <= self.delta:
            raise DomainError("x must lie between 0 and delta")

    @property
    def size(self) -> int:
        return sum(self.v)


def family_size(v: Sequence[int]) -> int:
    return sum(v)


def prefix_sum(v: Sequence[int]) -> tuple[int, ...]:
    """The next color-count vector: group i collects all groups up to i."""
    out = []
    acc = 0
    for k in v:
        acc += k
        out.append(acc)
    return tuple(out)


def binom_color(j: int, k: int) -> int:
    """Color count of group ``k`` after ``j`` prefix-sum steps from [1,0,...].

    Equals the binomial coefficient ``C(j+k-1, k)`` for ``j >= 1``; exact
    integers of arbitrary size.
    """
    if j < 0 or k < 0:
        raise DomainError("binom_color needs nonnegative arguments")
    if j == 0:
        return 1 if k == 0 else 0
    return math.comb(j + k - 1, k)


def family_colors(params: FamilyParams) -> tuple[Color, ...]:
    return tuple((g, j) for g in range(params.beta + 1)
                 for j in range(1, params.v[g] + 1))


def color_name(color: Color) -> str:
    g, j = color
    return f"C{g}_{j}"


def color_group(colors: Iterable[Color]) -> int:
    """Largest group appearing among ``colors``; -1 for none."""
    return max((g for g, _ in colors), default=-1)


def grid_vectors(beta: int, max_size: int) -> Iterable[tuple[int, ...]]:
    """All color count vectors of total size 1..max_size, lexicographically.

    Used by the verification grids: every way to spread up to ``max_size``
    colors over the groups ``0..beta``.
    """
    out = set()
    for size in range(1, max_size + 1):
        for cuts in itertools.combinations_with_replacement(range(beta + 1), size):
            v = [0] * (beta + 1)
            for c in cuts:
                v[c] += 1
            out.add(tuple(v))
    return sorted(out)


# ---------------------------------------------------------------------------
# the problem itself


def make_family_problem(params: FamilyParams) -> Problem:
    """Construct the family member as a concrete problem."""
    colors = family_colors(params)
    names: list[str] = [color_name(c) for c in colors]
    names += [f"A{i}" for i in range(1, params.beta + 1)]
    names += [f"B{i}" for i in range(1, params.beta + 1)]
    if params.x > 0:
        names.append("X")
    index = {n: i for i, n in enumerate(names)}

    def m(name: str) -> int:
        return 1 << index[name]

    delta, x, beta = params.delta, params.x, params.beta
    xslots = [m("X")] * x if x > 0 else []
    node_cfgs: list[list[int]] = []
    for c in colors:
        node_cfgs.append([m(color_name(c))] * (delta - x) + xslots)
    for i in range(1, beta + 1):
        node_cfgs.append([m(f"A{i}")] + [m(f"B{i}")] * (delta - 1))

    edge_cfgs: list[list[int]] = []
    for a_pos, c in enumerate(colors):
        for c2 in colors[a_pos + 1:]:
            edge_cfgs.append([m(color_name(c)), m(color_name(c2))])
    for i in range(1, beta + 1):
        for j in range(i, beta + 1):
            edge_cfgs.append([m(f"B{i}"), m(f"B{j}")])
        for j in range(i + 1, beta + 1):
            edge_cfgs.append([m(f"A{j}"), m(f"B{i}")])
        for c in colors:
            edge_cfgs.append([m(f"B{i}"), m(color_name(c))])
        for c in colors:
            if c[0] < i:
                edge_cfgs.append([m(f"A{i}"), m(color_name(c))])
    if x > 0:
        for n in names:
            edge_cfgs.append([m("X"), m(n)])

    return make_problem(names, delta, node_cfgs, edge_cfgs)


# ---------------------------------------------------------------------------
# strength closed form


def predicted_strength_sets(params: FamilyParams,
                            problem: Optional[Problem] = None) -> tuple[int, ...]:
    """Closed-form strength rows of the edge constraint.

    Returns, per label of the family problem, the mask of labels at least as
    strong as it: nothing beats ``X``; ``Bi`` is beaten by lower-index ``B``
    labels; a color is beaten by the ``B`` labels up to its group; ``Ai`` is
    beaten by higher-index ``A`` labels, colors of groups at least ``i``, and
    every ``B`` label.  ``X``, when present, beats everything.
    """
    if problem is None:
        problem = make_family_problem(params)
    beta, x = params.beta, params.x
    idx = {n: i for i, n in enumerate(problem.alphabet)}
    xbit = (1 << idx["X"]) if x > 0 else 0
    rows = [0] * len(problem.alphabet)
    for g, j in family_colors(params):
        rows[idx[color_name((g, j))]] = (
            (1 << idx[color_name((g, j))])
            | mask_of(idx[f"B{i}"] for i in range(1, g + 1))
            | xbit)
    for i in range(1, beta + 1):
        rows[idx[f"B{i}"]] = mask_of(idx[f"B{j}"] for j in range(1, i + 1)) | xbit
        rows[idx[f"A{i}"]] = (
            mask_of(idx[f"A{j}"] for j in range(i, beta + 1))
            | mask_of(idx[color_name(c)] for c in family_colors(params) if c[0] >= i)
            | mask_of(idx[f"B{j}"] for j in range(1, beta + 1))
            | xbit)
    if x > 0:
        rows[idx["X"]] = xbit
    return tuple(rows)


def family_edge_diagram(params: FamilyParams,
                        problem: Optional[Problem] = None) -> StrengthDiagram:
    """Edge strength diagram, computed and cross-checked against closed form.

    Raises :class:`DomainError` if the computed preorder ever deviates from
    the closed form; that would mean the family construction itself is off.
    """
    if problem is None:
        problem = make_family_problem(params)
    computed = compute_strength(problem.edges, len(problem.alphabet))
    predicted = predicted_strength_sets(params, problem)
    if tuple(computed.stronger) != predicted:
        bad = [problem.alphabet[i] for i in range(len(predicted))
               if computed.stronger[i] != predicted[i]]
        raise DomainError(
            "edge strength deviates from the closed form at " + ", ".join(bad))
    return computed


def _strong_rows(params: FamilyParams, problem: Problem) -> dict[str, int]:
    rows = predicted_strength_sets(params, problem)
    return {name: rows[i] for i, name in enumerate(problem.alphabet)}


# ---------------------------------------------------------------------------
# good pairs


@dataclass(frozen=True)
class GoodPair:
    """A set of colors with a pointer level ``i`` at least its top group.

    ``s1`` is the chosen-colors side (plus ``B1..Bi`` and ``X`` if present),
    ``s2`` the complementary side (remaining colors, all ``B`` labels,
    ``A{i+1}..Abeta``, and ``X`` if present); both are label masks over the
    family problem's alphabet.
    """

    colors: tuple[Color, ...]
    i: int
    s1: int
    s2: int


def good_pairs(params: FamilyParams,
               problem: Optional[Problem] = None) -> tuple[GoodPair, ...]:
    """All good pairs in canonical order (level, then color set).

    A pair of a color subset and level ``i`` is good when ``i`` is at least
    the largest group in the subset; the empty subset at level 0 only counts
    when the wildcard exists, since its first side would otherwise be empty.
    """
    if problem is None:
        problem = make_family_problem(params)
    idx = {n: i for i, n in enumerate(problem.alphabet)}
    xbit = (1 << idx["X"]) if params.x > 0 else 0
    colors = family_colors(params)
    all_colors_mask = mask_of(idx[color_name(c)] for c in colors)
    beta = params.beta
    out: list[GoodPair] = []
    for i in range(0, beta + 1):
        for sub in _subsets(colors):
            if color_group(sub) > i:
                continue
            if i == 0 and not sub and params.x == 0:
                continue
            s1 = (mask_of(idx[color_name(c)] for c in sub)
                  | mask_of(idx[f"B{k}"] for k in range(1, i + 1))
                  | xbit)
            s2 = ((all_colors_mask & ~mask_of(idx[color_name(c)] for c in sub))
                  | mask_of(idx[f"B{k}"] for k in range(1, beta + 1))
                  | mask_of(idx[f"A{k}"] for k in range(i + 1, beta + 1))
                  | xbit)
            out.append(GoodPair(tuple(sorted(sub)), i, s1, s2))
    return tuple(out)


def _subsets(items: Sequence[Color]) -> Iterable[tuple[Color, ...]]:
    n = len(items)
    for mask in range(1 << n):
        yield tuple(items[i] for i in range(n) if mask >> i & 1)


def predicted_re_edge(params: FamilyParams,
                      problem: Optional[Problem] = None) -> frozenset[tuple[int, int]]:
    """Predicted edge constraint after the universal edge rewrite.

    One configuration per good pair: the pair's two sides as label masks,
    unordered.  Deduplicated and maximality-filtered (the filter never fires
    when the closed form is exact, but the contract promises a maximal set).
    """
    pairs = {tuple(sorted((gp.s1, gp.s2))) for gp in good_pairs(params, problem)}
    keep = {
        p for p in pairs
        if not any(q != p and p[0] & ~q[0] == 0 and p[1] & ~q[1] == 0 or
                   q != p and p[0] & ~q[1] == 0 and p[1] & ~q[0] == 0
                   for q in pairs)}
    return frozenset((a, b) for a, b in keep)


def predicted_re_atoms(params: FamilyParams,
                       problem: Optional[Problem] = None) -> tuple[int, ...]:
    """The predicted derived alphabet: every side of every good pair."""
    atoms = set()
    for gp in good_pairs(params, problem):
        atoms.add(gp.s1)
        atoms.add(gp.s2)
    return tuple(sorted(atoms))


def predicted_re_node(params: FamilyParams,
                      problem: Optional[Problem] = None
                      ) -> frozenset[tuple[tuple[int, ...], ...]]:
    """Predicted node constraint after the universal edge rewrite.

    Valid for ``x + 2 <= delta``.  Slots are sets of derived labels; a
    derived label is itself a label set, so a slot is represented as a sorted
    tuple of masks and a configuration as a sorted tuple of slots.  Per
    color: the derived sets containing that color on ``delta - x`` slots and
    those containing ``X`` on ``x`` slots; per level ``i``: one slot of sets
    containing ``Ai``, the rest containing ``Bi``.

    A candidate with an empty slot names no configuration at all and is
    dropped, which is what the computed rewrite does too.  That happens only
    in corners where a label never occurs on a usable edge, for example
    ``A1`` when ``v[0] == 0`` and ``x == 0``.
    """
    if params.x + 2 > params.delta:
        raise DomainError("the node closed form needs x + 2 <= delta")
    if problem is None:
        problem = make_family_problem(params)
    idx = {n: i for i, n in enumerate(problem.alphabet)}
    atoms = predicted_re_atoms(params, problem)

    def containing(name: str) -> tuple[int, ...]:
        bit = idx[name]
        return tuple(sorted(m for m in atoms if m >> bit & 1))

    delta, x = params.delta, params.x
    xslots = [containing("X")] * x if x > 0 else []
    out: set[tuple[tuple[int, ...], ...]] = set()
    for c in family_colors(params):
        slots = [containing(color_name(c))] * (delta - x) + xslots
        if all(slots):
            out.add(tuple(sorted(slots)))
    for i in range(1, params.beta + 1):
        slots = [containing(f"A{i}")] + [containing(f"B{i}")] * (delta - 1)
        if all(slots):
            out.add(tuple(sorted(slots)))
    return frozenset(out)


# ---------------------------------------------------------------------------
# adapters from computed speedup results to source-mask form


def re_edge_as_mask_pairs(result: SpeedupResult) -> frozenset[tuple[int, int]]:
    """Computed derived edge configurations as unordered source-mask pairs."""
    pm = result.provenance_masks
    out = set()
    for cfg in result.problem.edges.configs:
        sides = []
        for slot in cfg:
            members = tuple(bits(slot))
            if len(members) != 1:
                raise DomainError("expected single-label edge slots from the rewrite")
            sides.append(pm[members[0]])
        out.add(tuple(sorted(sides)))
    return frozenset((a, b) for a, b in out)


def re_node_as_mask_configs(result: SpeedupResult
                            ) -> frozenset[tuple[tuple[int, ...], ...]]:
    """Computed derived node configurations with slots as source-mask sets."""
    pm = result.provenance_masks
    out = set()
    for cfg in result.problem.nodes.configs:
        slots = [tuple(sorted(pm[i] for i in bits(slot))) for slot in cfg]
        out.add(tuple(sorted(slots)))
    return frozenset(out)


def re_node_strength_mismatches(params: FamilyParams,
                                result: Optional[SpeedupResult] = None,
                                budget: Optional[int] = None
                                ) -> tuple[tuple[str, str], ...]:
    """Where node-side strength after the edge rewrite deviates from inclusion.

    For this family, a derived label is at least as strong as another under
    the rewritten node constraint exactly when its source label set includes
    the other's.  Returns the deviating ordered pairs (label, other) where
    "other at least as strong as label" came out different from
    "provenance of other includes provenance of label"; empty means the
    computed preorder is set inclusion on the nose.
    """
    if result is None:
        problem = make_family_problem(params)
        if budget is None:
            result = re(problem, max_labels=MAX_ALPHABET)
        else:
            result = re(problem, budget, max_labels=MAX_ALPHABET)
    prob = result.problem
    diagram = compute_strength(prob.nodes, len(prob.alphabet))
    pm = result.provenance_masks
    out = []
    for a, name_a in enumerate(prob.alphabet):
        for b, name_b in enumerate(prob.alphabet):
            want = pm[a] & ~pm[b] == 0
            if diagram.at_least_as_strong(b, a) != want:
                out.append((name_a, name_b))
    return tuple(out)


# ---------------------------------------------------------------------------
# the Z schema set


@dataclass(frozen=True)
class ZMember:
    """One relaxation target for the node constraint after a full speedup.

    ``config`` is a configuration over the intermediate alphabet (each slot a
    mask of derived edge-rewrite labels); ``roles`` names each slot's part in
    the translation back into the family: ``A``/``B`` for pointer members,
    ``schema`` for the color-carrying slots, ``pad`` for free slots.
    """

    kind: str  # "pointer" | "color" | "colorpad"
    level: int  # pointer/colorpad level i; 0 for plain color members
    color: Optional[Color]
    config: Config
    roles: tuple[str, ...]


def make_Z(params: FamilyParams, re_result: SpeedupResult) -> tuple[ZMember, ...]:
    """The Z set over the computed intermediate alphabet.

    With ``s = size(v) * (x + 1)`` (needs ``s + 1 <= delta``): one pointer
    member per level ``i`` (an ``Ai``-containing slot plus ``delta - 1``
    ``Bi``-containing slots); for each group-0 color, its containing sets on
    ``delta - s`` slots padded with ``s`` unrestricted slots; for each color
    ``c`` and level ``i`` from ``max(1, group(c))`` to ``beta``, the slot of
    sets containing both ``c`` and ``Bi`` or containing ``Ai``, again padded.
    Members are relaxation targets only; they need not be valid
    configurations of the rewritten problem themselves.
    """
    s = params.size * (params.x + 1)
    if s + 1 > params.delta:
        raise DomainError("the Z schema needs size(v) * (x + 1) + 1 <= delta")
    source = re_result.source
    inter = re_result.problem
    pm = re_result.provenance_masks
    idx = {n: i for i, n in enumerate(source.alphabet)}
    delta, beta = params.delta, params.beta
    full = (1 << len(inter.alphabet)) - 1

    def containing(*names: str) -> int:
        want = mask_of(idx[n] for n in names)
        return mask_of(i for i, m in enumerate(pm) if m & want == want)

    def a_or_cb(color: Color, i: int) -> int:
        got = 0
        abit = idx[f"A{i}"]
        want = mask_of((idx[color_name(color)], idx[f"B{i}"]))
        for k, m in enumerate(pm):
            if m >> abit & 1 or m & want == want:
                got |= 1 << k
        return got

    members: list[ZMember] = []
    for i in range(1, beta + 1):
        slots = [containing(f"A{i}")] + [containing(f"B{i}")] * (delta - 1)
        if not all(slots):
            # A level whose pointer label reaches no derived set (possible
            # when v[0] == 0 and x == 0) contributes no usable target.
            continue
        cfg = canon_config(slots)
        roles = _roles_for(cfg, slots, ["A"] + ["B"] * (delta - 1))
        members.append(ZMember("pointer", i, None, cfg, roles))
    for c in family_colors(params):
        if c[0] == 0:
            slots = [containing(color_name(c))] * (delta - s) + [full] * s
            if not all(slots):
                continue
            cfg = canon_config(slots)
            roles = _roles_for(cfg, slots, ["schema"] * (delta - s) + ["pad"] * s)
            members.append(ZMember("color", 0, c, cfg, roles))
    for c in family_colors(params):
        for i in range(max(1, c[0]), beta + 1):
            slots = [a_or_cb(c, i)] * (delta - s) + [full] * s
            if not all(slots):
                continue
            cfg = canon_config(slots)
            roles = _roles_for(cfg, slots, ["schema"] * (delta - s) + ["pad"] * s)
            members.append(ZMember("colorpad", i, c, cfg, roles))
    return tuple(members)


def _roles_for(cfg: Config, slots: list[int], roles: list[str]) -> tuple[str, ...]:
    """Align roles with the canonical slot order of ``cfg``.

    Slots with equal masks are interchangeable, so roles for equal masks are
    handed out in the order given.
    """
    remaining: dict[int, list[str]] = {}
    for slot, role in zip(slots, roles):
        remaining.setdefault(slot, []).append(role)
    return tuple(remaining[slot].pop(0) for slot in cfg)


@dataclass(frozen=True)
class ZReport:
    """Which speedup node configurations relax into which Z member."""

    ok: bool
    matched: tuple[tuple[Config, int], ...]  # (config, index into members)
    unmatched: tuple[Config, ...]
    members: tuple[ZMember, ...]


def verify_relaxation_to_Z(params: FamilyParams,
                           result: Optional[SpeedupResult] = None,
                           budget: Optional[int] = None) -> ZReport:
    """Check every node configuration after speedup relaxes into Z.

    ``result`` may carry a precomputed :func:`relim.roundelim.speedup` of
    this family member; otherwise one is computed here.
    """
    if result is None:
        result = family_speedup(params, budget)
    re_result, rere_result = result.steps
    members = make_Z(params, re_result)
    matched = []
    unmatched = []
    for cfg in rere_result.problem.nodes.configs:
        as_inter = tuple(_config_over_intermediate(rere_result, cfg))
        hit = None
        for k, member in enumerate(members):
            if relax_witness(as_inter, member.config) is not None:
                hit = k
                break
        if hit is None:
            unmatched.append(cfg)
        else:
            matched.append((cfg, hit))
    return ZReport(not unmatched, tuple(matched), tuple(unmatched), members)


def _config_over_intermediate(rere_result: SpeedupResult, cfg: Config) -> list[int]:
    """Rewrite a speedup node configuration over the intermediate alphabet."""
    pm = rere_result.provenance_masks
    out = []
    for slot in cfg:
        members = tuple(bits(slot))
        if len(members) != 1:
            raise DomainError("expected single-label node slots from the rewrite")
        out.append(pm[members[0]])
    return out


# ---------------------------------------------------------------------------
# speedup maps (zero-round reductions in both directions)


@dataclass
class SpeedupMap:
    """A zero-round reduction tying a family member to its speedup.

    ``path`` is ``"lower"`` (from the computed speedup of ``Pi(v, x)`` onto
    ``Pi(prefix_sum(v), size(v) * (x + 1))``) or ``"upper"`` (from
    ``Pi(prefix_sum(v), 0)`` onto the computed speedup of ``Pi(v, 0)``).
    ``base_params`` always names the member that was sped up and
    ``next_params`` the prefix-summed member; ``from_problem`` and
    ``to_problem`` are the concrete reduction endpoints in reduction
    direction.  ``node_map`` and ``label_map`` feed
    :func:`relim.roundelim.check_zero_round_reduction` directly;
    ``color_pairing`` documents which (color, level) pair every new color
    stands for.
    """

    path: str
    base_params: FamilyParams
    next_params: FamilyParams
    from_problem: Problem
    to_problem: Problem
    node_map: dict[Config, Config]
    label_map: dict[tuple[Config, int], int]
    color_pairing: tuple[tuple[str, Color, int], ...]
    speedup_result: SpeedupResult


def color_pairing(params: FamilyParams) -> tuple[tuple[str, Color, int], ...]:
    """New color names for ``prefix_sum(v)`` with the (color, level) each means.

    Level ``i`` collects the pairs (c, i) over colors of groups up to ``i``
    (level 0 only group 0), ordered by the color's group then index; the
    position within the level is the new color's index.
    """
    colors = family_colors(params)
    out = []
    for i in range(0, params.beta + 1):
        j = 0
        for c in sorted(colors):
            if c[0] > i:
                continue
            j += 1
            out.append((color_name((i, j)), c, i))
    return tuple(out)


def family_speedup(params: FamilyParams,
                    budget: Optional[int] = None) -> SpeedupResult:
    """Full speedup of a family member, with room for its larger alphabets."""
    problem = make_family_problem(params)
    if budget is None:
        return speedup(problem, max_labels=MAX_ALPHABET)
    return speedup(problem, budget, max_labels=MAX_ALPHABET)


def speedup_map(params: FamilyParams, path: str = "lower",
                result: Optional[SpeedupResult] = None,
                budget: Optional[int] = None) -> SpeedupMap:
    """Build the zero-round reduction for one speedup of a family member."""
    if path not in ("lower", "upper"):
        raise DomainError("path must be 'lower' or 'upper'")
    if result is None:
        result = family_speedup(params, budget)
    if path == "lower":
        return _lower_map(params, result)
    return _upper_map(params, result)


def _pairing_index(params: FamilyParams) -> dict[tuple[Color, int], str]:
    return {(c, i): name for name, c, i in color_pairing(params)}


def _lower_map(params: FamilyParams, result: SpeedupResult) -> SpeedupMap:
    """Relax each speedup node configuration into Z and read off the target."""
    s = params.size * (params.x + 1)
    to_params = FamilyParams(params.delta, params.beta, prefix_sum(params.v), s)
    to_problem = make_family_problem(to_params)
    from_problem = result.problem
    re_result, rere_result = result.steps
    members = make_Z(params, re_result)
    pairing = _pairing_index(params)
    tid = {n: i for i, n in enumerate(to_problem.alphabet)}

    node_map: dict[Config, Config] = {}
    label_map: dict[tuple[Config, int], int] = {}
    for cfg in from_problem.nodes.configs:
        as_inter = tuple(_config_over_intermediate(rere_result, cfg))
        chosen = None
        witness = None
        for member in members:
            witness = relax_witness(as_inter, member.config)
            if witness is not None:
                chosen = member
                break
        if chosen is None:
            raise DomainError(
                "a speedup node configuration relaxes into no Z member; "
                "the lower map does not exist for these parameters")
        targets = []
        for i in range(len(cfg)):
            role = chosen.roles[witness[i]]
            if role == "A":
                lab = tid[f"A{chosen.level}"]
            elif role == "B":
                lab = tid[f"B{chosen.level}"]
            elif role == "schema":
                lab = tid[pairing[(chosen.color, chosen.level)]]
            else:  # pad
                lab = tid["X"]
            targets.append(lab)
            label_map[(cfg, i)] = lab
        node_map[cfg] = canon_config(1 << t for t in targets)
    return SpeedupMap("lower", params, to_params, from_problem, to_problem,
                      node_map, label_map, color_pairing(params), result)


def _upper_map(params: FamilyParams, result: SpeedupResult) -> SpeedupMap:
    """Send the next family member onto the computed speedup, color by color."""
    if params.x != 0:
        raise DomainError("the upper map needs x = 0")
    if params.v[0] < 1:
        # Without a group-0 color no derived set contains A1, so the pointer
        # configuration A1 B1^(delta-1) of the target has nowhere to go.
        raise DomainError("the upper map needs at least one group-0 color")
    to_params = FamilyParams(params.delta, params.beta, prefix_sum(params.v), 0)
    from_problem = make_family_problem(to_params)
    to_problem = result.problem
    re_result, rere_result = result.steps
    source = re_result.source
    idx = {n: i for i, n in enumerate(source.alphabet)}
    inter_pm = re_result.provenance_masks
    final_pm = rere_result.provenance_masks
    by_mask = {m: i for i, m in enumerate(final_pm)}

    def containing(*names: str) -> int:
        want = mask_of(idx[n] for n in names)
        return mask_of(i for i, m in enumerate(inter_pm) if m & want == want)

    def a_or_cb(color: Color, i: int) -> int:
        got = 0
        abit = idx[f"A{i}"]
        want = mask_of((idx[color_name(color)], idx[f"B{i}"]))
        for k, m in enumerate(inter_pm):
            if m >> abit & 1 or m & want == want:
                got |= 1 << k
        return got

    def atom_for(mask: int, what: str) -> int:
        got = by_mask.get(mask)
        if got is None:
            raise DomainError(
                f"the speedup alphabet has no label for the {what} set; "
                "the upper map does not exist for these parameters")
        return got

    pairing = _pairing_index(params)
    fid = {n: i for i, n in enumerate(from_problem.alphabet)}
    node_map: dict[Config, Config] = {}
    label_map: dict[tuple[Config, int], int] = {}

    # color configurations of the next member: one atom repeated delta times
    for (c, i), new_name in pairing.items():
        cfg = canon_config([1 << fid[new_name]] * params.delta)
        if i == 0:
            atom = atom_for(containing(color_name(c)), f"color {color_name(c)}")
        else:
            atom = atom_for(a_or_cb(c, i),
                            f"level-{i} schema of color {color_name(c)}")
        node_map[cfg] = canon_config([1 << atom] * params.delta)
        for k in range(params.delta):
            label_map[(cfg, k)] = atom
    # pointer configurations map onto the pointer atoms
    for i in range(1, params.beta + 1):
        cfg = canon_config([1 << fid[f"A{i}"]] + [1 << fid[f"B{i}"]] * (params.delta - 1))
        a_atom = atom_for(containing(f"A{i}"), f"pointer head A{i}")
        b_atom = atom_for(containing(f"B{i}"), f"pointer tail B{i}")
        image = canon_config([1 << a_atom] + [1 << b_atom] * (params.delta - 1))
        node_map[cfg] = image
        a_slot = 1 << fid[f"A{i}"]
        for k, slot in enumerate(cfg):
            label_map[(cfg, k)] = a_atom if slot == a_slot else b_atom
    return SpeedupMap("upper", params, to_params, from_problem, to_problem,
                      node_map, label_map, color_pairing(params), result)


# ---------------------------------------------------------------------------
# iterated sequences


@dataclass(frozen=True)
class LowerBoundSequence:
    """Parameters of the speedup chain used for the lower bound argument."""

    delta: int
    beta: int
    t: int
    steps: tuple[FamilyParams, ...]  # members for j = 0..t


def lower_bound_rounds(delta: int, beta: int) -> int:
    """The step count ``t = floor(log2(delta) / (2 beta log2 log2 delta))``."""
    if delta < 3:
        raise DomainError("delta must be at least 3 for the bound to make sense")
    if beta < 1:
        raise DomainError("beta must be at least 1")
    return int(0.5 * math.log2(delta) / (beta * math.log2(math.log2(delta))))


def lower_bound_sequence(delta: int, beta: int, *,
                         check_zero_round: bool = False) -> LowerBoundSequence:
    """The family chain ``Pi_0 .. Pi_t`` starting at one group-0 color.

    ``v`` starts at ``[1, 0, .., 0]`` and prefix-sums each step while ``x``
    grows as ``size(v) * (x + 1)``; ``t`` comes from
    :func:`lower_bound_rounds` and must be at least ``beta``.  The growth
    invariant ``size(v) * (x + 1) + 1 <= delta`` is verified for every step,
    so each member is one speedup away from the next on the parameter level
    without ever constructing a problem; with ``check_zero_round`` the
    members before step ``t`` are constructed and confirmed not zero-round
    solvable (only sensible for small ``delta``).
    """
    t = lower_bound_rounds(delta, beta)
    if beta > t:
        raise DomainError(
            f"beta = {beta} exceeds the available step count t = {t} at delta = {delta}")
    v = (1,) + (0,) * beta
    x = 0
    steps = [FamilyParams(delta, beta, v, x)]
    for j in range(t):
        if family_size(v) * (x + 1) + 1 > delta:
            raise DomainError(
                f"growth invariant failed at step {j}: "
                f"size {family_size(v)} and x {x} exceed delta {delta}")
        x = family_size(v) * (x + 1)
        v = prefix_sum(v)
        steps.append(FamilyParams(delta, beta, v, x))
    seq = LowerBoundSequence(delta, beta, t, tuple(steps))
    if check_zero_round:
        for j in range(t):
            zr = zero_round_solvable(make_family_problem(seq.steps[j]))
            if zr.solvable:
                raise DomainError(
                    f"member {j} of the chain is zero-round solvable; "
                    "the lower bound argument does not apply")
    return seq
