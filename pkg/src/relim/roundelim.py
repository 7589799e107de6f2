"""Speedup transformers for locally checkable labeling problems.

One communication round is eliminated by a pair of dual rewrites.  The first
(:func:`re`) makes the edge side universal: the derived alphabet consists of
label sets, and a derived edge configuration must work for every choice inside
its two sets, while a derived node configuration only needs one good choice
per slot.  The second (:func:`rere`) is the mirror image with the node side
universal.  Their composition (:func:`speedup`) maps a problem solvable in t
rounds to one solvable in t-1 rounds on trees and high-girth regular graphs,
and back.

Both rewrites reduce to one search: given the configurations of a constraint,
find all maximal boxes, where a box is a configuration of label sets whose
full slotwise product stays inside the constraint's expansion.  The search
never expands label tuples.  It runs iterated consensus over canonical set
tuples, all in machine integers: merging two boxes along a matching of their
slots widens one slot and narrows the rest, and every merge result that no
known box absorbs feeds the worklist until nothing new appears; see
:func:`maximal_boxes`.  It carries an explicit step budget because the box
count is exponential in the worst case.
"""

from __future__ import annotations

import bisect
import heapq

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .core import (
    Budget,
    BudgetError,
    Config,
    Constraint,
    DEFAULT_BUDGET,
    DEFAULT_DERIVED_CAP,
    DomainError,
    Problem,
    StrengthDiagram,
    bits,
    canon_config,
    closure,
    compute_strength,
    constraint_permits,
    expand_config,
    expand_constraint,
    make_constraint,
    make_problem,
    mask_of,
    match_slots,
    popcount,
)

__all__ = [
    "DEFAULT_BUDGET", "ReductionReport", "SpeedupResult", "ZeroRound",
    "check_zero_round_reduction", "maximal_boxes", "re", "relax_witness",
    "relaxes_to", "rere", "speedup", "zero_round_solvable",
]

try:
    from . import _boxes as _accel
except ImportError:  # the compiled engine is optional
    _accel = None

# Escape hatch for tests and differential checks: force the pure-Python
# closure engine even when the compiled one is importable.
FORCE_PURE_ENGINE = False

_ACCEL_MAX_WIDTH = 12
_ACCEL_MAX_BITS = 63


# ---------------------------------------------------------------------------
# maximal boxes

def _slot_groups(cfg: Sequence[int]) -> tuple[tuple[int, int], ...]:
    """Runs of equal masks in a sorted cube, as (mask, count) pairs."""
    out: list[list[int]] = []
    for m in cfg:
        if out and out[-1][0] == m:
            out[-1][1] += 1
        else:
            out.append([m, 1])
    return tuple((m, n) for m, n in out)


_SEEN_CAP = 2_000_000

_NOHAS: dict[int, list[int]] = {}


def _nohas(w: int) -> list[int]:
    """Per slot index, the bitmap of slot subsets avoiding that slot."""
    tbl = _NOHAS.get(w)
    if tbl is None:
        tbl = []
        for j in range(w):
            m = 0
            for sub in range(1 << w):
                if not sub >> j & 1:
                    m |= 1 << sub
            tbl.append(m)
        _NOHAS[w] = tbl
    return tbl


def _fits(c: Sequence[int], p: Sequence[int], nohas: Optional[list[int]]) -> bool:
    """Whether some injection takes each slot of ``c`` into a wider ``p`` slot.

    Runs the matching as a reachability sweep over bitmaps of used-slot
    subsets, one integer per step.  ``nohas`` is the table for the width,
    or None to fall back to the general matcher when the width makes the
    bitmaps large.
    """
    if nohas is None:
        return match_slots(c, p) is not None
    reach = 1
    w = len(p)
    for a in c:
        nxt = 0
        for j in range(w):
            if a & p[j] == a:
                nxt |= (reach & nohas[j]) << (1 << j)
        if not nxt:
            return False
        reach = nxt
    return True


def _merge(ga: tuple[tuple[int, int], ...], gb: tuple[tuple[int, int], ...],
           bud: Budget) -> list[tuple[int, ...]]:
    """Consensus cubes of two canonical cubes given as slot groups.

    Every way of pairing the slots of one cube with the slots of the other
    is a nonnegative matrix with the group counts as margins.  A pairing
    with two or more empty meets merges nothing.  With exactly one, the
    merge takes the union at that pair and the meet elsewhere.  With none,
    any pair may take the union, except that a nested pair only rebuilds a
    piece of a parent and is skipped without being built.
    """
    r, s = len(ga), len(gb)
    meets = [[ga[i][0] & gb[j][0] for j in range(s)] for i in range(r)]
    zmask = 0
    for i in range(r):
        mrow = meets[i]
        for j in range(s):
            if not mrow[j]:
                zmask |= 1 << (i * s + j)
    tables = _tables_for(tuple(n for _, n in ga), tuple(n for _, n in gb),
                         zmask)
    out: list[tuple[int, ...]] = []
    bud.spend(len(tables))
    for used, conflicts in tables:
        if conflicts:
            cube: list[int] = []
            for i, j, n in used:
                if meets[i][j]:
                    cube.extend((meets[i][j],) * n)
                else:
                    cube.append(ga[i][0] | gb[j][0])
            out.append(tuple(sorted(cube)))
            continue
        for wi, wj, _ in used:
            a, b = ga[wi][0], gb[wj][0]
            m = a & b
            if m == a or m == b:
                continue
            cube = []
            for i, j, n in used:
                if i == wi and j == wj:
                    cube.append(a | b)
                    n -= 1
                cube.extend((meets[i][j],) * n)
            out.append(tuple(sorted(cube)))
    return out


_TABLES: dict[tuple[tuple[int, ...], tuple[int, ...], int],
              tuple[tuple[tuple[tuple[int, int, int], ...], int], ...]] = {}


def _tables_for(rowcnt: tuple[int, ...], colcnt: tuple[int, ...], zmask: int
                ) -> tuple[tuple[tuple[tuple[int, int, int], ...], int], ...]:
    """All slot pairings for the given group counts and empty-meet cells.

    A pairing is a nonnegative matrix with the group counts as margins and
    at most one unit on an empty-meet cell.  Pairings depend only on this
    shape, never on the masks, so they cache globally.  Each comes back as
    its used cells (i, j, n) with the count placed on empty-meet cells.
    """
    key = (rowcnt, colcnt, zmask)
    got = _TABLES.get(key)
    if got is not None:
        return got
    r, s = len(rowcnt), len(colcnt)
    colrem = list(colcnt)
    mat = [[0] * s for _ in range(r)]
    acc: list[tuple[tuple[tuple[int, int, int], ...], int]] = []

    def fill(i: int, j: int, left: int, conflicts: int) -> None:
        if j == s:
            if left:
                return
            if i + 1 < r:
                fill(i + 1, 0, rowcnt[i + 1], conflicts)
                return
            acc.append((tuple((a, b, mat[a][b])
                              for a in range(r) for b in range(s)
                              if mat[a][b]), conflicts))
            return
        zero = zmask >> (i * s + j) & 1
        top = left if left < colrem[j] else colrem[j]
        for v in range(top + 1):
            nc = conflicts + v if zero else conflicts
            if nc > 1:
                break
            mat[i][j] = v
            colrem[j] -= v
            fill(i, j + 1, left - v, nc)
            colrem[j] += v
            mat[i][j] = 0

    fill(0, 0, rowcnt[0], 0)
    got = tuple(acc)
    _TABLES[key] = got
    return got


def maximal_boxes(configs: Iterable[Config], width: int,
                  budget: Optional[Budget | int] = None,
                  diagram: Optional[StrengthDiagram] = None) -> list[Config]:
    """All maximal boxes of the union of the given configurations.

    A box is a width-``width`` tuple of nonempty label masks whose entire
    slotwise product lies inside the union of the configurations' expansions;
    maximal means no box strictly above it under slotwise subset matching.
    Nothing is expanded.  The engine is iterated consensus on canonical
    slot-sorted cubes.  Merging two cubes along a matching of their slots
    takes the union at one matched pair and the meet elsewhere; a merge with
    two or more empty meets produces nothing, and a merge whose widened pair
    is nested only rebuilds part of a parent and is skipped.  Each distinct
    cube is examined once, strongest first, against an antichain of
    survivors indexed by slot-union mask, and newcomers that no survivor
    absorbs join the worklist.  At the fixpoint the antichain is exactly the
    maximal boxes.  A cube must also merge with itself, since a non-identity
    matching of a cube against its own slots can produce a cube nobody
    dominates.  When the strength ``diagram`` of the constraint the
    configurations came from is given, slots are closed under it up front,
    which merges continuations without changing the union.
    """
    bud = Budget.ensure(budget)
    start: list[Config] = []
    seen_cfg: set[Config] = set()
    for cfg in configs:
        if len(cfg) != width:
            raise DomainError("configuration width mismatch")
        if diagram is not None:
            cfg = canon_config(closure(m, diagram) for m in cfg)
        if cfg not in seen_cfg:
            seen_cfg.add(cfg)
            start.append(cfg)
    if not start:
        return []
    if width == 0:
        return [()]

    if _accel is not None and not FORCE_PURE_ENGINE and width <= _ACCEL_MAX_WIDTH:
        top = 0
        for cfg in start:
            for m in cfg:
                top |= m
        if top < (1 << _ACCEL_MAX_BITS):
            allowance = min(max(bud.left, 0), 1 << 62)
            found, used = _accel.maximal(start, width, allowance)
            bud.spend(used)
            if found is not None:
                return found
            # the engine stopped on its allowance; the spend above raises
            # in every practical case, this covers a capped allowance
            raise BudgetError(
                f"search budget of {bud.total} steps exceeded; "
                "pass a larger budget to continue")

    # the evolving antichain, bucketed by slot-union mask; a dominating
    # cube's union covers the dominated cube's union, so the bucket key
    # prefilters both directions of the dominance scans.  The slot matching
    # of a dominance maps the k widest slots of the dominated cube into k
    # distinct slots of the dominator, so the sorted popcount profiles must
    # compare slotwise; that test is cheap and screens out most pairs.
    # Bucket entries are (-weight, profile, cube), kept sorted so weight
    # runs downward and a scan can stop at the first too-light entry.
    primes: dict[int, list[tuple[int, tuple[int, ...], tuple[int, ...]]]] = {}
    prime_set: set[tuple[int, ...]] = set()
    groups_of: dict[tuple[int, ...], tuple[tuple[int, int], ...]] = {}
    nohas = _nohas(width) if width <= 10 else None

    def shape(c: tuple[int, ...]) -> tuple[int, int, tuple[int, ...]]:
        u = 0
        for m in c:
            u |= m
        prof = tuple(sorted(map(popcount, c), reverse=True))
        return u, sum(prof), prof

    def absorbed(c: tuple[int, ...], cu: int, cw: int,
                 pc: tuple[int, ...]) -> bool:
        ncw = -cw
        for pu, bucket in primes.items():
            if cu & pu != cu:
                continue
            bud.spend(len(bucket))
            for nwp, pp, p in bucket:
                if nwp > ncw:
                    break
                for k in range(width):
                    if pc[k] > pp[k]:
                        break
                else:
                    # equal profiles with a dominance force equal cubes,
                    # and equal cubes never meet here
                    if pc != pp and _fits(c, p, nohas):
                        return True
        return False

    def drop_dominated(c: tuple[int, ...], cu: int, cw: int,
                       pc: tuple[int, ...]) -> None:
        ncw = -cw
        for m in list(primes):
            if m & cu != m:
                continue
            bucket = primes[m]
            pos = bisect.bisect_left(bucket, (ncw,))
            if pos >= len(bucket):
                continue
            bud.spend(len(bucket) - pos)
            kept = bucket[:pos]
            for entry in bucket[pos:]:
                pp = entry[1]
                for k in range(width):
                    if pp[k] > pc[k]:
                        break
                else:
                    if pp != pc and _fits(entry[2], c, nohas):
                        prime_set.discard(entry[2])
                        groups_of.pop(entry[2], None)
                        remember(entry[2])
                        continue
                kept.append(entry)
            if len(kept) != len(bucket):
                if kept:
                    primes[m] = kept
                else:
                    del primes[m]

    def insert(c: tuple[int, ...], cu: int, cw: int,
               pc: tuple[int, ...]) -> None:
        bucket = primes.get(cu)
        if bucket is None:
            primes[cu] = bucket = []
        bisect.insort(bucket, (-cw, pc, c))
        prime_set.add(c)
        groups_of[c] = _slot_groups(c)

    # A cube that was ever absorbed stays absorbed: a dropped dominator is
    # itself dominated by its replacement.  The seen set therefore only
    # saves rescans, so it can be cleared outright when it grows past the
    # cap; queued cubes and antichain members are tracked exactly.
    seen: set[tuple[int, ...]] = set()

    def remember(c: tuple[int, ...]) -> None:
        seen.add(c)
        if len(seen) > _SEEN_CAP:
            seen.clear()

    heap: list[tuple[int, tuple[int, ...]]] = []
    pending: set[tuple[int, ...]] = set(start)
    for c in start:
        heapq.heappush(heap, (-shape(c)[1], c))
    while heap:
        _, c = heapq.heappop(heap)
        pending.discard(c)
        bud.spend()
        if c in prime_set:
            continue
        cu, cw, pc = shape(c)
        # the antichain may have strengthened since this cube was queued
        if absorbed(c, cu, cw, pc):
            remember(c)
            continue
        drop_dominated(c, cu, cw, pc)
        insert(c, cu, cw, pc)
        gc = groups_of[c]
        partners = [(entry[2], groups_of[entry[2]])
                    for bucket in primes.values() for entry in bucket]
        for p, gp in partners:
            for q in _merge(gc, gp, bud):
                if q in seen or q in pending or q in prime_set:
                    continue
                qu, qw, qp = shape(q)
                if absorbed(q, qu, qw, qp):
                    remember(q)
                else:
                    pending.add(q)
                    heapq.heappush(heap, (-qw, q))

    return sorted(prime_set)


# ---------------------------------------------------------------------------
# relaxation


def relax_witness(a: Sequence[int], b: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Slot assignment showing ``a`` relaxes to ``b``, or None.

    ``out[i]`` is the slot of ``b`` that slot ``i`` of ``a`` maps into.
    """
    return match_slots(a, b)


def relaxes_to(a: Sequence[int], b: Sequence[int]) -> bool:
    """Does every choice allowed by ``a`` remain allowed by ``b``, slotwise?

    True when the slots of ``a`` can be matched one-to-one into slots of
    ``b`` that include them.  Replacing a configuration by one it relaxes to
    can only make a constraint more permissive.
    """
    return match_slots(a, b) is not None


# ---------------------------------------------------------------------------
# the rewrites


@dataclass(frozen=True)
class SpeedupResult:
    """A derived problem together with how it was derived.

    ``provenance_masks[i]`` is the label set over the source alphabet that
    derived label ``i`` stands for.  ``diagram_used`` is the strength diagram
    of the constraint that was made universal (edge side for :func:`re`,
    node side for :func:`rere`); its right-closed sets are exactly the
    candidate slots of the universal side.  For the composed
    :func:`speedup`, ``steps`` holds the two stages and the provenance masks
    refer to the intermediate alphabet.
    """

    problem: Problem
    source: Problem
    diagram_used: StrengthDiagram
    provenance_masks: tuple[int, ...]
    steps: tuple["SpeedupResult", ...] = ()

    def grounded_provenance(self) -> tuple[frozenset[frozenset[str]], ...]:
        """Per final label, its meaning over the original alphabet.

        For a single rewrite this is a set of singleton name sets; for the
        composed speedup each final label denotes a set of sets of original
        labels, obtained by chaining the two provenance layers.
        """
        if not self.steps:
            return tuple(
                frozenset(frozenset((self.source.alphabet[i],)) for i in bits(m))
                for m in self.provenance_masks)
        first, second = self.steps
        inner = first.provenance_masks
        out = []
        for m in second.provenance_masks:
            out.append(frozenset(
                frozenset(first.source.alphabet[j] for j in bits(inner[i]))
                for i in bits(m)))
        return tuple(out)


def _derived_names(source: Problem, atoms: Sequence[int]) -> list[str]:
    """Readable names for derived labels: member names joined by underscores.

    Collisions (possible because names may already contain underscores) get
    a numeric suffix; order of ``atoms`` decides who keeps the plain name.
    """
    taken: set[str] = set()
    names = []
    for mask in atoms:
        base = "_".join(source.alphabet[i] for i in bits(mask))
        name = base
        k = 2
        while name in taken:
            name = f"{base}_v{k}"
            k += 1
        taken.add(name)
        names.append(name)
    return names


def _build_derived(source: Problem, universal: list[Config],
                   existential_base: Constraint,
                   universal_is_nodes: bool,
                   max_labels: int,
                   budget: Budget) -> tuple[Problem, tuple[int, ...]]:
    """Assemble the derived problem from the universal-side boxes.

    ``universal`` holds the maximal boxes (configs of masks over the source
    alphabet); its distinct slots become the derived alphabet.  Each base
    configuration of the other constraint turns into one condensed derived
    configuration per expanded pick, slot by slot: a source label l becomes
    the set of derived labels whose mask contains l, and a pick is dropped
    when some slot has none.
    """
    atoms = sorted({slot for box in universal for slot in box})
    if len(atoms) > max_labels:
        raise DomainError(
            f"derived alphabet of {len(atoms)} label sets exceeds "
            f"the cap of {max_labels}")
    atom_index = {m: i for i, m in enumerate(atoms)}
    names = _derived_names(source, atoms)
    provenance = {names[i]: source.names_of_mask(atoms[i]) for i in range(len(atoms))}

    universal_cfgs = [tuple(1 << atom_index[slot] for slot in box) for box in universal]

    contains_label = []
    for a in range(len(source.alphabet)):
        budget.spend(len(atoms))
        contains_label.append(mask_of(i for i, m in enumerate(atoms) if m >> a & 1))

    existential_cfgs = []
    for base_cfg in existential_base.configs:
        est = 1
        for m in base_cfg:
            est *= popcount(m)
        budget.spend(est)  # abandon before materializing a huge expansion
        for base in expand_config(base_cfg):
            slots = [contains_label[a] for a in base]
            if any(s == 0 for s in slots):
                continue
            existential_cfgs.append(slots)

    if universal_is_nodes:
        node_cfgs: Iterable[Iterable[int]] = universal_cfgs
        edge_cfgs: Iterable[Iterable[int]] = existential_cfgs
    else:
        node_cfgs = existential_cfgs
        edge_cfgs = universal_cfgs
    derived = make_problem(names, source.delta, node_cfgs, edge_cfgs, provenance)
    # provenance_masks must follow the canonical (sorted-name) label order
    pm = tuple(source.mask_of_names(derived.provenance[i])
               for i in range(len(derived.alphabet)))
    return derived, pm


def re(problem: Problem, budget: int = DEFAULT_BUDGET,
       max_labels: int = DEFAULT_DERIVED_CAP) -> SpeedupResult:
    """Universal edge side: derived labels are label sets of the source.

    The derived edge constraint lists every maximal pair of sets whose full
    product lies in the source edge constraint (the slots are right-closed
    in the source edge strength order by construction).  The derived node
    constraint keeps, for each expanded source node configuration, the
    condensed configuration offering per slot all derived sets containing
    that slot's label.
    """
    bud = Budget(budget)
    diagram = compute_strength(problem.edges, len(problem.alphabet), bud)
    boxes = maximal_boxes(problem.edges.configs, 2, bud, diagram)
    derived, pm = _build_derived(problem, boxes, problem.nodes,
                                 universal_is_nodes=False, max_labels=max_labels,
                                 budget=bud)
    return SpeedupResult(derived, problem, diagram, pm)


def rere(problem: Problem, budget: int = DEFAULT_BUDGET,
         max_labels: int = DEFAULT_DERIVED_CAP) -> SpeedupResult:
    """Universal node side: the mirror image of :func:`re`."""
    bud = Budget(budget)
    diagram = compute_strength(problem.nodes, len(problem.alphabet), bud)
    boxes = maximal_boxes(problem.nodes.configs, problem.delta, bud, diagram)
    derived, pm = _build_derived(problem, boxes, problem.edges,
                                 universal_is_nodes=True, max_labels=max_labels,
                                 budget=bud)
    return SpeedupResult(derived, problem, diagram, pm)


def speedup(problem: Problem, budget: int = DEFAULT_BUDGET,
            max_labels: int = DEFAULT_DERIVED_CAP) -> SpeedupResult:
    """One full round elimination: :func:`re` then :func:`rere`.

    On Delta-regular trees and high-girth Delta-regular graphs the result is
    solvable exactly one round faster than the input (for inputs that need at
    least one round).
    """
    first = re(problem, budget, max_labels)
    second = rere(first.problem, budget, max_labels)
    return SpeedupResult(second.problem, problem, second.diagram_used,
                         second.provenance_masks, steps=(first, second))


# ---------------------------------------------------------------------------
# zero-round solvability


@dataclass(frozen=True)
class ZeroRound:
    """Outcome of the zero-round check, with the first witness if any."""

    solvable: bool
    witness: Optional[tuple[int, ...]] = None

    def witness_names(self, problem: Problem) -> Optional[tuple[str, ...]]:
        if self.witness is None:
            return None
        return tuple(problem.alphabet[a] for a in self.witness)


def zero_round_solvable(problem: Problem,
                        budget: Optional[int] = None) -> ZeroRound:
    """Can every node output one fixed configuration with no communication?

    All nodes share the same expanded node configuration c; any two ports of
    any two nodes may face each other across an edge, so every pair of labels
    from the support of c, including a label with itself regardless of its
    multiplicity, must be an edge configuration.  Scans expanded node
    configurations in canonical order and reports the first success.  The
    scan is budgeted: a problem whose node constraint expands beyond the
    allowance raises :class:`~relim.core.BudgetError`.
    """
    bud = Budget.ensure(budget)
    edge_ok: set[tuple[int, ...]] = set()
    for cfg in problem.edges.configs:
        bud.spend(popcount(cfg[0]) * popcount(cfg[1]))
        edge_ok.update(expand_config(cfg))
    cands: set[tuple[int, ...]] = set()
    for cfg in problem.nodes.configs:
        est = 1
        for m in cfg:
            est *= popcount(m)
        bud.spend(est)
        cands.update(expand_config(cfg))
    for cand in sorted(cands):
        bud.spend()
        support = sorted(set(cand))
        good = all(
            (a, b) in edge_ok
            for i, a in enumerate(support) for b in support[i:])
        if good:
            return ZeroRound(True, cand)
    return ZeroRound(False, None)


# ---------------------------------------------------------------------------
# zero-round reductions


@dataclass(frozen=True)
class ReductionReport:
    """Outcome of checking a zero-round reduction between two problems.

    ``ok`` is True when the node map covers every source node configuration,
    maps into the target node constraint, agrees with the slot label map, and
    every reachable pair of mapped edge labels is a target edge
    configuration.  The tuples carry the offending items otherwise.
    """

    ok: bool
    missing_node_configs: tuple[Config, ...]
    bad_node_images: tuple[tuple[Config, Config], ...]
    incoherent_slots: tuple[Config, ...]
    edge_violations: tuple[tuple[int, int, Config, int, Config, int, int, int], ...]
    pairs_checked: int

    def summary(self) -> str:
        if self.ok:
            return f"ok ({self.pairs_checked} edge label pairs checked)"
        parts = []
        if self.missing_node_configs:
            parts.append(f"{len(self.missing_node_configs)} node configurations unmapped")
        if self.bad_node_images:
            parts.append(f"{len(self.bad_node_images)} node images outside the target")
        if self.incoherent_slots:
            parts.append(f"{len(self.incoherent_slots)} label maps disagree with node images")
        if self.edge_violations:
            parts.append(f"{len(self.edge_violations)} edge label pairs violate the target")
        return "; ".join(parts)


def check_zero_round_reduction(
        from_problem: Problem, to_problem: Problem,
        node_map: Mapping[Config, Sequence[int]],
        label_map: Mapping[tuple[Config, int], int]) -> ReductionReport:
    """Verify a zero-round reduction from one problem onto another.

    ``node_map`` sends each node configuration of ``from_problem`` (exactly
    as stored, canonical) to a configuration over ``to_problem``;
    ``label_map`` sends each slot of each source node configuration to the
    target label its port outputs.  Soundness of the edge side: whenever two
    slots of two (not necessarily distinct) source node configurations can
    carry labels that form a source edge configuration, the two mapped labels
    must form a target edge configuration.  Nodes of both problems must have
    the same degree.
    """
    if from_problem.delta != to_problem.delta:
        raise DomainError("reduction endpoints must share delta")

    missing = tuple(c for c in from_problem.nodes.configs if c not in node_map)
    bad_images = []
    incoherent = []
    for cfg in from_problem.nodes.configs:
        if cfg in missing:
            continue
        image = canon_config(node_map[cfg])
        if not all(constraint_permits(to_problem.nodes,
                                      tuple(1 << a for a in pick))
                   for pick in expand_config(image)):
            bad_images.append((cfg, image))
        slots = []
        complete = True
        for i in range(len(cfg)):
            if (cfg, i) not in label_map:
                complete = False
                break
            slots.append(1 << label_map[(cfg, i)])
        if not complete or canon_config(slots) != image:
            incoherent.append(cfg)

    # occurrences[a]: slots that can carry source label a
    occurrences: dict[int, list[tuple[Config, int]]] = {}
    for cfg in from_problem.nodes.configs:
        for i, slot in enumerate(cfg):
            for a in bits(slot):
                occurrences.setdefault(a, []).append((cfg, i))

    pair_cache: dict[tuple[int, int], bool] = {}

    def pair_ok(m1: int, m2: int) -> bool:
        key = (min(m1, m2), max(m1, m2))
        got = pair_cache.get(key)
        if got is None:
            got = constraint_permits(to_problem.edges, (1 << key[0], 1 << key[1]))
            pair_cache[key] = got
        return got

    violations = []
    pairs_checked = 0
    for (a, b) in sorted(expand_constraint(from_problem.edges)):
        for (cfg1, i) in occurrences.get(a, ()):
            for (cfg2, j) in occurrences.get(b, ()):
                if (cfg1, i) not in label_map or (cfg2, j) not in label_map:
                    continue
                m1 = label_map[(cfg1, i)]
                m2 = label_map[(cfg2, j)]
                pairs_checked += 1
                if not pair_ok(m1, m2):
                    violations.append((a, b, cfg1, i, cfg2, j, m1, m2))

    ok = not (missing or bad_images or incoherent or violations)
    return ReductionReport(ok, missing, tuple(bad_images), tuple(incoherent),
                           tuple(violations), pairs_checked)
