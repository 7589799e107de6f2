"""Label masks, constraints, the strength preorder, and the text format."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relim import (
    BudgetError,
    DomainError,
    ParseError,
    expand_constraint,
    make_constraint,
    make_problem,
    parse_config,
    parse_problem,
    problem_from_json,
    problem_to_json,
    problems_equivalent,
    prune_unused_labels,
    rename_labels,
    serialize_problem,
)
from relim.core import (
    Budget,
    StrengthDiagram,
    bits,
    canon_config,
    closure,
    compute_strength,
    constraint_permits,
    contained_in,
    enumerate_right_closed,
    expand_config,
    is_right_closed,
    mask_of,
    match_slots,
    popcount,
    reduce_cover,
)

from conftest import load_fixture


# ---------------------------------------------------------------------------
# bit helpers


def test_mask_of_lists_and_bits_round_trip():
    assert mask_of([0, 3, 5]) == 0b101001
    assert list(bits(0b101001)) == [0, 3, 5]
    assert popcount(0b101001) == 3
    assert mask_of([]) == 0
    assert list(bits(0)) == []


def test_canon_config_sorts_slots_by_mask():
    assert canon_config([0b110, 0b001, 0b010]) == (0b001, 0b010, 0b110)


def test_canon_config_rejects_empty_slot_and_empty_config():
    with pytest.raises(DomainError):
        canon_config([0b01, 0])
    with pytest.raises(DomainError):
        canon_config([])


# ---------------------------------------------------------------------------
# constraints and expansion


def test_make_constraint_dedupes_slot_orderings():
    cons = make_constraint(2, [[1, 2], [2, 1], [3, 3]])
    assert cons.configs == ((1, 2), (3, 3))
    assert cons.width == 2
    assert len(cons) == 2


def test_constraint_rejects_width_mismatch():
    with pytest.raises(DomainError):
        make_constraint(2, [[1, 2, 4]])


def test_expand_config_collapses_permutations():
    # slots {0} and {0,1} give picks 00 and 01 only
    assert expand_config((0b01, 0b11)) == {(0, 0), (0, 1)}


def test_expand_constraint_unions_expansions():
    cons = make_constraint(2, [[0b01, 0b11], [0b10, 0b10]])
    assert expand_constraint(cons) == {(0, 0), (0, 1), (1, 1)}


def test_match_slots_returns_a_valid_assignment():
    small = (0b001, 0b010, 0b001)
    big = (0b011, 0b011, 0b101)
    got = match_slots(small, big)
    assert got is not None
    assert sorted(got) == [0, 1, 2]
    for i, j in enumerate(got):
        assert small[i] & ~big[j] == 0


def test_match_slots_needs_distinct_targets():
    # both wide slots must land on the single wide slot of the target
    assert match_slots((0b11, 0b11), (0b11, 0b01)) is None
    assert match_slots((0b01, 0b11), (0b11, 0b01)) == (1, 0)


def test_match_slots_rejects_width_mismatch():
    assert match_slots((1,), (1, 1)) is None


def test_contained_in_is_slotwise_not_expansionwise():
    # expansions are nested here but no slot injection exists
    c = (0b011, 0b100)
    d = (0b101, 0b110)
    assert expand_config(c) <= expand_config(d)
    assert not contained_in(c, d)


small_configs = st.lists(st.integers(1, 15), min_size=1, max_size=3).map(canon_config)


@given(small_configs, small_configs)
def test_contained_in_implies_expansion_containment(c, d):
    if len(c) == len(d) and contained_in(c, d):
        assert expand_config(c) <= expand_config(d)


@given(st.lists(small_configs.filter(lambda c: len(c) == 2), min_size=1, max_size=4),
       st.tuples(st.integers(0, 3), st.integers(0, 3)))
def test_constraint_permits_singletons_matches_expansion(cfgs, pick):
    cons = make_constraint(2, cfgs)
    single = tuple(1 << i for i in pick)
    assert constraint_permits(cons, single) == (tuple(sorted(pick)) in expand_constraint(cons))


def test_reduce_cover_drops_contained_configs():
    kept = reduce_cover([(0b01, 0b01), (0b11, 0b01), (0b10, 0b10)])
    assert kept == {(0b11, 0b01), (0b10, 0b10)}


@given(st.lists(small_configs.filter(lambda c: len(c) == 2), min_size=1, max_size=5))
def test_reduce_cover_preserves_expansion_and_is_an_antichain(cfgs):
    kept = reduce_cover(cfgs)
    assert expand_constraint(make_constraint(2, kept)) == expand_constraint(make_constraint(2, cfgs))
    for p, q in itertools.permutations(kept, 2):
        assert not contained_in(p, q)


# ---------------------------------------------------------------------------
# strength


def brute_strength(cons, n_labels):
    """Replacement test on the full expansion, one row mask per label."""
    allowed = expand_constraint(cons)
    rows = []
    for a in range(n_labels):
        ok = 0
        for b in range(n_labels):
            good = True
            for t in allowed:
                if a not in t:
                    continue
                swapped = list(t)
                swapped.remove(a)
                if tuple(sorted(swapped + [b])) not in allowed:
                    good = False
                    break
            if good:
                ok |= 1 << b
        rows.append(ok)
    return tuple(rows)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(1, 31), min_size=2, max_size=2), min_size=1, max_size=4))
def test_compute_strength_matches_replacement_on_expansion(cfgs):
    cons = make_constraint(2, cfgs)
    got = compute_strength(cons, 5)
    assert got.stronger == brute_strength(cons, 5)


def test_strength_rows_always_include_self():
    cons = make_constraint(2, [[0b01, 0b10]])
    diagram = compute_strength(cons, 2)
    for a in range(2):
        assert diagram.at_least_as_strong(a, a)


def test_unused_labels_sit_below_everything():
    cons = make_constraint(2, [[0b01, 0b01]])
    diagram = compute_strength(cons, 3)
    assert diagram.stronger[1] == 0b111
    assert diagram.stronger[2] == 0b111


def test_scc_classes_group_equivalent_labels():
    diagram = StrengthDiagram(3, (0b011, 0b011, 0b111))
    assert diagram.scc_classes() == ((0, 1), (2,))


def test_irreducible_skips_transitive_edges():
    # a chain 0 < 1 < 2 only draws the two covering steps
    diagram = StrengthDiagram(3, (0b111, 0b110, 0b100))
    assert diagram.irreducible() == ((0, 1), (1, 2))


diagrams = st.lists(
    st.lists(st.integers(1, 15), min_size=2, max_size=2),
    min_size=1, max_size=4,
).map(lambda cfgs: compute_strength(make_constraint(2, cfgs), 4))


@given(diagrams, st.integers(1, 15))
def test_closure_is_extensive_and_idempotent(diagram, labels):
    once = closure(labels, diagram)
    assert once & labels == labels
    assert closure(once, diagram) == once
    assert is_right_closed(once, diagram)


@given(diagrams)
def test_enumerate_right_closed_matches_the_definition(diagram):
    want = [m for m in range(1, 16) if closure(m, diagram) == m]
    assert list(enumerate_right_closed(diagram)) == want


def test_enumerate_right_closed_respects_its_limit():
    free = StrengthDiagram(4, (0b0001, 0b0010, 0b0100, 0b1000))
    with pytest.raises(BudgetError):
        enumerate_right_closed(free, limit=3)


def test_budget_stops_long_strength_runs():
    cons = make_constraint(2, [[i + 1, (i * 7) % 31 + 1] for i in range(8)])
    with pytest.raises(BudgetError):
        compute_strength(cons, 5, Budget(10))


# ---------------------------------------------------------------------------
# problems


def test_make_problem_sorts_alphabet_and_remaps_masks():
    # alphabet given unsorted; config masks follow the given order
    p = make_problem(["B", "A"], 2, [[0b01, 0b01]], [[0b10, 0b11]])
    assert p.alphabet == ("A", "B")
    # B was bit 0 and becomes bit 1
    assert p.nodes.configs == ((0b10, 0b10),)
    assert p.edges.configs == ((0b01, 0b11),)


def test_problem_rejects_foreign_label_bits():
    with pytest.raises(DomainError):
        make_problem(["A"], 2, [[0b11, 0b01]], [[0b01, 0b01]])


def test_problem_rejects_duplicate_labels():
    with pytest.raises(DomainError):
        make_problem(["A", "A"], 2, [[1, 1]], [[1, 1]])


def test_label_lookup_helpers(mis):
    assert mis.label_index("M") == 0
    assert mis.names_of_mask(0b101) == ("M", "P")
    assert mis.names_of_mask(mis.mask_of_names(["P", "M"])) == ("M", "P")
    with pytest.raises(DomainError):
        mis.label_index("missing")


def test_config_of_names_accepts_strings_and_groups(mis):
    got = mis.config_of_names(["M", ["O", "P"]])
    assert got == canon_config([mis.mask_of_names(["M"]), mis.mask_of_names(["O", "P"])])


def test_prune_unused_labels_drops_idle_names():
    p = make_problem(["A", "B", "C"], 2, [[0b001, 0b001]], [[0b001, 0b001]])
    pruned = prune_unused_labels(p)
    assert pruned.alphabet == ("A",)
    assert pruned.nodes.configs == ((1, 1),)


def test_problems_equivalent_sees_through_presentation(mis):
    # the edge disjunction M [O P] split into the two plain pairs
    split = make_problem(
        mis.alphabet, 3,
        mis.nodes.configs,
        [mis.config_of_names(["M", "O"]),
         mis.config_of_names(["M", "P"]),
         mis.config_of_names(["O", "O"])])
    assert problems_equivalent(mis, split)
    harder = make_problem(mis.alphabet, 3, mis.nodes.configs,
                          [mis.config_of_names(["M", "O"]),
                           mis.config_of_names(["O", "O"])])
    assert not problems_equivalent(mis, harder)


def test_rename_labels_requires_total_distinct_mapping(sinkless):
    renamed = rename_labels(sinkless, {"I": "in", "O": "out"})
    assert renamed.alphabet == ("in", "out")
    with pytest.raises(DomainError):
        rename_labels(sinkless, {"I": "x"})
    with pytest.raises(DomainError):
        rename_labels(sinkless, {"I": "x", "O": "x"})


# ---------------------------------------------------------------------------
# text format


def test_fixtures_round_trip_byte_identical():
    for name in ("sinkless.problem", "mis.problem", "eq1.problem"):
        text = load_fixture(name)
        assert serialize_problem(parse_problem(text)) == text


def test_parse_handles_comments_exponents_and_groups():
    p = parse_problem(
        "# loop orientation\n"
        "delta: 3\n"
        "nodes:\n"
        "O [I O]^2   # two free ports\n"
        "edges:\n"
        "I O\n")
    assert p.alphabet == ("I", "O")
    i, o = 0b01, 0b10
    assert p.nodes.configs == (canon_config([o, i | o, i | o]),)
    assert p.edges.configs == ((i, o),)


def test_parse_provenance_block(sinkless):
    text = (
        "delta: 3\n"
        "nodes:\n"
        "O [I O]^2\n"
        "edges:\n"
        "I O\n"
        "provenance:\n"
        "I = { a b }\n"
        "O = { c }\n")
    p = parse_problem(text)
    assert p.provenance == (("a", "b"), ("c",))
    assert serialize_problem(p) == text


@pytest.mark.parametrize("text, message", [
    ("nodes:\nA A\n", "delta"),
    ("delta: 2\ndelta: 2\nnodes:\n", "duplicate delta"),
    ("delta: 2\nA A\n", "before any section"),
    ("delta: 2\nnodes:\nA []\nedges:\nA A\n", "empty disjunction"),
    ("delta: 2\nnodes:\nA^0 A\nedges:\nA A\n", "exponent"),
    ("delta: 2\nnodes:\nA (\nedges:\nA A\n", "unexpected character"),
    ("delta: 2\nnodes:\nA A A\nedges:\nA A\n", "width"),
])
def test_parse_rejects_malformed_input(text, message):
    with pytest.raises(ParseError) as err:
        parse_problem(text)
    assert message in str(err.value)


def test_parse_config_uses_the_problem_alphabet(mis):
    got = parse_config(mis, "M [O P]^2")
    assert got == mis.config_of_names(["M", ["O", "P"], ["O", "P"]])
    with pytest.raises(DomainError):
        parse_config(mis, "M Q Q")


def test_json_round_trip(mis, sinkless, eq1):
    for p in (mis, sinkless, eq1):
        assert problem_from_json(problem_to_json(p)) == p
