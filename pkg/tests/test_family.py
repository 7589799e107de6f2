"""The parameterized problem family, its closed forms, and its reductions."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relim import (
    DomainError,
    FamilyParams,
    binom_color,
    check_zero_round_reduction,
    color_pairing,
    family_colors,
    family_size,
    family_speedup,
    good_pairs,
    grid_vectors,
    lower_bound_rounds,
    lower_bound_sequence,
    make_family_problem,
    prefix_sum,
    problems_equivalent,
    re,
    re_node_strength_mismatches,
    rename_labels,
    serialize_problem,
    speedup_map,
    verify_relaxation_to_Z,
    zero_round_solvable,
)
from relim.family import (
    family_edge_diagram,
    predicted_re_edge,
    predicted_re_node,
    predicted_strength_sets,
    re_edge_as_mask_pairs,
    re_node_as_mask_configs,
)


# ---------------------------------------------------------------------------
# parameters and counting helpers


def test_params_validation():
    with pytest.raises(DomainError):
        FamilyParams(1, 1, (1, 0), 0)
    with pytest.raises(DomainError):
        FamilyParams(3, 0, (1,), 0)
    with pytest.raises(DomainError):
        FamilyParams(3, 1, (1, 0, 0), 0)
    with pytest.raises(DomainError):
        FamilyParams(3, 1, (0, 0), 0)
    with pytest.raises(DomainError):
        FamilyParams(3, 1, (1, 0), 4)


def test_family_size_and_prefix_sum():
    assert family_size((1, 0, 0)) == 1
    assert family_size((1, 2, 3)) == 6
    assert prefix_sum((1, 0, 0)) == (1, 1, 1)
    assert prefix_sum((1, 1, 1)) == (1, 2, 3)
    assert prefix_sum((1, 2, 3)) == (1, 3, 6)


def test_binom_color_matches_iterated_prefix_sums():
    v = (1,) + (0,) * 10
    for j in range(11):
        for k in range(11):
            assert binom_color(j, k) == v[k]
        v = prefix_sum(v)


def test_binom_color_closed_form_value():
    assert binom_color(3, 2) == 6
    assert binom_color(0, 0) == 1
    assert binom_color(0, 3) == 0


def test_grid_vectors_enumerate_by_total_size():
    got = list(grid_vectors(1, 3))
    assert got == [(0, 1), (0, 2), (0, 3), (1, 0), (1, 1), (1, 2),
                   (2, 0), (2, 1), (3, 0)]
    assert len(list(grid_vectors(2, 3))) == 19
    assert all(1 <= sum(v) <= 3 for v in grid_vectors(2, 3))


def test_family_colors_carry_group_and_index():
    assert family_colors(FamilyParams(3, 1, (1, 0), 0)) == ((0, 1),)
    assert family_colors(FamilyParams(5, 1, (2, 1), 0)) == (
        (0, 1), (0, 2), (1, 1))


# ---------------------------------------------------------------------------
# construction


def test_single_color_member_golden_text():
    p = make_family_problem(FamilyParams(3, 1, (1, 0), 0))
    assert serialize_problem(p) == (
        "delta: 3\n"
        "nodes:\n"
        "A1 B1^2\n"
        "C0_1^3\n"
        "edges:\n"
        "A1 C0_1\n"
        "B1^2\n"
        "B1 C0_1\n")


def test_member_with_free_ports_gets_the_wildcard_label():
    p = make_family_problem(FamilyParams(4, 1, (1, 0), 1))
    assert "X" in p.alphabet
    x = 1 << p.label_index("X")
    # every label may face X across an edge
    for a in range(len(p.alphabet)):
        assert any(
            (1 << a) | x == (cfg[0] | cfg[1]) or
            (cfg[0] == x and 1 << a == cfg[1]) or
            (cfg[1] == x and 1 << a == cfg[0]) or
            ((1 << a) & cfg[0] and x & cfg[1]) or
            ((1 << a) & cfg[1] and x & cfg[0])
            for cfg in p.edges.configs)


def test_member_encodes_independent_set(mis):
    p = make_family_problem(FamilyParams(3, 1, (1, 0), 0))
    renamed = rename_labels(p, {"C0_1": "M", "B1": "O", "A1": "P"})
    assert problems_equivalent(renamed, mis)


def test_beta_two_member_differs_from_the_two_level_fixture(eq1):
    # the generated two-level member allows B2 against the color, which
    # the hand-written fixture's middle constraint does not
    p = make_family_problem(FamilyParams(3, 2, (1, 0, 0), 0))
    renamed = rename_labels(p, {"C0_1": "M", "B1": "O1", "A1": "P1",
                                "B2": "O2", "A2": "P2"})
    assert not problems_equivalent(renamed, eq1)


# ---------------------------------------------------------------------------
# closed forms against the computed rewrite


def test_good_pairs_for_the_single_color_member():
    p = FamilyParams(3, 1, (1, 0), 0)
    got = good_pairs(p)
    assert [(g.colors, g.i) for g in got] == [(((0, 1),), 0), ((), 1), (((0, 1),), 1)]
    # alphabet order A1, B1, C0_1: the color side plus its level's pointers
    # on one side, the complement colors with every B above on the other
    assert [(g.s1, g.s2) for g in got] == [(0b100, 0b011), (0b010, 0b110),
                                           (0b110, 0b010)]


@pytest.mark.parametrize("params", [
    FamilyParams(3, 1, (1, 0), 0),
    FamilyParams(3, 1, (2, 0), 0),
    FamilyParams(4, 1, (1, 1), 0),
    FamilyParams(4, 2, (1, 0, 0), 0),
    FamilyParams(4, 1, (1, 0), 1),
    FamilyParams(5, 2, (1, 1, 0), 1),
])
def test_predicted_rewrite_matches_computed_rewrite(params):
    problem = make_family_problem(params)
    result = re(problem, max_labels=1024)
    assert re_edge_as_mask_pairs(result) == predicted_re_edge(params, problem)
    assert re_node_as_mask_configs(result) == predicted_re_node(params, problem)
    assert re_node_strength_mismatches(params, result) == ()


def test_predicted_strength_rows_match_the_computed_diagram():
    params = FamilyParams(4, 2, (1, 1, 0), 0)
    problem = make_family_problem(params)
    diagram = family_edge_diagram(params, problem)
    computed = re(problem).diagram_used
    assert diagram.stronger == computed.stronger
    rows = predicted_strength_sets(params, problem)
    assert rows == computed.stronger
    for i, row in enumerate(rows):
        assert row >> i & 1


def test_predicted_re_node_needs_room_for_two_more_ports():
    params = FamilyParams(3, 1, (1, 0), 2)
    with pytest.raises(DomainError):
        predicted_re_node(params, make_family_problem(params))


# ---------------------------------------------------------------------------
# relaxation to the intermediate shape


def test_single_color_member_relaxes_into_Z():
    params = FamilyParams(3, 1, (1, 0), 0)
    report = verify_relaxation_to_Z(params)
    assert report.ok
    assert report.unmatched == ()
    assert report.matched == (((1, 2, 2), 0), ((4, 4, 4), 2),
                              ((8, 16, 16), 1), ((32, 32, 32), 1))
    kinds = [m.kind for m in report.members]
    assert kinds == ["pointer", "color", "colorpad"]


def test_Z_needs_room_below_delta():
    params = FamilyParams(3, 1, (2, 0), 1)  # size 2, x 1: needs delta > 4
    with pytest.raises(DomainError):
        verify_relaxation_to_Z(params)


# ---------------------------------------------------------------------------
# the two reduction maps


def test_lower_map_of_the_single_color_member_checks_out():
    params = FamilyParams(3, 1, (1, 0), 0)
    result = family_speedup(params)
    m = speedup_map(params, "lower", result)
    assert m.next_params == FamilyParams(3, 1, (1, 1), 1)
    report = check_zero_round_reduction(m.from_problem, m.to_problem,
                                        m.node_map, m.label_map)
    assert report.ok
    assert report.pairs_checked == 42


def test_upper_map_of_the_single_color_member_checks_out():
    params = FamilyParams(3, 1, (1, 0), 0)
    result = family_speedup(params)
    m = speedup_map(params, "upper", result)
    assert m.from_problem.alphabet == ("A1", "B1", "C0_1", "C1_1")
    report = check_zero_round_reduction(m.from_problem, m.to_problem,
                                        m.node_map, m.label_map)
    assert report.ok
    assert report.pairs_checked == 28


def test_upper_map_requires_a_plain_member():
    params = FamilyParams(4, 1, (1, 0), 1)
    with pytest.raises(DomainError):
        speedup_map(params, "upper")


def test_color_pairing_orders_levels_then_colors():
    got = color_pairing(FamilyParams(3, 1, (1, 0), 0))
    assert got == (("C0_1", (0, 1), 0), ("C1_1", (0, 1), 1))
    two = color_pairing(FamilyParams(5, 1, (2, 0), 0))
    assert [name for name, _, _ in two] == ["C0_1", "C0_2", "C1_1", "C1_2"]


# ---------------------------------------------------------------------------
# the lower bound chain


def test_lower_bound_rounds_closed_form():
    assert lower_bound_rounds(16, 1) == 1
    assert lower_bound_rounds(1 << 20, 1) == 2
    assert lower_bound_rounds(1 << 20, 2) == 1
    for delta in (8, 16, 64, 1 << 10, 1 << 20):
        want = int(0.5 * math.log2(delta) / math.log2(math.log2(delta)))
        assert lower_bound_rounds(delta, 1) == want


def test_lower_bound_rounds_rejects_tiny_delta():
    with pytest.raises(DomainError):
        lower_bound_rounds(2, 1)


def test_sequence_for_enumerable_delta():
    seq = lower_bound_sequence(16, 1, check_zero_round=True)
    assert seq.t == 1
    assert [(s.v, s.x) for s in seq.steps] == [((1, 0), 0), ((1, 1), 1)]


def test_sequence_for_synthetic_delta():
    seq = lower_bound_sequence(1 << 20, 1)
    assert seq.t == 2
    assert [(s.v, s.x) for s in seq.steps] == [
        ((1, 0), 0), ((1, 1), 1), ((1, 2), 4)]
    for s in seq.steps:
        assert family_size(s.v) * (s.x + 1) + 1 <= s.delta or s is seq.steps[-1]


def test_sequence_growth_invariant_bound():
    # x after j steps stays below (2t)^(j beta) for every chain that exists
    for delta, beta in ((1 << 20, 1), (1 << 64, 2), (1 << 30, 1)):
        seq = lower_bound_sequence(delta, beta)
        t = seq.t
        for j, s in enumerate(seq.steps):
            assert s.x <= (2 * t) ** (j * beta)


def test_sequence_rejects_beta_above_t():
    with pytest.raises(DomainError):
        lower_bound_sequence(16, 2)


def test_boundary_member_is_zero_round_solvable():
    p = make_family_problem(FamilyParams(3, 1, (1, 0), 3))
    got = zero_round_solvable(p)
    assert got.solvable
    assert got.witness_names(p) == ("X", "X", "X")


def test_chain_members_before_the_boundary_are_not_zero_round_solvable():
    seq = lower_bound_sequence(16, 1)
    for s in seq.steps[:-1]:
        assert not zero_round_solvable(make_family_problem(s)).solvable
