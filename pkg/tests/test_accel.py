"""The compiled closure engine agrees with the pure-Python one exactly."""

import random

import pytest

import relim.roundelim as roundelim
from relim.core import Budget, BudgetError, parse_problem
from relim.family import FamilyParams, family_speedup, make_family_problem
from relim.roundelim import maximal_boxes, re, rere, speedup

pytestmark = pytest.mark.skipif(
    roundelim._accel is None, reason="compiled engine not built")


@pytest.fixture
def pure_engine():
    roundelim.FORCE_PURE_ENGINE = True
    try:
        yield
    finally:
        roundelim.FORCE_PURE_ENGINE = False


def both_engines(configs, width, budget=None):
    fast = maximal_boxes(configs, width, budget)
    roundelim.FORCE_PURE_ENGINE = True
    try:
        slow = maximal_boxes(configs, width, budget)
    finally:
        roundelim.FORCE_PURE_ENGINE = False
    return fast, slow


def random_cubes(rng, width, labels, count):
    out = []
    for _ in range(count):
        cfg = tuple(sorted(rng.randrange(1, 1 << labels) for _ in range(width)))
        out.append(cfg)
    return out


@pytest.mark.parametrize("seed", range(40))
def test_matches_pure_on_random_cubes(seed):
    rng = random.Random(seed)
    width = rng.randint(1, 5)
    labels = rng.randint(2, 7)
    cubes = random_cubes(rng, width, labels, rng.randint(1, 9))
    fast, slow = both_engines(cubes, width)
    assert fast == slow


@pytest.mark.parametrize("seed", range(10))
def test_matches_pure_on_wide_sparse_cubes(seed):
    rng = random.Random(1000 + seed)
    width = rng.randint(6, 9)
    cubes = []
    for _ in range(rng.randint(2, 5)):
        cfg = tuple(sorted(1 << rng.randrange(12) | 1 << rng.randrange(12)
                           for _ in range(width)))
        cubes.append(cfg)
    fast, slow = both_engines(cubes, width)
    assert fast == slow


def test_matches_pure_on_rewrites(pure_engine, request):
    texts = [
        "delta: 3\nnodes:\nO [I O]^2\nedges:\nI O\n",
        "delta: 3\nnodes:\nM^3\nO^2 P\nedges:\nM [O P]\nO O\n",
    ]
    slow = []
    for text in texts:
        result = speedup(parse_problem(text))
        slow.append((result.problem.render(), result.steps[0].problem.render()))
    roundelim.FORCE_PURE_ENGINE = False
    fast = []
    for text in texts:
        result = speedup(parse_problem(text))
        fast.append((result.problem.render(), result.steps[0].problem.render()))
    assert fast == slow


@pytest.mark.parametrize("params", [
    FamilyParams(3, 1, (1, 0), 0),
    FamilyParams(3, 1, (2, 0), 1),
    FamilyParams(4, 1, (1, 1), 0),
    FamilyParams(3, 2, (1, 1, 1), 0),
])
def test_matches_pure_on_family_members(params):
    fast = family_speedup(params)
    roundelim.FORCE_PURE_ENGINE = True
    try:
        slow = family_speedup(params)
    finally:
        roundelim.FORCE_PURE_ENGINE = False
    assert fast.problem.render() == slow.problem.render()
    assert fast.provenance_masks == slow.provenance_masks
    assert fast.steps[0].problem.render() == slow.steps[0].problem.render()


def test_budget_runs_out_like_pure():
    problem = make_family_problem(FamilyParams(4, 1, (2, 1), 0))
    with pytest.raises(BudgetError):
        re(problem, budget=20)
    roundelim.FORCE_PURE_ENGINE = True
    try:
        with pytest.raises(BudgetError):
            re(problem, budget=20)
    finally:
        roundelim.FORCE_PURE_ENGINE = False


def test_budget_account_propagates():
    bud = Budget(10_000_000)
    maximal_boxes([(3, 5), (6, 1)], 2, bud)
    assert bud.left < bud.total


def test_wide_masks_fall_back_to_pure():
    # labels beyond the compiled engine's range still work via the fallback
    big = 1 << 70
    out = maximal_boxes([(big, big | 1), (1, big | 1)], 2)
    roundelim.FORCE_PURE_ENGINE = True
    try:
        ref = maximal_boxes([(big, big | 1), (1, big | 1)], 2)
    finally:
        roundelim.FORCE_PURE_ENGINE = False
    assert out == ref
