"""Shared fixtures: the sample problems used across the test modules."""

from pathlib import Path

import pytest

from relim import Problem, parse_problem

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture
def sinkless() -> Problem:
    return parse_problem(load_fixture("sinkless.problem"))


@pytest.fixture
def mis() -> Problem:
    return parse_problem(load_fixture("mis.problem"))


@pytest.fixture
def eq1() -> Problem:
    return parse_problem(load_fixture("eq1.problem"))
