"""Closed-form round and failure-probability calculators.

Leading-order evaluations of the complexity bounds that frame the rewrite
machinery: how many rounds the ruling set algorithm needs from a given
color count, how few any algorithm can get away with on high-girth regular
graphs, and how failure probabilities of randomized algorithms grow when
rounds are peeled off.  Everything is pure arithmetic; probability values
live in log base 2 to stay meaningful at astronomical sizes.

Constants the source analysis leaves implicit (the ``K`` of the failure
amplification, the ``c`` in front of the lower bounds) are exposed as
parameters or omitted with an explicit validity flag instead of guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DomainError


@dataclass(frozen=True)
class BoundQuery:
    """Inputs of the bound calculators.

    ``log2_n`` stands in for the node count so that sizes like ``2**(2**20)``
    stay representable; ``log2_p`` likewise carries an input failure
    probability.  ``K`` is the free constant of the amplification bound.
    """

    delta: int
    beta: int
    log2_n: float
    K: float = 1.0
    log2_p: float = 0.0

    def __post_init__(self) -> None:
        if self.delta < 2:
            raise DomainError("delta must be at least 2")
        if self.beta < 1:
            raise DomainError("beta must be at least 1")
        if self.log2_n <= 0:
            raise DomainError("log2_n must be positive")
        if self.K <= 0:
            raise DomainError("K must be positive")
        if self.log2_p > 0:
            raise DomainError("log2_p describes a probability, so it cannot exceed 0")


@dataclass(frozen=True)
class LowerBoundEstimate:
    """Leading-order round count with its validity flag.

    ``valid`` is False when beta exceeds the range in which the bound
    statement applies; the number is still the formula value.  Constant
    factors are omitted throughout.
    """

    rounds: float
    valid: bool


def _checked_logs(delta: int) -> tuple[float, float]:
    log_d = math.log2(delta)
    if delta <= 2:
        raise DomainError("the lower bounds need delta at least 3")
    return log_d, math.log2(log_d)


def det_lower_bound(q: BoundQuery) -> LowerBoundEstimate:
    """Rounds any deterministic algorithm needs, to leading order.

    The value is ``min(log2(delta) / (beta * log2(log2(delta))),
    log(n) base delta)``; it applies while beta stays below both
    ``sqrt(log2(delta)/log2(log2(delta)))`` and ``log(n)`` base delta.
    """
    log_d, loglog_d = _checked_logs(q.delta)
    first = log_d / (q.beta * loglog_d)
    second = q.log2_n / log_d
    valid = q.beta <= min(math.sqrt(log_d / loglog_d), second)
    return LowerBoundEstimate(min(first, second), valid)


def rand_lower_bound(q: BoundQuery) -> LowerBoundEstimate:
    """Like :func:`det_lower_bound` for algorithms correct w.h.p.

    The graph-size term shrinks to ``log(log2(n))`` base delta, both in the
    bound and in the validity range of beta.
    """
    log_d, loglog_d = _checked_logs(q.delta)
    first = log_d / (q.beta * loglog_d)
    second = math.log2(q.log2_n) / log_d
    valid = q.beta <= min(math.sqrt(log_d / loglog_d), second)
    return LowerBoundEstimate(min(first, second), valid)


def upper_bound_rounds(beta: int, c: int) -> int:
    """Rounds the color reduction needs from ``c`` colors at width ``beta``.

    The smallest ``t`` with ``C(beta + t, beta) >= c``; exact integers, so
    huge color counts are fine.
    """
    if beta < 1:
        raise DomainError("beta must be at least 1")
    if c < 1:
        raise DomainError("the coloring must use at least one color")
    t = 0
    while math.comb(beta + t, beta) < c:
        t += 1
    return t


def failure_after_j_steps(q: BoundQuery, j: int) -> float:
    """log2 of the failure probability bound after unwinding ``j`` steps.

    Starting from an algorithm that fails with probability ``p`` (given as
    ``q.log2_p``), each unwound step raises the bound to
    ``K * delta**2 + log2_p / (delta + 1)**(2 * j)``.  A value at or above 0
    bounds the probability by 1 and is vacuous; callers should report that.
    """
    if j < 0:
        raise DomainError("step count must be nonnegative")
    if j == 0:
        return q.log2_p
    return q.K * q.delta ** 2 + q.log2_p / (q.delta + 1) ** (2 * j)


def zero_round_failure_floor(delta: int) -> float:
    """Failure probability any 0-round attempt at the hard problems keeps.

    Plain ``delta ** -8``, as a probability rather than a log.
    """
    if delta < 2:
        raise DomainError("delta must be at least 2")
    return delta ** -8


def too_fast_failure_floor(delta: int, t: int) -> int:
    """log2 of the failure floor for algorithms running only ``t`` rounds.

    Exactly ``-(delta ** (4 * t))`` as a wide integer; ``t = 0`` gives -1,
    the probability one half floor.
    """
    if delta < 2:
        raise DomainError("delta must be at least 2")
    if t < 0:
        raise DomainError("round count must be nonnegative")
    return -(delta ** (4 * t))
