"""Two-sample tests and count ratios used to score event columns."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (DomainError, EmptySample, LengthMismatch, TooFewGroups,
                     ZeroPopulation)

EXACT_RANKSUM_MAX_POOLED = 20

_BETACF_MAX_ITER = 10000
_BETACF_EPS = 1e-16
_TINY = 1e-300


class TestMethod(enum.Enum):
    TTEST = "ttest"
    RANKSUM = "ranksum"

    __test__ = False


@dataclass(frozen=True)
class TestResult:
    """Outcome of a two-sample test.

    ``statistic`` is Welch's t for the t-test and the continuity-corrected
    normal score for the rank-sum test. ``rank_sum`` is the rank sum of the
    first sample (rank-sum test only).
    """
    statistic: float
    p_value: float
    method: TestMethod
    dof: Optional[float] = None
    rank_sum: Optional[float] = None
    exact: bool = False

    __test__ = False


@dataclass(frozen=True)
class RatioPair:
    r1: float
    r2_percent: float


def _betacf(a, b, x):
    # Modified Lentz evaluation of the continued fraction for I_x(a, b).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            return h
    raise DomainError(f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Evaluated by continued fraction on whichever side of the distribution
    mean converges fastest, using ``I_x(a, b) = 1 - I_{1-x}(b, a)``.
    """
    a, b, x = float(a), float(b), float(x)
    if not (a > 0 and b > 0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"a and b must be finite and positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, dof: float) -> float:
    """Two-sided tail probability P(|T| >= |t|) for Student's t with ``dof``."""
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    p = regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t))
    return min(1.0, max(0.0, p))


def welch_t(x, y) -> TestResult:
    """Unequal-variance t-test between two equally sized samples.

    The statistic is ``(mean(x) - mean(y)) / sqrt(s_x^2/g + s_y^2/g)`` with
    unbiased variances, the degrees of freedom follow Welch-Satterthwaite
    and the p-value is two-sided. When both samples are constant the test
    is degenerate: equal means give ``t = 0, p = 1``; different means give
    ``t = +-inf, p = 0``.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise LengthMismatch(f"samples differ in length: {x.size} vs {y.size}")
    g = x.size
    if g < 2:
        raise TooFewGroups(f"t-test needs at least 2 groups, got {g}")
    mx, my = x.mean(), y.mean()
    if np.ptp(x) == 0 and np.ptp(y) == 0:
        if x[0] == y[0]:
            return TestResult(0.0, 1.0, TestMethod.TTEST, dof=float(2 * (g - 1)))
        return TestResult(math.copysign(math.inf, x[0] - y[0]), 0.0, TestMethod.TTEST,
                          dof=float(2 * (g - 1)))
    qx = x.var(ddof=1) / g
    qy = y.var(ddof=1) / g
    se2 = qx + qy
    t = float((mx - my) / math.sqrt(se2))
    dof = float(se2 * se2 / ((qx * qx + qy * qy) / (g - 1)))
    return TestResult(t, t_two_sided_p(t, dof), TestMethod.TTEST, dof=dof)


def average_ranks(values) -> np.ndarray:
    """1-based ranks, smallest value first, ties share their mean rank."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(values.size, dtype=float)
    start = 0
    n = values.size
    while start < n:
        stop = start + 1
        while stop < n and sorted_vals[stop] == sorted_vals[start]:
            stop += 1
        ranks[order[start:stop]] = (start + 1 + stop) / 2.0
        start = stop
    return ranks


def _exact_rank_sum_p(doubled_ranks, k, observed):
    """Two-sided exact p for the doubled rank sum of a size-k subset.

    Counts subsets whose sum is at least as far from the null mean as the
    observed one. Counting is done by dynamic programming over the pooled
    ranks, which enumerates the same C(n, k) assignments without listing them.
    """
    n = len(doubled_ranks)
    total = int(sum(doubled_ranks))
    # counts[j][s]: number of j-subsets of the ranks seen so far summing to s
    counts = [[0] * (total + 1) for _ in range(k + 1)]
    counts[0][0] = 1
    for i, r in enumerate(doubled_ranks):
        for j in range(min(i + 1, k), 0, -1):
            prev, cur = counts[j - 1], counts[j]
            for s in range(total, r - 1, -1):
                if prev[s - r]:
                    cur[s] += prev[s - r]
    # null mean of the doubled sum is k * total / n; compare on the n-scaled axis
    far = abs(n * observed - k * total)
    hits = sum(c for s, c in enumerate(counts[k]) if c and abs(n * s - k * total) >= far)
    return hits / math.comb(n, k)


def rank_sum(x, y, force_normal: bool = False) -> TestResult:
    """Wilcoxon rank-sum test, two-sided.

    Pooled samples up to ``EXACT_RANKSUM_MAX_POOLED`` values get an exact
    p-value over all label assignments; larger samples, or
    ``force_normal=True``, use the normal approximation with tie-corrected
    variance and a 0.5 continuity correction.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size == 0 or y.size == 0:
        raise EmptySample("rank-sum test needs two non-empty samples")
    nx, ny = x.size, y.size
    n = nx + ny
    ranks = average_ranks(np.concatenate([x, y]))
    w = float(ranks[:nx].sum())
    mean = nx * (n + 1) / 2.0

    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_counts.astype(float) ** 3 - tie_counts))
    var = nx * ny / 12.0 * ((n + 1) - tie_term / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return TestResult(0.0, 1.0, TestMethod.RANKSUM, rank_sum=w,
                          exact=not force_normal and n <= EXACT_RANKSUM_MAX_POOLED)
    diff = w - mean
    z = math.copysign(max(abs(diff) - 0.5, 0.0), diff) / math.sqrt(var)

    if not force_normal and n <= EXACT_RANKSUM_MAX_POOLED:
        doubled = [int(round(2 * r)) for r in ranks]
        p = _exact_rank_sum_p(doubled, nx, int(round(2 * w)))
        return TestResult(z, min(1.0, p), TestMethod.RANKSUM, rank_sum=w, exact=True)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return TestResult(z, min(1.0, p), TestMethod.RANKSUM, rank_sum=w, exact=False)


def ratios(n_before: int, n_after: int, population: int) -> RatioPair:
    """After/before patient ratio and after-count share of the cohort.

    ``r1 = n_after / n_before`` (or ``n_after`` when nobody had the event
    before) and ``r2_percent = 100 * n_after / population``.
    """
    if population < 1:
        raise ZeroPopulation("population must be at least 1")
    if n_before < 0 or n_after < 0:
        raise DomainError("counts must be non-negative")
    if n_before > population or n_after > population:
        raise DomainError("counts cannot exceed the population")
    r1 = n_after / n_before if n_before != 0 else float(n_after)
    return RatioPair(r1, 100.0 * n_after / population)
