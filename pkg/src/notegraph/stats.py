"""Nonparametric statistics: Mann-Whitney U (exact and approximate),
Holm step-down correction, Mann-Kendall trend test, Pearson correlation.

All p-values are two-sided. The exact Mann-Whitney null enumerates every
group labeling of the pooled sample, so it handles ties correctly; the
normal approximations carry tie and continuity corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from scipy.stats import t as t_dist

from .errors import (
    EmptySample,
    LengthMismatch,
    OutOfRange,
    TooShort,
    ZeroVariance,
)

EXACT_LIMIT = 12  # auto mode enumerates when |x| + |y| <= this


@dataclass
class TestResult:
    statistic: float
    p_value: float
    p_adjusted: float | None = None
    method: str = "exact"  # "exact" or "normal-approximation"
    all_tied: bool = False


def _u_statistic(x: Sequence[float], y: Sequence[float]) -> float:
    """U for the first sample: wins over y, ties counted half."""
    u = 0.0
    for xi in x:
        for yj in y:
            if xi > yj:
                u += 1.0
            elif xi == yj:
                u += 0.5
    return u


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2))


def _tie_counts(values: Sequence[float]) -> list[int]:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return [c for c in counts.values() if c > 1]


def mann_whitney_u(
    x: Sequence[float], y: Sequence[float], mode: str = "auto"
) -> TestResult:
    """Two-sample two-sided Mann-Whitney U test.

    ``mode``: "exact" enumerates all C(n+m, n) labelings of the pooled
    sample; "approx" uses the tie- and continuity-corrected normal
    approximation; "auto" picks exact for small pooled sizes.
    """
    if len(x) == 0 or len(y) == 0:
        raise EmptySample("both samples must be non-empty")
    if mode not in ("exact", "approx", "auto"):
        raise ValueError(f"unknown mode {mode!r}")
    n, m = len(x), len(y)
    u_obs = _u_statistic(x, y)
    if mode == "auto":
        mode = "exact" if n + m <= EXACT_LIMIT else "approx"

    if mode == "exact":
        pooled = list(x) + list(y)
        center = n * m / 2
        dev = abs(u_obs - center)
        hits = 0
        total = 0
        indices = range(len(pooled))
        for combo in combinations(indices, n):
            chosen = set(combo)
            xs = [pooled[i] for i in combo]
            ys = [pooled[i] for i in indices if i not in chosen]
            if abs(_u_statistic(xs, ys) - center) >= dev - 1e-12:
                hits += 1
            total += 1
        return TestResult(statistic=u_obs, p_value=hits / total, method="exact")

    mu = n * m / 2
    pooled = list(x) + list(y)
    big_n = n + m
    tie_term = sum(t**3 - t for t in _tie_counts(pooled))
    var = (n * m / 12) * (big_n + 1 - tie_term / (big_n * (big_n - 1)))
    if var <= 0:
        return TestResult(statistic=u_obs, p_value=1.0, method="normal-approximation",
                          all_tied=True)
    diff = u_obs - mu
    correction = 0.5 * (1 if diff > 0 else -1 if diff < 0 else 0)
    z = (diff - correction) / math.sqrt(var)
    p = min(1.0, 2 * _normal_sf(abs(z)))
    return TestResult(statistic=u_obs, p_value=p, method="normal-approximation")


def holm_correction(pvals: Sequence[float]) -> list[float]:
    """Step-down Holm adjustment, input order preserved."""
    for p in pvals:
        if not 0 <= p <= 1:
            raise OutOfRange(f"p-value {p} outside [0, 1]")
    m = len(pvals)
    order = sorted(range(m), key=lambda i: pvals[i])
    adjusted = [0.0] * m
    running_max = 0.0
    for rank, idx in enumerate(order):
        candidate = (m - rank) * pvals[idx]
        running_max = max(running_max, candidate)
        adjusted[idx] = min(1.0, running_max)
    return adjusted


def mann_kendall(series: Sequence[float]) -> TestResult:
    """Monotone-trend test; statistic is the tie-adjusted Kendall tau.

    The p-value uses the normal approximation with tie-corrected
    variance and continuity correction.
    """
    n = len(series)
    if n < 3:
        raise TooShort(f"need >= 3 observations, got {n}")
    s = 0
    for i, j in combinations(range(n), 2):
        diff = series[j] - series[i]
        s += (diff > 0) - (diff < 0)
    ties = _tie_counts(series)
    n0 = n * (n - 1) / 2
    tie_pairs = sum(t * (t - 1) / 2 for t in ties)
    denom = math.sqrt(n0 * (n0 - tie_pairs))
    if denom == 0:
        return TestResult(statistic=math.nan, p_value=1.0,
                          method="normal-approximation", all_tied=True)
    tau = s / denom
    var = (n * (n - 1) * (2 * n + 5) - sum(t * (t - 1) * (2 * t + 5) for t in ties)) / 18
    if s > 0:
        z = (s - 1) / math.sqrt(var)
    elif s < 0:
        z = (s + 1) / math.sqrt(var)
    else:
        z = 0.0
    p = min(1.0, 2 * _normal_sf(abs(z)))
    return TestResult(statistic=tau, p_value=p, method="normal-approximation")


def pearson(x: Sequence[float], y: Sequence[float]) -> TestResult:
    """Sample Pearson correlation; p from the t-distribution, n-2 df."""
    if len(x) != len(y):
        raise LengthMismatch(f"lengths {len(x)} and {len(y)} differ")
    n = len(x)
    if n < 3:
        raise TooShort(f"need >= 3 paired observations, got {n}")
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((xi - mx) ** 2 for xi in x)
    syy = sum((yi - my) ** 2 for yi in y)
    if sxx == 0 or syy == 0:
        raise ZeroVariance("correlation undefined for a constant sample")
    sxy = sum((xi - mx) * (yi - my) for xi, yi in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t_stat = r * math.sqrt((n - 2) / (1 - r * r))
        p = 2 * float(t_dist.sf(abs(t_stat), n - 2))
    return TestResult(statistic=r, p_value=min(1.0, p), method="exact")
