"""Two-sided Wilcoxon signed-rank test for paired samples.

Zero differences are dropped, tied absolute differences share mid-ranks.
Up to ``EXACT_MAX_N`` non-zero pairs the p-value comes from the exact
sign-flip distribution of the positive rank sum (a counting recursion over
doubled ranks, which are integers even with ties). Above that, a normal
approximation with tie and continuity corrections is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

EXACT_MAX_N = 25


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # sum of ranks of positive differences
    pvalue: float
    n: int  # non-zero differences
    method: str  # "exact", "approx" or "degenerate"

    @property
    def degenerate(self) -> bool:
        return self.method == "degenerate"


def _differences(x: Sequence[float], y: Sequence[float] | None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if y is not None and len(x) != len(y):
        raise ValueError("paired samples must have equal length")
    d = x if y is None else x - np.asarray(y, dtype=float)
    return d[d != 0]


def exact_pvalue(doubled_ranks: Sequence[int], doubled_stat: int) -> float:
    """P(|T - E T| >= |t - E T|) under random sign flips, on doubled ranks."""
    total = int(sum(doubled_ranks))
    # probability mass of each attainable positive rank sum; each rank's sign is a fair coin
    pmf = np.zeros(total + 1, dtype=np.float64)
    pmf[0] = 1.0
    for r in doubled_ranks:
        r = int(r)
        shifted = np.zeros_like(pmf)
        shifted[r:] = pmf[: total + 1 - r]
        pmf = (pmf + shifted) / 2
    sums = np.arange(total + 1)
    # compare 2*T - total in integers to avoid rounding
    extreme = np.abs(2 * sums - total) >= abs(2 * int(doubled_stat) - total)
    return float(min(1.0, pmf[extreme].sum()))


def approx_pvalue(ranks: np.ndarray, stat: float) -> float:
    n = len(ranks)
    mean = n * (n + 1) / 4
    _, tie_sizes = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24 - float(np.sum(tie_sizes ** 3 - tie_sizes)) / 48
    if var <= 0:
        return 1.0
    dev = max(abs(stat - mean) - 0.5, 0.0)
    return float(min(1.0, math.erfc(dev / math.sqrt(var) / math.sqrt(2))))


def wilcoxon_signed_rank(
    x: Sequence[float], y: Sequence[float] | None = None, method: str = "auto"
) -> WilcoxonResult:
    """Two-sided signed-rank test of ``x - y`` (or ``x``) symmetric about zero.

    ``method`` is "auto", "exact" or "approx". All-zero differences give
    p = 1 with ``method == "degenerate"``.
    """
    if method not in ("auto", "exact", "approx"):
        raise ValueError(f"unknown method {method!r}")
    d = _differences(x, y)
    n = len(d)
    if n == 0:
        return WilcoxonResult(0.0, 1.0, 0, "degenerate")
    ranks = rankdata(np.abs(d))  # average ranks for ties
    stat = float(ranks[d > 0].sum())
    if method == "exact" or (method == "auto" and n <= EXACT_MAX_N):
        doubled = np.rint(2 * ranks).astype(np.int64)
        p = exact_pvalue(doubled, int(round(2 * stat)))
        return WilcoxonResult(stat, p, n, "exact")
    return WilcoxonResult(stat, approx_pvalue(ranks, stat), n, "approx")
