"""Comparison statistics: Pearson correlation, Wilcoxon rank-sum with an
exact small-sample mode, and one-way ANOVA.

Statistic formulas are computed directly; scipy supplies only the
distribution tails (normal, F) and midrank assignment.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as spstats

EXACT_RANKSUM_LIMIT = 12  # combined sample size for exhaustive enumeration


def pearson_r(x, y):
    """Pearson correlation of paired condition vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D and paired")
    if x.size < 3:
        raise ValueError("need at least 3 paired conditions")
    xm = x - x.mean()
    ym = y - y.mean()
    sx = math.sqrt(float(xm @ xm))
    sy = math.sqrt(float(ym @ ym))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined: zero variance input")
    r = float(xm @ ym) / (sx * sy)
    # cancellation on near-constant vectors can push |r| past 1
    return max(-1.0, min(1.0, r))


@dataclass
class RankSumResult:
    statistic: float      # rank sum of the first sample
    p_value: float
    mode: str             # "exact" or "normal"


def ranksum_test(x, y, exact_limit=EXACT_RANKSUM_LIMIT):
    """Two-sided Wilcoxon rank-sum test.

    Exact permutation p for combined n <= exact_limit, otherwise the
    normal approximation with tie correction and continuity correction.
    The two-sided exact p counts rank assignments whose statistic is at
    least as far from its mean as observed.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be nonempty")
    nx, ny = x.size, y.size
    n = nx + ny
    ranks = spstats.rankdata(np.concatenate([x, y]))
    w = float(ranks[:nx].sum())
    mu = nx * (n + 1) / 2.0

    if n <= exact_limit:
        d_obs = abs(w - mu)
        count = 0
        total = 0
        for combo in itertools.combinations(range(n), nx):
            s = ranks[list(combo)].sum()
            total += 1
            if abs(s - mu) >= d_obs - 1e-9:
                count += 1
        return RankSumResult(statistic=w, p_value=count / total,
                             mode="exact")

    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(((tie_counts ** 3) - tie_counts).sum())
    var = nx * ny / 12.0 * ((n + 1) - tie_term / (n * (n - 1.0)))
    if var <= 0:
        return RankSumResult(statistic=w, p_value=1.0, mode="normal")
    z = (w - mu - 0.5 * np.sign(w - mu)) / math.sqrt(var)
    p = min(1.0, 2.0 * float(spstats.norm.sf(abs(z))))
    return RankSumResult(statistic=w, p_value=p, mode="normal")


@dataclass
class AnovaResult:
    F: float
    p_value: float
    df_between: int
    df_within: int
    degenerate: bool = False


def anova_oneway(groups):
    """One-way ANOVA over a list of 1-D samples.

    Zero within-group variance is degenerate: F is 0 (with p 1) when the
    group means also agree, +inf (with p 0) otherwise.
    """
    samples = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(samples) < 2:
        raise ValueError("need at least 2 groups")
    if any(s.size == 0 for s in samples):
        raise ValueError("every group needs at least 1 observation")
    k = len(samples)
    n_total = sum(s.size for s in samples)
    df_between = k - 1
    df_within = n_total - k
    if df_within < 1:
        raise ValueError("no error degrees of freedom")

    grand = sum(float(s.sum()) for s in samples) / n_total
    ss_between = sum(s.size * (float(s.mean()) - grand) ** 2 for s in samples)
    ss_within = sum(float(((s - s.mean()) ** 2).sum()) for s in samples)

    if ss_within == 0.0:
        if ss_between == 0.0:
            return AnovaResult(0.0, 1.0, df_between, df_within,
                               degenerate=True)
        return AnovaResult(math.inf, 0.0, df_between, df_within,
                           degenerate=True)
    f_stat = (ss_between / df_between) / (ss_within / df_within)
    p = float(spstats.f.sf(f_stat, df_between, df_within))
    return AnovaResult(f_stat, p, df_between, df_within)
