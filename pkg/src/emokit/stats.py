"""Exact nonparametric paired and unpaired tests over score tables.

Small samples get exact p-values: the Wilcoxon null (independent random signs
on the observed ranks) and the Mann-Whitney null (random arrangement of the
pooled ranks) are both enumerated with subset-sum dynamic programming over
doubled ranks, so tied (half-integer) average ranks stay integral.  Larger
samples fall back to the tie-corrected, continuity-corrected normal
approximation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import ScoreTable
from .errors import ConfigError, DataError
from .metrics import language_average

EXACT = "EXACT"
NORMAL_APPROX = "NORMAL_APPROX"
TWO_SIDED = "TWO_SIDED"

# Every sample size that actually occurs in the reference comparisons sits
# below these limits, so those p-values are all exact.
WILCOXON_EXACT_MAX_N = 25
MWU_EXACT_MAX_PRODUCT = 400


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    n_effective: int
    method: str
    alternative: str = TWO_SIDED
    degenerate: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise DataError(f"p-value {self.p_value} outside [0, 1]")


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the average of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_term(values: np.ndarray) -> float:
    """Sum of t^3 - t over groups of tied values."""
    _, counts = np.unique(values, return_counts=True)
    return float(np.sum(counts.astype(np.float64) ** 3 - counts))


def _two_sided_normal_p(stat: float, mean: float, sd: float) -> float:
    diff = stat - mean
    if diff > 0.5:
        diff -= 0.5
    elif diff < -0.5:
        diff += 0.5
    else:
        return 1.0
    z = diff / sd
    return min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))


def _doubled(ranks: np.ndarray) -> list[int]:
    """Average ranks are integers or half-integers; doubling makes them exact
    integers for the DP."""
    doubled = [int(round(2.0 * r)) for r in ranks]
    if any(abs(2.0 * r - g) > 1e-9 for r, g in zip(ranks, doubled)):
        raise DataError("ranks are not half-integral")  # pragma: no cover
    return doubled


def _exact_two_sided(count_le: int, count_ge: int, total: int) -> float:
    return min(1.0, 2 * min(count_le, count_ge) / total)


def wilcoxon_signed_rank(a, b) -> TestResult:
    """Paired two-sided Wilcoxon signed-rank test.

    The statistic is the sum of the ranks of the positive differences a - b,
    with zero differences dropped and average ranks on ties.  Exact when the
    number of nonzero differences is at most WILCOXON_EXACT_MAX_N.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError(f"paired samples must match: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise DataError("need at least one pair")
    diffs = a - b
    diffs = diffs[diffs != 0.0]
    n = int(diffs.size)
    if n == 0:
        return TestResult(0.0, 1.0, 0, EXACT, degenerate=True)

    ranks = _average_ranks(np.abs(diffs))
    w_pos = float(ranks[diffs > 0].sum())

    if n <= WILCOXON_EXACT_MAX_N:
        doubled = _doubled(ranks)
        total_sum = sum(doubled)
        counts = [0] * (total_sum + 1)
        counts[0] = 1
        for g in doubled:
            for s in range(total_sum, g - 1, -1):
                counts[s] += counts[s - g]
        w2 = int(round(2.0 * w_pos))
        count_le = sum(counts[: w2 + 1])
        count_ge = sum(counts[w2:])
        p = _exact_two_sided(count_le, count_ge, 2**n)
        return TestResult(w_pos, p, n, EXACT)

    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(np.abs(diffs)) / 48.0
    if var <= 0.0:
        return TestResult(w_pos, 1.0, n, NORMAL_APPROX, degenerate=True)
    p = _two_sided_normal_p(w_pos, mean, math.sqrt(var))
    return TestResult(w_pos, p, n, NORMAL_APPROX)


def mann_whitney_u(xs, ys) -> TestResult:
    """Unpaired two-sided Mann-Whitney U test.

    U counts pairs (x, y) with x > y plus half the exact ties.  Exact when
    n1 * n2 is at most MWU_EXACT_MAX_PRODUCT.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.ndim != 1 or ys.ndim != 1:
        raise DataError("samples must be one-dimensional")
    n1, n2 = int(xs.size), int(ys.size)
    if n1 == 0 or n2 == 0:
        raise DataError("both samples must be non-empty")
    pooled = np.concatenate([xs, ys])
    ranks = _average_ranks(pooled)
    r1 = float(ranks[:n1].sum())
    u = r1 - n1 * (n1 + 1) / 2.0
    n = n1 + n2

    if n1 * n2 <= MWU_EXACT_MAX_PRODUCT:
        doubled = _doubled(ranks)
        total_sum = sum(doubled)
        # ways[j][s]: number of ways to pick j pooled items with doubled-rank
        # sum s under the permutation null.
        ways = [[0] * (total_sum + 1) for _ in range(n1 + 1)]
        ways[0][0] = 1
        for g in doubled:
            for j in range(n1, 0, -1):
                row_j, row_prev = ways[j], ways[j - 1]
                for s in range(total_sum, g - 1, -1):
                    if row_prev[s - g]:
                        row_j[s] += row_prev[s - g]
        # Doubled statistic: 2*R1 = s, so 2*U = s - n1*(n1+1).
        u2 = int(round(2.0 * u))
        offset = n1 * (n1 + 1)
        count_le = sum(c for s, c in enumerate(ways[n1]) if s - offset <= u2)
        count_ge = sum(c for s, c in enumerate(ways[n1]) if s - offset >= u2)
        total = math.comb(n, n1)
        p = _exact_two_sided(count_le, count_ge, total)
        if count_le == total and count_ge == total:
            # Every arrangement gives the same statistic.
            return TestResult(u, 1.0, n, EXACT, degenerate=True)
        return TestResult(u, p, n, EXACT)

    mean = n1 * n2 / 2.0
    var = (n1 * n2 / 12.0) * ((n + 1) - _tie_term(pooled) / (n * (n - 1)))
    if var <= 0.0:
        return TestResult(u, 1.0, n, NORMAL_APPROX, degenerate=True)
    p = _two_sided_normal_p(u, mean, math.sqrt(var))
    return TestResult(u, p, n, NORMAL_APPROX)


# ---------------------------------------------------------------------------
# Score-table comparisons
# ---------------------------------------------------------------------------

PAIRED_MODELS = "paired_models"
PAIRED_FACTOR = "paired_factor"
GROUPS = "groups"


@dataclass(frozen=True)
class ComparisonSpec:
    """Description of one model comparison over a score table.

    kind:
      paired_models — Wilcoxon over the languages where both models score;
      paired_factor — Wilcoxon over model stems having both factor variants,
                      pairing the stems' language-average scores;
      groups        — Mann-Whitney between two sets of models, one
                      language-average score per model.
    """

    kind: str
    model_a: str = ""
    model_b: str = ""
    factor_a: str = ""
    factor_b: str = ""
    group_a: tuple[str, ...] = ()
    group_b: tuple[str, ...] = ()
    label: str = ""

    @classmethod
    def from_dict(cls, raw: dict) -> "ComparisonSpec":
        kind = raw.get("kind", "")
        if kind not in (PAIRED_MODELS, PAIRED_FACTOR, GROUPS):
            raise ConfigError(f"unknown comparison kind {kind!r}")
        return cls(
            kind=kind,
            model_a=raw.get("model_a", ""),
            model_b=raw.get("model_b", ""),
            factor_a=raw.get("factor_a", ""),
            factor_b=raw.get("factor_b", ""),
            group_a=tuple(raw.get("group_a", ())),
            group_b=tuple(raw.get("group_b", ())),
            label=raw.get("label", ""),
        )


def _stems_with_factor(models, factor: str) -> dict[str, str]:
    """Map stem -> model name for every model carrying ``factor`` as one of
    its hyphen-separated name components.

    The stem is the name with the first occurrence of the factor component
    removed, so both suffix factors (``BGEV1-CB-ALL`` -> ``BGEV1-CB``) and
    infix factors (``mBERT-MO-ALL-AL`` -> ``mBERT-MO-AL``) pair up with
    their counterparts from the other level of the factor.
    """
    out: dict[str, str] = {}
    for m in models:
        parts = m.split("-")
        if factor in parts:
            idx = parts.index(factor)
            out["-".join(parts[:idx] + parts[idx + 1 :])] = m
    return out


def compare_models(table: ScoreTable, spec: ComparisonSpec) -> tuple[TestResult, str]:
    """Build score vectors from the table as the comparison describes and
    run the matching test.  Returns the result plus a one-line report row."""
    if spec.kind == PAIRED_MODELS:
        row_a = table.row(spec.model_a)
        row_b = table.row(spec.model_b)
        shared = ~np.isnan(row_a) & ~np.isnan(row_b)
        if not shared.any():
            raise DataError(
                f"{spec.model_a} and {spec.model_b} share no scored languages"
            )
        result = wilcoxon_signed_rank(row_a[shared], row_b[shared])
        label = spec.label or f"{spec.model_a} vs {spec.model_b}"
        narrative = (
            f"{label}: W={result.statistic:g} p={result.p_value:.4g} "
            f"n={result.n_effective} pairs={int(shared.sum())} ({result.method})"
        )
        return result, narrative

    if spec.kind == PAIRED_FACTOR:
        in_a = _stems_with_factor(table.models, spec.factor_a)
        in_b = _stems_with_factor(table.models, spec.factor_b)
        stems = sorted(set(in_a) & set(in_b))
        if not stems:
            raise DataError(
                f"no model stems have both {spec.factor_a} and {spec.factor_b} variants"
            )
        a = [language_average(table, in_a[s]) for s in stems]
        b = [language_average(table, in_b[s]) for s in stems]
        result = wilcoxon_signed_rank(a, b)
        label = spec.label or f"{spec.factor_a} vs {spec.factor_b}"
        narrative = (
            f"{label}: W={result.statistic:g} p={result.p_value:.4g} "
            f"n={result.n_effective} stems={len(stems)} ({result.method})"
        )
        return result, narrative

    if spec.kind == GROUPS:
        if not spec.group_a or not spec.group_b:
            raise DataError("both groups must be non-empty")
        xs = [language_average(table, m) for m in spec.group_a]
        ys = [language_average(table, m) for m in spec.group_b]
        result = mann_whitney_u(xs, ys)
        rank_sum = result.statistic + len(xs) * (len(xs) + 1) / 2.0
        label = spec.label or "group comparison"
        narrative = (
            f"{label}: U={result.statistic:g} rank_sum={rank_sum:g} "
            f"p={result.p_value:.4g} n={result.n_effective} ({result.method})"
        )
        return result, narrative

    raise ConfigError(f"unknown comparison kind {spec.kind!r}")
