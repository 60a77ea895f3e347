"""Relay scheduling metrics and their analytic distributions.

Two metrics drive selection.  The scheduling metric of relay i serving pair
k sums the 2(K-1) undesired gains it would receive from the other sources
plus the leakage it would generate toward the other destinations:

    L~[i, k] = sum_{m != k} (|h1[i, m]|^2 + |h2[m, i]|^2)

The total interference level (TIL) adds the K inter-relay gains toward the
already-selected first relay set, 3K-2 terms in all:

    L[i, k] = L~[i, k] + sum_a |hr[i, first_set[a]]|^2

Both are sums of i.i.d. exponential squared gains, so their CDFs are
regularized lower incomplete gamma functions with integer shape, computed
here in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .config import Convention


class MetricKind(enum.Enum):
    SCHEDULING_METRIC = "scheduling-metric"
    TOTAL_INTERFERENCE_LEVEL = "total-interference-level"

    def shape_terms(self, k_pairs: int) -> int:
        """Number of exponential summands in the metric."""
        if self is MetricKind.SCHEDULING_METRIC:
            return 2 * k_pairs - 2
        return 3 * k_pairs - 2


@dataclass(frozen=True)
class MetricTable:
    """Per-(relay, pair) metric values, shape (N, K)."""

    values: np.ndarray
    kind: MetricKind

    def __post_init__(self):
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("metric table entries must be finite and nonnegative")


def _check_indices(real: ChannelRealization, relay: int, pair: int):
    if not (0 <= relay < real.n_relays):
        raise ValueError(f"relay index {relay} out of range [0, {real.n_relays})")
    if not (0 <= pair < real.k_pairs):
        raise ValueError(f"pair index {pair} out of range [0, {real.k_pairs})")


def scheduling_metric(real: ChannelRealization, relay: int, pair: int) -> float:
    """Interference-plus-leakage metric of one relay serving one pair.

    Exactly 2(K-1) summands; identically zero for K=1 (no other pairs to
    interfere with).
    """
    _check_indices(real, relay, pair)
    g1 = real.g1[relay]
    g2 = real.g2t[relay]
    return float(g1.sum() - g1[pair] + g2.sum() - g2[pair])


def scheduling_metric_table(real: ChannelRealization) -> MetricTable:
    """All N x K scheduling metrics of a realization."""
    g1, g2 = real.g1, real.g2t
    vals = (g1.sum(axis=1, keepdims=True) - g1) + (g2.sum(axis=1, keepdims=True) - g2)
    return MetricTable(vals, MetricKind.SCHEDULING_METRIC)


def til(real: ChannelRealization, relay: int, pair: int, first_set) -> float:
    """Total interference level of a candidate relay given the first set.

    Adds the K inter-relay gains toward the first set to the scheduling
    metric, 3K-2 summands in all.  Relays already in the first set are not
    candidates.
    """
    first_set = list(first_set)
    if len(set(first_set)) != real.k_pairs:
        raise ValueError(f"first_set must hold {real.k_pairs} distinct relay indices, got {first_set}")
    if relay in first_set:
        raise ValueError(f"relay {relay} is in the first set and cannot be a second-set candidate")
    base = scheduling_metric(real, relay, pair)
    inter = real.hr.col_gains(first_set)[relay]
    return float(base + inter.sum())


def til_table(real: ChannelRealization, first_set) -> MetricTable:
    """All N x K total interference levels given the first set.

    Rows belonging to the first set are computed like any other (their own
    inter-relay diagonal term is zero) but are excluded from candidacy by
    the selection step.
    """
    base = scheduling_metric_table(real).values
    inter = real.hr.col_gains(list(first_set)).sum(axis=1, keepdims=True)
    return MetricTable(base + inter, MetricKind.TOTAL_INTERFERENCE_LEVEL)


def metric_cdf(kind: MetricKind, k_pairs: int, convention: Convention, ell: float) -> float:
    """Analytic CDF of a scheduling metric or TIL at value ell.

    The metric is a sum of m i.i.d. Exponential(theta) gains (m = 2K-2 or
    3K-2, theta the convention's per-term mean), so the CDF is the
    regularized lower incomplete gamma function with integer shape m,
    evaluated in closed form: the Poisson sum

        F(ell) = 1 - exp(-x) * sum_{j < m} x^j / j!,   x = ell / theta

    for x >= m+1, and the equivalent ascending power series for smaller x,
    where the Poisson form would cancel catastrophically (F can be ~1e-18
    at the small quantiles the scaling analysis probes).

    For K=1 the scheduling metric is identically zero: its CDF is the unit
    step at 0 (F(ell) = 1 for ell >= 0).
    """
    if ell < 0:
        raise ValueError(f"ell must be nonnegative, got {ell}")
    m = kind.shape_terms(k_pairs)
    if m == 0:
        return 1.0
    x = ell / convention.per_term_mean
    if x == 0.0:
        return 0.0
    if x < m + 1:
        # x^m e^{-x} sum_{n>=0} x^n / (m (m+1) ... (m+n)) / (m-1)!
        term = math.exp(m * math.log(x) - x - math.lgamma(m + 1))
        total = term
        n = 1
        while term > total * 1e-18 and n < 10_000:
            term *= x / (m + n)
            total += term
            n += 1
        return min(total, 1.0)
    term = 1.0
    total = 1.0
    for j in range(1, m):
        term *= x / j
        total += term
    val = 1.0 - math.exp(-x) * total
    return min(max(val, 0.0), 1.0)


def metric_cdf_inverse(kind: MetricKind, k_pairs: int, convention: Convention, p: float) -> float:
    """Value ell with metric_cdf(ell) == p, by bracketing and bisection.

    The CDF is strictly increasing on (0, inf) for one or more summands, so
    bisection converges to absolute tolerance 1e-10 in ell.
    """
    if not (0.0 <= p < 1.0):
        raise ValueError(f"p must be in [0, 1), got {p}")
    if p == 0.0:
        return 0.0
    m = kind.shape_terms(k_pairs)
    if m == 0:
        return 0.0  # degenerate: all mass at zero
    hi = convention.per_term_mean * max(m, 1.0)
    while metric_cdf(kind, k_pairs, convention, hi) < p:
        hi *= 2.0
    lo = 0.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if metric_cdf(kind, k_pairs, convention, mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cdf_bound_constant(kind: MetricKind, k_pairs: int) -> float:
    """Coefficient C of the small-value polynomial lower bound C * ell^m."""
    m = kind.shape_terms(k_pairs)
    return math.exp(-1.0) * 2.0 ** (-m) / math.factorial(m)


def cdf_power_lower_bound(kind: MetricKind, k_pairs: int, ell: float) -> float:
    """Polynomial lower bound C * ell^m on the metric CDF, valid on (0, 2].

    The bound is stated for the unit-per-component convention (the CDF
    argument ell/2); under that convention metric_cdf dominates this bound
    pointwise on (0, 2].
    """
    if not (0.0 < ell <= 2.0):
        raise ValueError(f"ell must be in (0, 2], got {ell}")
    m = kind.shape_terms(k_pairs)
    return cdf_bound_constant(kind, k_pairs) * ell ** m
