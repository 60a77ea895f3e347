"""Scaling-law analytics and their empirical counterparts.

The interference level of the worst selected relay decays with the number
of candidates N; this module provides the analytic pieces (the probability
that exactly K of N metrics fall under a threshold, the threshold that
maximizes it) and the simulation estimators (decay measurement over an N
grid, log-log slope fits, high-SNR rate slope).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .channel import generate_realization
from .config import Convention, Scheme, SystemConfig
from .metrics import MetricKind, metric_cdf, metric_cdf_inverse
from .selection import second_set_with_values, select_first_set


@dataclass(frozen=True)
class DecaySample:
    """Decay statistics of the worst selected total interference level at one N."""

    n_relays: int
    mean_inv_kth_min_til: float
    mean_kth_min_til: float
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for v in (self.mean_inv_kth_min_til, self.mean_kth_min_til):
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"mean statistics must be finite and positive, got {v}")


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line fit summary."""

    slope: float
    intercept: float
    r_squared: float


def prob_exactly_k(n_relays: int, k_pairs: int, cdf_value: float) -> float:
    """Probability that exactly K of N i.i.d. metrics fall below a threshold.

    cdf_value is the metric CDF at the threshold.  Evaluated in log space so
    binomial coefficients stay finite for N up to millions.
    """
    if n_relays < k_pairs:
        raise ValueError(f"n_relays ({n_relays}) must be >= k_pairs ({k_pairs})")
    if not (0.0 <= cdf_value <= 1.0):
        raise ValueError(f"cdf_value must be in [0, 1], got {cdf_value}")
    n, k, f = n_relays, k_pairs, cdf_value
    if f == 0.0:
        return 0.0 if k >= 1 else 1.0
    if f == 1.0:
        return 1.0 if n == k else 0.0
    log_comb = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return math.exp(log_comb + k * math.log(f) + (n - k) * math.log1p(-f))


def optimal_threshold(n_relays: int, k_pairs: int,
                      convention: Convention = Convention.UNIT_COMPLEX_VARIANCE) -> float:
    """Interference threshold maximizing prob_exactly_k: the CDF quantile at K/N.

    Verified to be a maximizer by comparing against perturbed CDF values
    K/N * (1 +- 1/10).
    """
    if n_relays <= k_pairs:
        raise ValueError(f"n_relays ({n_relays}) must exceed k_pairs ({k_pairs})")
    f = k_pairs / n_relays
    eps = metric_cdf_inverse(MetricKind.TOTAL_INTERFERENCE_LEVEL, k_pairs, convention, f)
    delta = k_pairs / (10.0 * n_relays)
    peak = prob_exactly_k(n_relays, k_pairs, f)
    if not (peak > prob_exactly_k(n_relays, k_pairs, f - delta)
            and peak > prob_exactly_k(n_relays, k_pairs, f + delta)):
        raise AssertionError("threshold at CDF value K/N failed the maximizer check")
    return eps


def measure_til_decay(k_pairs: int, n_grid, trials: int, seed: int,
                      convention: Convention = Convention.UNIT_COMPLEX_VARIANCE) -> list[DecaySample]:
    """Estimate the decay of the worst selected TIL over a grid of N.

    For each N, runs the full two-step selection on `trials` independent
    realizations and records the largest TIL among the K selected second-set
    relays (the Kth-smallest overall under the selection rule), averaging
    both the value and its reciprocal.
    """
    n_grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError(f"n_grid must be strictly ascending, got {n_grid}")
    samples = []
    for n in n_grid:
        cfg = SystemConfig(k_pairs=k_pairs, n_relays=n, scheme=Scheme.OND_ALTERNATE,
                           convention=convention)
        worst = np.empty(trials)
        for t in range(trials):
            real = generate_realization(cfg, rng.trial_seed(seed, k_pairs, n, t))
            first = select_first_set(real, cfg)
            _, values = second_set_with_values(real, first)
            worst[t] = values.max()
        samples.append(DecaySample(
            n_relays=n,
            mean_inv_kth_min_til=float(np.mean(1.0 / worst)),
            mean_kth_min_til=float(worst.mean()),
            trials=trials,
        ))
    return samples


def fit_loglog_slope(points) -> SlopeFit:
    """Ordinary least squares on (log x, log y) for positive points."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("log-log fit requires strictly positive coordinates")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    return _ols(lx, ly)


def _ols(x: np.ndarray, y: np.ndarray) -> SlopeFit:
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("x values must not all be equal")
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    intercept = ym - slope * xm
    ss_res = float(((y - (intercept + slope * x)) ** 2).sum())
    ss_tot = float(((y - ym) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SlopeFit(slope=slope, intercept=float(intercept), r_squared=float(r2))


def estimate_dof(rate_curve, window_fraction: float = 0.5) -> SlopeFit:
    """High-SNR slope of sum rate versus log2(snr).

    Fits the top `window_fraction` of the provided grid points (at least 3),
    the high-SNR regime where the slope approximates the degrees of freedom.
    """
    pts = [(float(s), float(r)) for s, r in rate_curve]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 SNR points, got {len(pts)}")
    snrs = [s for s, _ in pts]
    if any(b <= a for a, b in zip(snrs, snrs[1:])):
        raise ValueError("SNR points must be strictly ascending")
    if any(s <= 0 for s in snrs):
        raise ValueError("SNRs must be positive (linear scale)")
    window = max(3, math.ceil(len(pts) * window_fraction))
    tail = pts[-window:]
    x = np.log2([s for s, _ in tail])
    y = np.array([r for _, r in tail])
    return _ols(x, y)


def ks_distance(samples, cdf) -> float:
    """Kolmogorov-Smirnov statistic between samples and an analytic CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    if n < 100:
        raise ValueError(f"need at least 100 samples for a KS distance, got {n}")
    f = np.array([cdf(v) for v in s])
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(max(np.abs(f - upper).max(), np.abs(f - lower).max()))
