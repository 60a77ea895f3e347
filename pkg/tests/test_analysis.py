import math

import numpy as np
import pytest
from scipy import stats

from helpers import real_from_gains
from ondsim.analysis import (estimate_dof, fit_loglog_slope, ks_distance,
                             measure_til_decay, optimal_threshold, prob_exactly_k)
from ondsim.channel import generate_realization
from ondsim.config import Convention, Scheme, SystemConfig
from ondsim.metrics import MetricKind, metric_cdf, metric_cdf_inverse, til
from ondsim.rng import trial_seed
from ondsim.selection import second_set_with_values, select_first_set

UCV = Convention.UNIT_COMPLEX_VARIANCE


class TestProbExactlyK:
    def test_zero_cdf_value(self):
        assert prob_exactly_k(10, 2, 0.0) == 0.0

    def test_small_binomial(self):
        # frozen from an exact 40-digit binomial evaluation
        assert prob_exactly_k(10, 2, 0.2) == pytest.approx(0.301989888, rel=1e-9)

    def test_large_n_log_space(self):
        # frozen 40-digit oracle values; tolerance reflects the ~N*ulp
        # cancellation inherent in lgamma(N+1) - lgamma(N-K+1)
        assert prob_exactly_k(10 ** 4, 2, 2e-4) == pytest.approx(0.27069763713935502, rel=1e-8)
        assert prob_exactly_k(10 ** 6, 3, 3e-6) == pytest.approx(0.22404214371879936, rel=1e-8)

    def test_edge_cases(self):
        assert prob_exactly_k(5, 5, 1.0) == 1.0
        assert prob_exactly_k(6, 5, 1.0) == 0.0
        with pytest.raises(ValueError):
            prob_exactly_k(3, 4, 0.5)
        with pytest.raises(ValueError):
            prob_exactly_k(10, 2, 1.5)


class TestOptimalThreshold:
    @pytest.mark.parametrize("n", [10, 100, 1000])
    @pytest.mark.parametrize("k", [2, 3])
    def test_maximizes_prob_on_grid(self, n, k):
        f = k / n
        delta = k / (10.0 * n)
        peak = prob_exactly_k(n, k, f)
        assert peak > prob_exactly_k(n, k, f - delta)
        assert peak > prob_exactly_k(n, k, f + delta)
        optimal_threshold(n, k)  # internal maximizer assertion must hold too

    def test_roundtrip_through_cdf(self):
        eps = optimal_threshold(50, 2)
        assert metric_cdf(MetricKind.TOTAL_INTERFERENCE_LEVEL, 2, UCV, eps) == pytest.approx(
            2 / 50, abs=1e-9)

    def test_boundary_n_equals_2k(self):
        eps = optimal_threshold(4, 2)
        assert math.isfinite(eps) and eps > 0
        assert eps == pytest.approx(
            metric_cdf_inverse(MetricKind.TOTAL_INTERFERENCE_LEVEL, 2, UCV, 0.5), abs=1e-9)

    def test_requires_n_above_k(self):
        with pytest.raises(ValueError):
            optimal_threshold(2, 2)


class TestMeasureTilDecay:
    def test_single_pair_value_is_min_inter_relay_sum(self):
        k, n = 1, 5
        cfg = SystemConfig(k_pairs=k, n_relays=n)
        seed = trial_seed(77, k, n, 0)
        real = generate_realization(cfg, seed)
        first = select_first_set(real, cfg)
        _, values = second_set_with_values(real, first)
        candidates = [til(real, i, 0, first) for i in range(n) if i not in first]
        assert values.max() == pytest.approx(min(candidates))

    def test_means_positive_and_nonincreasing(self):
        samples = measure_til_decay(2, [8, 32, 128], trials=600, seed=13)
        tils = [s.mean_kth_min_til for s in samples]
        invs = [s.mean_inv_kth_min_til for s in samples]
        assert all(v > 0 for v in tils + invs)
        assert tils[0] > tils[1] > tils[2]
        assert invs[0] < invs[1] < invs[2]
        assert all(s.trials == 600 for s in samples)

    def test_grid_must_ascend(self):
        with pytest.raises(ValueError):
            measure_til_decay(2, [64, 32], trials=5, seed=1)

    def test_deterministic(self):
        a = measure_til_decay(2, [8, 16], trials=20, seed=5)
        b = measure_til_decay(2, [8, 16], trials=20, seed=5)
        assert a == b


class TestFitLoglogSlope:
    def test_exact_square_law(self):
        xs = np.linspace(1.0, 9.0, 12)
        fit = fit_loglog_slope(list(zip(xs, xs ** 2)))
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_noisy_power_law(self):
        rng = np.random.default_rng(11)
        xs = np.logspace(0, 3, 30)
        ys = 4.2 * xs ** -0.25 * (1.0 + 0.01 * rng.standard_normal(30))
        fit = fit_loglog_slope(list(zip(xs, ys)))
        assert fit.slope == pytest.approx(-0.25, abs=0.02)

    def test_matches_scipy_linregress(self):
        rng = np.random.default_rng(12)
        xs = np.abs(rng.lognormal(size=10)) + 0.1
        ys = np.abs(rng.lognormal(size=10)) + 0.1
        fit = fit_loglog_slope(list(zip(xs, ys)))
        oracle = stats.linregress(np.log(xs), np.log(ys))
        assert fit.slope == pytest.approx(oracle.slope, rel=1e-10)
        assert fit.intercept == pytest.approx(oracle.intercept, rel=1e-10)
        assert fit.r_squared == pytest.approx(oracle.rvalue ** 2, rel=1e-8)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            fit_loglog_slope([(1.0, 1.0), (2.0, 2.0)])
        with pytest.raises(ValueError):
            fit_loglog_slope([(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)])


class TestEstimateDof:
    def test_synthetic_two_dof(self):
        snrs = np.logspace(0, 4.5, 10)
        curve = [(s, 2 * math.log2(s) + 3) for s in snrs]
        fit = estimate_dof(curve)
        assert fit.slope == pytest.approx(2.0, abs=1e-10)

    def test_flat_curve(self):
        snrs = np.logspace(0, 4, 9)
        fit = estimate_dof([(s, 1.7) for s in snrs])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)

    def test_single_link_interference_free(self):
        # alternate relaying over both hops without inter-relay coupling:
        # rate = (L-1)/L * log2(1 + snr * min gain); the high-SNR slope is (L-1)/L
        l_slots = 11
        gain = 0.8
        snrs = np.logspace(2, 6, 12)
        curve = [(s, (l_slots - 1) / l_slots * math.log2(1 + s * gain)) for s in snrs]
        fit = estimate_dof(curve)
        assert fit.slope == pytest.approx((l_slots - 1) / l_slots, rel=1e-4)

    def test_window_uses_top_half(self):
        # low-SNR half is deliberately corrupted; the fit must ignore it
        snrs = np.logspace(0, 5, 12)
        curve = [(s, (0.0 if i < 6 else 1.5 * math.log2(s))) for i, s in enumerate(snrs)]
        fit = estimate_dof(curve)
        assert fit.slope == pytest.approx(1.5, abs=1e-9)

    def test_rejects_bad_grids(self):
        with pytest.raises(ValueError):
            estimate_dof([(1.0, 1.0), (2.0, 2.0)])
        with pytest.raises(ValueError):
            estimate_dof([(2.0, 1.0), (1.0, 2.0), (3.0, 3.0)])
        with pytest.raises(ValueError):
            estimate_dof([(-1.0, 1.0), (1.0, 2.0), (3.0, 3.0)])


class TestKsDistance:
    def test_samples_from_the_cdf_itself(self):
        kind = MetricKind.TOTAL_INTERFERENCE_LEVEL
        cfg = SystemConfig(k_pairs=2, n_relays=10 ** 5 + 2)
        real = generate_realization(cfg, 2718)
        from ondsim.metrics import til_table
        samples = til_table(real, [0, 1]).values[2:, 0]
        d = ks_distance(samples, lambda v: metric_cdf(kind, 2, UCV, v))
        assert d < 0.01

    def test_matches_scipy_kstest(self):
        rng = np.random.default_rng(14)
        samples = rng.exponential(size=500)
        ours = ks_distance(samples, lambda v: 1.0 - math.exp(-v))
        oracle = stats.kstest(samples, lambda v: 1.0 - np.exp(-v)).statistic
        assert ours == pytest.approx(oracle, abs=1e-12)

    def test_constant_samples_far_from_continuous_cdf(self):
        d = ks_distance(np.full(200, 1.0), lambda v: 1.0 - math.exp(-v))
        assert d >= 0.5

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            ks_distance(np.ones(99), lambda v: v)
