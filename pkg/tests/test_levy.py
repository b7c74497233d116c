"""Tests for compound Poisson sums, truncated jump paths with refinement,
the gamma subordinator instance, and gamma-driven lattice sheets.

Moment targets come from quadrature against the jump density or from the
closed forms of the gamma measure; the direct gamma-increment generator
serves as the distributional oracle for the truncated route.
"""

import math

import numpy as np
import pytest
from scipy.special import exp1

from spgen.errors import InvalidMeasureError, InvalidParameterError
from spgen.grid import Field
from spgen.levy import (
    GammaCell,
    LevyMeasure1D,
    LevyPath,
    LevyPathSpec,
    LevySheetSpec,
    bump_kernel,
    expected_sheet_value,
    gamma_jump_sampler,
    gamma_levy_measure,
    gamma_path_spec,
    gamma_sheet_spec,
    gamma_sheet_values_at,
    measure_from_density,
    refine_path,
    sample_compound_poisson,
    sample_gamma_process_direct,
    sample_gamma_sheet,
    sample_levy_path,
    write_path_csv,
)
from spgen.rng import RngStream


def zero_measure() -> LevyMeasure1D:
    return LevyMeasure1D(
        density=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        tail_mass=lambda eps: 0.0,
        partial_mean=lambda a, b: 0.0,
    )


def var_se(samples: np.ndarray) -> float:
    # SE of the sample variance from the empirical fourth moment; makes no
    # normality assumption (jump sums are skewed).
    centered = samples - samples.mean()
    v = centered.var()
    m4 = np.mean(centered**4)
    return math.sqrt(max(m4 - v**2, 1e-300) / samples.size)


def path_ends(spec: LevyPathSpec, t: float, stream: RngStream, k: int) -> np.ndarray:
    return np.array(
        [sample_levy_path(spec, [t], stream).values[0] for _ in range(k)]
    )


class TestGammaMeasure:
    def test_closed_forms_match_quadrature(self):
        alpha = 3.0
        closed = gamma_levy_measure(alpha)
        numeric = measure_from_density(closed.density)
        assert numeric.tail_mass(0.2) == pytest.approx(
            alpha * exp1(0.2), rel=1e-8
        )
        assert numeric.partial_mean(0.1, 2.0) == pytest.approx(
            alpha * (math.exp(-0.1) - math.exp(-2.0)), rel=1e-8
        )

    def test_integrability_value(self):
        # integral of min(1, x^2) nu(dx) = alpha (1 - 2/e + E1(1)).
        value = gamma_levy_measure(2.0).check_integrable()
        assert value == pytest.approx(2.0 * (1 - 2 / math.e + exp1(1.0)), rel=1e-6)

    @pytest.mark.parametrize("exponent", [-3.0, -4.0])
    def test_non_integrable_density_rejected(self, exponent):
        bad = measure_from_density(
            lambda x: np.asarray(x, dtype=float) ** exponent
        )
        with pytest.raises(InvalidMeasureError):
            bad.check_integrable()
        with pytest.raises(InvalidMeasureError):
            LevyPathSpec(mu=0.0, sigma=0.0, measure=bad, epsilon=0.5)

    def test_validation_and_infinite_mass_at_zero(self):
        with pytest.raises(InvalidParameterError):
            gamma_levy_measure(0.0)
        assert gamma_levy_measure(1.0).tail_mass(0.0) == math.inf

    def test_tail_mass_strictly_decreasing(self):
        measure = gamma_levy_measure(2.5)
        eps = np.array([0.01, 0.1, 0.5, 1.0, 3.0])
        masses = [measure.tail_mass(e) for e in eps]
        assert np.all(np.diff(masses) < 0)


class TestGammaJumpSampler:
    def test_band_support(self):
        stream = RngStream(60)
        narrow = gamma_jump_sampler(1.0, (0.3, 0.31), stream, size=500)
        assert np.all((narrow > 0.3) & (narrow <= 0.31))
        tail = gamma_jump_sampler(1.0, (2.0, np.inf), stream, size=500)
        assert np.all(tail >= 2.0)

    def test_tail_band_mean_matches_quadrature(self):
        # Normalized law on (1, inf): mean = e^-1 / E1(1).
        stream = RngStream(61)
        draws = gamma_jump_sampler(1.0, (1.0, np.inf), stream, size=20_000)
        target = math.exp(-1) / exp1(1.0)
        second = 2 * math.exp(-1) / exp1(1.0)
        se = math.sqrt((second - target**2) / draws.size)
        assert abs(draws.mean() - target) < 3 * se

    def test_alpha_scales_measure_not_law(self):
        a = gamma_jump_sampler(1.0, (0.5, 2.0), RngStream(62), size=200)
        b = gamma_jump_sampler(7.0, (0.5, 2.0), RngStream(62), size=200)
        assert np.array_equal(a, b)

    def test_validation_and_scalar_mode(self):
        stream = RngStream(63)
        with pytest.raises(InvalidParameterError):
            gamma_jump_sampler(1.0, (0.0, 1.0), stream)
        with pytest.raises(InvalidParameterError):
            gamma_jump_sampler(1.0, (2.0, 2.0), stream)
        one = gamma_jump_sampler(1.0, (0.5, 1.5), stream)
        assert isinstance(one, float)
        assert 0.5 < one <= 1.5


class TestCompoundPoisson:
    def test_zero_rate_or_time(self):
        stream = RngStream(0)
        sampler = lambda s, n: np.ones(n)
        assert sample_compound_poisson(0.0, sampler, 5.0, stream) == 0.0
        assert sample_compound_poisson(3.0, sampler, 0.0, stream) == 0.0
        with pytest.raises(InvalidParameterError):
            sample_compound_poisson(-1.0, sampler, 1.0, stream)
        with pytest.raises(InvalidParameterError):
            sample_compound_poisson(1.0, sampler, -1.0, stream)

    def test_unit_jumps_give_poisson_count(self):
        stream = RngStream(64)
        k = 2000
        vals = np.array(
            [
                sample_compound_poisson(3.0, lambda s, n: np.ones(n), 2.0, stream)
                for _ in range(k)
            ]
        )
        assert np.array_equal(vals, np.round(vals))
        assert abs(vals.mean() - 6.0) < 3 * math.sqrt(6.0 / k)

    def test_wald_identity_exponential_jumps(self):
        # E[J_t] = lambda t E[X] = 5 * 1 * 2; Var = lambda t E[X^2] = 40.
        stream = RngStream(65)
        k = 100_000
        jump = lambda s, n: s.gammas(1.0, 0.5, n)
        vals = np.array(
            [sample_compound_poisson(5.0, jump, 1.0, stream) for _ in range(k)]
        )
        assert abs(vals.mean() - 10.0) < 3 * math.sqrt(40.0 / k)


class TestLevyPath:
    def test_zero_measure_is_deterministic_drift(self):
        spec = LevyPathSpec(mu=-1.5, sigma=0.0, measure=zero_measure(), epsilon=0.5)
        times = np.array([0.25, 1.0, 2.5])
        path = sample_levy_path(spec, times, RngStream(1))
        np.testing.assert_array_equal(path.values, -1.5 * times)
        assert path.epsilon == 0.5

    def test_brownian_part_variance(self):
        spec = LevyPathSpec(mu=0.0, sigma=1.5, measure=zero_measure(), epsilon=0.5)
        stream = RngStream(66)
        k = 4000
        ends = path_ends(spec, 1.0, stream, k)
        assert abs(ends.var() - 2.25) < 3 * 2.25 * math.sqrt(2.0 / k)

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            LevyPathSpec(mu=0.0, sigma=0.0, measure=zero_measure(), epsilon=0.0)
        with pytest.raises(InvalidParameterError):
            LevyPathSpec(mu=0.0, sigma=-1.0, measure=zero_measure(), epsilon=0.5)
        spec = gamma_path_spec(1.0, 0.5)
        with pytest.raises(InvalidParameterError):
            sample_levy_path(spec, [], RngStream(0))
        with pytest.raises(InvalidParameterError):
            sample_levy_path(spec, [0.5, 0.5], RngStream(0))

    def test_truncated_gamma_moments(self):
        # With drift alpha (1 - e^-1) the truncated mean is exactly alpha at
        # every level: big jumps restore the tail above 1 and the (eps, 1]
        # band is compensated.  The missing small jumps show up only in the
        # variance, alpha (1 + eps) e^-eps.
        alpha, eps = 4.0, 0.5
        spec = gamma_path_spec(alpha, eps)
        assert spec.mu == pytest.approx(alpha * (1 - math.exp(-1)), rel=1e-12)
        stream = RngStream(52)
        k = 10_000
        ends = path_ends(spec, 1.0, stream, k)
        target_var = alpha * (1 + eps) * math.exp(-eps)
        assert abs(ends.mean() - alpha) < 3 * math.sqrt(target_var / k)
        assert abs(ends.var() - target_var) < 3 * var_se(ends)

    def test_independent_increments(self):
        spec = gamma_path_spec(3.0, 0.1)
        stream = RngStream(67)
        k = 10_000
        paths = np.array(
            [sample_levy_path(spec, [0.5, 1.0], stream).values for _ in range(k)]
        )
        first = paths[:, 0]
        second = paths[:, 1] - paths[:, 0]
        corr = np.corrcoef(first, second)[0, 1]
        assert abs(corr) < 3 / math.sqrt(k)

    def test_infinite_divisibility_surrogate(self):
        # X_1 should match the sum of 4 iid copies of X_{1/4} in law; compare
        # first two moments with pooled standard errors.
        spec = gamma_path_spec(5.0, 0.1)
        k = 10_000
        whole = path_ends(spec, 1.0, RngStream(68), k)
        stream = RngStream(69)
        parts = np.zeros(k)
        for _ in range(4):
            parts += path_ends(spec, 0.25, stream, k)
        mean_se = math.sqrt(whole.var() / k + parts.var() / k)
        assert abs(whole.mean() - parts.mean()) < 3 * mean_se
        v_se = math.hypot(var_se(whole), var_se(parts))
        assert abs(whole.var() - parts.var()) < 3 * v_se

    def test_csv_round_trip(self, tmp_path):
        path = LevyPath(times=[0.5, 1.0], values=[1.25, -0.75], epsilon=0.1)
        out = tmp_path / "path.csv"
        write_path_csv(path, out)
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "t,x"
        assert len(lines) == 3
        parsed = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
        np.testing.assert_array_equal(parsed[:, 0], path.times)
        np.testing.assert_array_equal(parsed[:, 1], path.values)


class TestRefinement:
    def test_zero_mass_band_leaves_path_unchanged(self):
        # Density supported on (0.5, 1]: the band (0.2, 0.4] has no mass, so
        # refinement adds no jumps and a zero compensator.
        def density(x):
            x = np.asarray(x, dtype=float)
            return np.where(x > 0.5, np.exp(-x), 0.0)

        measure = measure_from_density(density)
        spec = LevyPathSpec(mu=0.0, sigma=0.0, measure=measure, epsilon=0.4)
        path = LevyPath(times=[0.5, 1.0], values=[2.0, 3.0], epsilon=0.4)
        refined = refine_path(path, spec, 0.2, RngStream(5))
        np.testing.assert_array_equal(refined.values, path.values)
        assert refined.epsilon == 0.2

    def test_validation(self):
        spec = gamma_path_spec(2.0, 0.5)
        path = sample_levy_path(spec, [1.0], RngStream(6))
        for bad in (0.5, 0.9, 0.0, -0.1):
            with pytest.raises(InvalidParameterError):
                refine_path(path, spec, bad, RngStream(6))

    def test_refined_matches_direct_generation(self):
        # eps 1 -> 0.05 by refinement vs direct eps = 0.05 paths: equal
        # mean and variance within pooled errors.
        alpha = 5.0
        coarse = gamma_path_spec(alpha, 1.0)
        fine = gamma_path_spec(alpha, 0.05)
        k = 6000
        stream_a = RngStream(70)
        refined = np.empty(k)
        for i in range(k):
            start = sample_levy_path(coarse, [1.0], stream_a)
            refined[i] = refine_path(start, coarse, 0.05, stream_a).values[0]
        direct = path_ends(fine, 1.0, RngStream(71), k)
        mean_se = math.sqrt(refined.var() / k + direct.var() / k)
        assert abs(refined.mean() - direct.mean()) < 3 * mean_se
        v_se = math.hypot(var_se(refined), var_se(direct))
        assert abs(refined.var() - direct.var()) < 3 * v_se

    def test_refinement_associative_in_law(self):
        alpha = 5.0
        spec = gamma_path_spec(alpha, 1.0)
        k = 6000
        stream_a = RngStream(72)
        one_step = np.empty(k)
        for i in range(k):
            start = sample_levy_path(spec, [1.0], stream_a)
            one_step[i] = refine_path(start, spec, 0.02, stream_a).values[0]
        stream_b = RngStream(73)
        two_step = np.empty(k)
        for i in range(k):
            start = sample_levy_path(spec, [1.0], stream_b)
            mid = refine_path(start, spec, 0.2, stream_b)
            two_step[i] = refine_path(mid, spec, 0.02, stream_b).values[0]
        mean_se = math.sqrt(one_step.var() / k + two_step.var() / k)
        assert abs(one_step.mean() - two_step.mean()) < 3 * mean_se
        v_se = math.hypot(var_se(one_step), var_se(two_step))
        assert abs(one_step.var() - two_step.var()) < 3 * v_se


class TestDirectGammaOracle:
    def test_increment_moments_and_independence(self):
        alpha = 3.0
        stream = RngStream(74)
        k = 20_000
        paths = np.array(
            [
                sample_gamma_process_direct(alpha, [0.5, 1.0], stream).values
                for _ in range(k)
            ]
        )
        inc = np.stack([paths[:, 0], paths[:, 1] - paths[:, 0]], axis=1)
        # Each increment is Gamma(alpha/2, 1): mean and variance alpha/2.
        for col in range(2):
            assert abs(inc[:, col].mean() - 1.5) < 3 * math.sqrt(1.5 / k)
            assert abs(inc[:, col].var() - 1.5) < 3 * var_se(inc[:, col])
        corr = np.corrcoef(inc[:, 0], inc[:, 1])[0, 1]
        assert abs(corr) < 3 / math.sqrt(k)

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            sample_gamma_process_direct(0.0, [1.0], RngStream(0))
        with pytest.raises(InvalidParameterError):
            sample_gamma_process_direct(1.0, [1.0, 0.5], RngStream(0))

    def test_truncated_route_matches_direct_oracle(self):
        # At eps = 0.001 the truncated path and the exact subordinator agree
        # in mean within pooled errors.
        alpha = 10.0
        k = 5000
        truncated = path_ends(gamma_path_spec(alpha, 0.001), 1.0, RngStream(75), k)
        direct = np.array(
            [
                sample_gamma_process_direct(alpha, [1.0], RngStream(76).child(i)).values[0]
                for i in range(k)
            ]
        )
        mean_se = math.sqrt(truncated.var() / k + direct.var() / k)
        assert abs(truncated.mean() - direct.mean()) < 3 * mean_se


class TestGammaSheet:
    def test_spec_validation(self):
        with pytest.raises(InvalidParameterError):
            GammaCell(0.0, 1.0)
        with pytest.raises(InvalidParameterError):
            GammaCell(1.0, -1.0)
        with pytest.raises(InvalidParameterError):
            bump_kernel(0.0)
        with pytest.raises(InvalidParameterError):
            LevySheetSpec(n=0, kernel=bump_kernel(0.1), cell_law=GammaCell(1, 1))
        spec = gamma_sheet_spec(10, 0.05, 2.0, 3.0)
        assert spec.support_radius == 0.05
        with pytest.raises(InvalidParameterError):
            sample_gamma_sheet(spec, 0, RngStream(0))

    def test_bump_kernel_values(self):
        kernel = bump_kernel(0.2)
        assert kernel(0.5, 0.5, 0.5, 0.5) == pytest.approx(0.04)
        assert kernel(0.5, 0.5, 0.5, 0.8) == 0.0
        vals = kernel(0.5, 0.5, np.array([0.5, 0.6]), np.array([0.6, 0.5]))
        np.testing.assert_allclose(vals, [0.04 - 0.01, 0.04 - 0.01])

    def test_zero_kernel_gives_zero_field(self):
        spec = LevySheetSpec(
            n=20,
            kernel=lambda tx, ty, xx, yy: np.zeros(np.broadcast(tx, ty, xx, yy).shape),
            cell_law=GammaCell(5.0, 1.0),
        )
        field = sample_gamma_sheet(spec, 8, RngStream(7))
        assert isinstance(field, Field)
        assert field.values.shape == (8, 8)
        assert np.all(field.values == 0.0)
        assert field.grid.dx == pytest.approx(1 / 8)

    def test_field_nonnegative_exact(self):
        spec = gamma_sheet_spec(40, 0.1, 100.0, 100.0)
        field = sample_gamma_sheet(spec, 20, RngStream(8))
        assert np.all(field.values >= 0.0)

    def test_constant_kernel_expectation(self):
        # kernel identically 1: the field value is the total lattice mass,
        # Gamma(alpha, beta), with mean alpha / beta.
        spec = LevySheetSpec(
            n=5,
            kernel=lambda tx, ty, xx, yy: np.ones(np.broadcast(tx, ty, xx, yy).shape),
            cell_law=GammaCell(4.0, 8.0),
        )
        assert expected_sheet_value(spec, (0.3, 0.7)) == pytest.approx(0.5, rel=1e-12)

    def test_center_mean_matches_deterministic_sum(self):
        spec = gamma_sheet_spec(50, 0.1, 100.0, 100.0)
        target = expected_sheet_value(spec, (0.5, 0.5))
        draws = gamma_sheet_values_at(spec, (0.5, 0.5), RngStream(77), 10_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - target) < 3 * se

    def test_values_at_matches_full_sheet_law(self):
        # The pruned single-point generator and the full-sheet generator must
        # induce the same law at a shared grid point.
        spec = gamma_sheet_spec(30, 0.15, 50.0, 50.0)
        stream = RngStream(78)
        k_full = 400
        full = np.array(
            [
                sample_gamma_sheet(spec, 4, stream).values[2, 2]
                for _ in range(k_full)
            ]
        )
        point = (2 / 4, 2 / 4)
        fast = gamma_sheet_values_at(spec, point, RngStream(79), 4000)
        mean_se = math.sqrt(full.var() / k_full + fast.var() / fast.size)
        assert abs(full.mean() - fast.mean()) < 3 * mean_se
        v_se = math.hypot(var_se(full), var_se(fast))
        assert abs(full.var() - fast.var()) < 3 * v_se
