"""Dispersion, variance and decomposition machinery."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from displab.experiments.densities import density_suite
from displab.rng import RngStream
from displab.sampling import uniform_ball, uniform_cube
from displab.stats import (
    DegenerateDensityError,
    NotLogconcaveError,
    PiecewiseConstantDensity,
    ScalarSampleSet,
    dispersion_csv_rows,
    disp_lower_bound_from_variance,
    mixture_dispersion_check,
    norm_sq_samples,
    norm_sq_summary,
    p_dispersion,
    sigma_k_sq,
    uniform_part_decomposition,
    uniform_part_width_ratio,
    variance,
)


def brute_force_dispersion(values: np.ndarray, p: float) -> float:
    """All-pairs oracle: min width over index pairs whose window mass >= 1-p."""
    x = np.sort(values)
    m = x.size
    best = math.inf
    for i in range(m):
        for j in range(i, m):
            if (j - i + 1) / m >= 1.0 - p:
                best = min(best, x[j] - x[i])
                break  # wider windows at the same i only grow
    return best


class TestPDispersion:
    def test_integer_example(self):
        s = ScalarSampleSet(np.arange(10.0))
        est = p_dispersion(s, 0.5)
        assert est.width == 4.0
        assert est.hi - est.lo == est.width

    def test_constant_samples(self):
        s = ScalarSampleSet(np.full(17, 2.5))
        for p in (0.01, 0.5, 0.99):
            assert p_dispersion(s, p).width == 0.0

    def test_small_p_gives_full_range(self):
        s = ScalarSampleSet([3.0, -1.0, 7.0, 2.0])
        assert p_dispersion(s, 1e-9).width == 8.0

    def test_window_mass_invariant(self):
        gen = RngStream(50).generator()
        for _ in range(20):
            m = int(gen.integers(1, 60))
            s = ScalarSampleSet(gen.standard_normal(m))
            p = float(gen.uniform(0.05, 0.95))
            est = p_dispersion(s, p)
            inside = np.sum((s.values >= est.lo) & (s.values <= est.hi))
            assert inside / m >= 1.0 - p

    def test_matches_brute_force(self):
        gen = RngStream(51).generator()
        for _ in range(60):
            m = int(gen.integers(2, 120))
            values = gen.standard_normal(m) * gen.uniform(0.1, 5.0)
            for p in (0.1, 0.5, 0.9):
                got = p_dispersion(ScalarSampleSet(values), p).width
                assert got == brute_force_dispersion(values, p)

    @settings(max_examples=80, deadline=None)
    @given(
        st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40),
        st.floats(0.05, 0.95),
        st.floats(0.05, 0.9),
    )
    def test_monotone_translation_scaling(self, values, p, dp):
        s = ScalarSampleSet(values)
        w1 = p_dispersion(s, p).width
        p2 = min(p + dp, 0.99)
        assert p_dispersion(s, p2).width <= w1  # nonincreasing in p
        shifted = ScalarSampleSet(np.asarray(values) + 13.25)
        assert p_dispersion(shifted, p).width == pytest.approx(w1, rel=1e-9, abs=1e-6)
        scaled = ScalarSampleSet(np.asarray(values) * 3.0)
        assert p_dispersion(scaled, p).width == pytest.approx(3.0 * w1, rel=1e-9, abs=1e-6)

    def test_bad_p(self):
        s = ScalarSampleSet([1.0, 2.0])
        for p in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(ValueError):
                p_dispersion(s, p)


class TestVarianceAndSigmaK:
    def test_variance_trivials(self):
        assert variance(ScalarSampleSet(np.full(5, 3.3))) == 0.0
        assert variance(ScalarSampleSet([0.0, 2.0])) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            variance(ScalarSampleSet([1.0]))

    def test_ball_norm_sq_variance(self):
        # var |X|^2 = n/(n+4) - (n/(n+2))^2 = 1/12 at n = 2, r = 1
        pts = uniform_ball(2, 1.0, RngStream(52).generator(), size=100_000)
        s = norm_sq_samples(pts)
        v = variance(s)
        se = math.sqrt(2.0) * 1.0 / 12.0 / math.sqrt(s.count)  # rough moment SE
        assert abs(v - 1.0 / 12.0) <= 6 * se

    def test_sigma_k_sphere_is_zero(self):
        gen = RngStream(53).generator()
        pts = gen.standard_normal((200, 4))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        assert sigma_k_sq(pts) == pytest.approx(0.0, abs=1e-12)

    def test_sigma_k_ball(self):
        pts = uniform_ball(2, 1.0, RngStream(54).generator(), size=200_000)
        assert sigma_k_sq(pts) == pytest.approx(2.0 / 3.0, abs=0.02)

    def test_sigma_k_cube_any_n(self):
        for n in (3, 8):
            pts = uniform_cube(n, RngStream(55 + n).generator(), size=200_000)
            assert sigma_k_sq(pts) == pytest.approx(0.8, abs=0.02)

    def test_norm_sq_summary_iid_consistency(self):
        pts = uniform_cube(4, RngStream(57).generator(), size=20_000)
        y = np.einsum("ij,ij->i", pts, pts)
        summ = norm_sq_summary(y, 4)
        assert summ.var == pytest.approx(float(np.var(y, ddof=1)), rel=1e-9)
        assert summ.sigma_k_sq == pytest.approx(sigma_k_sq(pts), rel=1e-6)
        assert summ.mean_se == pytest.approx(float(np.std(y, ddof=1) / math.sqrt(y.size)), rel=1e-9)

    def test_norm_sq_summary_chain_layout(self):
        gen = RngStream(58).generator()
        y = gen.uniform(0.5, 1.5, size=(40, 100))
        summ = norm_sq_summary(y, 3)
        flat = norm_sq_summary(y.reshape(-1), 3)
        assert summ.var == pytest.approx(flat.var, rel=0.05)


class TestDispersionBounds:
    def test_bounded_support_formula(self):
        p_star, bound = disp_lower_bound_from_variance(1.0, 2.0)
        assert (p_star, bound) == (pytest.approx(3.0 / 16.0), pytest.approx(1.0))

    def test_logconcave_formula(self):
        p, bound = disp_lower_bound_from_variance(4.0, 10.0, logconcave=True, p=0.5)
        assert bound == pytest.approx(1.0)

    def test_sigma_exceeding_support_raises(self):
        with pytest.raises(ValueError):
            disp_lower_bound_from_variance(9.0, 2.0)

    def test_uniform_samples_meet_logconcave_bound(self):
        gen = RngStream(60).generator()
        samples = ScalarSampleSet(gen.uniform(0.0, 1.0, size=100_000))
        emp = p_dispersion(samples, 0.5).width
        _, bound = disp_lower_bound_from_variance(1.0 / 12.0, 1.0, logconcave=True, p=0.5)
        assert emp == pytest.approx(0.5, abs=0.01)
        assert emp >= bound

    def test_bounded_support_bound_holds_empirically(self):
        # uniform on [0, M]: at p* = 3 sigma^2 / (4 M^2) dispersion >= sigma
        gen = RngStream(61).generator()
        m_len = 2.0
        samples = ScalarSampleSet(gen.uniform(0.0, m_len, size=100_000))
        sigma_sq = m_len**2 / 12.0
        p_star, bound = disp_lower_bound_from_variance(sigma_sq, m_len)
        assert p_dispersion(samples, p_star).width >= bound - 0.01


class TestMixtureDispersion:
    def test_alpha_one_equality(self):
        gen = RngStream(62).generator()
        x = gen.standard_normal(5000)
        s = ScalarSampleSet(x)
        assert mixture_dispersion_check(s, ScalarSampleSet(x.copy()), 1.0, 0.4)

    def test_point_mass_mixture(self):
        gen = RngStream(63).generator()
        m = 100_000
        x = gen.uniform(0.0, 1.0, size=m)
        pick = gen.random(m) < 0.5
        z = np.where(pick, gen.uniform(0.0, 1.0, size=m), 5.0)
        ok = mixture_dispersion_check(
            ScalarSampleSet(x), ScalarSampleSet(z), 0.5, 0.3, slack=0.01
        )
        assert ok

    def test_degenerate_constant(self):
        s = ScalarSampleSet(np.zeros(100))
        assert mixture_dispersion_check(s, s, 0.7, 0.5)

    def test_alpha_range(self):
        s = ScalarSampleSet([0.0, 1.0])
        with pytest.raises(ValueError):
            mixture_dispersion_check(s, s, 0.0, 0.5)


class TestVarianceIdentities:
    def test_product_variance_identity(self):
        # independent X, Y: rv(XY) = (1 + rvX)(1 + rvY) - 1
        gen = RngStream(64).generator()
        m = 400_000
        x = gen.uniform(1.0, 2.0, size=m)
        y = gen.uniform(2.0, 5.0, size=m)

        def rv(a):
            return float(np.var(a) / np.mean(a) ** 2)

        lhs = rv(x * y)
        rhs = (1 + rv(x)) * (1 + rv(y)) - 1
        assert lhs == pytest.approx(rhs, rel=0.02)
        assert lhs >= rv(x) + rv(y) - 0.01 * rhs

    def test_total_variance_exact_on_discrete_joint(self):
        # var X = E var(X|Y) + var E(X|Y): exact for the empirical joint
        gen = RngStream(65).generator()
        m = 5000
        y = gen.integers(0, 7, size=m)
        x = gen.standard_normal(m) + 0.5 * y
        total = float(np.var(x))
        within = 0.0
        between_means = []
        weights = []
        for label in np.unique(y):
            grp = x[y == label]
            within += grp.size / m * float(np.var(grp))
            between_means.append(float(np.mean(grp)))
            weights.append(grp.size / m)
        between = float(
            np.average((np.array(between_means) - np.average(between_means, weights=weights)) ** 2, weights=weights)
        )
        assert total == pytest.approx(within + between, rel=1e-12)


class TestUniformPartDecomposition:
    def test_uniform_density_example(self):
        f = PiecewiseConstantDensity([0.0, 1.0], [1.0])
        part = uniform_part_decomposition(f)
        assert part.a >= f.mean() - 1e-12
        assert 0.0 < part.alpha < 1.0
        xs = np.linspace(0.0, 0.999999, 1001)
        g = np.where((xs >= part.a) & (xs < part.b), 1.0 / (part.b - part.a), 0.0)
        recon = part.alpha * g + (1 - part.alpha) * part.h.pdf(xs)
        assert np.max(np.abs(recon - f.pdf(xs))) <= 1e-9

    def test_bimodal_precondition_rejection(self):
        f = PiecewiseConstantDensity([0.0, 1.0, 3.0, 4.0], [0.5, 0.0, 0.5])
        assert not f.logconcave_cdf_ok()
        with pytest.raises(NotLogconcaveError):
            uniform_part_decomposition(f)

    def test_triangular_decomposition(self):
        pieces = 24
        bp = np.linspace(0.0, 2.0, pieces + 1)
        mids = 0.5 * (bp[:-1] + bp[1:])
        levels = np.where(mids <= 1.0, mids, 2.0 - mids)
        levels = levels / np.sum(levels * np.diff(bp))
        f = PiecewiseConstantDensity(bp, levels)
        part = uniform_part_decomposition(f)
        assert part.a >= f.mean() - 1e-12
        assert np.all(part.h.levels >= -1e-9)
        assert uniform_part_width_ratio(f, part) > 0.0

    def test_whole_suite_postconditions(self):
        for name, f in density_suite():
            part = uniform_part_decomposition(f)
            assert 0.0 < part.alpha <= 1.0, name
            assert part.a >= f.mean() - 1e-12, name
            assert np.all(part.h.levels >= 0.0), name

    def test_degenerate_zero_variance(self):
        # a spike of width 1e-10 on a unit support is numerically a point mass
        f = PiecewiseConstantDensity([0.0, 1e-10, 1.0], [1e10, 0.0])
        with pytest.raises(DegenerateDensityError):
            uniform_part_decomposition(f)

    def test_narrow_uniform_still_decomposes(self):
        f = PiecewiseConstantDensity([0.0, 1e-7, 1.0], [1e7, 0.0])
        part = uniform_part_decomposition(f)
        assert 0.0 < part.alpha < 1.0


class TestDensityValidation:
    def test_integral_check(self):
        with pytest.raises(ValueError):
            PiecewiseConstantDensity([0.0, 1.0], [0.9])

    def test_support_start(self):
        with pytest.raises(ValueError):
            PiecewiseConstantDensity([0.5, 1.5], [1.0])

    def test_cdf_and_moments(self):
        f = PiecewiseConstantDensity([0.0, 1.0, 2.0], [0.75, 0.25])
        assert f.cdf(1.0) == pytest.approx(0.75)
        assert f.cdf(2.0) == 1.0
        assert f.mean() == pytest.approx(0.75 * 0.5 + 0.25 * 1.5)
        grid = np.linspace(0, 2, 100001)
        num_var = np.trapezoid((grid - f.mean()) ** 2 * f.pdf(grid), grid)
        assert f.variance() == pytest.approx(float(num_var), abs=1e-4)


def test_dispersion_csv_serialization():
    s = ScalarSampleSet(np.arange(10.0))
    est = p_dispersion(s, 0.5)
    text = dispersion_csv_rows([("toy", est, s.count)])
    lines = text.strip().split("\n")
    assert lines[0] == "statistic,p,width,lo,hi,m"
    assert lines[1].startswith("toy,0.5,4.0,")
    assert lines[1].endswith(",10")
