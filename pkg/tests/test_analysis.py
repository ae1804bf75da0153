import math

import numpy as np
import pytest
from scipy.integrate import quad

from mubest.analysis import (
    expected_min_sphere,
    fit_rate,
    sublevel_radius_inner,
    sublevel_radius_outer,
    summarize,
)
from mubest.sampling import RngStream, sample_uniform_ball


def _quadrature_oracle(lam: int, d: int) -> float:
    value, _ = quad(lambda u: (1.0 - u ** (d / 2.0)) ** lam, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    return value


class TestExpectedMinSphere:
    def test_small_cases_exact(self):
        assert expected_min_sphere(1, 2) == pytest.approx(0.5, abs=1e-12)
        assert expected_min_sphere(2, 2) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_matches_quadrature(self):
        assert expected_min_sphere(10, 4) == pytest.approx(_quadrature_oracle(10, 4), abs=1e-9)

    def test_log_gamma_against_factorials(self):
        for n in range(1, 21):
            assert math.exp(math.lgamma(n + 1)) == pytest.approx(math.factorial(n), rel=1e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            expected_min_sphere(0, 3)
        with pytest.raises(ValueError):
            expected_min_sphere(5, 0)

    def test_monte_carlo_agreement(self):
        # one shared check of sampler + ranking + closed form: MC mean of the
        # minimum squared norm stays within 4 standard errors of the formula
        runs = 2000
        for d in range(1, 7):
            for lam in (1, 10, 100):
                stream = RngStream(300, (d, lam))
                pts = sample_uniform_ball(stream, d, 1.0, runs * lam).reshape(runs, lam, d)
                mins = (pts**2).sum(axis=2).min(axis=1)
                se = mins.std(ddof=1) / math.sqrt(runs)
                assert abs(mins.mean() - expected_min_sphere(lam, d)) <= 4.0 * se


class TestFitRate:
    def test_exact_power_law(self):
        lams = np.array([10.0, 100.0, 1000.0, 10000.0])
        fit = fit_rate(lams, 3.7 * lams**-0.5)
        assert fit.slope == pytest.approx(-0.5, abs=1e-12)
        assert fit.residual == pytest.approx(0.0, abs=1e-12)
        assert fit.n_points == 4

    def test_constant_regrets(self):
        fit = fit_rate([10, 100, 1000], [2.0, 2.0, 2.0])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)

    def test_gamma_ratio_slope_matches_dimension(self):
        lams = np.unique(np.geomspace(100, 100_000, 10).astype(int))
        regs = [expected_min_sphere(int(lam), 4) for lam in lams]
        fit = fit_rate(lams, regs)
        assert fit.slope == pytest.approx(-0.5, abs=0.02)

    def test_scale_invariance(self):
        lams = [64, 256, 1024, 4096]
        regs = [0.31, 0.11, 0.05, 0.013]
        base = fit_rate(lams, regs)
        scaled = fit_rate(lams, [17.3 * r for r in regs])
        assert scaled.slope == pytest.approx(base.slope, abs=1e-12)
        assert scaled.intercept != base.intercept

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            fit_rate([10, 100], [1.0, 0.1])
        with pytest.raises(ValueError):
            fit_rate([10, 100, 1000], [1.0, -0.1, 0.01])


class TestSublevelRadii:
    def test_unperturbed_is_sqrt(self):
        assert sublevel_radius_inner(0.49, 0.0, 3.0) == math.sqrt(0.49)

    def test_zero_level(self):
        assert sublevel_radius_inner(0.0, 1.0, 3.0) == 0.0
        assert sublevel_radius_outer(0.0, 1.0, 3.0) == 0.0

    def test_outer_quadratic_limit(self):
        assert sublevel_radius_outer(0.25, 1e-9, 3.0) == pytest.approx(0.5, abs=1e-6)

    def test_small_level_asymptotics(self):
        # (phi(h) - sqrt(h)) / h^((alpha-1)/2) -> -M/2 inner, +m/2 outer
        h, alpha = 1e-6, 3.0
        inner = (sublevel_radius_inner(h, 1.0, alpha) - math.sqrt(h)) / h
        outer = (sublevel_radius_outer(h, 1.0, alpha) - math.sqrt(h)) / h
        assert inner == pytest.approx(-0.5, rel=0.01)
        assert outer == pytest.approx(0.5, rel=0.01)

    def test_ordering(self):
        for h in np.geomspace(1e-8, 1e-2, 13):
            lo = sublevel_radius_inner(h, 0.7, 2.5)
            hi = sublevel_radius_outer(h, 0.7, 2.5)
            assert lo <= math.sqrt(h) <= hi

    def test_strictly_increasing(self):
        grid = np.geomspace(1e-9, 1e-3, 25)
        inner = [sublevel_radius_inner(h, 1.3, 3.5) for h in grid]
        outer = [sublevel_radius_outer(h, 0.4, 3.5) for h in grid]
        assert np.all(np.diff(inner) > 0)
        assert np.all(np.diff(outer) > 0)

    def test_roots_satisfy_equations(self):
        for h in (1e-8, 1e-4, 1e-2):
            u = sublevel_radius_inner(h, 2.0, 3.0)
            assert u * u + 2.0 * u**3 == pytest.approx(h, rel=1e-10)
            v = sublevel_radius_outer(h, 0.5, 3.0)
            assert v * v - 0.5 * v**3 == pytest.approx(h, rel=1e-10)

    def test_outer_domain_error(self):
        # branch maximum for m=1, alpha=3 is at r0=2/3 with level 4/27
        with pytest.raises(ValueError):
            sublevel_radius_outer(4.0 / 27.0 + 1e-12, 1.0, 3.0)
        with pytest.raises(ValueError):
            sublevel_radius_inner(-1.0, 1.0, 3.0)


class TestSummarize:
    def test_constant(self):
        stats = summarize([1.0, 1.0, 1.0, 1.0])
        assert stats.mean == 1.0 and stats.std_error == 0.0

    def test_two_points(self):
        stats = summarize([0.0, 2.0])
        assert stats.mean == 1.0
        assert stats.std_error == pytest.approx(1.0, abs=1e-12)

    def test_three_points(self):
        stats = summarize([1.0, 2.0, 3.0])
        assert stats.mean == 2.0
        assert stats.std_error == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-12)
        assert stats.ci_low == pytest.approx(2.0 - 1.959963984540054 / math.sqrt(3.0), rel=1e-12)

    def test_too_short(self):
        with pytest.raises(ValueError):
            summarize([1.0])
