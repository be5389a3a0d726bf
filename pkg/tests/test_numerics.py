"""Quadrature, minimization, special functions, sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad as scipy_quad

from normrisk.numerics import (
    DEFAULT_QUADRATURE,
    MinimizationError,
    QuadratureConfig,
    QuadratureError,
    integrate,
    log_gamma,
    minimize_scalar,
    normal_mass,
    sample_standard_normals,
    scaled_chi_interval,
    scaled_chi_inverse_mean,
    scaled_chi_pdf,
    std_normal_cdf,
    std_normal_pdf,
    substream,
)

INV_TWO_SQRT_PI = 1.0 / (2.0 * math.sqrt(math.pi))


class TestIntegrate:
    def test_normal_pdf_normalizes(self):
        assert integrate(std_normal_pdf, -math.inf, math.inf) == pytest.approx(1.0, abs=1e-9)

    def test_epanechnikov_second_moment(self):
        def f(u):
            return u * u * 1.5 * (1.0 - 4.0 * u * u)

        assert integrate(f, -0.5, 0.5) == pytest.approx(0.05, abs=1e-12)

    def test_squared_normal_pdf(self):
        val = integrate(lambda x: std_normal_pdf(x) ** 2, -math.inf, math.inf)
        assert val == pytest.approx(INV_TWO_SQRT_PI, abs=1e-10)

    def test_half_infinite_ranges(self):
        assert integrate(std_normal_pdf, 0.0, math.inf) == pytest.approx(0.5, abs=1e-10)
        assert integrate(std_normal_pdf, -math.inf, 1.0) == pytest.approx(
            std_normal_cdf(1.0), abs=1e-10
        )

    def test_scalar_only_integrand_falls_back(self):
        # math.exp rejects arrays, forcing the pointwise path
        val = integrate(lambda x: math.exp(-x), 0.0, 5.0)
        assert val == pytest.approx(1.0 - math.exp(-5.0), abs=1e-10)

    def test_narrow_spike_with_bracketing_points(self):
        width = 1e-4

        def spike(x):
            return std_normal_pdf((x - 0.3) / width) / width

        val = integrate(spike, 0.0, 1.0, points=(0.295, 0.305))
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_invalid_interval_rejected(self):
        with pytest.raises(ValueError):
            integrate(std_normal_pdf, 1.0, 1.0)

    def test_nonconvergence_raises(self):
        cfg = QuadratureConfig(abs_tol=1e-300, rel_tol=0.0, max_subdivisions=8)
        with pytest.raises(QuadratureError):
            integrate(lambda x: np.sin(50.0 * x) ** 2, 0.0, 10.0, cfg)

    @given(
        st.lists(st.floats(-3, 3), min_size=3, max_size=3),
        st.lists(st.floats(-3, 3), min_size=3, max_size=3),
        st.floats(-2, 2),
        st.floats(-2, 2),
    )
    def test_linearity_on_polynomials(self, ca, cb, alpha, beta):
        f = np.polynomial.Polynomial(ca)
        g = np.polynomial.Polynomial(cb)
        combined = integrate(lambda x: alpha * f(x) + beta * g(x), 0.0, 1.0)
        separate = alpha * integrate(f, 0.0, 1.0) + beta * integrate(g, 0.0, 1.0)
        assert combined == pytest.approx(separate, abs=2 * DEFAULT_QUADRATURE.abs_tol)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(rel_tol=-1.0)
        with pytest.raises(ValueError):
            QuadratureConfig(max_subdivisions=0)


class TestMinimize:
    def test_quadratic(self):
        res = minimize_scalar(lambda x: (x - 2.0) ** 2, 0.0, 5.0, tol=1e-8)
        assert res.argmin == pytest.approx(2.0, abs=1e-8)
        assert res.min_value == pytest.approx(0.0, abs=1e-15)
        assert res.iterations >= 1

    def test_monotone_function_rejected(self):
        with pytest.raises(MinimizationError):
            minimize_scalar(lambda x: x, 0.0, 1.0, tol=1e-6)

    def test_invalid_bracket(self):
        with pytest.raises(ValueError):
            minimize_scalar(lambda x: x * x, 2.0, 1.0)

    @given(
        st.floats(0.3, 4.0),
        st.floats(-5.0, 5.0),
        st.floats(0.05, 10.0),
        st.floats(-3.0, 3.0),
    )
    def test_affine_reparameterization(self, curv, center, scale, shift):
        # minimizing f(a*x + b) must return the mapped argmin
        def f(x):
            return curv * (x - center) ** 2

        direct = minimize_scalar(f, center - 4.0, center + 5.0, tol=1e-9).argmin
        mapped = minimize_scalar(
            lambda t: f(scale * t + shift),
            (center - 4.0 - shift) / scale,
            (center + 5.0 - shift) / scale,
            tol=1e-9,
        ).argmin
        assert scale * mapped + shift == pytest.approx(direct, abs=1e-6 * max(1.0, scale))


class TestSpecialFunctions:
    def test_pdf_at_zero(self):
        assert std_normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-15)

    def test_cdf_against_erf(self):
        xs = np.linspace(-8.0, 8.0, 81)
        for x in xs:
            oracle = 0.5 * math.erfc(-x / math.sqrt(2.0))
            assert abs(std_normal_cdf(float(x)) - oracle) < 1e-13

    def test_normal_mass_symmetry_and_tables(self):
        assert normal_mass(0.0, math.inf) == pytest.approx(0.5, abs=1e-15)
        oracle = math.erf(1.96 / math.sqrt(2.0))
        assert normal_mass(-1.96, 1.96) == pytest.approx(oracle, abs=1e-14)
        assert normal_mass(-1.96, 1.96) == pytest.approx(0.9500042, abs=5e-8)

    @given(
        st.floats(-8, 8),
        st.floats(-8, 8),
        st.floats(-8, 8),
    )
    def test_normal_mass_additivity(self, a, b, c):
        a, b, c = sorted((a, b, c))
        total = normal_mass(a, b) + normal_mass(b, c)
        assert total == pytest.approx(normal_mass(a, c), abs=1e-14)

    def test_log_gamma_values(self):
        assert log_gamma(1.0) == 0.0
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
        assert math.exp(log_gamma(6.0)) == pytest.approx(120.0, rel=1e-12)

    def test_log_gamma_domain(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)
        with pytest.raises(ValueError):
            log_gamma(-1.5)


class TestScaledChi:
    @pytest.mark.parametrize("n", [2, 5, 10, 30])
    def test_normalization(self, n):
        val, _ = scipy_quad(lambda z: scaled_chi_pdf(n, z), 0.0, np.inf, epsabs=1e-12)
        assert val == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("n", [5, 10, 30])
    def test_unit_second_moment(self, n):
        val, _ = scipy_quad(lambda z: z * z * scaled_chi_pdf(n, z), 0.0, np.inf, epsabs=1e-12)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_inverse_mean_gamma_ratio(self):
        # n = 5: sqrt(2) * Gamma(1.5) / Gamma(2)
        closed = math.sqrt(2.0) * math.gamma(1.5) / math.gamma(2.0)
        assert scaled_chi_inverse_mean(5) == pytest.approx(closed, rel=1e-14)
        by_quad, _ = scipy_quad(lambda z: scaled_chi_pdf(5, z) / z, 0.0, np.inf, epsabs=1e-12)
        assert by_quad == pytest.approx(closed, abs=1e-9)
        assert closed == pytest.approx(1.2533141, abs=5e-8)

    # at exactly n = 30 the mass is 0.978741 (chi-square cdf oracle); the
    # 0.98 threshold holds from n = 31 on
    @pytest.mark.parametrize(
        "n",
        [
            pytest.param(
                30,
                marks=pytest.mark.xfail(
                    strict=True, reason="mass at n=30 is 0.9787; threshold holds from n=31"
                ),
            ),
            31,
            50,
            200,
        ],
    )
    def test_concentration(self, n):
        mass, _ = scipy_quad(lambda z: scaled_chi_pdf(n, z), 0.7, 1.3, epsabs=1e-12)
        assert mass > 0.98

    @pytest.mark.parametrize("n", [2, 3, 4, 10, 1000])
    def test_interval_captures_mass(self, n):
        lo, hi = scaled_chi_interval(n)
        assert 0.0 <= lo < hi
        inside, _ = scipy_quad(
            lambda z: scaled_chi_pdf(n, z), max(lo, 0.0), hi, epsabs=1e-13, limit=300
        )
        assert inside == pytest.approx(1.0, abs=1e-12)


class TestSampling:
    def test_empty(self):
        assert sample_standard_normals(7, 0).size == 0

    def test_deterministic(self):
        a = sample_standard_normals(123, 1000)
        b = sample_standard_normals(123, 1000)
        assert np.array_equal(a, b)

    def test_distribution_sanity(self):
        x = sample_standard_normals(2024, 10**6)
        assert abs(x.mean()) < 0.004  # 3 sigma bound at a million draws
        assert abs(x.var(ddof=1) - 1.0) < 0.005
        tail = np.mean(np.abs(x) > 1.96)
        assert abs(tail - 0.05) < 3.1 * math.sqrt(0.05 * 0.95 / 1e6)

    def test_substreams_are_distinct_and_stable(self):
        a0 = substream(9, 0).standard_normal(8)
        a1 = substream(9, 1).standard_normal(8)
        assert not np.allclose(a0, a1)
        assert np.array_equal(a0, substream(9, 0).standard_normal(8))
        with pytest.raises(ValueError):
            substream(9, -1)
