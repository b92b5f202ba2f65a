import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from efshoot.specfun import (BracketingError, BubbleSpec, DimensionParams,
                             DomainError, alpha_fn, alpha_zero, bessel_j,
                             bubble_eval, gamma_fn, radial_eigenvalue,
                             sobolev_constant, t1_prefactor_candidates)


class TestGamma:
    def test_integer_values(self):
        assert gamma_fn(1) == pytest.approx(1.0, rel=1e-12)
        assert gamma_fn(5) == pytest.approx(24.0, rel=1e-12)

    def test_half_integer(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-12)

    def test_against_mpmath_grid(self):
        for x in np.linspace(0.1, 30.0, 97):
            assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-12)

    def test_negative_non_integer_reflection(self):
        assert gamma_fn(-0.5) == pytest.approx(float(mpmath.gamma(-0.5)), rel=1e-12)

    def test_poles(self):
        for x in (0.0, -1.0, -5.0):
            with pytest.raises(DomainError):
                gamma_fn(x)

    @given(st.floats(min_value=0.5, max_value=29.0))
    @settings(max_examples=50, deadline=None)
    def test_recurrence(self, x):
        assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-11)


class TestBesselJ:
    def test_at_zero(self):
        assert bessel_j(0.0, 0.0) == 1.0
        assert bessel_j(1.5, 0.0) == 0.0

    def test_half_order_closed_form(self):
        # J_{1/2}(s) = sqrt(2/(pi s)) sin s
        assert abs(bessel_j(0.5, math.pi)) <= 1e-12
        for s in (0.3, 1.0, 2.5, 7.0, 20.0):
            ref = math.sqrt(2.0 / (math.pi * s)) * math.sin(s)
            assert bessel_j(0.5, s) == pytest.approx(ref, abs=1e-12)

    def test_first_zero_of_j1(self):
        # located by bisection on the series itself
        a, b = 3.0, 4.5
        for _ in range(60):
            m = 0.5 * (a + b)
            if bessel_j(1.0, a) * bessel_j(1.0, m) <= 0.0:
                b = m
            else:
                a = m
        assert 0.5 * (a + b) == pytest.approx(3.8317059702, abs=1e-9)
        assert abs(bessel_j(1.0, 3.8317059702)) <= 1e-9

    def test_against_mpmath(self):
        for nu in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5):
            for s in (0.1, 1.0, 5.0, 15.0, 29.0, 45.0, 59.0):
                ref = float(mpmath.besselj(nu, s))
                assert bessel_j(nu, s) == pytest.approx(ref, abs=1e-12)

    def test_refusals(self):
        with pytest.raises(DomainError):
            bessel_j(1.0, 61.0)
        with pytest.raises(DomainError):
            bessel_j(-1.0, 1.0)
        with pytest.raises(DomainError):
            bessel_j(1.0, -1.0)


class TestAlpha:
    def test_n3_closed_form(self, dims):
        # for nu = 1/2 the formula collapses to t sin(1/t)
        assert alpha_fn(dims[3], 10.0) == pytest.approx(10.0 * math.sin(0.1), rel=1e-12)
        assert abs(alpha_fn(dims[3], 1.0 / math.pi)) <= 1e-10

    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_limit_one(self, dims, N):
        # leading correction of the series is nu^2/(nu+1) t^(-1/nu)
        t = 1e8
        nu = dims[N].nu
        bound = 2.0 * nu**2 / (nu + 1.0) * t ** (-1.0 / nu) + 4.0 * np.finfo(float).eps
        assert abs(alpha_fn(dims[N], t) - 1.0) <= bound

    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_ode_residual(self, dims, N):
        # alpha'' + t^(-k) alpha = 0 via central differences; the step
        # balances roundoff (eps/h^2) against truncation (h^2 t^(-2k))
        dim = dims[N]
        eps = np.finfo(float).eps
        tau1, tau2 = alpha_zero(dim, 1), alpha_zero(dim, 2)
        for t in np.geomspace(tau2 / 2.0, 10.0 * tau1, 120):
            h = min((12.0 * eps * t ** (2.0 * dim.k)) ** 0.25, 0.01 * t)
            a = alpha_fn(dim, t)
            app = (alpha_fn(dim, t + h) - 2.0 * a + alpha_fn(dim, t - h)) / h**2
            scale = t ** (-dim.k) * (1.0 + abs(a))
            assert abs(app + t ** (-dim.k) * a) <= 1e-6 * scale

    def test_domain(self, dims):
        with pytest.raises(DomainError):
            alpha_fn(dims[3], 0.0)


class TestAlphaZero:
    def test_n3_closed_form(self, dims):
        assert alpha_zero(dims[3], 1) == pytest.approx(1.0 / math.pi, rel=1e-10)
        assert alpha_zero(dims[3], 2) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-10)

    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_ordering(self, dims, N):
        taus = [alpha_zero(dims[N], n) for n in range(1, 5)]
        assert all(a > b for a, b in zip(taus, taus[1:]))

    def test_n4_first_eigenvalue_relation(self, dims):
        tau = alpha_zero(dims[4], 1)
        j11 = float(mpmath.besseljzero(1, 1))
        assert 4.0 / tau == pytest.approx(j11**2, rel=1e-9)

    def test_bad_index(self, dims):
        with pytest.raises(DomainError):
            alpha_zero(dims[3], 0)


class TestRadialEigenvalue:
    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    @pytest.mark.parametrize("n", [1, 2])
    def test_against_bessel_zero_oracle(self, dims, N, n):
        jz = float(mpmath.besseljzero((N - 2) / 2.0, n))
        assert radial_eigenvalue(dims[N], n) == pytest.approx(jz**2, rel=1e-8)

    def test_n3_exact(self, dims):
        assert radial_eigenvalue(dims[3], 1) == pytest.approx(math.pi**2, rel=1e-8)
        assert radial_eigenvalue(dims[3], 2) == pytest.approx(4.0 * math.pi**2, rel=1e-8)


class TestEigenfunctionResidual:
    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_second_radial_eigenfunction(self, dims, N):
        # phi(r) = alpha(tau_2 r^(-(N-2))) solves the eigen-equation with mu_2
        dim = dims[N]
        tau2 = alpha_zero(dim, 2)
        mu2 = radial_eigenvalue(dim, 2)
        phi = lambda r: alpha_fn(dim, tau2 * r ** (-(N - 2.0)))
        rs = np.linspace(0.05, 0.99, 150)
        sup = max(abs(phi(r)) for r in rs)
        for r in rs:
            h = 1e-4
            p0, pp, pm = phi(r), phi(r + h), phi(r - h)
            d1 = (pp - pm) / (2.0 * h)
            d2 = (pp - 2.0 * p0 + pm) / h**2
            assert abs(d2 + (N - 1.0) / r * d1 + mu2 * p0) <= 1e-5 * sup


class TestSobolev:
    def test_closed_forms(self):
        assert sobolev_constant(4) == pytest.approx(8.0 * math.pi / math.sqrt(6.0), rel=1e-10)
        assert sobolev_constant(6) == pytest.approx(24.0 * math.pi * (1.0 / 60.0) ** (1.0 / 3.0), rel=1e-10)
        assert sobolev_constant(3) == pytest.approx(5.4779, rel=1e-4)

    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_bubble_rayleigh_quotient(self, N):
        # independent oracle: S = ||grad U||^2 / |U|_{2*}^2 by radial quadrature
        spec = BubbleSpec.normalized(N)
        mu = spec.mu
        two_star = 2.0 * N / (N - 2.0)

        def grad2(r):
            u = bubble_eval(spec, r)
            du = -(N - 2.0) * r * u / (mu**2 + r**2)
            return du**2 * r ** (N - 1.0)

        def crit(r):
            return bubble_eval(spec, r) ** two_star * r ** (N - 1.0)

        dir_int = quad(grad2, 0.0, np.inf, limit=200)[0]
        crit_int = quad(crit, 0.0, np.inf, limit=200)[0]
        rayleigh = dir_int / crit_int ** (2.0 / two_star)
        # the surface factor cancels except for a power from the 2*-norm
        omega = 2.0 * math.pi ** (N / 2.0) / gamma_fn(N / 2.0)
        rayleigh *= omega ** (1.0 - 2.0 / two_star)
        assert sobolev_constant(N) == pytest.approx(rayleigh, rel=1e-6)


class TestBubble:
    def test_center_normalization(self):
        spec = BubbleSpec.normalized(6)
        assert spec.mu == pytest.approx(math.sqrt(24.0))
        assert bubble_eval(spec, 0.0) == pytest.approx(1.0, rel=1e-12)

    def test_decay_and_monotonicity(self):
        spec = BubbleSpec.normalized(6)
        assert bubble_eval(spec, 1e9) <= 1e-12
        rs = np.linspace(0.0, 50.0, 300)
        vals = bubble_eval(spec, rs)
        assert np.all(np.diff(vals) < 0.0)
        assert np.all(vals > 0.0)
        assert np.all(vals <= bubble_eval(spec, 0.0))

    def test_displayed_formula_arithmetic(self):
        spec = BubbleSpec(N=4, mu=math.sqrt(8.0))
        assert bubble_eval(spec, math.sqrt(8.0)) == pytest.approx(0.5, rel=1e-12)

    def test_invalid(self):
        with pytest.raises(DomainError):
            BubbleSpec(N=4, mu=-1.0)
        with pytest.raises(DomainError):
            BubbleSpec(N=2, mu=1.0)


class TestPrefactorCandidates:
    def test_defined_range(self, dims):
        with pytest.raises(DomainError):
            t1_prefactor_candidates(dims[3])  # k = 4
        cands = t1_prefactor_candidates(dims[6])  # k = 5/2
        assert set(cands) == {"gamma_of_3_minus_k_over_k_minus_2", "gamma_of_ratio"}
        assert all(v > 0.0 for v in cands.values())

    def test_n6_values(self, dims):
        # for k = 5/2 the ratio parse gives Gamma(1) and a clean 2/9
        cands = t1_prefactor_candidates(dims[6])
        assert cands["gamma_of_ratio"] == pytest.approx(2.0 / 9.0, rel=1e-10)
