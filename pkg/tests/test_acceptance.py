"""Acceptance gate: one pass/fail line per criterion (and sub-part).

Each test pins a quantitative claim about the solver output at the stated
finite-gamma tolerance.  The claims are asymptotic laws checked at desk
scale (gamma up to 1e4), so some gates sit closer to their limits than
others; every tolerance here is fixed and none is adapted to the observed
values.
"""

import math

import mpmath
import numpy as np
import pytest

from efshoot.analysis import (energy, fit_power_law, lambda0_six,
                              negative_part_study, slope_law_constant,
                              surface_measure)
from efshoot.shooting import ShootingInput, evaluate, solve_shooting
from efshoot.specfun import (BubbleSpec, bubble_eval, radial_eigenvalue,
                             sobolev_constant)
from efshoot.transform import (build_radial_profile, lambda_n_of_gamma,
                               ode_residual, profile_eval, rescaled_eval)

SWEEP = np.geomspace(1e2, 1e4, 5)


class TestC01EigenvalueCrossCheck:
    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    @pytest.mark.parametrize("n", [1, 2])
    def test_c01_bessel_zero_oracle(self, dims, N, n):
        jz = float(mpmath.besseljzero((N - 2) / 2.0, n))
        assert radial_eigenvalue(dims[N], n) == pytest.approx(jz**2, rel=1e-8)

    @pytest.mark.parametrize("n", [1, 2])
    def test_c01_n3_exact(self, dims, n):
        assert radial_eigenvalue(dims[3], n) == pytest.approx(
            n**2 * math.pi**2, rel=1e-8
        )


class TestC02LargestZeroGrowth:
    def test_c02_n5_exponent(self, solve, dims):
        pts = [(g, solve(5, g).zeros[0]) for g in SWEEP]
        fit = fit_power_law(pts, "power")
        assert fit.exponent == pytest.approx(2.0 / 3.0, abs=0.05)

    def test_c02_n6_exponent(self, solve, dims):
        pts = [(g, solve(6, g).zeros[0]) for g in SWEEP]
        fit = fit_power_law(pts, "power")
        assert fit.exponent == pytest.approx(1.0, abs=0.05)

    def test_c02_n4_log_growth(self, solve):
        ratio = solve(4, 1e4).zeros[0] / (2.0 * math.log(1e4))
        assert 0.9 <= ratio <= 1.1

    def test_c02_n3_bounded(self, solve):
        t1s = [solve(3, g).zeros[0] for g in SWEEP]
        assert max(t1s) / min(t1s) < 2.0


class TestC03SlopeLaw:
    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_c03_slope_constant(self, dims, solve, N):
        value = 1e4 * solve(N, 1e4).slopes[0]
        assert value == pytest.approx(slope_law_constant(dims[N]), rel=0.02)


class TestC04LastExtremumN6:
    def test_c04_y0(self, solve):
        assert -0.51 <= solve(6, 1e4).y0 <= -0.49

    def test_c04_t0(self, solve):
        res = solve(6, 1e4)
        ratio = res.t0 / (2.0 * 1e4 / 9.0) ** (2.0 / 3.0)
        assert 0.95 <= ratio <= 1.05


class TestC05EigenparameterLimits:
    def test_c05_n3_limit(self, dims, solve):
        lam = lambda_n_of_gamma(dims[3], solve(3, 1e4), 2)
        assert lam == pytest.approx(9.0 * math.pi**2 / 4.0, rel=0.02)

    def test_c05_n4_limit(self, dims, solve):
        lam = lambda_n_of_gamma(dims[4], solve(4, 1e4), 2)
        assert lam == pytest.approx(radial_eigenvalue(dims[4], 1), rel=0.02)

    def test_c05_n4_above_first_eigenvalue(self, dims, solve):
        lam1 = radial_eigenvalue(dims[4], 1)
        for g in SWEEP:
            assert lambda_n_of_gamma(dims[4], solve(4, g), 2) > lam1

    def test_c05_n5_limit(self, dims, solve):
        lam1 = radial_eigenvalue(dims[5], 1)
        lam = lambda_n_of_gamma(dims[5], solve(5, 1e4), 2)
        assert lam == pytest.approx(lam1, rel=0.02)
        for g in SWEEP[-2:]:
            assert lambda_n_of_gamma(dims[5], solve(5, g), 2) < lam1

    def test_c05_n6_limit(self, dims, solve):
        lam0, _ = lambda0_six()
        lam = lambda_n_of_gamma(dims[6], solve(6, 1e4), 2)
        assert lam == pytest.approx(lam0, rel=0.01)

    @pytest.mark.xfail(
        strict=False,
        reason="optional contrast dimension; decay to 0 is slower than the gate",
    )
    def test_c05_n7_optional_decay(self, dims, solve):
        lams = [lambda_n_of_gamma(dims[7], solve(7, g), 2) for g in SWEEP]
        assert all(a > b for a, b in zip(lams, lams[1:]))
        assert lams[-1] < 0.2 * lams[0]


class TestC06BelowBallEigenvalue:
    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_c06_strict_bound_and_linear_limit(self, dims, solve, N):
        lam2_ball = radial_eigenvalue(dims[N], 2)
        for g in list(SWEEP) + [1e-3, 1.0]:
            assert lambda_n_of_gamma(dims[N], solve(N, g), 2) < lam2_ball
        lam_small = lambda_n_of_gamma(dims[N], solve(N, 1e-3), 2)
        assert lam_small == pytest.approx(lam2_ball, rel=0.01)


class TestC07PositivePartEnergy:
    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_c07_bubble_energy_and_nehari(self, dims, profile, N):
        rep = energy(profile(N, 1e4))
        target = sobolev_constant(N) ** (N / 2.0) / N
        assert 0.95 <= rep.J_plus / target <= 1.05
        assert rep.nehari_residual_plus <= 1e-4
        assert rep.nehari_residual_minus <= 1e-4


class TestC08BubbleConvergence:
    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_c08_rescaled_sup_distance(self, dims, profile, N):
        spec = BubbleSpec.normalized(N)
        sups = {}
        for g in (1e2, 1e4):
            p = profile(N, g)
            sigma = p.M_plus ** p.dim.beta * p.r_node
            rho = np.linspace(0.0, min(5.0, sigma), 500)
            diff = rescaled_eval(p, rho) - bubble_eval(spec, rho)
            sups[g] = float(np.max(np.abs(diff)))
        assert sups[1e4] <= 0.02
        assert sups[1e4] < sups[1e2]


class TestC09NodeRadiusN3:
    def test_c09_node_radius(self, profile):
        p = profile(3, 1e4)
        assert 0.3267 <= p.r_node <= 0.3400
        assert p.lam * p.r_node**2 == pytest.approx(math.pi**2 / 4.0, rel=0.02)


class TestC10NegativePartN6:
    def test_c10_sup_ratio(self, profile):
        p = profile(6, 1e4)
        assert 0.95 <= p.M_minus / (p.lam / 2.0) <= 1.05

    def test_c10_negative_energy_bound(self, dims, profile):
        rep = energy(profile(6, 1e4))
        lam1 = radial_eigenvalue(dims[6], 1)
        assert rep.J_minus <= math.pi**3 / 36.0 * (lam1 / 2.0) ** 3

    def test_c10_total_energy_bound(self, profile):
        rep = energy(profile(6, 1e4))
        assert rep.J_total < sobolev_constant(6) ** 3 / 3.0

    def test_c10_negative_part_vs_limit_state(self, dims):
        rows = negative_part_study(dims[6], [1e2, 1e3, 1e4])
        last = rows[-1]
        assert last["sup_diff_vs_u0"] <= 0.05 * last["sup_u0"]

    def test_c10_limit_state_center_value(self):
        lam0, u0 = lambda0_six()
        assert u0.M_plus / lam0 == 0.5


class TestC11NegativeSupDecay:
    @pytest.mark.parametrize("N", [3, 4, 5])
    def test_c11_decay(self, dims, solve, N):
        sups = [
            build_radial_profile(dims[N], solve(N, g), 2).M_minus for g in SWEEP
        ]
        assert all(a > b for a, b in zip(sups, sups[1:]))
        assert sups[-1] < 0.1 * sups[0]


class TestC12PropertySuites:
    @pytest.mark.parametrize("N,gamma", [(3, 1e4), (4, 1e3), (5, 1e2), (6, 1e4)])
    def test_c12_zero_bound(self, solve, N, gamma):
        # strict bound |y(t)| < |y'(T)| (T - t); sampled away from the
        # immediate neighborhood of T where the margin is third order and
        # falls below floating-point resolution
        res = solve(N, gamma)
        traj = res.trajectory
        for T, slope in zip(res.zeros, res.slopes):
            for t in np.linspace(traj.t_min * 1.001, 0.99 * T, 200):
                y, _ = evaluate(traj, t)
                assert abs(y) < abs(slope) * (T - t)

    @pytest.mark.parametrize("N,gamma", [(3, 1e4), (4, 1e3), (5, 1e2), (6, 1e4)])
    def test_c12_orderings(self, solve, N, gamma):
        res = solve(N, gamma)
        T, s = res.zeros, res.slopes
        assert T[0] > T[1] > T[2] > 0.0
        assert abs(s[0]) < abs(s[1]) < abs(s[2])
        assert T[1] < res.t0 < T[0]
        assert res.y0 < 0.0

    def test_c12_rescaling_identities(self, dims, profile):
        # quadrature check of the concentration-scaling identities
        p = profile(5, 1e2)
        dim = dims[5]
        M, beta = p.M_plus, dim.beta
        scale = M**beta
        a = float(p.r[0])
        nodes, weights = np.polynomial.legendre.leggauss(240)

        def integrate(f, lo, hi):
            x = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
            return 0.5 * (hi - lo) * float(np.sum(weights * f(x)))

        def side(power, rescaled, deriv=False):
            def f(r):
                u, up = profile_eval(p, r / scale if rescaled else r)
                g = up if deriv else u
                if rescaled:
                    g = g / (M * scale) if deriv else g / M
                rr = r
                return np.abs(g) ** power * rr ** (dim.N - 1.0)
            lo, hi = (a * scale, p.r_node * scale) if rescaled else (a, p.r_node)
            return integrate(f, lo, hi)

        assert side(2.0, True, deriv=True) == pytest.approx(
            side(2.0, False, deriv=True), rel=1e-6
        )
        assert side(dim.two_star, True) == pytest.approx(
            side(dim.two_star, False), rel=1e-6
        )
        assert side(2.0, True) == pytest.approx(
            M ** (2.0 * beta) * side(2.0, False), rel=1e-6
        )

    @pytest.mark.parametrize("N,gamma", [(3, 1e4), (4, 1e3), (5, 1e2), (6, 1e4)])
    def test_c12_ode_residual_gate(self, profile, N, gamma):
        assert ode_residual(profile(N, gamma)) <= 1e-4

    def test_c12_determinism(self, dims):
        inp = ShootingInput(dim=dims[6], gamma=1e3)
        a = solve_shooting(inp, use_cache=False)
        b = solve_shooting(inp, use_cache=False)
        assert a.zeros == b.zeros and a.slopes == b.slopes
        assert a.t0 == b.t0 and a.y0 == b.y0
        assert np.array_equal(a.trajectory.y, b.trajectory.y)

    def test_c12_tolerance_halving(self, solve):
        rel = 1e-10
        base = solve(4, 1e4, rel_tol=rel)
        finer = solve(4, 1e4, rel_tol=rel / 2.0)
        for a, b in zip(base.zeros, finer.zeros):
            assert abs(b - a) <= 10.0 * rel * abs(a)
        assert abs(finer.t0 - base.t0) <= 10.0 * rel * abs(base.t0)
