"""Energies, asymptotic-law fits, and limit studies for the profile family.

Energies are integrated in the orbit's own time variable, where the change of
variables turns the radial measure r^(N-1) dr into an integrable weight and
the Dirichlet integrand into a constant multiple of y'^2; the unresolved tail
beyond the recorded starting time is added in closed form.  Asymptotic laws
(largest-zero growth, slope law, last-extremum laws, eigen-parameter limits)
are extracted from gamma sweeps by least-squares fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .shooting import (NumericError, ShootingInput, ShootingResult,
                       f_nonlinearity, solve_shooting)
from .specfun import (DimensionParams, DomainError, gamma_fn,
                      t1_prefactor_candidates)
from .transform import (RadialProfile, build_radial_profile, lambda_n_of_gamma,
                        profile_eval)


@dataclass(frozen=True)
class EnergyReport:
    """Energy functional values and norm decomposition for both sign parts."""

    J_plus: float
    J_minus: float
    J_total: float
    dirichlet_plus: float
    dirichlet_minus: float
    l2_plus: float
    l2_minus: float
    lcrit_plus: float
    lcrit_minus: float
    nehari_residual_plus: float
    nehari_residual_minus: float


@dataclass(frozen=True)
class FitReport:
    """Outcome of fitting a power, log, or constant law to sweep data."""

    model: str
    exponent: float | None
    prefactor: float
    residual: float
    gamma_range: tuple


def surface_measure(N: int) -> float:
    """Surface measure of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2.0) / gamma_fn(N / 2.0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _composite_gl(fn, knots, refine: int = 1):
    """Composite 12-point Gauss-Legendre quadrature over the given knots."""
    knots = np.asarray(knots, dtype=float)
    if refine > 1:
        fine = [knots[0]]
        for a, b in zip(knots[:-1], knots[1:]):
            fine.extend(a + (b - a) * (j + 1) / refine for j in range(refine))
        knots = np.asarray(fine)
    a = knots[:-1]
    b = knots[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = fn(pts.ravel()).reshape(pts.shape)
    return float(np.sum(half[:, None] * _GL_WEIGHTS[None, :] * vals))


def _t_knots(traj_t, t_lo, t_hi):
    inner = traj_t[(traj_t > t_lo) & (traj_t < t_hi)]
    return np.concatenate(([t_lo], inner, [t_hi]))


def _part_integrals(profile: RadialProfile, t_lo: float, t_hi: float | None,
                    refine: int = 1):
    """(dirichlet, l2, lcrit) of the profile piece with t in [t_lo, t_hi].

    t_hi=None means the piece extends to r=0, i.e. t to infinity: the
    recorded orbit covers [t_lo, t_start] and the remainder is added in
    closed form with the tail expansion (y near gamma, y' its one-term law).
    """
    dim = profile.dim
    N = dim.N
    result = profile.source
    traj = result.trajectory
    spline = traj.spline
    dspline = spline.derivative()
    T_n = result.zeros[profile.n_nodal - 1]
    lam = profile.lam
    gamma = profile.gamma
    omega = surface_measure(N)
    wc = T_n ** (N / (N - 2.0)) / (N - 2.0)

    def weight(t):
        return wc * t ** (-N / (N - 2.0) - 1.0)

    t_cap = traj.t_start if t_hi is None else t_hi
    knots = _t_knots(traj.t, t_lo, t_cap)
    dir_int = _composite_gl(lambda t: dspline(t) ** 2, knots, refine)
    l2_int = _composite_gl(lambda t: spline(t) ** 2 * weight(t), knots, refine)
    lc_int = _composite_gl(
        lambda t: np.abs(spline(t)) ** dim.two_star * weight(t), knots, refine
    )
    if t_hi is None:
        k = dim.k
        fg = float(f_nonlinearity(dim, gamma))
        ts = traj.t_start
        dir_int += fg**2 * ts ** (3.0 - 2.0 * k) / ((k - 1.0) ** 2 * (2.0 * k - 3.0))
        # beyond t_start the orbit is within tail_eps of gamma; the weight
        # integrates to r_eps^N / N exactly
        w_tail = T_n ** (N / (N - 2.0)) * ts ** (-N / (N - 2.0)) / N
        l2_int += gamma**2 * w_tail
        lc_int += gamma**dim.two_star * w_tail
    amp2 = lam ** ((N - 2.0) / 2.0)
    dirichlet = omega * (N - 2.0) * T_n * amp2 * dir_int
    l2 = omega * amp2 * l2_int
    lcrit = omega * lam ** (N / 2.0) * lc_int
    return dirichlet, l2, lcrit


def energy(profile: RadialProfile, refine: int = 1) -> EnergyReport:
    """Energy functional of both sign parts by quadrature in the time variable.

    For a two-nodal-region profile the positive part lives on times above the
    largest zero and the negative part between the two largest zeros.  The
    Nehari residual |dirichlet - lam*l2 - lcrit|, normalized by the sum of
    the three magnitudes, is reported per part as a solution-quality gauge.
    """
    result = profile.source
    T = result.zeros
    if profile.n_nodal == 2:
        dp, l2p, lcp = _part_integrals(profile, T[0], None, refine)
        dm, l2m, lcm = _part_integrals(profile, T[1], T[0], refine)
    elif profile.n_nodal == 1:
        dp, l2p, lcp = _part_integrals(profile, T[0], None, refine)
        dm = l2m = lcm = 0.0
    else:
        raise DomainError(f"unsupported n_nodal={profile.n_nodal}")
    lam = profile.lam
    two_star = profile.dim.two_star
    Jp = 0.5 * (dp - lam * l2p) - lcp / two_star
    Jm = 0.5 * (dm - lam * l2m) - lcm / two_star
    nrp = abs(dp - lam * l2p - lcp) / (dp + lam * l2p + lcp)
    nrm = (abs(dm - lam * l2m - lcm) / (dm + lam * l2m + lcm)
           if profile.n_nodal == 2 else 0.0)
    return EnergyReport(
        J_plus=Jp, J_minus=Jm, J_total=Jp + Jm,
        dirichlet_plus=dp, dirichlet_minus=dm,
        l2_plus=l2p, l2_minus=l2m,
        lcrit_plus=lcp, lcrit_minus=lcm,
        nehari_residual_plus=nrp, nehari_residual_minus=nrm,
    )


def fit_power_law(points, model: str) -> FitReport:
    """Fit value(gamma) by a power, log, or constant law.

    power: least squares of log value against log gamma; log: mean of
    value / log(gamma) with rms deviation; constant: mean with max deviation.
    """
    points = [(float(g), float(v)) for g, v in points]
    if len(points) < 4:
        raise DomainError(f"fit needs at least 4 points, got {len(points)}")
    gammas = np.array([g for g, _ in points])
    values = np.array([v for _, v in points])
    if np.any(np.diff(gammas) <= 0.0):
        raise DomainError("gamma values must be strictly increasing")
    grange = (float(gammas[0]), float(gammas[-1]))
    if model == "power":
        if np.any(values <= 0.0):
            raise DomainError("power-law fit requires positive values")
        lg, lv = np.log(gammas), np.log(values)
        slope, intercept = np.polyfit(lg, lv, 1)
        resid = float(np.sqrt(np.mean((lv - (slope * lg + intercept)) ** 2)))
        return FitReport("power", float(slope), float(math.exp(intercept)),
                         resid, grange)
    if model == "log":
        if np.any(values <= 0.0):
            raise DomainError("log-law fit requires positive values")
        ratios = values / np.log(gammas)
        pref = float(np.mean(ratios))
        resid = float(np.sqrt(np.mean((ratios - pref) ** 2)))
        return FitReport("log", None, pref, resid, grange)
    if model == "constant":
        pref = float(np.mean(values))
        resid = float(np.max(np.abs(values - pref)))
        return FitReport("constant", None, pref, resid, grange)
    raise DomainError(f"unknown fit model {model!r}")


def _sweep_solve(dim: DimensionParams, gamma: float, **kw) -> ShootingResult:
    return solve_shooting(ShootingInput(dim=dim, gamma=float(gamma), **kw))


def slope_law_constant(dim: DimensionParams) -> float:
    """Limit of gamma * y'(T_1): (k-1)^(1/(k-2))."""
    k = dim.k
    return (k - 1.0) ** (1.0 / (k - 2.0))


def slope_law_check(dim: DimensionParams, gammas) -> FitReport:
    """Constant-model fit of gamma * y'(T_1) over a gamma sweep.

    The limiting constant is slope_law_constant(dim); the comparison against
    it is left to the caller so a slowly converging sweep still yields a
    report with the observed trend.
    """
    pts = []
    for g in gammas:
        res = _sweep_solve(dim, g)
        pts.append((g, g * res.slopes[0]))
    return fit_power_law(pts, "constant")


def t0_y0_asymptotics(dim: DimensionParams, gammas):
    """Constant-model fits of y0 and of t0 / (2 gamma / 9)^(2/3); N = 6 only."""
    if dim.N != 6:
        raise DomainError(f"last-extremum laws are specific to N=6, got N={dim.N}")
    y0_pts, t0_pts = [], []
    for g in gammas:
        res = _sweep_solve(dim, g)
        y0_pts.append((g, res.y0))
        t0_pts.append((g, res.t0 / (2.0 * g / 9.0) ** (2.0 / 3.0)))
    return fit_power_law(y0_pts, "constant"), fit_power_law(t0_pts, "constant")


def lambda0_six(tolerance: float = 0.01):
    """The N=6 limit eigen-parameter and its positive ground-state profile.

    Route A solves the orbit with terminal value 1/2 and reads
    lambda0 = 16 T_1^(-1/2); the profile u0 built on that orbit has
    u0(0) = lambda0 / 2 exactly.  Route B tracks lambda_2(gamma) on
    half-decade points of [1e2, 1e4] and extrapolates geometrically only
    when the difference ratios are stable; the curve dips below its limit
    before climbing back, so when the ratios drift the endpoint value is
    used instead of an unjustified extrapolation.  Disagreement beyond
    max(tolerance, 1%) raises, flagging integrator misconfiguration.
    """
    dim = DimensionParams.from_dimension(6)
    res_a = _sweep_solve(dim, 0.5)
    lambda0 = 16.0 * res_a.zeros[0] ** (-0.5)
    u0 = build_radial_profile(dim, res_a, n_nodal=1)
    lams = []
    for g in np.geomspace(1e2, 1e4, 5):
        lams.append(lambda_n_of_gamma(dim, _sweep_solve(dim, g), 2))
    d = np.diff(lams)
    ratios = d[1:] / d[:-1]
    stable = (np.all(d < 0.0) or np.all(d > 0.0)) and np.all(
        np.abs(ratios) < 1.0
    ) and abs(ratios[-1] - ratios[-2]) <= 0.2 * abs(ratios[-1])
    if stable:
        rho = ratios[-1]
        lambda_b = lams[-1] + d[-1] * rho / (1.0 - rho)
    else:
        lambda_b = lams[-1]
    gate = max(tolerance, 0.01)
    if abs(lambda_b - lambda0) > gate * lambda0:
        raise NumericError(
            f"lambda0 routes disagree: direct {lambda0:.6g} vs "
            f"extrapolated {lambda_b:.6g} (gate {gate:.1%})"
        )
    return lambda0, u0


def negative_part_study(dim: DimensionParams, gammas):
    """Sweep table for the negative part: sup-norm decay (N=3,4,5) or
    convergence to the limiting ground state (N=6).

    Rows carry gamma, lambda2, M_minus, and the ratio M_minus/(lambda2/2);
    for N=6 each row adds the sup over r in [0.1, 1] of |u_minus - u0|
    relative to sup u0, with u0 from the terminal-value-1/2 orbit.
    """
    gammas = [float(g) for g in gammas]
    if len(gammas) < 3 or any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise DomainError("need at least 3 strictly increasing gamma values")
    u0 = None
    r_grid = None
    u0_vals = None
    if dim.N == 6:
        _, u0 = lambda0_six()
        r_grid = np.linspace(0.1, 1.0, 400)
        u0_vals = profile_eval(u0, r_grid)[0]
    rows = []
    for g in gammas:
        res = _sweep_solve(dim, g)
        prof = build_radial_profile(dim, res, n_nodal=2)
        row = {
            "gamma": g,
            "lambda2": prof.lam,
            "M_minus": prof.M_minus,
            "M_minus_over_half_lambda2": prof.M_minus / (prof.lam / 2.0),
        }
        if dim.N == 6:
            u_vals = profile_eval(prof, r_grid)[0]
            u_minus = np.maximum(-u_vals, 0.0)
            row["sup_diff_vs_u0"] = float(np.max(np.abs(u_minus - u0_vals)))
            row["sup_u0"] = float(np.max(np.abs(u0_vals)))
        rows.append(row)
    return rows


def lambda2_limit_study(dim: DimensionParams, gammas):
    """Sweep table of lambda_2(gamma) with the dimension's limit target.

    Targets: 9 pi^2 / 4 for N=3; the first radial eigenvalue for N=4 (from
    above) and N=5 (from below at large gamma); the N=6 limit value from
    lambda0_six; zero for N>=7 (decreasing curve, informational only).
    """
    from .specfun import radial_eigenvalue

    gammas = [float(g) for g in gammas]
    if len(gammas) < 3 or any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise DomainError("need at least 3 strictly increasing gamma values")
    rows = []
    for g in gammas:
        res = _sweep_solve(dim, g)
        rows.append({
            "gamma": g,
            "T1": res.zeros[0],
            "T2": res.zeros[1],
            "lambda2": lambda_n_of_gamma(dim, res, 2),
        })
    N = dim.N
    if N == 3:
        target = 9.0 * math.pi**2 / 4.0
        approach = "limit"
    elif N == 4:
        target = radial_eigenvalue(dim, 1)
        approach = "from_above"
    elif N == 5:
        target = radial_eigenvalue(dim, 1)
        approach = "from_below"
    elif N == 6:
        target, _ = lambda0_six()
        approach = "limit"
    else:
        target = 0.0
        approach = "decreasing"
    return {"rows": rows, "target": target, "approach": approach}


def prefactor_parse_report(dim: DimensionParams, points) -> dict:
    """Compare the fitted largest-zero prefactor against both parses of A(k).

    Valid for 2 < k < 3 (N >= 5).  Returns the fitted power law, both
    candidate constants, their relative deviations, and which parse (if any)
    matches within 5%.
    """
    fit = fit_power_law(points, "power")
    cands = t1_prefactor_candidates(dim)
    devs = {name: abs(fit.prefactor - val) / val for name, val in cands.items()}
    best = min(devs, key=devs.get)
    return {
        "fit": fit,
        "candidates": cands,
        "relative_deviation": devs,
        "matching_parse": best if devs[best] <= 0.05 else None,
    }
