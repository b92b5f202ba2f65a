"""Backward shooting for the singular terminal-value problem
y'' + t^(-k) (y + |y|^(p-1) y) = 0, y(t) -> gamma as t -> infinity.

The orbit is integrated backward from a large starting time where the
one-term tail expansion of the terminal condition is accurate, down through
the first few zeros of y and the last interior extremum.  The integration
runs in log-sized chunks with an adaptive Runge-Kutta 5(4) pair; zeros and
critical points are located from sign changes on a densely subdivided
breakpoint set and polished by bracketed root iteration on the cubic Hermite
interpolant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .specfun import DimensionParams, DomainError


class ConfigurationError(ValueError):
    """Invalid or unsupported solver configuration."""


class NumericError(RuntimeError):
    """The integration or event search failed to converge."""


# chunk shrink factor and maximum log-spacing of stored breakpoints; the
# spacing targets the radial image ln r = ln t / (N-2), keeping the
# finite-difference meshes downstream comparably fine for every dimension
_CHUNK_RATIO = 8.0
_MAX_DLNR = 0.003
_MAX_DLNT_CAP = 0.0125
_GAMMA_MAX_N6 = 1e6


@dataclass(frozen=True)
class ShootingInput:
    """Problem data for one backward shooting run."""

    dim: DimensionParams
    gamma: float
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    n_zeros: int = 3
    tail_eps: float = 1e-10

    def __post_init__(self):
        if not (self.gamma > 0.0):
            raise ConfigurationError(f"gamma={self.gamma} must be positive")
        if self.n_zeros < 2:
            raise ConfigurationError(f"n_zeros={self.n_zeros} must be >= 2")
        for name in ("rel_tol", "abs_tol", "tail_eps"):
            v = getattr(self, name)
            if not (0.0 < v <= 1e-4):
                raise ConfigurationError(f"{name}={v} must lie in (0, 1e-4]")
        if self.dim.N == 6 and self.gamma > _GAMMA_MAX_N6:
            raise ConfigurationError(
                f"gamma={self.gamma} above supported limit {_GAMMA_MAX_N6:g} for N=6 "
                "(starting time grows like gamma^2; cost becomes linear in gamma)"
            )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Dense record of one orbit on [t_min, t_start].

    Breakpoints are stored ascending in t together with (y, y') and a cubic
    Hermite interpolant that reproduces the stored values exactly.
    """

    t: np.ndarray
    y: np.ndarray
    y_prime: np.ndarray
    t_min: float
    t_start: float
    spline: CubicHermiteSpline = field(repr=False)


@dataclass(frozen=True, eq=False)
class ShootingResult:
    """Zeros, slopes, last extremum, and the dense trajectory of one run."""

    input: ShootingInput
    zeros: tuple          # T_1 > T_2 > ... descending
    slopes: tuple         # y'(T_i)
    t0: float             # largest critical point
    y0: float             # y(t0), the deepest captured extremum
    trajectory: Trajectory

    def __post_init__(self):
        T = self.zeros
        s = self.slopes
        if any(a <= b for a, b in zip(T, T[1:])):
            raise NumericError(f"zeros not strictly descending: {T}")
        if s[0] <= 0.0:
            raise NumericError(f"slope at largest zero must be positive, got {s[0]}")
        for i, (a, b) in enumerate(zip(s, s[1:])):
            if a * b >= 0.0:
                raise NumericError(f"slopes at zeros {i + 1},{i + 2} do not alternate: {s}")
            if abs(a) >= abs(b):
                raise NumericError(f"slope magnitudes not increasing backward in t: {s}")
        if not (T[1] < self.t0 < T[0]):
            raise NumericError(f"t0={self.t0} outside (T2, T1)=({T[1]}, {T[0]})")
        if self.y0 >= 0.0:
            raise NumericError(f"value at last extremum must be negative, got {self.y0}")


def f_nonlinearity(dim: DimensionParams, y):
    """f(y) = y + |y|^(p-1) y with the critical power p."""
    return y + np.abs(y) ** (dim.p - 1.0) * y


def tail_start(dim: DimensionParams, gamma: float, tail_eps: float) -> float:
    """Starting time such that the one-term tail correction is below tail_eps*gamma.

    The tail expansion y = gamma - f(gamma) t^(2-k)/((k-1)(k-2)) has relative
    error tail_eps at t_start = (f(gamma)/((k-1)(k-2) tail_eps gamma))^(1/(k-2)).
    A floor keeps t_start above the largest zero even for loose tolerances.
    """
    if gamma <= 0.0:
        raise ConfigurationError(f"gamma={gamma} must be positive")
    if tail_eps <= 0.0:
        raise ConfigurationError(f"tail_eps={tail_eps} must be positive")
    k = dim.k
    fg = float(f_nonlinearity(dim, gamma))
    try:
        ts = (fg / ((k - 1.0) * (k - 2.0) * tail_eps * gamma)) ** (1.0 / (k - 2.0))
    except OverflowError:
        raise ConfigurationError(
            f"t_start overflows for k={k}, gamma={gamma}, tail_eps={tail_eps}"
        ) from None
    if not math.isfinite(ts):
        raise ConfigurationError(
            f"t_start not finite for k={k}, gamma={gamma}, tail_eps={tail_eps}"
        )
    # keep a safety margin above the tail scale even when tail_eps is loose
    return max(ts, 10.0)


def tail_values(dim: DimensionParams, gamma: float, t):
    """One-term tail expansion (y, y') of the terminal condition at time t."""
    k = dim.k
    fg = float(f_nonlinearity(dim, gamma))
    y = gamma - fg * t ** (2.0 - k) / ((k - 1.0) * (k - 2.0))
    yp = fg * t ** (1.0 - k) / (k - 1.0)
    return y, yp


def _integrate(inp: ShootingInput):
    """Chunked backward integration; returns breakpoints and raw event times.

    The independent variable is negated (s = -t) so the integrator always
    advances forward; events fire on the transformed axis and are mapped
    back.  Each accepted step is subdivided through the dense output to a
    bounded log-t spacing of stored breakpoints.
    """
    dim, gamma = inp.dim, inp.gamma
    k = dim.k
    max_dlnt = min(_MAX_DLNT_CAP, _MAX_DLNR * (dim.N - 2.0))
    t_start = tail_start(dim, gamma, inp.tail_eps)
    y_s, yp_s = tail_values(dim, gamma, t_start)
    # state z(s) = y(-s), w(s) = dz/ds = -y'(-s)
    state = [y_s, -yp_s]

    def rhs(s, u):
        t = -s
        return [u[1], -t ** (-k) * (u[0] + abs(u[0]) ** (dim.p - 1.0) * u[0])]

    def ev_zero(s, u):
        return u[0]

    def ev_crit(s, u):
        return u[1]

    atol = [inp.abs_tol * max(1.0, gamma), 1e-4 * inp.abs_tol * max(1.0, gamma)]
    ts_chunks = []
    ys_chunks = []
    yps_chunks = []
    zero_times = []
    crit_times = []
    t_cur = t_start
    max_chunks = 200
    for _ in range(max_chunks):
        t_next = t_cur / _CHUNK_RATIO
        sol = solve_ivp(
            rhs,
            (-t_cur, -t_next),
            state,
            method="RK45",
            rtol=inp.rel_tol,
            atol=atol,
            events=(ev_zero, ev_crit),
            dense_output=True,
        )
        if not sol.success:
            raise NumericError(
                f"integrator failed on ({t_next:g}, {t_cur:g}) for "
                f"N={dim.N}, gamma={gamma}: {sol.message}"
            )
        # subdivide accepted steps so the Hermite interpolant stays accurate
        s_nodes = [sol.t[0]]
        for s_a, s_b in zip(sol.t[:-1], sol.t[1:]):
            dlnt = abs(math.log(s_b / s_a))
            m = max(1, int(math.ceil(dlnt / max_dlnt)))
            for j in range(1, m + 1):
                s_nodes.append(s_a + (s_b - s_a) * j / m)
        s_nodes = np.asarray(s_nodes)
        zz = sol.sol(s_nodes)
        ts_chunks.append(-s_nodes)
        ys_chunks.append(zz[0])
        yps_chunks.append(-zz[1])
        zero_times.extend(-sol.t_events[0])
        crit_times.extend(-sol.t_events[1])
        state = [sol.y[0][-1], sol.y[1][-1]]
        t_cur = t_next
        n_z = len(zero_times)
        if n_z >= inp.n_zeros:
            t_last_zero = sorted(zero_times, reverse=True)[inp.n_zeros - 1]
            if any(tc < t_last_zero for tc in crit_times):
                break
    else:
        raise NumericError(
            f"requested events not found before step underflow "
            f"(N={dim.N}, gamma={gamma}, reached t={t_cur:g}, "
            f"zeros found {len(zero_times)})"
        )
    t_all = np.concatenate(ts_chunks)
    y_all = np.concatenate(ys_chunks)
    yp_all = np.concatenate(yps_chunks)
    # ascending order for the spline; drop duplicated chunk endpoints
    order = np.argsort(t_all)
    t_all, y_all, yp_all = t_all[order], y_all[order], yp_all[order]
    keep = np.concatenate(([True], np.diff(t_all) > 1e-12 * t_all[1:]))
    return t_all[keep], y_all[keep], yp_all[keep], t_cur, t_start


def _refine_sign_changes(spline, t, vals, largest_first: bool, count: int,
                         context: str):
    """Strict sign changes of vals over breakpoints t, polished by brentq.

    Grazing contacts (a zero value without a sign change across the step)
    are rejected.  Returns up to `count` refined locations, largest t first.
    """
    sign_flip = vals[:-1] * vals[1:] < 0.0
    idx = np.nonzero(sign_flip)[0]
    locs = []
    for i in idx[::-1] if largest_first else idx:
        a, b = t[i], t[i + 1]
        root = brentq(spline, a, b, xtol=1e-14 * b, rtol=1e-14)
        locs.append(float(root))
        if len(locs) == count:
            return locs
    raise NumericError(
        f"found only {len(locs)} of {count} requested {context} sign changes"
    )


def solve_shooting(inp: ShootingInput, use_cache: bool = True) -> ShootingResult:
    """Solve the terminal-value problem and extract its event structure.

    Captures the n_zeros largest zeros T_1 > ... > T_n with the slopes there,
    and the largest critical point t0 with its value y0.  Results are pure
    functions of the input and are memoized; pass use_cache=False to force a
    fresh integration.
    """
    if use_cache and inp in _SOLVE_CACHE:
        return _SOLVE_CACHE[inp]
    t, y, yp, t_min, t_start = _integrate(inp)
    spline = CubicHermiteSpline(t, y, yp)
    dspline = spline.derivative()
    zeros = _refine_sign_changes(spline, t, y, True, inp.n_zeros, "zero")
    slopes = [float(dspline(T)) for T in zeros]
    # largest critical point: first y' sign change below T_1
    mask = t < zeros[0]
    crits = _refine_sign_changes(dspline, t[mask], yp[mask], True, 1, "critical-point")
    t0 = crits[0]
    y0 = float(spline(t0))
    traj = Trajectory(t=t, y=y, y_prime=yp, t_min=float(t_min),
                      t_start=float(t_start), spline=spline)
    result = ShootingResult(input=inp, zeros=tuple(zeros), slopes=tuple(slopes),
                            t0=float(t0), y0=y0, trajectory=traj)
    if use_cache:
        _SOLVE_CACHE[inp] = result
    return result


_SOLVE_CACHE: dict = {}


def evaluate(traj: Trajectory, t: float):
    """Dense-output (y, y') at time t within the recorded range."""
    if not (traj.t_min <= t <= traj.t_start):
        raise DomainError(
            f"t={t} outside trajectory range [{traj.t_min:g}, {traj.t_start:g}]"
        )
    return float(traj.spline(t)), float(traj.spline.derivative()(t))


def evaluate_extended(result: ShootingResult, t):
    """(y, y') at time t, using the analytic tail expansion above t_start.

    Vectorized over t; used by the profile reconstruction, which maps radii
    near zero to times beyond the recorded trajectory.
    """
    traj = result.trajectory
    t = np.asarray(t, dtype=float)
    if np.any(t < traj.t_min):
        raise DomainError(f"time below trajectory range t_min={traj.t_min:g}")
    inside = t <= traj.t_start
    y = np.empty_like(t)
    yp = np.empty_like(t)
    if np.any(inside):
        y[inside] = traj.spline(t[inside])
        yp[inside] = traj.spline.derivative()(t[inside])
    if np.any(~inside):
        yt, ypt = tail_values(result.input.dim, result.input.gamma, t[~inside])
        y[~inside] = yt
        yp[~inside] = ypt
    return y, yp
