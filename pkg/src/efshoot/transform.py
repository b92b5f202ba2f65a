"""Correspondence between the singular-ODE orbits and radial PDE profiles.

A shooting orbit with n sign changes maps, through t = T_n r^(-(N-2)) and an
amplitude factor lambda^((N-2)/4), to a radial Dirichlet solution on the unit
ball with n nodal regions and eigen-parameter lambda_n(gamma).  This module
builds those profiles, locates their node and interior minimum, rescales the
positive part to bubble coordinates, and measures the finite-difference
residual of the radial equation as a correctness gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .shooting import NumericError, ShootingResult, evaluate_extended
from .specfun import DimensionParams, DomainError

_N_MESH = 2400
_N_NODE_REFINE = 400


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A reconstructed radial solution u on (0, 1].

    For a two-nodal-region profile, u is positive on (0, r_node) and negative
    on (r_node, 1) with interior minimum at s_min; M_plus and M_minus are the
    sup-norms of the positive and negative parts.  A one-nodal-region profile
    (positive ground state) carries node and negative-part fields as None.
    """

    dim: DimensionParams
    gamma: float
    lam: float
    r: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    M_plus: float
    n_nodal: int
    exact: np.ndarray = field(repr=False, default=None)
    r_node: float | None = None
    s_min: float | None = None
    M_minus: float | None = None
    source: ShootingResult = field(repr=False, default=None)


@dataclass(frozen=True, eq=False)
class RescaledProfile:
    """Positive part in bubble coordinates: rho = M_plus^beta * r, values / M_plus."""

    dim: DimensionParams
    sigma: float
    rho: np.ndarray
    u_tilde: np.ndarray
    source: RadialProfile = field(repr=False, default=None)


def lambda_n_of_gamma(dim: DimensionParams, result: ShootingResult, n: int) -> float:
    """Eigen-parameter lambda_n(gamma) = (N-2)^2 T_n^(-2/(N-2))."""
    if n < 1 or n > len(result.zeros):
        raise DomainError(
            f"n={n} outside the {len(result.zeros)} captured zeros"
        )
    T = result.zeros[n - 1]
    return (dim.N - 2.0) ** 2 * T ** (-2.0 / (dim.N - 2.0))


def _profile_values(dim: DimensionParams, result: ShootingResult, T_n: float,
                    lam: float, r):
    """(u, u') at radii r through the change of variables."""
    r = np.asarray(r, dtype=float)
    t = T_n * r ** (-(dim.N - 2.0))
    y, yp = evaluate_extended(result, t)
    amp = lam ** ((dim.N - 2.0) / 4.0)
    u = amp * y
    up = -amp * (dim.N - 2.0) * T_n * r ** (-(dim.N - 1.0)) * yp
    return u, up


def build_radial_profile(dim: DimensionParams, result: ShootingResult,
                         n_nodal: int = 2) -> RadialProfile:
    """Reconstruct the n_nodal-region radial profile from a shooting result.

    The mesh combines the images of the recorded orbit breakpoints (where
    the sampled values carry no interpolation error; flagged in `exact`)
    with a log-graded fill on [r_eps, 1] and uniform refinement around the
    node.  r_eps, the image of the recorded starting time, resolves the
    concentration core.  Derivatives come analytically through the change
    of variables, never from numerical differentiation.
    """
    if n_nodal < 1 or n_nodal > len(result.zeros):
        raise DomainError(
            f"n_nodal={n_nodal} outside the {len(result.zeros)} captured zeros"
        )
    N = dim.N
    gamma = result.input.gamma
    lam = lambda_n_of_gamma(dim, result, n_nodal)
    T_n = result.zeros[n_nodal - 1]
    amp = lam ** ((N - 2.0) / 4.0)
    traj = result.trajectory
    r_eps = (T_n / traj.t_start) ** (1.0 / (N - 2.0))

    t_br = traj.t[(traj.t > T_n) & (traj.t <= traj.t_start)]
    r_exact = np.sort(T_n ** (1.0 / (N - 2.0)) * t_br ** (-1.0 / (N - 2.0)))
    keep = np.concatenate(([True], np.diff(r_exact) > 1e-12 * r_exact[1:]))
    r_exact = r_exact[keep]
    extra = [np.geomspace(r_eps, 1.0, _N_MESH), [1.0]]
    r_node = s_min = M_minus = None
    if n_nodal >= 2:
        r_node = (result.zeros[n_nodal - 1] / result.zeros[n_nodal - 2]) ** (
            1.0 / (N - 2.0)
        )
        s_min = (T_n / result.t0) ** (1.0 / (N - 2.0))
        M_minus = amp * abs(result.y0)
        lo = max(r_eps, 0.9 * r_node)
        hi = min(1.0, 1.1 * r_node)
        extra.append(np.linspace(lo, hi, _N_NODE_REFINE))
    r_extra = np.unique(np.concatenate(extra))
    # drop fill points that collide with exact breakpoint images
    pos = np.searchsorted(r_exact, r_extra)
    pos = np.clip(pos, 1, len(r_exact) - 1)
    near = np.minimum(np.abs(r_extra - r_exact[pos - 1]),
                      np.abs(r_extra - r_exact[pos]))
    r_extra = r_extra[near > 1e-9 * r_extra]
    mesh = np.concatenate([r_exact, r_extra])
    exact = np.concatenate([np.ones(len(r_exact), bool),
                            np.zeros(len(r_extra), bool)])
    order = np.argsort(mesh)
    mesh, exact = mesh[order], exact[order]
    u, up = _profile_values(dim, result, T_n, lam, mesh)
    M_plus = amp * gamma
    prof = RadialProfile(dim=dim, gamma=gamma, lam=lam, r=mesh, u=u, u_prime=up,
                         M_plus=M_plus, n_nodal=n_nodal, exact=exact,
                         r_node=r_node, s_min=s_min, M_minus=M_minus,
                         source=result)
    _validate_profile(prof)
    return prof


def _validate_profile(p: RadialProfile):
    if abs(p.u[-1]) > 1e-8 * p.M_plus:
        raise NumericError(f"u(1)={p.u[-1]:g} not zero within 1e-8*M_plus")
    if p.n_nodal == 2:
        if not (0.0 < p.r_node < p.s_min < 1.0):
            raise NumericError(
                f"node/minimum ordering violated: r_node={p.r_node}, s_min={p.s_min}"
            )
        tol = 1e-9
        inner = p.r < p.r_node * (1.0 - tol)
        outer = (p.r > p.r_node * (1.0 + tol)) & (p.r < 1.0 - tol)
        if np.any(p.u[inner] <= 0.0):
            raise NumericError("positive part not positive on (0, r_node)")
        if np.any(p.u[outer] >= 0.0):
            raise NumericError("negative part not negative on (r_node, 1)")
        up_node = float(np.interp(p.r_node, p.r, p.u_prime))
        if up_node >= 0.0:
            raise NumericError(f"slope at the node must be negative, got {up_node:g}")


def profile_eval(profile: RadialProfile, r):
    """(u, u') at arbitrary radii in (0, 1], exact through the orbit record."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or np.any(r > 1.0):
        raise DomainError("radius must lie in (0, 1]")
    T_n = profile.source.zeros[profile.n_nodal - 1]
    return _profile_values(profile.dim, profile.source, T_n, profile.lam, r)


def rescale_positive_part(profile: RadialProfile, n_samples: int = 2000) -> RescaledProfile:
    """Positive part in concentration coordinates.

    u_tilde(rho) = u(rho / M_plus^beta) / M_plus on [0, sigma] with
    sigma = M_plus^beta * r_node (the rescaled node); u_tilde(0) = 1.
    """
    if profile.n_nodal < 2:
        raise DomainError("rescaling requires a profile with a node")
    scale = profile.M_plus ** profile.dim.beta
    sigma = scale * profile.r_node
    rho = np.linspace(0.0, sigma, n_samples)
    u_tilde = rescaled_eval(profile, rho)
    return RescaledProfile(dim=profile.dim, sigma=sigma, rho=rho,
                           u_tilde=u_tilde, source=profile)


def rescaled_eval(profile: RadialProfile, rho):
    """u_tilde at arbitrary rescaled radii (rho = 0 maps to the exact value 1)."""
    rho = np.asarray(rho, dtype=float)
    scale = profile.M_plus ** profile.dim.beta
    out = np.empty_like(rho)
    at_zero = rho == 0.0
    out[at_zero] = 1.0
    if np.any(~at_zero):
        u, _ = profile_eval(profile, rho[~at_zero] / scale)
        out[~at_zero] = u / profile.M_plus
    return out


def ode_residual(profile: RadialProfile) -> float:
    """Worst locally normalized finite-difference residual of the radial equation.

    At each interior triple of interpolation-free samples the second
    derivative is formed by the nonuniform three-point difference of the
    stored first derivative (second-order accurate on a graded mesh) and
    inserted into u'' + (N-1)/r u' + lam u + |u|^(2*-2) u.  The difference
    quotient amplifies the uncertainty the integrator leaves in u' (its
    absolute and relative tolerances and the mid-step accuracy of its dense
    output), so each triple carries a certified noise floor: the reported
    value is the worst excess of the residual above that floor, divided by
    the local magnitude of the equation's terms.  Triples whose floor
    exceeds a tenth of that magnitude are excluded as unresolvable.
    """
    if len(profile.r) < 3:
        raise DomainError("residual needs at least 3 samples")
    if np.all(profile.u == 0.0):
        return 0.0
    sel = profile.exact if profile.exact is not None else np.ones(len(profile.r), bool)
    r, u, up = profile.r[sel], profile.u[sel], profile.u_prime[sel]
    if len(r) < 3:
        raise DomainError("residual needs at least 3 interpolation-free samples")
    N = profile.dim.N
    two_star = profile.dim.two_star
    lam = profile.lam
    h1 = r[1:-1] - r[:-2]
    h2 = r[2:] - r[1:-1]
    upp = (
        -h2 / (h1 * (h1 + h2)) * up[:-2]
        + (h2 - h1) / (h1 * h2) * up[1:-1]
        + h1 / (h2 * (h1 + h2)) * up[2:]
    )
    rm, um, upm = r[1:-1], u[1:-1], up[1:-1]
    drift = (N - 1.0) / rm * upm
    lin = lam * um
    nonlin = np.abs(um) ** (two_star - 2.0) * um
    resid = np.abs(upp + drift + lin + nonlin)
    phys = np.abs(upp) + np.abs(drift) + np.abs(lin) + np.abs(nonlin)
    phys = np.maximum(phys, 1e-9 * lam * profile.M_plus)
    # noise floor: the integrator guarantees y' only to its tolerances, and
    # the difference quotient amplifies that uncertainty by the coefficient
    # magnitudes; roundoff in u' adds an eps-level term on the same scale
    eps = np.finfo(float).eps
    inp = profile.source.input
    amp = lam ** ((N - 2.0) / 4.0)
    T_n = profile.source.zeros[profile.n_nodal - 1]
    atol_yp = 1e-4 * inp.abs_tol * max(1.0, inp.gamma)
    # dense-output accuracy mid-step is one order below the step endpoints,
    # hence the rel_tol^(4/5) term
    jitter = inp.rel_tol + inp.rel_tol ** 0.8 + 16.0 * eps
    atol_up = amp * (N - 2.0) * T_n * r ** (-(N - 1.0)) * atol_yp
    atol_up = atol_up + jitter * np.abs(up)
    noise = (
        h2 / (h1 * (h1 + h2)) * atol_up[:-2]
        + np.abs(h2 - h1) / (h1 * h2) * atol_up[1:-1]
        + h1 / (h2 * (h1 + h2)) * atol_up[2:]
    )
    mask = noise <= 0.1 * phys
    if not np.any(mask):
        raise NumericError("no resolvable triples for the residual check")
    excess = np.maximum(resid - noise, 0.0)
    return float(np.max(excess[mask] / phys[mask]))
