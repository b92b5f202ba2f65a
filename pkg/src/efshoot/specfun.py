"""Self-contained special functions for the radial Dirichlet problem on the unit ball.

Everything downstream (shooting, eigenvalue comparisons, energy limits) is
expressed through a handful of classical objects: the Gamma function, the
regular Bessel function J_nu, the oscillating comparison function alpha(t)
built from it, the radial Dirichlet eigenvalues of the Laplacian on the unit
ball, the best Sobolev embedding constant, and the standard bubble profile.
All of them are implemented here from scratch so the package carries its own
reference values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, getcontext


class DomainError(ValueError):
    """Argument outside the supported domain of a special function."""


class BracketingError(RuntimeError):
    """A root could not be bracketed; carries diagnostic context."""


# Lanczos approximation, g = 7, 9 coefficients.  Relative accuracy is a few
# ulp for x in (0, 30], which is more than the 1e-12 the package needs.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function for real arguments.

    Positive arguments use the Lanczos rational approximation; arguments
    below 1/2 (including negative non-integers) go through the reflection
    formula.  Non-positive integers are poles and raise DomainError.
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"Gamma pole at non-positive integer x={x}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


_BESSEL_S_MAX = 60.0
_BESSEL_MAX_TERMS = 200


def bessel_j(nu: float, s: float) -> float:
    """Regular Bessel function J_nu(s) by its ascending power series.

    The series is summed with term recurrence until the next term falls
    below 1e-18 of the partial sum (capped at 200 terms).  The alternating
    terms reach roughly e^s in magnitude, so for s beyond 8 double precision
    loses the cancellation below the 1e-12 accuracy target and the series is
    instead summed in 50-digit decimal arithmetic.  Arguments above 60 are
    refused rather than switched to asymptotic forms.
    """
    if nu < 0.0:
        raise DomainError(f"order nu={nu} must be nonnegative")
    if s < 0.0:
        raise DomainError(f"argument s={s} must be nonnegative")
    if s > _BESSEL_S_MAX:
        raise DomainError(f"argument s={s} above supported range [0, {_BESSEL_S_MAX}]")
    if s == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    # common prefactor (s/2)^nu / Gamma(nu+1); the alternating sum of the
    # normalized coefficients c_j (c_0 = 1) carries the cancellation.
    half = 0.5 * s
    pref = half**nu / gamma_fn(nu + 1.0)
    q = half * half
    if s <= 8.0:
        total = 1.0
        term = 1.0
        for j in range(_BESSEL_MAX_TERMS):
            term *= -q / ((j + 1.0) * (j + 1.0 + nu))
            total += term
            if abs(term) < 1e-18 * abs(total):
                break
        return pref * total
    ctx_prec = getcontext().prec
    try:
        getcontext().prec = 50
        qd = Decimal(q)
        nud = Decimal(nu)
        total = Decimal(1)
        term = Decimal(1)
        for j in range(_BESSEL_MAX_TERMS):
            jd = Decimal(j)
            term *= -qd / ((jd + 1) * (jd + 1 + nud))
            total += term
            if abs(term) < Decimal("1e-40") * (abs(total) + Decimal("1e-30")):
                break
        return pref * float(total)
    finally:
        getcontext().prec = ctx_prec


@dataclass(frozen=True)
class DimensionParams:
    """Derived exponents for the critical problem in dimension N."""

    N: int
    p: float          # critical power (N+2)/(N-2)
    two_star: float   # critical Sobolev exponent 2N/(N-2)
    k: float          # Emden-Fowler exponent 2(N-1)/(N-2)
    nu: float         # Bessel order (N-2)/2
    beta: float       # rescaling exponent 2/(N-2)

    @classmethod
    def from_dimension(cls, N: int) -> "DimensionParams":
        if int(N) != N or N < 3:
            raise DomainError(f"dimension N={N} must be an integer >= 3")
        N = int(N)
        return cls(
            N=N,
            p=(N + 2.0) / (N - 2.0),
            two_star=2.0 * N / (N - 2.0),
            k=2.0 * (N - 1.0) / (N - 2.0),
            nu=(N - 2.0) / 2.0,
            beta=2.0 / (N - 2.0),
        )


def alpha_fn(dim: DimensionParams, t: float) -> float:
    """Oscillating comparison solution of a'' + t^(-k) a = 0 with a -> 1 at infinity.

    alpha(t) = A_nu sqrt(t) J_nu(2 nu t^(-1/(2 nu))), A_nu = nu^(-nu) Gamma(nu+1).
    For N = 3 this reduces to t*sin(1/t).
    """
    if t <= 0.0:
        raise DomainError(f"t={t} must be positive")
    nu = dim.nu
    a_nu = nu ** (-nu) * gamma_fn(nu + 1.0)
    s = 2.0 * nu * t ** (-1.0 / (2.0 * nu))
    return a_nu * math.sqrt(t) * bessel_j(nu, s)


def _bessel_zero_estimate(nu: float, n: int) -> float:
    """McMahon asymptotic estimate of the n-th positive zero of J_nu."""
    b = (n + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    return b - (mu - 1.0) / (8.0 * b)


def alpha_zero(dim: DimensionParams, n: int) -> float:
    """n-th zero tau_n of alpha, ordered backwards (tau_1 is the largest).

    Zeros of alpha correspond to zeros of J_nu through s = 2 nu t^(-1/(2 nu)),
    so tau_n shrinks as n grows.  The zero is located by sampling alpha on a
    log grid between brackets derived from the Bessel-zero estimate and then
    polishing by bisection to 1e-12 relative accuracy.
    """
    if n < 1 or int(n) != n:
        raise DomainError(f"zero index n={n} must be a positive integer")
    nu = dim.nu
    j_est = _bessel_zero_estimate(nu, int(n))
    # map a generous s-bracket around the estimated Bessel zero back to t
    s_lo = max(j_est - 1.4, 0.5 * j_est)
    s_hi = j_est + 1.4
    t_of_s = lambda s: (2.0 * nu / s) ** (2.0 * nu)
    t_hi, t_lo = t_of_s(s_lo), t_of_s(s_hi)
    grid = [t_lo * (t_hi / t_lo) ** (i / 63.0) for i in range(64)]
    vals = [alpha_fn(dim, t) for t in grid]
    bracket = None
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            return a
        if fa * fb < 0.0:
            bracket = (a, b, fa, fb)
            break
    if bracket is None:
        raise BracketingError(
            f"no sign change of alpha for N={dim.N}, n={n} "
            f"in t bracket [{t_lo:.6g}, {t_hi:.6g}] (s estimate {j_est:.6g})"
        )
    a, b, fa, fb = bracket
    while b - a > 1e-12 * b:
        m = 0.5 * (a + b)
        fm = alpha_fn(dim, m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def radial_eigenvalue(dim: DimensionParams, n: int) -> float:
    """n-th radial Dirichlet eigenvalue of -Laplace on the unit ball.

    lambda_n(B1) = (N-2)^2 tau_n^(-2/(N-2)); numerically this equals the
    square of the n-th positive zero of J_nu.
    """
    tau = alpha_zero(dim, n)
    return (dim.N - 2.0) ** 2 * tau ** (-2.0 / (dim.N - 2.0))


def sobolev_constant(N: int) -> float:
    """Best constant of the embedding D^{1,2}(R^N) into L^{2N/(N-2)}(R^N)."""
    if int(N) != N or N < 3:
        raise DomainError(f"dimension N={N} must be an integer >= 3")
    N = int(N)
    return math.pi * N * (N - 2.0) * (gamma_fn(N / 2.0) / gamma_fn(float(N))) ** (2.0 / N)


@dataclass(frozen=True)
class BubbleSpec:
    """Standard bubble centered at the origin with concentration parameter mu."""

    N: int
    mu: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise DomainError(f"dimension N={self.N} must be an integer >= 3")
        if self.mu <= 0.0:
            raise DomainError(f"mu={self.mu} must be positive")

    @classmethod
    def normalized(cls, N: int) -> "BubbleSpec":
        """Bubble with mu^2 = N(N-2), normalized to value 1 at the center."""
        return cls(N=int(N), mu=math.sqrt(N * (N - 2.0)))


def bubble_eval(spec: BubbleSpec, radius) -> float:
    """Value of the bubble U_{0,mu} at |x| = radius.

    U(r) = [N(N-2) mu^2]^((N-2)/4) / (mu^2 + r^2)^((N-2)/2); accepts scalars
    or numpy arrays for the radius.
    """
    N, mu = spec.N, spec.mu
    num = (N * (N - 2.0) * mu * mu) ** ((N - 2.0) / 4.0)
    return num / (mu * mu + radius * radius) ** ((N - 2.0) / 2.0)


def t1_prefactor_candidates(dim: DimensionParams) -> dict:
    """Both readings of the slowly-diverging prefactor A(k) of the largest-zero law.

    The source formula for A(k) (valid for 2 < k < 3) is typographically
    ambiguous: the numerator reads either Gamma(3-k)/(k-2) or
    Gamma((3-k)/(k-2)).  Both candidates are exposed; the analysis module
    reports which one matches the fitted prefactor.
    """
    k = dim.k
    if not (2.0 < k < 3.0):
        raise DomainError(f"A(k) prefactor defined only for 2 < k < 3 (got k={k})")
    common = (k - 1.0) ** ((k - 3.0) / (k - 2.0)) * gamma_fn((k - 1.0) / (k - 2.0)) / gamma_fn(
        2.0 / (k - 2.0)
    )
    return {
        "gamma_of_3_minus_k_over_k_minus_2": common * gamma_fn(3.0 - k) / (k - 2.0),
        "gamma_of_ratio": common * gamma_fn((3.0 - k) / (k - 2.0)),
    }
