import pytest

from efshoot.shooting import ShootingInput, solve_shooting
from efshoot.specfun import DimensionParams
from efshoot.transform import build_radial_profile


@pytest.fixture(scope="session")
def dims():
    return {N: DimensionParams.from_dimension(N) for N in (3, 4, 5, 6, 7)}


@pytest.fixture(scope="session")
def solve(dims):
    """Shared memoized solver handle (results are cached per input)."""

    def _solve(N, gamma, **kw):
        return solve_shooting(ShootingInput(dim=dims[N], gamma=float(gamma), **kw))

    return _solve


@pytest.fixture(scope="session")
def profile(dims, solve):
    cache = {}

    def _profile(N, gamma, n_nodal=2):
        key = (N, float(gamma), n_nodal)
        if key not in cache:
            cache[key] = build_radial_profile(dims[N], solve(N, gamma), n_nodal)
        return cache[key]

    return _profile
