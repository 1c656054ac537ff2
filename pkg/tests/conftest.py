import numpy as np
import pytest

from ipl import continuum


@pytest.fixture(scope="session")
def canonical_params():
    """The profile-figure parameter pair lambda = 1.5, g = 0.05."""
    return continuum.params_from_lambda_g(1.5, 0.05)


@pytest.fixture(scope="session")
def acceptance_grid(canonical_params):
    """Default-resolution linearized grid and its full decomposition.

    Shared between the grid-oracle acceptance criteria so the expensive
    decomposition runs once per session.
    """
    import time

    op = continuum.discretize_linear(canonical_params)
    t0 = time.monotonic()
    system = continuum.grid_eigensystem(op)
    elapsed = time.monotonic() - t0
    return op, system, elapsed


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
