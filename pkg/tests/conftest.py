import numpy as np
import pytest

from modval.hilbert import PureState


def random_state(rng, dims=(2, 2)) -> PureState:
    total = int(np.prod(dims))
    vec = rng.normal(size=total) + 1j * rng.normal(size=total)
    return PureState(dims, vec / np.linalg.norm(vec))


def random_pair(rng, dims=(2, 2), min_overlap=0.05):
    """Pre/postselection pair with a non-orthogonal overlap."""
    while True:
        psi, phi = random_state(rng, dims), random_state(rng, dims)
        if abs(np.vdot(phi.amps, psi.amps)) > min_overlap:
            return psi, phi


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
