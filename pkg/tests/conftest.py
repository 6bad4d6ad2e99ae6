import numpy as np
import pytest

from qdchan.channels import DensityMatrix
from qdchan.linalg import haar_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_density(d: int, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank random state from a Ginibre draw."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return DensityMatrix(d, m / np.trace(m).real)


def random_pure(d: int, rng: np.random.Generator) -> DensityMatrix:
    v = haar_unitary(d, rng)[:, 0]
    return DensityMatrix(d, np.outer(v, v.conj()))
