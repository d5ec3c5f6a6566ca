import numpy as np
import pytest

from qdbound import DensityMatrix, TwoOutcomeMeasurement
from qdbound.qmat import ID2


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_state(rng, dims, rank=None):
    """Ginibre-induced random state with the given subsystem split."""
    d = int(np.prod(dims))
    if rank is None:
        rank = d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    mat = g @ g.conj().T
    return DensityMatrix(mat / mat.trace().real, tuple(dims))


def random_pure(rng, dims):
    d = int(np.prod(dims))
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    psi /= np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()), tuple(dims))


def haar_unitary(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_hermitian(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def random_povm(rng):
    """Random two-outcome POVM: positive M0 strictly below identity."""
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    p = g @ g.conj().T
    m0 = p / (np.linalg.eigvalsh(p)[-1] * (1.0 + rng.uniform(0.0, 1.0)))
    return TwoOutcomeMeasurement.from_elements(m0, ID2 - m0)


def random_projective(rng):
    v = rng.standard_normal(3)
    return TwoOutcomeMeasurement.from_axis(v / np.linalg.norm(v))


def local_unitary_conjugate(rng, rho):
    """U_A (x) U_B conjugation of a bipartite state."""
    da, db = rho.dims
    u = np.kron(haar_unitary(rng, da), haar_unitary(rng, db))
    return DensityMatrix(u @ rho.matrix @ u.conj().T, rho.dims)
