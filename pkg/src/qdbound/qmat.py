"""Dense complex linear algebra and qubit/qudit primitives.

Everything here is a pure function over immutable values; no shared
mutable state, so all operations are safe for data-parallel use.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# Hermiticity residual above this is a hard error; below it inputs are
# symmetrized before eigendecomposition.
HERM_HARD_ATOL = 1e-8
# Validation tolerances for density matrices.
HERM_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10
# Relative eigenvalue cutoff for range restriction (CLI-overridable).
RANK_CUTOFF = 1e-12

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = np.stack([PAULI_X, PAULI_Y, PAULI_Z])
ID2 = np.eye(2, dtype=complex)


class InvariantViolation(RuntimeError):
    """A numerical invariant promised by the library was violated."""


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a.swapaxes(-1, -2))


def _as_matrix(rho) -> np.ndarray:
    """Accept a DensityMatrix or a bare ndarray."""
    return np.asarray(getattr(rho, "matrix", rho), dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix with a subsystem-dimension annotation.

    ``dims`` lists the subsystem dimensions in tensor order (first factor
    outermost); their product must equal the matrix size.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)
        n = mat.shape[0]
        if mat.ndim != 2 or mat.shape != (n, n):
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        if int(np.prod(dims)) != n:
            raise ValueError(f"dims {dims} do not factor the dimension {n}")
        herm = np.max(np.abs(mat - dagger(mat)))
        if herm > HERM_ATOL:
            raise ValueError(f"matrix is not Hermitian: residual {herm:.3e}")
        tr = mat.trace()
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace {tr:.12g} differs from 1")
        evmin = float(np.linalg.eigvalsh((mat + dagger(mat)) / 2.0)[0])
        if evmin < -PSD_ATOL:
            raise ValueError(f"matrix is not PSD: minimum eigenvalue {evmin:.3e}")
        mat.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)


@dataclass(frozen=True)
class GeneratorBasis:
    """Orthogonal traceless Hermitian generators, Tr(g_i g_j) = 2 delta_ij."""

    dimension: int
    matrices: np.ndarray = field(repr=False)  # (d^2-1, d, d)

    def __len__(self) -> int:
        return self.matrices.shape[0]


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with ``a``'s indices outermost."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(*ops: np.ndarray) -> np.ndarray:
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the subsystem(s) in ``keep`` (index or indices)."""
    if np.isscalar(keep):
        keep = (int(keep),)
    keep = tuple(int(k) for k in keep)
    dims = rho.dims
    n = len(dims)
    if n < 2:
        raise ValueError("partial trace needs at least two subsystems")
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid subsystem indices {keep} for dims {dims}")
    reduced = _partial_trace_array(rho.matrix, dims, keep)
    return DensityMatrix(reduced, tuple(dims[k] for k in keep))


def _partial_trace_array(mat: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    dims = tuple(dims)
    n = len(dims)
    keep = sorted(keep)
    tens = mat.reshape(dims + dims)
    # Trace out the dropped subsystems from the back to keep axis numbering stable.
    current = list(dims)
    for idx in sorted(set(range(n)) - set(keep), reverse=True):
        tens = np.trace(tens, axis1=idx, axis2=idx + len(current))
        current.pop(idx)
    d_out = int(np.prod([dims[k] for k in keep]))
    return tens.reshape(d_out, d_out)


def herm_eig(h: np.ndarray):
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues ascending and the matrix of orthonormal column
    eigenvectors. Inputs are symmetrized; a Hermiticity residual above
    ``HERM_HARD_ATOL`` raises.
    """
    h = _as_matrix(h)
    resid = np.max(np.abs(h - dagger(h)))
    if resid > HERM_HARD_ATOL:
        raise ValueError(f"matrix is not Hermitian: residual {resid:.3e}")
    return np.linalg.eigh((h + dagger(h)) / 2.0)


def entropy_from_probs(p: np.ndarray) -> float:
    """Base-2 Shannon entropy with 0*log(0) = 0."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr(rho log2 rho), in bits."""
    evals = np.linalg.eigvalsh(_sym(_as_matrix(rho)))
    return entropy_from_probs(np.clip(evals, 0.0, None))


def linear_entropy(rho) -> float:
    """S2(rho) = 2(1 - Tr rho^2)."""
    mat = _as_matrix(rho)
    return 2.0 * (1.0 - float(np.vdot(mat, mat).real))


def _sym(mat: np.ndarray) -> np.ndarray:
    return (mat + dagger(mat)) / 2.0


def gellmann_basis(d: int) -> GeneratorBasis:
    """Generalized Gell-Mann matrices in canonical order.

    Block order is symmetric, antisymmetric, diagonal, with index pairs
    (j, k), j < k, in lexicographic order; for d = 2 this is exactly
    (sigma_x, sigma_y, sigma_z).
    """
    d = int(d)
    if d < 2:
        raise ValueError("generator basis needs dimension >= 2")
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = 1.0
            m[k, j] = 1.0
            mats.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1.0j
            m[k, j] = 1.0j
            mats.append(m)
    for l in range(1, d):
        m = np.zeros((d, d), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1.0
        m[l, l] = -float(l)
        mats.append(m * np.sqrt(2.0 / (l * (l + 1))))
    out = np.stack(mats)
    out.setflags(write=False)
    return GeneratorBasis(d, out)


def bloch_vector(rho, basis: GeneratorBasis) -> np.ndarray:
    """Coordinates r with rho = (I + r.gamma)/d, i.e. r_k = (d/2) Tr(rho gamma_k)."""
    mat = _as_matrix(rho)
    d = basis.dimension
    if mat.shape[0] != d:
        raise ValueError(f"state dimension {mat.shape[0]} does not match basis dimension {d}")
    return (d / 2.0) * np.einsum("kij,ji->k", basis.matrices, mat).real


def bloch_to_matrix(r: np.ndarray, basis: GeneratorBasis) -> np.ndarray:
    """Inverse of :func:`bloch_vector`: (I + r.gamma)/d."""
    d = basis.dimension
    return (np.eye(d, dtype=complex) + np.tensordot(r, basis.matrices, axes=1)) / d


def inv_sqrt_on_range(rho, cutoff: float | None = None) -> np.ndarray:
    """lambda^(-1/2) on eigenvalues above ``cutoff``, zero elsewhere.

    The default cutoff is ``RANK_CUTOFF`` times the largest eigenvalue.
    """
    mat = _as_matrix(rho)
    evals, vecs = herm_eig(mat)
    if cutoff is None:
        cutoff = RANK_CUTOFF * max(float(evals[-1]), 0.0)
    inv = np.where(evals > cutoff, 1.0 / np.sqrt(np.clip(evals, 1e-300, None)), 0.0)
    return (vecs * inv) @ dagger(vecs)


def range_projector(rho, cutoff: float | None = None) -> np.ndarray:
    mat = _as_matrix(rho)
    evals, vecs = herm_eig(mat)
    if cutoff is None:
        cutoff = RANK_CUTOFF * max(float(evals[-1]), 0.0)
    keep = np.where(evals > cutoff, 1.0, 0.0)
    return (vecs * keep) @ dagger(vecs)


def conditional_on_b(rho: DensityMatrix, op: np.ndarray) -> np.ndarray:
    """Tr_B[rho (I_A (x) op)] for a bipartite state with dims (d_A, d_B)."""
    if len(rho.dims) != 2:
        raise ValueError("conditional_on_b expects a bipartite dims annotation")
    da, db = rho.dims
    tens = rho.matrix.reshape(da, db, da, db)
    return np.einsum("aibj,ji->ab", tens, np.asarray(op, dtype=complex))
