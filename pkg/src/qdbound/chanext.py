"""Symmetric purification of the qubit marginal and affine extraction of the
qubit-to-qudit map it induces on a d(x)2 state."""

from dataclasses import dataclass, field

import numpy as np

from .qmat import (
    DensityMatrix,
    GeneratorBasis,
    PAULIS,
    conditional_on_b,
    dagger,
    gellmann_basis,
    herm_eig,
    partial_trace,
)

# Below this eigenvalue the qubit marginal is treated as rank deficient and
# the caller must use the product-state shortcut.
FULL_RANK_CUTOFF = 1e-10
# Eigenvalue gap below which the marginal is treated as degenerate and the
# computational basis is used as the eigenframe.
DEGENERACY_ATOL = 1e-12


@dataclass(frozen=True)
class QubitSpectralData:
    """Eigensystem of a qubit state, eigenvalues descending.

    ``eigenvectors`` holds the eigenkets as columns; column phases are fixed
    so the largest-magnitude component is real and positive.
    """

    eigenvalues: np.ndarray  # (2,), lam0 >= lam1
    eigenvectors: np.ndarray  # (2, 2)

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ dagger(u)


@dataclass(frozen=True)
class SymmetricPurification:
    """Two-qubit pure state whose both marginals equal the purified state."""

    amplitudes: np.ndarray  # (4,), ordered as (auxiliary qubit, original qubit)

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.amplitudes.reshape(2, 2)
        return v @ dagger(v), v.T @ np.conj(v)


@dataclass(frozen=True)
class AffineQubitMap:
    """Bloch-affine form of the extracted qubit-to-qudit map.

    On input Bloch vector r (coordinates in the eigenframe of the purified
    marginal) the output Bloch vector is ``lmat @ r + shift`` and the output
    state is (I_d + m.gamma)/d. ``frame`` holds the input-frame kets as
    columns.
    """

    lmat: np.ndarray  # (d^2-1, 3)
    shift: np.ndarray  # (d^2-1,)
    basis: GeneratorBasis = field(repr=False)
    frame: np.ndarray = field(repr=False)  # (2, 2)

    @property
    def output_dim(self) -> int:
        return self.basis.dimension

    def corr_matrix(self) -> np.ndarray:
        """lmat rescaled by 2/d; the largest eigenvalue of its Gram matrix
        directly scales the linear-entropy classical correlation."""
        return (2.0 / self.output_dim) * self.lmat


def qubit_spectral(rho_b) -> QubitSpectralData:
    """Ordered eigensystem of a qubit state.

    A degenerate spectrum falls back to the computational basis so that
    downstream frames are reproducible.
    """
    mat = np.asarray(getattr(rho_b, "matrix", rho_b), dtype=complex)
    evals, vecs = herm_eig(mat)
    lam = np.clip(evals[::-1], 0.0, None)
    u = vecs[:, ::-1].copy()
    if lam[0] - lam[1] <= DEGENERACY_ATOL:
        u = np.eye(2, dtype=complex)
    else:
        for j in range(2):
            k = int(np.argmax(np.abs(u[:, j])))
            phase = u[k, j] / abs(u[k, j])
            u[:, j] = u[:, j] / phase
    return QubitSpectralData(lam, u)


def symmetric_purify(spec: QubitSpectralData) -> SymmetricPurification:
    """|V> = sum_i sqrt(lam_i) |phi_i>|phi_i> on an auxiliary copy."""
    amps = np.zeros(4, dtype=complex)
    for i in range(2):
        amps += np.sqrt(spec.eigenvalues[i]) * np.kron(
            spec.eigenvectors[:, i], spec.eigenvectors[:, i]
        )
    return SymmetricPurification(amps)


def extract_map(rho_ab: DensityMatrix, spec: QubitSpectralData | None = None) -> AffineQubitMap:
    """Extract the map that reproduces ``rho_ab`` from the purification.

    Requires a full-rank qubit marginal; below ``FULL_RANK_CUTOFF`` the state
    factorizes and callers should use the product shortcut instead.
    """
    if len(rho_ab.dims) != 2 or rho_ab.dims[1] != 2:
        raise ValueError(f"expected dims (d, 2), got {rho_ab.dims}")
    d = rho_ab.dims[0]
    if spec is None:
        spec = qubit_spectral(partial_trace(rho_ab, 1))
    lam = spec.eigenvalues
    if lam[1] <= FULL_RANK_CUTOFF:
        raise ValueError(
            f"qubit marginal is rank deficient (lambda_1 = {lam[1]:.3e}); "
            "the state factorizes and carries no correlation"
        )
    u = spec.eigenvectors
    # blocks[i][j] = Lambda(|phi_i><phi_j|), obtained by conditioning the
    # state on the matrix unit |phi_j><phi_i| of subsystem B.
    blocks = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            unit = np.outer(u[:, j], np.conj(u[:, i]))
            blocks[i][j] = conditional_on_b(rho_ab, unit) / np.sqrt(lam[i] * lam[j])
    images = np.stack(
        [
            blocks[0][1] + blocks[1][0],
            -1.0j * blocks[0][1] + 1.0j * blocks[1][0],
            blocks[0][0] - blocks[1][1],
            blocks[0][0] + blocks[1][1],
        ]
    )
    basis = gellmann_basis(d)
    coords = (d / 4.0) * np.einsum("kij,mji->mk", basis.matrices, images).real
    lmat = coords[:3].T.copy()
    shift = coords[3].copy()
    lmat.setflags(write=False)
    shift.setflags(write=False)
    return AffineQubitMap(lmat, shift, basis, u)


def apply_map(amap: AffineQubitMap, qubit) -> DensityMatrix:
    """Apply the map to a qubit state (given in the computational basis)."""
    out = apply_map_linear(amap, np.asarray(getattr(qubit, "matrix", qubit), dtype=complex))
    return DensityMatrix((out + dagger(out)) / 2.0, (amap.output_dim,))


def apply_map_linear(amap: AffineQubitMap, x: np.ndarray) -> np.ndarray:
    """Linear extension of the map to arbitrary 2x2 inputs.

    Needed to rebuild the bipartite state from the purification, where the
    map acts on non-Hermitian matrix units.
    """
    u = amap.frame
    xf = dagger(u) @ np.asarray(x, dtype=complex) @ u
    t = xf.trace()
    r = np.einsum("kij,ji->k", PAULIS, xf)
    m = amap.lmat @ r + t * amap.shift
    d = amap.output_dim
    return (t * np.eye(d, dtype=complex) + np.tensordot(m, amap.basis.matrices, axes=1)) / d


def reconstruct_state(amap: AffineQubitMap, spec: QubitSpectralData) -> np.ndarray:
    """(map (x) identity) applied to the purification projector."""
    d = amap.output_dim
    u = spec.eigenvectors
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    for i in range(2):
        for j in range(2):
            w = np.sqrt(spec.eigenvalues[i] * spec.eigenvalues[j])
            block_in = np.outer(u[:, i], np.conj(u[:, j]))
            out += w * np.kron(apply_map_linear(amap, block_in), block_in)
    return out


def output_bloch(amap: AffineQubitMap, r: np.ndarray) -> np.ndarray:
    """Output Bloch vector for an input Bloch vector in the map's frame."""
    return amap.lmat @ np.asarray(r, dtype=float) + amap.shift
