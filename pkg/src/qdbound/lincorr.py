"""Closed-form linear-entropy classical correlation for d(x)2 states, the
optimal two-state decomposition of the qubit marginal, and the projective
measurement that attains the correlation."""

from dataclasses import dataclass

import numpy as np

from .chanext import FULL_RANK_CUTOFF, extract_map, qubit_spectral
from .qmat import (
    DensityMatrix,
    ID2,
    PAULIS,
    conditional_on_b,
    dagger,
    inv_sqrt_on_range,
    linear_entropy,
    partial_trace,
)

PROB_FLOOR = 1e-14
ELEMENT_SUM_ATOL = 1e-10
ELEMENT_PSD_ATOL = 1e-10
PROJECTIVE_ATOL = 1e-9
# Relative eigenvalue-gap tolerance for picking the dominant axis.
AXIS_DEGENERACY_RTOL = 1e-9

_YFLIP = np.array([1.0, -1.0, 1.0])


@dataclass(frozen=True)
class TwoOutcomeMeasurement:
    """Pair of POVM elements on a qubit (positive, summing to identity).

    Outcome probabilities and conditional states of the unmeasured side only
    depend on the elements, not on a Kraus decomposition, so the elements are
    all that is stored. ``projective`` is set when both elements pass the
    idempotency check.
    """

    m0: np.ndarray
    m1: np.ndarray
    projective: bool

    @classmethod
    def from_elements(cls, m0: np.ndarray, m1: np.ndarray) -> "TwoOutcomeMeasurement":
        m0 = np.asarray(m0, dtype=complex)
        m1 = np.asarray(m1, dtype=complex)
        if np.max(np.abs(m0 + m1 - ID2)) > ELEMENT_SUM_ATOL:
            raise ValueError("measurement elements do not sum to identity")
        for m in (m0, m1):
            if np.max(np.abs(m - dagger(m))) > ELEMENT_SUM_ATOL:
                raise ValueError("measurement element is not Hermitian")
            if np.linalg.eigvalsh((m + dagger(m)) / 2)[0] < -ELEMENT_PSD_ATOL:
                raise ValueError("measurement element is not positive")
        projective = bool(
            np.max(np.abs(m0 @ m0 - m0)) <= PROJECTIVE_ATOL
            and np.max(np.abs(m1 @ m1 - m1)) <= PROJECTIVE_ATOL
        )
        return cls(m0, m1, projective)

    @classmethod
    def from_axis(cls, axis: np.ndarray) -> "TwoOutcomeMeasurement":
        """Projectors (I +- n.sigma)/2 along a unit Bloch direction."""
        n = np.asarray(axis, dtype=float)
        n = n / np.linalg.norm(n)
        ns = np.tensordot(n, PAULIS, axes=1)
        return cls((ID2 + ns) / 2, (ID2 - ns) / 2, True)

    @property
    def elements(self) -> tuple[np.ndarray, np.ndarray]:
        return self.m0, self.m1

    @property
    def axis(self) -> np.ndarray:
        """Bloch vector of the first element (unit for rank-1 projectors)."""
        return np.einsum("kij,ji->k", PAULIS, self.m0).real


@dataclass(frozen=True)
class OptimalDecomposition:
    """Two-state pure decomposition of a qubit maximizing the correlation.

    Bloch vectors are ``r_b + alpha_j * axis`` with the displacements solving
    the unit-norm constraint; probabilities rebalance so the displacements
    average to zero.
    """

    probs: np.ndarray  # (2,)
    bloch: np.ndarray  # (2, 3), unit rows
    alphas: np.ndarray  # (2,)


@dataclass(frozen=True)
class LinCorrResult:
    """Closed-form linear-entropy classical correlation and its measurement."""

    i2: float
    lambda_max: float
    axis: np.ndarray  # dominant correlation axis, marginal-eigenframe coordinates
    measurement: TwoOutcomeMeasurement


def optimal_decomposition(r_b: np.ndarray, axis: np.ndarray) -> OptimalDecomposition:
    """Optimal pure-state pair along ``axis`` for a qubit with Bloch ``r_b``."""
    r_b = np.asarray(r_b, dtype=float)
    e = np.asarray(axis, dtype=float)
    e = e / np.linalg.norm(e)
    r2 = float(r_b @ r_b)
    if r2 > 1.0 + 1e-10:
        raise ValueError(f"Bloch norm {np.sqrt(r2):.12g} exceeds 1")
    proj = float(e @ r_b)
    disc = np.sqrt(max(proj * proj + 1.0 - r2, 0.0))
    alphas = np.array([-proj + disc, -proj - disc])
    spread = alphas[0] - alphas[1]
    if spread <= PROB_FLOOR:
        # Pure marginal with axis orthogonal to it: the decomposition
        # degenerates to the state itself.
        probs = np.array([1.0, 0.0])
    else:
        p_plus = -alphas[1] / spread
        probs = np.array([p_plus, 1.0 - p_plus])
    bloch = r_b[None, :] + alphas[:, None] * e[None, :]
    return OptimalDecomposition(probs, bloch, alphas)


def povm_from_decomposition(rho_b, dec: OptimalDecomposition) -> TwoOutcomeMeasurement:
    """Measurement induced by a two-state decomposition of the marginal.

    Bloch vectors in ``dec`` are read in the same basis as ``rho_b``; the
    mixture must reproduce ``rho_b``.
    """
    mat = np.asarray(getattr(rho_b, "matrix", rho_b), dtype=complex)
    states = [
        (ID2 + np.tensordot(dec.bloch[j], PAULIS, axes=1)) / 2 for j in range(2)
    ]
    mix = dec.probs[0] * states[0] + dec.probs[1] * states[1]
    if np.max(np.abs(mix - mat)) > 1e-9:
        raise ValueError("decomposition does not reproduce the marginal")
    s = inv_sqrt_on_range(mat)
    m0 = s @ (dec.probs[0] * states[0]) @ s
    m1 = s @ (dec.probs[1] * states[1]) @ s
    if np.max(np.abs(m0 + m1 - ID2)) > 1e-9:
        raise ValueError("decomposition does not induce a complete measurement")
    # Two rank-1 positive operators summing to identity are orthogonal
    # projectors; symmetrize away rounding before the idempotency check.
    m0 = (m0 + dagger(m0)) / 2
    m1 = (m1 + dagger(m1)) / 2
    return TwoOutcomeMeasurement.from_elements(m0, m1)


def dominant_axis(gram: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of a symmetric 3x3 Gram matrix and its axis.

    Inside a degenerate top eigenspace the axis is the normalized projection
    of x-hat (falling back to y-hat, then z-hat), which makes the choice
    deterministic and covers exactly degenerate spectra.
    """
    w, v = np.linalg.eigh((gram + gram.T) / 2)
    lam = float(w[2])
    tol = AXIS_DEGENERACY_RTOL * max(lam, 1e-30)
    sub = v[:, w >= lam - tol]
    for k in range(3):
        coeff = sub[k, :]  # overlap of the k-th coordinate axis with the eigenspace
        norm = np.linalg.norm(coeff)
        if norm > 1e-6:
            return lam, sub @ (coeff / norm)
    return lam, v[:, 2]


def classical_corr_linear(rho_ab: DensityMatrix) -> LinCorrResult:
    """Linear-entropy classical correlation of a d(x)2 state, closed form.

    Returns the correlation value, the dominant squared singular value of the
    extracted map, the optimal axis, and the projective measurement attaining
    the value. A rank-deficient marginal means the state factorizes: the
    correlation is zero and the marginal eigenbasis is returned.
    """
    rho_b = partial_trace(rho_ab, 1)
    spec = qubit_spectral(rho_b)
    u = spec.eigenvectors
    if spec.eigenvalues[1] <= FULL_RANK_CUTOFF:
        meas = TwoOutcomeMeasurement.from_elements(
            np.outer(u[:, 0], np.conj(u[:, 0])), np.outer(u[:, 1], np.conj(u[:, 1]))
        )
        return LinCorrResult(0.0, 0.0, np.array([0.0, 0.0, 1.0]), meas)
    amap = extract_map(rho_ab, spec)
    k = amap.corr_matrix()
    lam_max, axis = dominant_axis(k.T @ k)
    r_b = np.array([0.0, 0.0, spec.eigenvalues[0] - spec.eigenvalues[1]])
    dec = optimal_decomposition(r_b, axis)
    # The measurement steering the auxiliary copy onto the optimal
    # decomposition uses the frame-conjugated Bloch vectors (y sign flip),
    # expressed back in the computational basis of the measured qubit.
    rot = _frame_rotation(u)
    meas_dec = OptimalDecomposition(dec.probs, (dec.bloch * _YFLIP) @ rot.T, dec.alphas)
    meas = povm_from_decomposition(rho_b, meas_dec)
    i2 = lam_max * linear_entropy(rho_b)
    return LinCorrResult(float(i2), lam_max, axis, meas)


def _frame_rotation(u: np.ndarray) -> np.ndarray:
    """SO(3) rotation taking frame Bloch coordinates to computational ones."""
    rot = np.empty((3, 3))
    for l in range(3):
        conj = u @ PAULIS[l] @ dagger(u)
        rot[:, l] = 0.5 * np.einsum("kij,ji->k", PAULIS, conj).real
    return rot


def i2_at_measurement(rho_ab: DensityMatrix, m: TwoOutcomeMeasurement) -> float:
    """Direct linear-entropy correlation captured by one measurement.

    Evaluates S2 of the unmeasured marginal minus the average conditional S2;
    outcomes with probability below ``PROB_FLOOR`` contribute nothing and are
    skipped.
    """
    value = linear_entropy(partial_trace(rho_ab, 0))
    for element in m.elements:
        cond = conditional_on_b(rho_ab, element)
        p = float(cond.trace().real)
        if p < PROB_FLOOR:
            continue
        value -= p * linear_entropy(cond / p)
    return value
