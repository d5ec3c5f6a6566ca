"""Von Neumann mutual information, the discord upper bound evaluated at the
linear-entropy-optimal measurement, a brute-force projective-measurement
oracle, and the entanglement-of-formation bound for rank-2 states."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .lincorr import PROB_FLOOR, TwoOutcomeMeasurement, classical_corr_linear
from .qmat import (
    DensityMatrix,
    PAULIS,
    conditional_on_b,
    dagger,
    partial_trace,
    von_neumann_entropy,
)
from .states import bell_diagonal

DEFAULT_GRID = (64, 128)
DEFAULT_REFINE_TOL = 1e-9
ANGLE_TOL = 1e-6
RANK2_CUTOFF = 1e-10
_REFINE_STARTS = 3
_CHUNK = 2048


@dataclass(frozen=True)
class MeasurementDirection:
    """Projective qubit measurement along the Bloch direction (theta, phi)."""

    theta: float
    phi: float

    @property
    def unit(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array(
            [st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)]
        )

    def measurement(self) -> TwoOutcomeMeasurement:
        return TwoOutcomeMeasurement.from_axis(self.unit)


@dataclass(frozen=True)
class BoundReport:
    """Everything the bound pipeline knows about one state."""

    mutual_info: float
    i2: float
    q_upper: float
    q_numerical: float | None
    delta: float | None
    measurement: TwoOutcomeMeasurement
    best_direction: MeasurementDirection | None

    def to_dict(self) -> dict:
        axis = self.measurement.axis
        out = {
            "mutual_info": self.mutual_info,
            "i2": self.i2,
            "q_upper": self.q_upper,
            "q_numerical": self.q_numerical,
            "delta": self.delta,
            "measurement_axis": [float(a) for a in axis],
            "projective": self.measurement.projective,
        }
        if self.best_direction is not None:
            out["best_theta"] = self.best_direction.theta
            out["best_phi"] = self.best_direction.phi
        return out


def mutual_information(rho_ab: DensityMatrix) -> float:
    """S(rho_A) + S(rho_B) - S(rho_AB)."""
    return (
        von_neumann_entropy(partial_trace(rho_ab, 0))
        + von_neumann_entropy(partial_trace(rho_ab, 1))
        - von_neumann_entropy(rho_ab)
    )


def measured_cond_entropy(rho_ab: DensityMatrix, m: TwoOutcomeMeasurement) -> float:
    """Average von Neumann entropy of the unmeasured side after measuring B."""
    total = 0.0
    for element in m.elements:
        cond = conditional_on_b(rho_ab, element)
        p = float(cond.trace().real)
        if p < PROB_FLOOR:
            continue
        total += p * von_neumann_entropy(cond / p)
    return total


def discord_upper_bound(rho_ab: DensityMatrix) -> BoundReport:
    """Discord upper bound at the linear-entropy-optimal projective measurement.

    Evaluated as S(rho_B) - S(rho_AB) + sum_i p_i S(rho_A|i), which avoids the
    cancellation of large entropies in the mutual-information form.
    """
    lin = classical_corr_linear(rho_ab)
    s_ab = von_neumann_entropy(rho_ab)
    s_a = von_neumann_entropy(partial_trace(rho_ab, 0))
    s_b = von_neumann_entropy(partial_trace(rho_ab, 1))
    q_upper = s_b - s_ab + measured_cond_entropy(rho_ab, lin.measurement)
    return BoundReport(s_a + s_b - s_ab, lin.i2, q_upper, None, None, lin.measurement, None)


def _conditional_tensors(rho_ab: DensityMatrix):
    """Per-state data for fast conditional-entropy evaluation over directions."""
    da, db = rho_ab.dims[0], rho_ab.dims[1]
    if db != 2:
        raise ValueError(f"measured subsystem must be a qubit, got dimension {db}")
    tens = rho_ab.matrix.reshape(da, 2, da, 2)
    t0 = np.einsum("aibi->ab", tens)
    tk = np.einsum("aibj,kji->kab", tens, PAULIS)
    bloch_b = np.einsum("kaa->k", tk).real
    return t0, tk, bloch_b


def _xlog2x(x: np.ndarray) -> np.ndarray:
    return np.where(x > PROB_FLOOR, x * np.log2(np.clip(x, PROB_FLOOR, None)), 0.0)


def _cond_entropy_batch(t0, tk, bloch_b, ns: np.ndarray) -> np.ndarray:
    """Measured conditional entropy for a batch of Bloch directions (N, 3)."""
    da = t0.shape[0]
    out = np.empty(ns.shape[0])
    for lo in range(0, ns.shape[0], _CHUNK):
        chunk = ns[lo : lo + _CHUNK]
        mixed = np.tensordot(chunk, tk, axes=(1, 0))
        conds = np.stack([(t0[None] + mixed) / 2, (t0[None] - mixed) / 2], axis=1)
        probs = np.stack(
            [(1.0 + chunk @ bloch_b) / 2, (1.0 - chunk @ bloch_b) / 2], axis=1
        )
        if da == 2:
            a = conds[..., 0, 0].real
            c = conds[..., 1, 1].real
            half = (a + c) / 2
            gap = np.sqrt(((a - c) / 2) ** 2 + np.abs(conds[..., 0, 1]) ** 2)
            evals = np.stack([half - gap, half + gap], axis=-1)
        else:
            evals = np.linalg.eigvalsh(conds)
        evals = np.clip(evals, 0.0, None)
        out[lo : lo + chunk.shape[0]] = np.sum(
            -_xlog2x(evals), axis=(1, 2)
        ) + np.sum(_xlog2x(np.clip(probs, 0.0, None)), axis=1)
    return out


def cond_entropy_surface(
    rho_ab: DensityMatrix, thetas: np.ndarray, phis: np.ndarray
) -> np.ndarray:
    """Measured conditional entropy on a (theta, phi) direction grid."""
    t0, tk, bloch_b = _conditional_tensors(rho_ab)
    ns = _direction_grid(thetas, phis)
    return _cond_entropy_batch(t0, tk, bloch_b, ns).reshape(len(thetas), len(phis))


def _scalar_qubit_objective(t0, tk):
    """Closure evaluating one direction with plain float math (d_A = 2 only).

    The refinement stage calls the objective thousands of times on single
    directions, where numpy batch overhead dominates; 2x2 conditionals have
    closed-form eigenvalues.
    """
    from math import cos, log2, sin, sqrt

    a0, c0 = t0[0, 0].real, t0[1, 1].real
    b0r, b0i = t0[0, 1].real, t0[0, 1].imag
    ak = tk[:, 0, 0].real
    ck = tk[:, 1, 1].real
    bkr = tk[:, 0, 1].real
    bki = tk[:, 0, 1].imag
    ax, ay, az = float(ak[0]), float(ak[1]), float(ak[2])
    cx, cy, cz = float(ck[0]), float(ck[1]), float(ck[2])
    brx, bry, brz = float(bkr[0]), float(bkr[1]), float(bkr[2])
    bix, biy, biz = float(bki[0]), float(bki[1]), float(bki[2])

    def xlg(v: float) -> float:
        return v * log2(v) if v > PROB_FLOOR else 0.0

    def objective(angles) -> float:
        theta, phi = float(angles[0]), float(angles[1])
        st = sin(theta)
        nx, ny, nz = st * cos(phi), st * sin(phi), cos(theta)
        da = nx * ax + ny * ay + nz * az
        dc = nx * cx + ny * cy + nz * cz
        dbr = nx * brx + ny * bry + nz * brz
        dbi = nx * bix + ny * biy + nz * biz
        total = 0.0
        for s in (1.0, -1.0):
            a = (a0 + s * da) / 2.0
            c = (c0 + s * dc) / 2.0
            br = (b0r + s * dbr) / 2.0
            bi = (b0i + s * dbi) / 2.0
            half = (a + c) / 2.0
            gap = sqrt(((a - c) / 2.0) ** 2 + br * br + bi * bi)
            total += xlg(a + c) - xlg(half - gap) - xlg(half + gap)
        return total

    return objective


def _direction_grid(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    st, ct = np.sin(thetas), np.cos(thetas)
    cp, sp = np.cos(phis), np.sin(phis)
    ns = np.empty((len(thetas), len(phis), 3))
    ns[..., 0] = st[:, None] * cp[None, :]
    ns[..., 1] = st[:, None] * sp[None, :]
    ns[..., 2] = ct[:, None]
    return ns.reshape(-1, 3)


def _angles_to_dir(angles: np.ndarray) -> np.ndarray:
    theta, phi = angles
    return np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )


def discord_numerical(
    rho_ab: DensityMatrix,
    grid: tuple[int, int] = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
) -> BoundReport:
    """Brute-force discord over projective measurements.

    Coarse (theta, phi) grid search followed by Nelder-Mead refinement from
    the best grid points, all deterministic for fixed inputs. The report also
    carries the closed-form upper bound so the deviation comes paired.
    """
    n_theta, n_phi = int(grid[0]), int(grid[1])
    if n_theta < 8 or n_phi < 8:
        raise ValueError("grid must be at least 8x8")
    t0, tk, bloch_b = _conditional_tensors(rho_ab)
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    ns = _direction_grid(thetas, phis)
    values = _cond_entropy_batch(t0, tk, bloch_b, ns)

    if rho_ab.dims[0] == 2:
        objective = _scalar_qubit_objective(t0, tk)
    else:

        def objective(angles: np.ndarray) -> float:
            point = _angles_to_dir(angles)[None, :]
            return float(_cond_entropy_batch(t0, tk, bloch_b, point)[0])

    starts = _spread_minima(ns, values, _REFINE_STARTS)
    best_val = float(np.min(values))
    best_dir = ns[int(np.argmin(values))]
    for n0 in starts:
        theta0 = float(np.arccos(np.clip(n0[2], -1.0, 1.0)))
        phi0 = float(np.arctan2(n0[1], n0[0]) % (2.0 * np.pi))
        res = minimize(
            objective,
            np.array([theta0, phi0]),
            method="Nelder-Mead",
            options={"xatol": ANGLE_TOL, "fatol": refine_tol, "maxiter": 400},
        )
        if res.fun < best_val:
            best_val = float(res.fun)
            best_dir = _angles_to_dir(res.x)
    best_dir = best_dir / np.linalg.norm(best_dir)
    s_ab = von_neumann_entropy(rho_ab)
    s_b = von_neumann_entropy(partial_trace(rho_ab, 1))
    q_num = s_b - s_ab + best_val
    upper = discord_upper_bound(rho_ab)
    direction = MeasurementDirection(
        float(np.arccos(np.clip(best_dir[2], -1.0, 1.0))),
        float(np.arctan2(best_dir[1], best_dir[0]) % (2.0 * np.pi)),
    )
    return BoundReport(
        upper.mutual_info,
        upper.i2,
        upper.q_upper,
        q_num,
        upper.q_upper - q_num,
        upper.measurement,
        direction,
    )


def _spread_minima(ns: np.ndarray, values: np.ndarray, count: int) -> list[np.ndarray]:
    """Lowest grid points, kept angularly apart so refinement explores
    distinct basins."""
    order = np.argsort(values, kind="stable")[:512]
    picked: list[np.ndarray] = []
    for idx in order:
        candidate = ns[idx]
        if picked:
            stack = np.asarray(picked)
            # Antipodal directions give the same measurement.
            dist = np.minimum(
                np.linalg.norm(stack - candidate, axis=1),
                np.linalg.norm(stack + candidate, axis=1),
            )
            if dist.min() < 0.5:
                continue
        picked.append(candidate)
        if len(picked) == count:
            break
    return picked


def bell_diagonal_oracle(c) -> float:
    """Discord of a Bell-diagonal state, from the three Pauli measurements.

    The optimum for these states is along one of the Pauli axes, so the
    minimum over the three axes is analytic-grade while staying independent
    of the map-extraction pipeline.
    """
    c = np.asarray(c, dtype=float)
    signs = np.array([[1, -1, 1], [-1, 1, 1], [1, 1, -1], [-1, -1, -1]])
    evals = (1.0 + signs @ c) / 4.0
    if evals.min() < -1e-12:
        raise ValueError(
            f"correlations {c.tolist()} are outside the state tetrahedron "
            f"(eigenvalue {evals.min():.3e})"
        )
    rho = bell_diagonal(*c)
    base = von_neumann_entropy(partial_trace(rho, 1)) - von_neumann_entropy(rho)
    values = [
        base + measured_cond_entropy(rho, TwoOutcomeMeasurement.from_axis(axis))
        for axis in np.eye(3)
    ]
    return min(values)


def eof_upper_bound(rho_ac: DensityMatrix, rank_cutoff: float = RANK2_CUTOFF) -> float:
    """Upper bound on the entanglement of formation of a rank-2 bipartite state.

    Purifies the state with a single qubit, traces out the second subsystem,
    and evaluates the average conditional entropy at the linear-entropy
    measurement of the purifying qubit; for pure inputs the bound equals the
    marginal entropy and is tight.
    """
    if len(rho_ac.dims) != 2:
        raise ValueError("expected a bipartite state (n, m)")
    evals, vecs = np.linalg.eigh((rho_ac.matrix + dagger(rho_ac.matrix)) / 2)
    keep = np.where(evals > rank_cutoff)[0]
    if len(keep) > 2:
        raise ValueError(f"state has rank {len(keep)} > 2")
    keep = keep[np.argsort(evals[keep])[::-1]]
    d = rho_ac.dim
    psi = np.zeros(2 * d, dtype=complex)
    for slot, idx in enumerate(keep):
        psi += np.sqrt(evals[idx]) * np.kron(vecs[:, idx], np.eye(2)[slot])
    pure = DensityMatrix(np.outer(psi, np.conj(psi)), rho_ac.dims + (2,))
    rho_ab = partial_trace(pure, (0, 2))
    lin = classical_corr_linear(rho_ab)
    return measured_cond_entropy(rho_ab, lin.measurement)
