"""State factory (Bell-diagonal, X-states, general two-qubit, GHZ, W, random
ensembles) and single-qubit Kraus channels."""

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .qmat import DensityMatrix, ID2, PAULIS, dagger, tensor

COMPLETENESS_ATOL = 1e-12
MAX_QUBITS = 12
PSD_ATOL = 1e-10


class NotAStateError(ValueError):
    """Factory parameters produce a non-PSD matrix."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True)
class KrausChannel:
    """Qubit channel given by Kraus operators with sum E_k^dag E_k = I."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(e, dtype=complex) for e in self.operators)
        object.__setattr__(self, "operators", ops)
        total = sum(dagger(e) @ e for e in ops)
        if np.max(np.abs(total - ID2)) > COMPLETENESS_ATOL:
            raise ValueError("Kraus operators do not satisfy completeness")


def bell_diagonal(c1: float, c2: float, c3: float) -> DensityMatrix:
    """Two-qubit state diagonal in the Bell basis with correlations (c1, c2, c3)."""
    mat = np.eye(4, dtype=complex)
    for c, sigma in zip((c1, c2, c3), PAULIS):
        mat = mat + c * tensor(sigma, sigma)
    return _checked(mat / 4.0, (2, 2))


def x_state(x3: float, y3: float, t1: float, t2: float, t3: float) -> DensityMatrix:
    """Two-qubit state with entries only on the diagonal and anti-diagonal."""
    mat = (
        np.eye(4, dtype=complex)
        + x3 * tensor(PAULIS[2], ID2)
        + y3 * tensor(ID2, PAULIS[2])
    )
    for t, sigma in zip((t1, t2, t3), PAULIS):
        mat = mat + t * tensor(sigma, sigma)
    return _checked(mat / 4.0, (2, 2))


def general_two_qubit(x: Sequence[float], y: Sequence[float], t: Sequence[float]) -> DensityMatrix:
    """Two-qubit state from local Bloch vectors x, y and diagonal correlations t."""
    x, y, t = (np.asarray(v, dtype=float) for v in (x, y, t))
    mat = np.eye(4, dtype=complex)
    for k in range(3):
        mat = mat + x[k] * tensor(PAULIS[k], ID2)
        mat = mat + y[k] * tensor(ID2, PAULIS[k])
        mat = mat + t[k] * tensor(PAULIS[k], PAULIS[k])
    return _checked(mat / 4.0, (2, 2))


def ghz(n: int) -> DensityMatrix:
    """(|0...0> + |1...1>)/sqrt(2) on n qubits."""
    _check_qubit_count(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[-1] = 1.0 / np.sqrt(2.0)
    return DensityMatrix(np.outer(psi, np.conj(psi)), (2,) * n)


def w(n: int) -> DensityMatrix:
    """Symmetric single-excitation state on n qubits, uniform amplitudes."""
    _check_qubit_count(n)
    psi = np.zeros(2**n, dtype=complex)
    for k in range(n):
        psi[2 ** (n - 1 - k)] = 1.0 / np.sqrt(n)
    return DensityMatrix(np.outer(psi, np.conj(psi)), (2,) * n)


def random_density(dims: Sequence[int], rank: int | None = None, seed=None) -> DensityMatrix:
    """Random state from the Ginibre-induced (Hilbert-Schmidt for full rank)
    ensemble, deterministic per seed."""
    dims = tuple(int(d) for d in dims)
    d = int(np.prod(dims))
    if rank is None:
        rank = d
    if not 1 <= rank <= d:
        raise ValueError(f"rank {rank} outside [1, {d}]")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    mat = g @ dagger(g)
    return DensityMatrix(mat / mat.trace().real, dims)


_FACTORIES = {
    "bell_diagonal": lambda s: bell_diagonal(*_vec(s, "c", 3)),
    "x_state": lambda s: x_state(s["x3"], s["y3"], s["t1"], s["t2"], s["t3"]),
    "general_two_qubit": lambda s: general_two_qubit(
        _vec(s, "x", 3), _vec(s, "y", 3), _vec(s, "t", 3)
    ),
    "ghz": lambda s: ghz(int(s["n"])),
    "w": lambda s: w(int(s["n"])),
    "random": lambda s: random_density(s["dims"], s.get("rank"), s.get("seed")),
}


def make_state(spec: Mapping) -> DensityMatrix:
    """Realize a tagged parameter record, e.g. {"kind": "ghz", "n": 3}."""
    try:
        kind = spec["kind"]
    except (KeyError, TypeError):
        raise ValueError("state spec needs a 'kind' tag") from None
    if kind not in _FACTORIES:
        raise ValueError(f"unknown state kind {kind!r}; choose from {sorted(_FACTORIES)}")
    try:
        return _FACTORIES[kind](spec)
    except KeyError as err:
        raise ValueError(f"state spec {kind!r} is missing field {err}") from None


def amplitude_damping(p: float) -> KrausChannel:
    """Decay channel moving excited-state population to the ground state."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"damping probability {p} outside [0, 1]")
    e1 = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=complex)
    e2 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=complex)
    return KrausChannel((e1, e2))


def apply_channel(rho: DensityMatrix, ch: KrausChannel, target: int) -> DensityMatrix:
    """sum_k (I (x) E_k (x) I) rho (...)^dag on the ``target`` subsystem."""
    dims = rho.dims
    n = len(dims)
    if not 0 <= target < n:
        raise ValueError(f"target {target} outside [0, {n - 1}]")
    if dims[target] != 2:
        raise ValueError(f"target subsystem has dimension {dims[target]}, expected 2")
    tens = rho.matrix.reshape(dims + dims)
    out = np.zeros_like(tens)
    for e in ch.operators:
        t1 = np.moveaxis(np.tensordot(e, tens, axes=(1, target)), 0, target)
        out += np.moveaxis(np.tensordot(np.conj(e), t1, axes=(1, n + target)), 0, n + target)
    d = rho.dim
    return DensityMatrix(out.reshape(d, d), dims)


def apply_channel_each(rho: DensityMatrix, ch: KrausChannel, targets: Sequence[int]) -> DensityMatrix:
    for target in targets:
        rho = apply_channel(rho, ch, target)
    return rho


def regroup_bipartition(rho: DensityMatrix, b_side: int) -> DensityMatrix:
    """Permute an n-qubit state so qubit ``b_side`` is last, dims (2^(n-1), 2)."""
    dims = rho.dims
    n = len(dims)
    if any(d != 2 for d in dims):
        raise ValueError(f"regrouping expects qubit factors, got dims {dims}")
    if n < 2:
        raise ValueError("regrouping needs at least two qubits")
    if not 0 <= b_side < n:
        raise ValueError(f"qubit index {b_side} outside [0, {n - 1}]")
    perm = [q for q in range(n) if q != b_side] + [b_side]
    tens = rho.matrix.reshape(dims + dims)
    tens = tens.transpose(perm + [n + q for q in perm])
    d = rho.dim
    return DensityMatrix(tens.reshape(d, d), (d // 2, 2))


def _checked(mat: np.ndarray, dims: tuple[int, ...]) -> DensityMatrix:
    evmin = float(np.linalg.eigvalsh(mat)[0])
    if evmin < -PSD_ATOL:
        raise NotAStateError(
            f"parameters do not give a quantum state: minimum eigenvalue {evmin:.6e}",
            evmin,
        )
    return DensityMatrix(mat, dims)


def _vec(spec: Mapping, key: str, length: int) -> np.ndarray:
    v = np.asarray(spec[key], dtype=float)
    if v.shape != (length,):
        raise ValueError(f"spec field {key!r} must have length {length}")
    return v


def _check_qubit_count(n: int):
    if not 2 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count {n} outside [2, {MAX_QUBITS}]")
