"""Reproduction experiments: parameter sweeps with paired bound/numerical
discord, the random-state deviation benchmark, and GHZ/W damping dynamics."""

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .discord import (
    DEFAULT_GRID,
    DEFAULT_REFINE_TOL,
    cond_entropy_surface,
    discord_numerical,
)
from .qmat import DensityMatrix, InvariantViolation
from .states import (
    NotAStateError,
    amplitude_damping,
    apply_channel_each,
    general_two_qubit,
    ghz,
    random_density,
    regroup_bipartition,
    w,
    x_state,
)

SANDWICH_ATOL = 1e-7
BIN_WIDTH = 1e-3

_GENERAL_PARAMS = ("x1", "x2", "x3", "y1", "y2", "y3", "t1", "t2", "t3")


@dataclass(frozen=True)
class SweepRow:
    varying: str
    value: float
    q_upper: float
    q_numerical: float
    delta: float


@dataclass(frozen=True)
class SweepResult:
    varying: str
    rows: tuple[SweepRow, ...]
    skipped: tuple[tuple[float, float], ...]  # (value, offending min eigenvalue)

    def max_delta(self) -> float:
        return max(row.delta for row in self.rows)


@dataclass(frozen=True)
class HistogramReport:
    """Deviation histogram over a random-state ensemble.

    Bins have width 1e-3 starting at zero; deviations in [-1e-7, 0) are
    numerical zeros and counted in the first bin, with the true minimum kept
    in ``min_delta``.
    """

    sample_count: int
    seed: int
    dims: tuple[int, ...]
    rank: int
    bin_edges: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    frac_below_1e4: float
    frac_below_1e3: float
    frac_above_6e3: float
    max_delta: float
    min_delta: float

    def to_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "seed": self.seed,
            "dims": list(self.dims),
            "rank": self.rank,
            "bin_edges": [float(e) for e in self.bin_edges],
            "counts": [int(c) for c in self.counts],
            "frac_below_1e4": self.frac_below_1e4,
            "frac_below_1e3": self.frac_below_1e3,
            "frac_above_6e3": self.frac_above_6e3,
            "max_delta": self.max_delta,
            "min_delta": self.min_delta,
        }


@dataclass(frozen=True)
class EvolutionPoint:
    p: float
    q_upper: float
    q_numerical: float
    delta: float
    axis: np.ndarray  # measurement Bloch axis, computational basis
    argmin_theta: float
    argmin_phi: float
    min_cond_entropy: float


@dataclass(frozen=True)
class EvolutionResult:
    family: str
    n: int
    damp: str
    p_values: np.ndarray
    thetas: np.ndarray
    phis: np.ndarray
    surface: np.ndarray = field(repr=False)  # (p, theta, phi)
    points: tuple[EvolutionPoint, ...] = ()


def psd_interval(
    builder: Callable[[float], DensityMatrix],
    lo: float = -1.0,
    hi: float = 1.0,
    scan: int = 601,
    tol: float = 1e-12,
) -> tuple[float, float]:
    """Feasibility interval of a one-parameter state family.

    The families here are affine in the parameter, so the PSD region is an
    interval; it is located by a coarse scan and sharpened by bisection.
    """

    def min_eig(v: float) -> float:
        try:
            return float(np.linalg.eigvalsh(builder(v).matrix)[0])
        except ValueError:
            return -1.0

    grid = np.linspace(lo, hi, scan)
    feasible = [v for v in grid if min_eig(v) >= -1e-14]
    if not feasible:
        raise ValueError("no PSD point found in the scanned range")

    def bisect(inside: float, outside: float) -> float:
        for _ in range(200):
            mid = (inside + outside) / 2
            if min_eig(mid) >= -1e-14:
                inside = mid
            else:
                outside = mid
            if abs(outside - inside) < tol:
                break
        return inside

    left = feasible[0] if min_eig(lo) >= -1e-14 else bisect(feasible[0], lo)
    right = feasible[-1] if min_eig(hi) >= -1e-14 else bisect(feasible[-1], hi)
    return left, right


def sweep_x_state(
    x3: float,
    y3: float,
    t1: float,
    t2: float,
    t3_values: Sequence[float],
    grid: tuple[int, int] = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
) -> SweepResult:
    """Paired bound/numerical discord along a t3 grid of X-states."""
    return _sweep(
        "t3",
        t3_values,
        lambda v: x_state(x3, y3, t1, t2, v),
        grid,
        refine_tol,
    )


def sweep_general(
    x: Sequence[float],
    y: Sequence[float],
    t: Sequence[float],
    varying: str,
    values: Sequence[float],
    grid: tuple[int, int] = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
) -> SweepResult:
    """Sweep one parameter of the general two-qubit family."""
    if varying not in _GENERAL_PARAMS:
        raise ValueError(f"unknown parameter {varying!r}; choose from {_GENERAL_PARAMS}")
    base = {"x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float), "t": np.asarray(t, dtype=float)}
    group, index = varying[0], int(varying[1]) - 1

    def builder(v: float) -> DensityMatrix:
        params = {k: arr.copy() for k, arr in base.items()}
        params[group][index] = v
        return general_two_qubit(params["x"], params["y"], params["t"])

    return _sweep(varying, values, builder, grid, refine_tol)


def general_psd_interval(
    x: Sequence[float], y: Sequence[float], t: Sequence[float], varying: str,
    lo: float = -1.0, hi: float = 1.0,
) -> tuple[float, float]:
    if varying not in _GENERAL_PARAMS:
        raise ValueError(f"unknown parameter {varying!r}; choose from {_GENERAL_PARAMS}")
    base = {"x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float), "t": np.asarray(t, dtype=float)}
    group, index = varying[0], int(varying[1]) - 1

    def builder(v: float) -> DensityMatrix:
        params = {k: arr.copy() for k, arr in base.items()}
        params[group][index] = v
        return general_two_qubit(params["x"], params["y"], params["t"])

    return psd_interval(builder, lo, hi)


def x_state_psd_interval(
    x3: float, y3: float, t1: float, t2: float, lo: float = -1.0, hi: float = 1.0
) -> tuple[float, float]:
    return psd_interval(lambda v: x_state(x3, y3, t1, t2, v), lo, hi)


def _sweep(varying, values, builder, grid, refine_tol) -> SweepResult:
    rows = []
    skipped = []
    for value in values:
        value = float(value)
        try:
            rho = builder(value)
        except NotAStateError as err:
            skipped.append((value, err.min_eigenvalue))
            continue
        rep = discord_numerical(rho, grid, refine_tol)
        if rep.delta < -SANDWICH_ATOL:
            raise InvariantViolation(
                f"bound below numerical discord at {varying}={value}: delta={rep.delta:.3e}"
            )
        rows.append(SweepRow(varying, value, rep.q_upper, rep.q_numerical, rep.delta))
    if not rows:
        raise ValueError("no PSD point in the requested range")
    return SweepResult(varying, tuple(rows), tuple(skipped))


def random_benchmark(
    count: int,
    seed: int = 0,
    dims: Sequence[int] = (2, 2),
    rank: int | None = None,
    grid: tuple[int, int] = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
    workers: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> HistogramReport:
    """Deviation histogram for ``count`` seeded random states.

    Each state draws from its own seed substream derived from (seed, index),
    so the report is identical for any worker count and any scheduling.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    dims = tuple(int(d) for d in dims)
    if rank is None:
        rank = int(np.prod(dims))
    deltas = np.empty(count)
    jobs = [(seed, idx, dims, rank, grid, refine_tol) for idx in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for done, (idx, delta) in enumerate(
                pool.map(_benchmark_one, jobs, chunksize=64)
            ):
                deltas[idx] = delta
                if progress is not None:
                    progress(done + 1, count)
    else:
        for done, job in enumerate(jobs):
            idx, delta = _benchmark_one(job)
            deltas[idx] = delta
            if progress is not None:
                progress(done + 1, count)
    min_delta = float(deltas.min())
    if min_delta < -SANDWICH_ATOL:
        raise InvariantViolation(
            f"bound below numerical discord in sample: delta={min_delta:.3e}"
        )
    max_delta = float(deltas.max())
    nbins = max(int(np.floor(max(max_delta, 0.0) / BIN_WIDTH)) + 1, 7)
    edges = np.arange(nbins + 1) * BIN_WIDTH
    counts, _ = np.histogram(np.clip(deltas, 0.0, None), bins=edges)
    return HistogramReport(
        sample_count=count,
        seed=seed,
        dims=dims,
        rank=rank,
        bin_edges=edges,
        counts=counts,
        frac_below_1e4=float(np.mean(deltas <= 1e-4)),
        frac_below_1e3=float(np.mean(deltas <= 1e-3)),
        frac_above_6e3=float(np.mean(deltas > 6e-3)),
        max_delta=max_delta,
        min_delta=min_delta,
    )


def _benchmark_one(job) -> tuple[int, float]:
    seed, idx, dims, rank, grid, refine_tol = job
    rho = random_density(dims, rank, np.random.SeedSequence((seed, idx)))
    rep = discord_numerical(rho, grid, refine_tol)
    return idx, float(rep.delta)


def ghz_w_evolution(
    family: str,
    n: int,
    damp: str,
    p_values: Sequence[float],
    n_theta: int = 65,
    n_phi: int = 32,
    grid: tuple[int, int] = DEFAULT_GRID,
    refine_tol: float = DEFAULT_REFINE_TOL,
) -> EvolutionResult:
    """Damping dynamics of GHZ/W states across the (n-1 | 1) bipartition.

    For each damping probability, the measured conditional-entropy surface
    over measurement directions is tabulated together with its grid argmin,
    the bound and the numerical discord.
    """
    if family not in ("ghz", "w"):
        raise ValueError("family must be 'ghz' or 'w'")
    if damp not in ("first", "last"):
        raise ValueError("damp must be 'first' (first n-1 qubits) or 'last'")
    factory = ghz if family == "ghz" else w
    targets = tuple(range(n - 1)) if damp == "first" else (n - 1,)
    p_values = np.asarray(p_values, dtype=float)
    thetas = np.linspace(0.0, np.pi, int(n_theta))
    phis = np.linspace(0.0, 2.0 * np.pi, int(n_phi), endpoint=False)
    surface = np.empty((len(p_values), len(thetas), len(phis)))
    points = []
    for i, p in enumerate(p_values):
        rho = apply_channel_each(factory(n), amplitude_damping(float(p)), targets)
        rho = regroup_bipartition(rho, n - 1)
        surf = cond_entropy_surface(rho, thetas, phis)
        surface[i] = surf
        rep = discord_numerical(rho, grid, refine_tol)
        ti, pi = np.unravel_index(int(np.argmin(surf)), surf.shape)
        points.append(
            EvolutionPoint(
                p=float(p),
                q_upper=rep.q_upper,
                q_numerical=rep.q_numerical,
                delta=rep.delta,
                axis=rep.measurement.axis,
                argmin_theta=float(thetas[ti]),
                argmin_phi=float(phis[pi]),
                min_cond_entropy=float(surf.min()),
            )
        )
    return EvolutionResult(family, n, damp, p_values, thetas, phis, surface, tuple(points))


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([result.varying, "q_upper", "q_numerical", "delta"])
        for row in result.rows:
            writer.writerow([_fmt(row.value), _fmt(row.q_upper), _fmt(row.q_numerical), _fmt(row.delta)])


def sweep_to_dict(result: SweepResult) -> dict:
    return {
        "varying": result.varying,
        "rows": [
            {
                "value": row.value,
                "q_upper": row.q_upper,
                "q_numerical": row.q_numerical,
                "delta": row.delta,
            }
            for row in result.rows
        ],
        "skipped": [{"value": v, "min_eigenvalue": e} for v, e in result.skipped],
    }


def write_histogram_csv(report: HistogramReport, path) -> None:
    with open(path, "w", newline="") as fh:
        for key, value in report.to_dict().items():
            if key in ("bin_edges", "counts"):
                continue
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh)
        writer.writerow(["bin_lo", "bin_hi", "count"])
        for lo, hi, c in zip(report.bin_edges[:-1], report.bin_edges[1:], report.counts):
            writer.writerow([_fmt(lo), _fmt(hi), int(c)])


def write_evolution_csv(result: EvolutionResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["p", "q_upper", "q_numerical", "delta", "axis_x", "axis_y", "axis_z",
             "argmin_theta", "argmin_phi", "min_cond_entropy"]
        )
        for pt in result.points:
            writer.writerow(
                [_fmt(pt.p), _fmt(pt.q_upper), _fmt(pt.q_numerical), _fmt(pt.delta)]
                + [_fmt(a) for a in pt.axis]
                + [_fmt(pt.argmin_theta), _fmt(pt.argmin_phi), _fmt(pt.min_cond_entropy)]
            )


def write_surface_csv(result: EvolutionResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "theta", "phi", "cond_entropy"])
        for i, p in enumerate(result.p_values):
            for j, theta in enumerate(result.thetas):
                for k, phi in enumerate(result.phis):
                    writer.writerow([_fmt(p), _fmt(theta), _fmt(phi), _fmt(result.surface[i, j, k])])


def evolution_to_dict(result: EvolutionResult) -> dict:
    return {
        "family": result.family,
        "n": result.n,
        "damp": result.damp,
        "p_values": [float(p) for p in result.p_values],
        "points": [
            {
                "p": pt.p,
                "q_upper": pt.q_upper,
                "q_numerical": pt.q_numerical,
                "delta": pt.delta,
                "axis": [float(a) for a in pt.axis],
                "argmin_theta": pt.argmin_theta,
                "argmin_phi": pt.argmin_phi,
                "min_cond_entropy": pt.min_cond_entropy,
            }
            for pt in result.points
        ],
    }


def write_json(payload: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
