"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 numerical invariant violation.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, qmat
from .chanext import extract_map, qubit_spectral
from .discord import DEFAULT_GRID, DEFAULT_REFINE_TOL, discord_numerical
from .io import load_state
from .lincorr import classical_corr_linear
from .qmat import InvariantViolation, partial_trace
from .states import make_state


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as err:
        print(f"invariant violation: {err}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdbound",
        description="Linear-entropy classical correlation and discord upper bounds "
        "for qudit-qubit states.",
    )
    sub = parser.add_subparsers(required=True)

    p_bound = sub.add_parser("bound", help="closed-form correlation and optimal measurement")
    _add_state_args(p_bound)
    _add_io_args(p_bound)
    p_bound.add_argument("--dump-map", metavar="PATH",
                         help="write the affine map (L columns and shift) as CSV")
    p_bound.set_defaults(func=_cmd_bound)

    p_disc = sub.add_parser("discord", help="upper bound plus numerical discord for one state")
    _add_state_args(p_disc)
    _add_io_args(p_disc)
    _add_solver_args(p_disc)
    p_disc.set_defaults(func=_cmd_discord)

    p_sx = sub.add_parser("sweep-x", help="X-state sweep over t3")
    for name, default in (("x3", 0.1), ("y3", 0.2), ("t1", 0.2), ("t2", 0.3)):
        p_sx.add_argument(f"--{name}", type=float, default=default)
    p_sx.add_argument("--t3-min", type=float, default=None)
    p_sx.add_argument("--t3-max", type=float, default=None)
    p_sx.add_argument("--points", type=int, default=101)
    _add_io_args(p_sx)
    _add_solver_args(p_sx)
    _add_plot_args(p_sx)
    p_sx.set_defaults(func=_cmd_sweep_x)

    p_sg = sub.add_parser("sweep-general", help="general two-qubit sweep over one parameter")
    p_sg.add_argument("--x", type=_triple, default=(0.05, 0.1, 0.1),
                      help="comma-separated Bloch vector of the first qubit")
    p_sg.add_argument("--y", type=_triple, default=(0.15, 0.25, 0.2))
    p_sg.add_argument("--t", type=_triple, default=(0.2, 0.2, 0.0))
    p_sg.add_argument("--varying", default="t3",
                      choices=("x1", "x2", "x3", "y1", "y2", "y3", "t1", "t2", "t3"))
    p_sg.add_argument("--min", dest="vmin", type=float, default=None)
    p_sg.add_argument("--max", dest="vmax", type=float, default=None)
    p_sg.add_argument("--points", type=int, default=101)
    _add_io_args(p_sg)
    _add_solver_args(p_sg)
    _add_plot_args(p_sg)
    p_sg.set_defaults(func=_cmd_sweep_general)

    p_rb = sub.add_parser("random-bench", help="deviation histogram over random states")
    p_rb.add_argument("--count", type=int, default=10000)
    p_rb.add_argument("--seed", type=int, default=0)
    p_rb.add_argument("--dims", type=_dims, default=(2, 2), help="e.g. 2x2 or 3x2")
    p_rb.add_argument("--rank", type=int, default=None, help="default: full rank")
    p_rb.add_argument("--workers", type=int, default=1)
    p_rb.add_argument("--quiet", action="store_true")
    _add_io_args(p_rb)
    _add_solver_args(p_rb)
    _add_plot_args(p_rb)
    p_rb.set_defaults(func=_cmd_random_bench)

    p_gw = sub.add_parser("ghz-w", help="GHZ/W amplitude-damping dynamics")
    p_gw.add_argument("--family", choices=("ghz", "w"), required=True)
    p_gw.add_argument("--n", type=int, required=True)
    p_gw.add_argument("--damp", choices=("first", "last"), default="first",
                      help="damp the first n-1 qubits or only the last")
    p_gw.add_argument("--p-min", type=float, default=0.0)
    p_gw.add_argument("--p-max", type=float, default=1.0)
    p_gw.add_argument("--p-steps", type=int, default=11)
    p_gw.add_argument("--theta-points", type=int, default=65)
    p_gw.add_argument("--phi-points", type=int, default=32)
    p_gw.add_argument("--surface-out", metavar="PATH",
                      help="also write the full (p, theta, phi) surface as CSV")
    _add_io_args(p_gw)
    _add_solver_args(p_gw)
    _add_plot_args(p_gw)
    p_gw.set_defaults(func=_cmd_ghz_w)
    return parser


def _add_state_args(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--state", metavar="FILE",
                       help="JSON file: raw density matrix or tagged state spec")
    group.add_argument("--spec", metavar="JSON", help="inline tagged state spec")
    p.add_argument("--seed", type=int, default=None,
                   help="fallback seed for 'random' state specs without one")
    p.add_argument("--rank-cutoff", type=float, default=None,
                   help="relative eigenvalue cutoff for range-restricted inverses "
                        f"(default {qmat.RANK_CUTOFF:g})")


def _add_io_args(p):
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="json")


def _add_solver_args(p):
    p.add_argument("--grid", type=_grid, default=DEFAULT_GRID,
                   help="coarse search grid, e.g. 64x128")
    p.add_argument("--tol", type=float, default=DEFAULT_REFINE_TOL,
                   help="refinement objective tolerance")


def _add_plot_args(p):
    p.add_argument("--plot", dest="plot", action="store_true", default=None,
                   help="render a figure next to --out (default when --out is set)")
    p.add_argument("--no-plot", dest="plot", action="store_false")


def _triple(text: str) -> tuple[float, float, float]:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers")
    return tuple(parts)


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a form like 2x2") from None
    if len(dims) < 2 or any(d < 2 for d in dims):
        raise argparse.ArgumentTypeError("need at least two factors of dimension >= 2")
    return dims


def _grid(text: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a form like 64x128") from None
    return a, b


def _load(args):
    if getattr(args, "rank_cutoff", None) is not None:
        if args.rank_cutoff <= 0:
            raise ValueError("--rank-cutoff must be positive")
        qmat.RANK_CUTOFF = args.rank_cutoff
    if args.state is not None:
        return load_state(args.state)
    spec = json.loads(args.spec)
    if (
        isinstance(spec, dict)
        and spec.get("kind") == "random"
        and spec.get("seed") is None
        and args.seed is not None
    ):
        spec = {**spec, "seed": args.seed}
    return make_state(spec)


def _figure_path(args) -> Path | None:
    want = args.plot
    if want is None:
        want = args.out is not None
    if not want:
        return None
    if args.out is None:
        raise ValueError("--plot needs --out to name the figure file")
    return Path(args.out).with_suffix(".png")


def _emit(payload: dict, args, csv_writer=None):
    if args.out is None:
        print(json.dumps(payload, indent=2))
        return
    if args.format == "json":
        bench.write_json(payload, args.out)
    else:
        if csv_writer is None:
            _write_flat_csv(payload, args.out)
        else:
            csv_writer(args.out)
    print(f"wrote {args.out}")


def _write_flat_csv(payload: dict, path):
    flat = {k: v for k, v in payload.items() if not isinstance(v, (list, dict))}
    for key, value in payload.items():
        if isinstance(value, list) and all(isinstance(v, (int, float)) for v in value):
            for i, v in enumerate(value):
                flat[f"{key}_{i}"] = v
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(flat.keys())
        writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in flat.values()])


def _cmd_bound(args) -> int:
    rho = _load(args)
    lin = classical_corr_linear(rho)
    payload = {
        "i2": lin.i2,
        "lambda_max": lin.lambda_max,
        "optimal_axis": [float(a) for a in lin.axis],
        "measurement_axis": [float(a) for a in lin.measurement.axis],
        "projective": lin.measurement.projective,
    }
    if args.dump_map:
        spec = qubit_spectral(partial_trace(rho, 1))
        amap = extract_map(rho, spec)
        with open(args.dump_map, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["l_x", "l_y", "l_z", "shift"])
            for row, s in zip(amap.lmat, amap.shift):
                writer.writerow([f"{v:.12g}" for v in (*row, s)])
        print(f"wrote {args.dump_map}")
    _emit(payload, args)
    return 0


def _cmd_discord(args) -> int:
    rho = _load(args)
    report = discord_numerical(rho, args.grid, args.tol)
    _emit(report.to_dict(), args)
    return 0


def _cmd_sweep_x(args) -> int:
    lo, hi = args.t3_min, args.t3_max
    if lo is None or hi is None:
        auto_lo, auto_hi = bench.x_state_psd_interval(args.x3, args.y3, args.t1, args.t2)
        lo = auto_lo if lo is None else lo
        hi = auto_hi if hi is None else hi
    values = np.linspace(lo, hi, args.points)
    result = bench.sweep_x_state(args.x3, args.y3, args.t1, args.t2, values,
                                 args.grid, args.tol)
    return _finish_sweep(result, args)


def _cmd_sweep_general(args) -> int:
    lo, hi = args.vmin, args.vmax
    if lo is None or hi is None:
        auto_lo, auto_hi = bench.general_psd_interval(args.x, args.y, args.t, args.varying)
        lo = auto_lo if lo is None else lo
        hi = auto_hi if hi is None else hi
    values = np.linspace(lo, hi, args.points)
    result = bench.sweep_general(args.x, args.y, args.t, args.varying, values,
                                 args.grid, args.tol)
    return _finish_sweep(result, args)


def _finish_sweep(result, args) -> int:
    for value, evmin in result.skipped:
        print(f"skipped {result.varying}={value:.6g}: minimum eigenvalue {evmin:.3e}",
              file=sys.stderr)
    _emit(bench.sweep_to_dict(result), args,
          csv_writer=lambda path: bench.write_sweep_csv(result, path))
    figure = _figure_path(args)
    if figure is not None:
        from .plotting import sweep_figure

        sweep_figure(result, figure)
        print(f"wrote {figure}")
    return 0


def _cmd_random_bench(args) -> int:
    progress = None
    if not args.quiet:

        def progress(done, total):
            if done % 500 == 0 or done == total:
                print(f"\r{done}/{total}", end="", file=sys.stderr, flush=True)

    report = bench.random_benchmark(
        args.count, args.seed, args.dims, args.rank,
        grid=args.grid, refine_tol=args.tol, workers=args.workers, progress=progress,
    )
    if not args.quiet:
        print(file=sys.stderr)
    _emit(report.to_dict(), args,
          csv_writer=lambda path: bench.write_histogram_csv(report, path))
    figure = _figure_path(args)
    if figure is not None:
        from .plotting import histogram_figure

        histogram_figure(report, figure)
        print(f"wrote {figure}")
    return 0


def _cmd_ghz_w(args) -> int:
    p_values = np.linspace(args.p_min, args.p_max, args.p_steps)
    result = bench.ghz_w_evolution(
        args.family, args.n, args.damp, p_values,
        n_theta=args.theta_points, n_phi=args.phi_points,
        grid=args.grid, refine_tol=args.tol,
    )
    _emit(bench.evolution_to_dict(result), args,
          csv_writer=lambda path: bench.write_evolution_csv(result, path))
    if args.surface_out:
        bench.write_surface_csv(result, args.surface_out)
        print(f"wrote {args.surface_out}")
    figure = _figure_path(args)
    if figure is not None:
        from .plotting import evolution_figure

        evolution_figure(result, figure)
        print(f"wrote {figure}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
