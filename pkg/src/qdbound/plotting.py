"""Figure rendering for the CLI report paths (Agg backend, file output only)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import EvolutionResult, HistogramReport, SweepResult

_DPI = 150


def sweep_figure(result: SweepResult, path) -> None:
    """Bound vs numerical discord along the sweep, with the deviation below."""
    values = np.array([row.value for row in result.rows])
    q_ub = np.array([row.q_upper for row in result.rows])
    q_num = np.array([row.q_numerical for row in result.rows])
    fig, (ax_top, ax_bot) = plt.subplots(
        2, 1, sharex=True, figsize=(6, 5.5), height_ratios=[2, 1]
    )
    ax_top.plot(values, q_num, "-", color="tab:blue", lw=1.8, label="numerical")
    ax_top.plot(values, q_ub, ":", color="tab:red", lw=1.8, label="upper bound")
    ax_top.set_ylabel("discord")
    ax_top.legend()
    ax_top.grid(alpha=0.4)
    ax_bot.plot(values, q_ub - q_num, color="tab:gray", lw=1.5)
    ax_bot.set_xlabel(result.varying)
    ax_bot.set_ylabel("deviation")
    ax_bot.grid(alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def histogram_figure(report: HistogramReport, path) -> None:
    """Occurrence counts of the deviation, binned in units of 1e-3."""
    centers = (report.bin_edges[:-1] + report.bin_edges[1:]) / 2 / 1e-3
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(centers, report.counts, width=0.9, color="tab:blue")
    ax.set_xlabel(r"deviation ($10^{-3}$)")
    ax.set_ylabel("occurrences")
    if report.counts.max() > 0:
        ax.set_yscale("symlog")
    ax.set_title(
        f"{report.sample_count} states, dims {list(report.dims)}, rank {report.rank}"
    )
    ax.grid(alpha=0.4, axis="y")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def evolution_figure(result: EvolutionResult, path) -> None:
    """Conditional-entropy surface (min over azimuth) and discord curves."""
    fig, (ax_surf, ax_q) = plt.subplots(1, 2, figsize=(10, 4))
    surf = result.surface.min(axis=2)  # (p, theta)
    mesh = ax_surf.pcolormesh(
        result.thetas, result.p_values, surf, shading="auto", cmap="viridis"
    )
    fig.colorbar(mesh, ax=ax_surf, label="avg conditional entropy")
    ax_surf.set_xlabel(r"$\theta$")
    ax_surf.set_ylabel("p")
    ax_surf.set_title(f"{result.family.upper()} n={result.n}, damp={result.damp}")
    ps = [pt.p for pt in result.points]
    ax_q.plot(ps, [pt.q_numerical for pt in result.points], "-", color="tab:blue",
              lw=1.8, label="numerical")
    ax_q.plot(ps, [pt.q_upper for pt in result.points], ":", color="tab:red",
              lw=1.8, label="upper bound")
    ax_q.set_xlabel("p")
    ax_q.set_ylabel("discord")
    ax_q.legend()
    ax_q.grid(alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
