"""Figures rendered beside the delimited outputs.

Every command writes its CSV/JSON first; these renderers only re-plot what is
already in those records, so skipping them never loses data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .game import EquilibriumReport


def render_payoff_matrix(report: EquilibriumReport, path) -> None:
    """Two annotated payoff grids (one per sender) with equilibria outlined."""
    matrix = report.matrix
    n_i, n_j = matrix.shape
    nash_cells = {
        (matrix.strategies_i.index(gi), matrix.strategies_j.index(gj))
        for gi, gj in report.nash
    }
    fig, axes = plt.subplots(1, 2, figsize=(5 + 1.2 * n_j, 2.5 + 0.8 * n_i))
    for ax, title, value in (
        (axes[0], "sender i throughput [Mbps]", matrix.r_i),
        (axes[1], "sender j throughput [Mbps]", matrix.r_j),
    ):
        grid = [[value(a, b) / 1e6 for b in range(n_j)] for a in range(n_i)]
        im = ax.imshow(grid, cmap="viridis")
        for a in range(n_i):
            for b in range(n_j):
                ax.text(b, a, f"{grid[a][b]:.2f}", ha="center", va="center",
                        color="white", fontsize=9)
                if (a, b) in nash_cells:
                    ax.add_patch(plt.Rectangle((b - 0.5, a - 0.5), 1, 1,
                                               fill=False, edgecolor="red", lw=2))
        ax.set_xticks(range(n_j), [s.label() for s in matrix.strategies_j], rotation=20)
        ax.set_yticks(range(n_i), [s.label() for s in matrix.strategies_i])
        ax.set_xlabel("sender j strategy")
        ax.set_ylabel("sender i strategy")
        ax.set_title(title, fontsize=10)
        fig.colorbar(im, ax=ax, shrink=0.8)
    fig.suptitle(f"equilibria outlined in red ({report.spe_class.value})", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_simulation(report, path) -> None:
    """Per-node time series: interval throughput, channel-time share, window floor."""
    by_node: dict[str, list] = {}
    for row in report.timeseries:
        by_node.setdefault(row.node, []).append(row)
    fig, axes = plt.subplots(3, 1, figsize=(8, 8), sharex=True)
    for name, rows in by_node.items():
        t = [r.time_s for r in rows]
        axes[0].plot(t, [r.throughput_mbps for r in rows], label=name)
        axes[1].plot(t, [r.share for r in rows], label=name)
        axes[2].plot(t, [r.cw_min_eff for r in rows], label=name)
    axes[0].set_ylabel("throughput [Mbps]")
    axes[1].set_ylabel("channel-time share")
    axes[2].set_ylabel("effective cw_min [slots]")
    axes[2].set_xlabel("time [s]")
    for ax in axes:
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep(rows: list[dict], mode: str, param: str, path) -> None:
    """Swept metric per node: throughput for simulate, equilibrium payoff for
    analyze (points at inefficient unique equilibria marked red)."""
    by_node: dict[str, list[dict]] = {}
    for row in rows:
        by_node.setdefault(row["node"], []).append(row)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    metric = "throughput_mbps" if mode == "simulate" else "r_at_nash_mbps"
    for name, node_rows in by_node.items():
        xs = [r["value"] for r in node_rows]
        ys = [r[metric] for r in node_rows]
        ax.plot(xs, ys, marker="o", ms=3, label=name)
        if mode == "analyze":
            bad = [(x, y) for x, y, r in zip(xs, ys, node_rows)
                   if r["spe_class"] == "unique-undesirable" and y is not None]
            if bad:
                ax.scatter([b[0] for b in bad], [b[1] for b in bad],
                           color="red", zorder=3, s=18)
    ax.set_xlabel(param)
    ax.set_ylabel("throughput [Mbps]" if mode == "simulate" else "payoff at equilibrium [Mbps]")
    if mode == "analyze":
        ax.set_title("red points: unique inefficient equilibrium", fontsize=9)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
