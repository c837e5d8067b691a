"""Figure rendering for experiment result tables.

Each experiment's report consists of a CSV plus a PNG rendered from the
same ResultTable; the figures are diagnostic companions to the delimited
output, not the primary record.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ResultTable


def _finish(fig, table: ResultTable, path) -> None:
    fig.suptitle(f"{table.experiment}  [{table.config_hash}]", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_populations(table: ResultTable, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    alpha = table.column("alpha_in")
    for name in table.columns:
        if name.startswith("P"):
            ax.plot(alpha, table.column(name), marker=".", label=name)
    ax.set_xlabel(r"drive amplitude $\alpha_{in}$ ($\sqrt{\mathrm{MHz}}$)")
    ax.set_ylabel("occupation probability")
    ax.legend(fontsize=8)
    _finish(fig, table, path)


def _plot_sinesquare(table: ResultTable, path) -> None:
    names = list(table.columns)
    fig, ax = plt.subplots(figsize=(6, 4))
    if names[0] in ("kappa_phi_mhz", "shots", "n_states", "subset", "alpha_min"):
        axis = names[0]
        x = table.column(axis)
        seeds = table.column("seed")
        acc = table.column("accuracy")
        xs = sorted(set(x))
        means = [float(np.mean(acc[x == v])) for v in xs]
        for s in sorted(set(seeds)):
            mask = seeds == s
            ax.plot(x[mask], acc[mask], ".", alpha=0.4, color="gray")
        ax.plot(xs, means, "o-", color="tab:purple", label="mean accuracy")
        if axis == "shots":
            ax.set_xscale("symlog")
        ax.set_xlabel(axis)
        ax.legend(fontsize=8)
    else:
        seeds = table.column("seed")
        ax.plot(seeds, table.column("accuracy"), "o-", label="all features")
        if "greedy_accuracy" in table.columns:
            ax.plot(seeds, table.column("greedy_accuracy"), "s--",
                    label="greedy subset")
        ax.set_xlabel("seed")
        ax.legend(fontsize=8)
    ax.set_ylabel("test accuracy")
    _finish(fig, table, path)


def _plot_mackeyglass(table: ResultTable, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(table.column("d"), table.column("nrmse"), "o-", ms=3)
    ax.set_xlabel("prediction delay d")
    ax.set_ylabel("NRMSE")
    _finish(fig, table, path)


def _plot_kerr_map(table: ResultTable, path) -> None:
    kerrs = sorted(set(table.column("k_cc_mhz")), reverse=True)
    fig, axes = plt.subplots(1, len(kerrs), figsize=(3.2 * len(kerrs), 3.4),
                             squeeze=False, sharey=True)
    k_col = table.column("k_cc_mhz")
    d_col = table.column("delta_mhz")
    a_col = table.column("alpha_in")
    n_col = table.column("mean_n")
    for ax, k in zip(axes[0], kerrs):
        mask = k_col == k
        deltas = np.array(sorted(set(d_col[mask])))
        amps = np.array(sorted(set(a_col[mask])))
        grid = np.full((len(amps), len(deltas)), np.nan)
        di = {v: i for i, v in enumerate(deltas)}
        ai = {v: i for i, v in enumerate(amps)}
        for d, a, n in zip(d_col[mask], a_col[mask], n_col[mask]):
            grid[ai[a], di[d]] = n
        pc = ax.pcolormesh(deltas, amps, grid, shading="nearest", cmap="magma")
        ax.contour(deltas, amps, grid, levels=[1, 2, 3], colors="w", linewidths=0.6)
        ax.set_title(f"$K_{{cc}}/2\\pi$ = {k:g} MHz", fontsize=9)
        ax.set_xlabel(r"$\Delta/2\pi$ (MHz)")
        fig.colorbar(pc, ax=ax, label=r"$\langle n \rangle$")
    axes[0][0].set_ylabel(r"$\alpha_{in}$ ($\sqrt{\mathrm{MHz}}$)")
    _finish(fig, table, path)


def _plot_kerr_sweep(table: ResultTable, path) -> None:
    ranges = sorted(set(zip(table.column("alpha_min"), table.column("alpha_max"))))
    fig, axes = plt.subplots(1, len(ranges), figsize=(3.2 * len(ranges), 3.4),
                             squeeze=False, sharey=True)
    k_col = table.column("k_cc_mhz")
    d_col = table.column("delta_mhz")
    lo_col = table.column("alpha_min")
    n_col = table.column("nrmse")
    for ax, (lo, hi) in zip(axes[0], ranges):
        mask = lo_col == lo
        kerrs = np.array(sorted(set(k_col[mask])))
        deltas = np.array(sorted(set(d_col[mask])))
        grid = np.full((len(kerrs), len(deltas)), np.nan)
        ki = {v: i for i, v in enumerate(kerrs)}
        di = {v: i for i, v in enumerate(deltas)}
        for k, d, n in zip(k_col[mask], d_col[mask], n_col[mask]):
            grid[ki[k], di[d]] = n
        pc = ax.pcolormesh(deltas, kerrs, grid, shading="nearest", cmap="viridis")
        ax.set_title(f"range [{lo:g}, {hi:g}]", fontsize=9)
        ax.set_xlabel(r"$\Delta/2\pi$ (MHz)")
        fig.colorbar(pc, ax=ax, label="NRMSE")
    axes[0][0].set_ylabel(r"$K_{cc}/2\pi$ (MHz)")
    _finish(fig, table, path)


def _plot_kerr_isolation(table: ResultTable, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    k_col = table.column("k_cc_mhz")
    n_col = table.column("n_target")
    for n_target in sorted(set(n_col)):
        mask = n_col == n_target
        ax.plot(np.abs(k_col[mask]), table.column("nrmse")[mask], "o",
                alpha=0.6, label=f"target <n> = {n_target:g}")
    ax.set_xlabel(r"$|K_{cc}|/2\pi$ (MHz)")
    ax.set_ylabel("NRMSE")
    ax.set_xscale("symlog", linthresh=0.05)
    ax.legend(fontsize=8)
    _finish(fig, table, path)


_RENDERERS = {
    "populations": _plot_populations,
    "populations-oracle": _plot_populations,
    "sinesquare": _plot_sinesquare,
    "mackeyglass": _plot_mackeyglass,
    "kerr-map": _plot_kerr_map,
    "kerr-sweep": _plot_kerr_sweep,
    "kerr-isolation": _plot_kerr_isolation,
}


def render_figure(table: ResultTable, path) -> None:
    """Render the experiment-appropriate figure for a result table."""
    try:
        renderer = _RENDERERS[table.experiment]
    except KeyError:
        raise ValueError(f"no figure renderer for experiment {table.experiment!r}")
    renderer(table, path)
