"""Matplotlib figures rendered alongside the CSV reports.

All functions write a file and return its path; the Agg backend is
forced so plotting works headless and deterministically.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_sweep(results, path) -> str:
    """Mean percent-of-optimal vs detector tilt angle, as a line plot."""
    tilts = [r.tilt_deg for r in results]
    means = [r.mean_pct_of_optimal for r in results]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(tilts, means, marker="o", color="tab:blue")
    ax.set_xlabel(r"detector tilt $\Delta\theta$ (deg)")
    ax.set_ylabel("mean % of optimal irradiance")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_scalespace(profiles, path) -> str:
    """Three-panel scale-space figure: L with E_T, then E_B and E_D per tilt.

    profiles share one radiance function and differ only in tilt angle;
    they must have irradiance/blurred populated.
    """
    if not profiles:
        raise ValueError("need at least one profile")
    from .photodiff import photodifferential_1d

    base = profiles[0]
    fig, axes = plt.subplots(3, 1, figsize=(6.0, 7.2), sharex=True)
    axes[0].plot(base.theta_deg, base.radiance, color="0.3", label=r"$L$")
    axes[0].plot(base.theta_deg, base.irradiance, color="tab:blue", label=r"$E_T$")
    axes[0].set_ylabel("radiance / irradiance")
    axes[0].legend(loc="upper right", fontsize=8)
    cmap = plt.get_cmap("viridis")
    for i, p in enumerate(profiles):
        c = cmap(i / max(len(profiles) - 1, 1))
        label = rf"$\Delta\theta={p.tilt_deg:g}^\circ$"
        axes[1].plot(p.theta_deg, p.blurred, color=c, label=label)
        axes[2].plot(p.theta_deg, photodifferential_1d(p), color=c, label=label)
    axes[1].set_ylabel(r"$E_B$")
    axes[1].legend(loc="upper right", fontsize=8)
    axes[2].set_ylabel(r"$E_D$")
    axes[2].set_xlabel(r"$\theta$ (deg)")
    axes[2].axhline(0.0, color="0.8", lw=0.8)
    for ax in axes:
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_benchmark(rows, path) -> str:
    """Bar chart of mean percent-of-optimal per strategy."""
    rows = sorted(rows, key=lambda r: r.mean_pct_of_optimal)
    names = [f"{r.strategy}\n({r.num_sensors} sensors)" for r in rows]
    means = [r.mean_pct_of_optimal for r in rows]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.bar(names, means, color="tab:blue", width=0.6)
    ax.set_ylabel("mean % of optimal irradiance")
    ax.set_ylim(0.0, 105.0)
    for x, m in enumerate(means):
        ax.text(x, m + 1.0, f"{m:.1f}", ha="center", fontsize=8)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_day_ledgers(ledgers, path) -> str:
    """Panel irradiance over the day, one line per strategy."""
    if not ledgers:
        raise ValueError("need at least one ledger")
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    for led in ledgers:
        ts = [r.timestamp for r in led.rows]
        ax.plot(ts, [r.irradiance_w_m2 for r in led.rows], label=led.strategy)
    ax.set_xlabel("time (UTC)")
    ax.set_ylabel(r"panel irradiance (W/m$^2$)")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.autofmt_xdate()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_batch_histograms(results: dict, path) -> str:
    """Histograms of the proposed strategy's batch performance.

    results maps location ids to DayComparisonRow lists that include
    'proposed' and 'sun_tracker' entries.
    """
    if not results:
        raise ValueError("no results to plot")
    gains, pcts = [], []
    for rows in results.values():
        by_kind = {r.strategy: r for r in rows}
        prop = by_kind["proposed"]
        gains.append(prop.gain_pct.get("sun_tracker", 0.0))
        pcts.append(prop.pct_of_optimal)
    fig, axes = plt.subplots(1, 2, figsize=(7.2, 3.2))
    axes[0].hist(gains, bins=max(5, int(np.sqrt(len(gains)))), color="tab:blue")
    axes[0].set_xlabel("net gain vs sun tracker (%)")
    axes[0].set_ylabel("locations")
    axes[1].hist(pcts, bins=max(5, int(np.sqrt(len(pcts)))), color="tab:green")
    axes[1].set_xlabel("% of optimal net energy")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
