"""Matplotlib renderings of the density, pursuit and trade-off outputs.

Every function writes one PNG and returns its path. The figures read the
same arrays that go into the CSV exports.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .pursuit import interpolate_path  # noqa: E402

DPI = 120


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def _wedge_edges(ax, wedge, length):
    a = wedge.heading_angle
    for s in (-1, 1):
        t = a + s * wedge.half_angle
        ax.plot([wedge.apex.x, wedge.apex.x + length * math.cos(t)],
                [wedge.apex.y, wedge.apex.y + length * math.sin(t)], "k--", lw=1)


def plot_density(path, values, extent, wedge, predator=None):
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(values, extent=extent, origin="upper", cmap="Greys", interpolation="nearest")
    _wedge_edges(ax, wedge, max(extent[1] - extent[0], extent[3] - extent[2]))
    ax.plot([wedge.apex.x], [wedge.apex.y], "ko", ms=4, label="prey")
    if predator is not None:
        ax.plot([predator.x], [predator.y], "rx", ms=6, label="predator")
    ax.set_xlim(extent[0], extent[1])
    ax.set_ylim(extent[2], extent[3])
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="lower left", fontsize=8)
    return _save(fig, path)


def plot_trajectory(path, prey, predator, substeps=10):
    fig, ax = plt.subplots(figsize=(6, 4))
    ok = np.all(np.isfinite(prey), axis=1) & np.all(np.isfinite(predator), axis=1)
    p, z = prey[ok], predator[ok]
    pi, zi = interpolate_path(p, substeps), interpolate_path(z, substeps)
    ax.plot(pi[:, 0], pi[:, 1], "k-", lw=1, label="prey")
    ax.plot(zi[:, 0], zi[:, 1], "r-", lw=1, label="predator")
    ax.plot(p[:, 0], p[:, 1], "k.", ms=4)
    ax.plot(z[:, 0], z[:, 1], "r.", ms=4)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_distance(path, distances, bound):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    k = np.arange(distances.size)
    ax.plot(k, distances, "k-", marker=".", label="distance")
    ax.axhline(math.sqrt(bound), color="k", ls="--", lw=1, label="sqrt(1 / trace I)")
    ax.set_xlabel("k")
    ax.set_ylabel("|z(kT) - y(kT)|")
    ax.set_ylim(bottom=0)
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_histograms(path, hists, bound=None):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    cmap = plt.get_cmap("viridis")
    for i, h in enumerate(hists):
        centres = 0.5 * (h.edges[:-1] + h.edges[1:])
        width = np.diff(h.edges)
        ax.plot(centres, h.mass / width, color=cmap(i / max(1, len(hists) - 1)), lw=1,
                label=f"k={h.k}")
    if bound is not None:
        ax.axvline(bound if hists[0].squared else math.sqrt(bound), color="k", ls="--", lw=1)
    ax.set_xlabel("squared distance" if hists and hists[0].squared else "distance")
    ax.set_ylabel("density")
    ax.legend(fontsize=7, ncol=2)
    return _save(fig, path)


def plot_tradeoff(path, rows):
    fig, ax = plt.subplots(figsize=(5, 4))
    e = [r.expected_energy for r in rows]
    f = [r.fisher_trace for r in rows]
    ax.plot(e, f, "k-o", ms=4)
    for r in rows:
        ax.annotate(f"rho={r.rho:g}", (r.expected_energy, r.fisher_trace), fontsize=7,
                    xytext=(4, 4), textcoords="offset points")
    ax.set_xlabel("expected energy")
    ax.set_ylabel("trace of Fisher information")
    return _save(fig, path)
