"""Matplotlib figure emitters for the CLI report paths.

Figures are rendered headless to SVG next to the delimited output.  The
SVG date metadata is stripped and the hash salt pinned so that repeated
runs of the same command produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "ipl"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SAVE_KW = {"format": "svg", "metadata": {"Date": None}, "bbox_inches": "tight"}


def _save(fig, path: str) -> str:
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def plot_spectrum(levels, path: str, title: str = "spectrum") -> str:
    """Level diagram: energy against level index."""
    energies = [lv[2] if isinstance(lv, tuple) else lv for lv in levels]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(range(len(energies)), sorted(energies), "o", ms=3)
    ax.set_xlabel("index")
    ax.set_ylabel("energy")
    ax.set_title(title)
    ax.grid(True, linestyle="--", alpha=0.5)
    return _save(fig, path)


def plot_state_profile(xi, psi1, psi2, path: str, title: str = "state profile") -> str:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(xi, psi1, "-", label=r"$\Psi_1$")
    ax.plot(xi, psi2, "--", label=r"$\Psi_2$")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel("amplitude")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, linestyle="--", alpha=0.5)
    return _save(fig, path)


def plot_comparison(cells, discrete_prob, continuum_prob, path: str,
                    title: str = "discrete vs continuum") -> str:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(cells, discrete_prob, "o", ms=3, label="lattice")
    ax.plot(cells, continuum_prob, "-", label="continuum")
    ax.set_xlabel("cell")
    ax.set_ylabel("probability")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, linestyle="--", alpha=0.5)
    return _save(fig, path)


def plot_scan(report, path: str) -> str:
    """Localized fraction and ground width against the coupling."""
    eps = report.epsilons
    frac = [report.localized_fraction(e) for e in eps]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(eps, frac, "o-")
    ax1.set_xlabel(r"$\epsilon$")
    ax1.set_ylabel("localized fraction")
    ax1.grid(True, linestyle="--", alpha=0.5)
    top_width = [max(report.records[e], key=lambda r: r.energy).width_cells for e in eps]
    pred = [report.predicted_width_cells[e] for e in eps]
    ax2.plot(eps, top_width, "o-", label="top state")
    ax2.plot(eps, pred, "s--", label="predicted")
    ax2.set_xlabel(r"$\epsilon$")
    ax2.set_ylabel("width (cells)")
    ax2.legend()
    ax2.grid(True, linestyle="--", alpha=0.5)
    fig.tight_layout()
    return _save(fig, path)


def plot_eigenvalue_stem(energies, path: str, title: str = "eigenvalues") -> str:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    e = np.sort(np.asarray(energies))
    ax.plot(np.arange(e.size), e, ".", ms=3)
    ax.set_xlabel("state index")
    ax.set_ylabel("energy")
    ax.set_title(title)
    ax.grid(True, linestyle="--", alpha=0.5)
    return _save(fig, path)
