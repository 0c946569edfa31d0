"""Figure rendering for the report paths (matplotlib, file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_annulus_comparison(curve, path, detail=False):
    """Overlay of the concentration function and 2 e^{2H} along a radius."""
    fig, axes = plt.subplots(1, 2 if detail else 1,
                             figsize=(9 if detail else 5.5, 4))
    axes = np.atleast_1d(axes)
    u = np.log(curve.x)
    ax = axes[0]
    ax.plot(u, curve.h_tilde, label="concentration function", lw=1.2)
    ax.plot(u, curve.robin_exp, label="2 exp(2H)", lw=1.2, ls="--")
    ax.set_xlabel("log x")
    ax.set_ylabel("value" if curve.prefactor_included else
                  "value / radial prefactor")
    ax.set_title(f"annulus rho = {curve.rho:.6g} (K = {curve.terms})")
    ax.legend(frameon=False, fontsize=8)
    if detail:
        ax2 = axes[1]
        rel = (curve.h_tilde - curve.robin_exp) / curve.robin_exp
        ax2.plot(u, rel, lw=1.0, color="k")
        ax2.set_xlabel("log x")
        ax2.set_ylabel("relative difference")
        ax2.set_title("detail")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_sphere_configuration(centers, targets, path, datum=None,
                                n_boundary=720):
    """Orthographic projection of the limiting unit spheres.

    Every sphere passes through the origin; circles of radius one are
    drawn around the projected centres, targets are marked for
    comparison, and (optionally) the boundary datum magnitude is shown.
    """
    centers = np.asarray(centers, dtype=float)
    targets = np.asarray(targets, dtype=float)
    with_datum = datum is not None
    fig, axes = plt.subplots(1, 2 if with_datum else 1,
                             figsize=(9 if with_datum else 5, 4.5))
    axes = np.atleast_1d(axes)
    ax = axes[0]
    t = np.linspace(0, 2 * np.pi, 181)
    for c in centers:
        ax.plot(c[0] + np.cos(t), c[1] + np.sin(t), lw=1.2)
        ax.plot([c[0]], [c[1]], marker="o", ms=3, color="k")
    for v in targets:
        ax.plot([v[0]], [v[1]], marker="x", ms=6, color="r")
    ax.plot([0], [0], marker="+", ms=8, color="b")
    ax.set_aspect("equal")
    ax.set_title("limiting spheres (orthographic, centres o, targets x)")
    if with_datum:
        theta = 2 * np.pi * np.arange(n_boundary) / n_boundary
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        mag = np.linalg.norm(datum.value(pts), axis=-1)
        axes[1].plot(theta, mag, lw=1.0)
        axes[1].set_xlabel("boundary angle")
        axes[1].set_ylabel("|datum|")
        axes[1].set_title("boundary datum magnitude")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
