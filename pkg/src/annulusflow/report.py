"""Matplotlib summary figures rendered next to the trace CSV."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .trace import FlowTrace


def plot_trace(trace: FlowTrace, path) -> None:
    """Two-panel run summary: modulus h(t) and the log-derivative vs K0."""
    t = trace.column("t")
    h = trace.column("h")
    rate = trace.column("dlogh_dt")
    k0 = trace.column("K0")

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    ok = np.isfinite(h)
    ax1.plot(t[ok], h[ok], "o-", ms=3, color="#2c3e50")
    ax1.set_ylabel("modulus h")
    ax1.grid(alpha=0.3)

    ok = np.isfinite(rate)
    ax2.plot(t[ok], rate[ok], "o-", ms=3, color="#c0392b", label="d/dt log h")
    if len(k0):
        ax2.axhline(k0[0], color="#555", lw=1, ls="--", label="K0")
    ax2.set_xlabel("t")
    ax2.set_ylabel("d/dt log h")
    ax2.legend(loc="best", fontsize=8)
    ax2.grid(alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_annulus(initial, final, path) -> None:
    """Overlay of the initial and final boundary curves."""
    fig, ax = plt.subplots(figsize=(5.6, 5.6))
    for ann, alpha, tag in ((initial, 0.35, "initial"), (final, 1.0, "final")):
        for curve, color in ((ann.inner, "#c0392b"), (ann.outer, "#2c3e50")):
            u = curve.unwrapped()
            closed = np.vstack([u, u[:1]]) if curve.closed else u
            ax.plot(closed[:, 0], closed[:, 1], color=color, alpha=alpha,
                    lw=1.2, label=f"{tag}" if color == "#2c3e50" else None)
    ax.set_aspect("equal")
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
