"""Deterministic standalone SVG frames of an evolving annulus."""

from __future__ import annotations

import os

import numpy as np

from .flow import FlowState

_STYLE = (".inner{fill:none;stroke:#c0392b;stroke-width:1.2}"
          ".outer{fill:none;stroke:#2c3e50;stroke-width:1.2}"
          ".guide{stroke:#999;stroke-width:0.6;stroke-dasharray:4 3}")


def _path(points: np.ndarray) -> str:
    coords = " L ".join(f"{x:.6f} {-y:.6f}" for x, y in points)
    return f"M {coords} Z"


def emit_svg(state: FlowState, path) -> None:
    """Write both boundary curves as polyline paths with an auto-scaled viewBox.

    Cylinder curves are drawn in the unrolled fundamental domain with dashed
    period guides; output bytes are a pure function of the state.
    """
    ann = state.annulus
    inner = ann.inner.unwrapped()
    outer = ann.outer.unwrapped()
    pts = np.vstack([inner, outer])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    pad = 0.05 * max(hi - lo) if (hi > lo).any() else 1.0
    x0, y0 = lo - pad
    x1, y1 = hi + pad
    view = f"{x0:.6f} {-y1:.6f} {x1 - x0:.6f} {y1 - y0:.6f}"

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view}" '
             f'width="480" height="480" preserveAspectRatio="xMidYMid meet">',
             f"<style>{_STYLE}</style>"]
    period = ann.ambient.period
    if period is not None:
        base = ann.inner.vertices[0, 1]
        for k in (0, 1):
            y = base + k * period
            parts.append(f'<line class="guide" x1="{x0:.6f}" y1="{-y:.6f}" '
                         f'x2="{x1:.6f}" y2="{-y:.6f}"/>')
    parts.append(f'<path class="inner" d="{_path(inner)}"/>')
    parts.append(f'<path class="outer" d="{_path(outer)}"/>')
    parts.append("</svg>")
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
