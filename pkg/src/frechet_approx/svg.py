"""SVG rendering of the reachable free-space diagram."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np

from . import _kernels as K
from .errors import UsageError
from .freespace import ReachableDiagram, extract_matching

SAMPLES = 32


def cell_free_polygon(A: np.ndarray, B: np.ndarray, i: int, j: int, delta: float, samples: int = SAMPLES):
    """Boundary of the free region of cell (i, j) in local [0,1]^2 coordinates.

    The region is convex, so it is traced column by column: for each of
    ``samples`` positions s on edge i of A the free t-range on edge j of B.
    Returns an (m, 2) array, or None when no sampled column is free.
    """
    upper, lower = [], []
    for s in np.linspace(0.0, 1.0, samples):
        p = A[i] + s * (A[i + 1] - A[i])
        lo, hi = K.fs_interval(p, B[j], B[j + 1], delta)
        if lo <= hi:
            upper.append((s, hi))
            lower.append((s, lo))
    if not upper:
        return None
    return np.array(upper + lower[::-1])


def render_freespace_svg(D: ReachableDiagram, path: Optional[str] = None,
                         cell_px: float = 40.0, samples: int = SAMPLES) -> str:
    """Draw visited cells, their free regions, reach intervals and, when the
    end is reachable, the extracted matching.  ``D`` must be recorded."""
    if not D.recorded:
        raise UsageError("diagram was computed without recording cells")
    A, B, delta = D.A, D.B, D.delta
    VA, VB = A.vertices, B.vertices
    W = A.n_edges * cell_px
    H = B.n_edges * cell_px

    def xy(s, t):
        return s * cell_px, H - t * cell_px

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.1f}" height="{H:.1f}" '
        f'viewBox="0 0 {W:.1f} {H:.1f}">',
        f"<title>free space at delta={delta:.6g}, visited={D.visitedCount}, "
        f"end reachable={D.endReachable}</title>",
    ]
    for (i, j), r in zip(D.idx, D.reach):
        i, j = int(i), int(j)
        x0, y0 = xy(i, j + 1)
        out.append(f'<rect class="cell" x="{x0:.2f}" y="{y0:.2f}" width="{cell_px:.2f}" '
                   f'height="{cell_px:.2f}" fill="none" stroke="#999" stroke-width="0.5"/>')
        poly = cell_free_polygon(VA, VB, i, j, delta, samples)
        if poly is not None:
            pts = " ".join("{:.2f},{:.2f}".format(*xy(i + s, j + t)) for s, t in poly)
            out.append(f'<polygon class="free" points="{pts}" fill="#cde" stroke="none"/>')
        if r[0] <= r[1]:
            (a, b), (c, e) = xy(i + r[0], j + 1), xy(i + r[1], j + 1)
            out.append(f'<line class="reach" x1="{a:.2f}" y1="{b:.2f}" x2="{c:.2f}" y2="{e:.2f}" '
                       f'stroke="#c30" stroke-width="2"/>')
        if r[2] <= r[3]:
            (a, b), (c, e) = xy(i + 1, j + r[2]), xy(i + 1, j + r[3])
            out.append(f'<line class="reach" x1="{a:.2f}" y1="{b:.2f}" x2="{c:.2f}" y2="{e:.2f}" '
                       f'stroke="#c30" stroke-width="2"/>')
    if D.endReachable:
        M = extract_matching(D)
        pts = " ".join("{:.2f},{:.2f}".format(*xy(s, t)) for s, t in zip(M.s, M.t))
        out.append(f'<polyline class="matching" points="{pts}" fill="none" stroke="#036" stroke-width="1.5"/>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
