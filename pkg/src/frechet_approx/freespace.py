"""Decision procedure over the reachable free space.

The BFS itself lives in the compiled kernels; this module wraps its output
as a :class:`ReachableDiagram` and adds matching extraction and the
harvesting of vertex-edge event radii from the visited cells.
"""

from __future__ import annotations

from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from . import _kernels as K
from .errors import ContractError, UsageError
from .geometry import Interval, Matching, PolygonalCurve, check_same_dim, make_interval, point_segment_distances


class CellSummary(NamedTuple):
    i: int
    j: int
    freeTop: Optional[Interval]
    freeRight: Optional[Interval]
    reachTop: Optional[Interval]
    reachRight: Optional[Interval]


class ReachableDiagram:
    """Sparse record of the cells visited by the BFS at radius ``delta``.

    ``idx[k]`` holds the cell (i, j) (i indexes edges of A, j edges of B) and
    ``reach[k]`` its reach intervals on the top and right boundaries, with
    lo > hi marking an empty interval.
    """

    def __init__(self, A: PolygonalCurve, B: PolygonalCurve, delta: float,
                 visited: int, end_reachable: bool, idx: np.ndarray, reach: np.ndarray):
        self.A = A
        self.B = B
        self.delta = float(delta)
        self.visitedCount = int(visited)
        self.endReachable = bool(end_reachable)
        self.idx = idx
        self.reach = reach
        self._lookup: Optional[Dict[Tuple[int, int], int]] = None

    @property
    def recorded(self) -> bool:
        return self.idx.shape[0] == self.visitedCount

    def _rows(self) -> Dict[Tuple[int, int], int]:
        if self._lookup is None:
            if not self.recorded:
                raise UsageError("diagram was computed without recording cells")
            self._lookup = {(int(i), int(j)): k for k, (i, j) in enumerate(self.idx)}
        return self._lookup

    def __contains__(self, cell) -> bool:
        return tuple(cell) in self._rows()

    def __len__(self):
        return self.visitedCount

    def cell(self, i: int, j: int) -> CellSummary:
        k = self._rows()[(i, j)]
        A, B = self.A.vertices, self.B.vertices
        ft = make_interval(*K.fs_interval(B[j + 1], A[i], A[i + 1], self.delta))
        fr = make_interval(*K.fs_interval(A[i + 1], B[j], B[j + 1], self.delta))
        r = self.reach[k]
        return CellSummary(i, j, ft, fr, make_interval(r[0], r[1]), make_interval(r[2], r[3]))

    @property
    def cells(self) -> Dict[Tuple[int, int], CellSummary]:
        return {key: self.cell(*key) for key in self._rows()}

    def __repr__(self):
        return (f"ReachableDiagram(delta={self.delta!r}, visited={self.visitedCount}, "
                f"endReachable={self.endReachable})")


def decide_reachable(A: PolygonalCurve, B: PolygonalCurve, delta: float,
                     record: bool = True) -> ReachableDiagram:
    """Decide d_F(A, B) <= delta by BFS over the relevant free-space cells.

    With ``record=False`` only the verdict and the visited count are kept,
    which saves memory when no matching or events are needed.
    """
    check_same_dim(A, B)
    if delta < 0:
        raise UsageError("delta must be non-negative")
    count, end, idx, reach = K.bfs_decide(A.vertices, B.vertices, float(delta), bool(record))
    return ReachableDiagram(A, B, delta, count, end, idx, reach)


def naive_decide(A: PolygonalCurve, B: PolygonalCurve, delta: float) -> bool:
    """Full-grid dynamic program over all cells (quadratic baseline)."""
    check_same_dim(A, B)
    end, _ = K.grid_decide(A.vertices, B.vertices, float(delta))
    return bool(end)


def naive_decide_cells(A: PolygonalCurve, B: PolygonalCurve, delta: float) -> Tuple[bool, int]:
    """Full-grid program; also returns how many cells had a reachable entry."""
    check_same_dim(A, B)
    end, touched = K.grid_decide(A.vertices, B.vertices, float(delta))
    return bool(end), int(touched)


def extract_matching(D: ReachableDiagram) -> Matching:
    """Trace a monotone path back from the end corner through the reach intervals.

    Inside each cell the path is one straight segment between an entry point
    on the left or bottom boundary and the exit point, which stays in the
    free space because each cell's free space is convex.
    """
    if not D.endReachable:
        raise UsageError("cannot extract a matching from an unreachable diagram")
    if not D.recorded:
        raise UsageError("diagram was computed without recording cells")
    s, t = K.trace_back(D.idx, D.reach, D.A.n_edges, D.B.n_edges)
    if s.size == 0:
        raise ContractError("broken reachability record")
    s = s[::-1]
    t = t[::-1]
    s = np.maximum.accumulate(s)
    t = np.maximum.accumulate(t)
    keep = np.ones(s.size, dtype=bool)
    keep[1:] = (s[1:] != s[:-1]) | (t[1:] != t[:-1])
    return Matching(s[keep], t[keep], check=False)


def relevant_vertex_edge_radii(D: ReachableDiagram) -> np.ndarray:
    """Vertex-edge event radii on the boundaries of visited cells, <= D.delta.

    Every cell contributes its top boundary (vertex B[j+1] against edge
    A_i) and right boundary (vertex A[i+1] against edge B_j); cells in the
    first row and column also contribute the outer bottom and left
    boundaries, which carry the events of the start vertices.
    """
    if D.visitedCount == 0:
        return np.empty(0)
    if not D.recorded:
        raise UsageError("diagram was computed without recording cells")
    A, B = D.A.vertices, D.B.vertices
    i = D.idx[:, 0]
    j = D.idx[:, 1]
    parts = [
        point_segment_distances(B[j + 1], A[i], A[i + 1]),
        point_segment_distances(A[i + 1], B[j], B[j + 1]),
    ]
    row0 = j == 0
    if np.any(row0):
        parts.append(point_segment_distances(np.repeat(B[:1], row0.sum(), axis=0), A[i[row0]], A[i[row0] + 1]))
    col0 = i == 0
    if np.any(col0):
        parts.append(point_segment_distances(np.repeat(A[:1], col0.sum(), axis=0), B[j[col0]], B[j[col0] + 1]))
    r = np.concatenate(parts)
    r = r[r <= D.delta]
    r.sort()
    return r
