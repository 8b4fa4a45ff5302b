"""Pure-Python/numpy implementations of the orbit hot kernels.

This is the fallback backend: rotorb.kernels prefers the compiled extension
(rotorb._kernels) and loads this module when the extension is unavailable or
when ROTORB_BACKEND=python.  Both backends implement the identical interface
and are compared in the test suite.

All expansion functions take per-node state arrays plus a move table (one row
per legal letter) and return children in deterministic order: node-major,
then move index ascending.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

BACKEND_NAME = "python"


def _children(last, movegen):
    # legal moves per node: everything except the node's last generator
    mask = movegen[None, :] != last[:, None]
    parent, move = np.nonzero(mask)
    return parent, move


def expand_stationary(points, last, lin, shift, movegen):
    """One breadth-first layer with fixed axes.

    points (N,d), last (N,) int64, lin (M,d,d), shift (M,d), movegen (M,).
    Returns (child_points (K,d), child_parent (K,), child_move (K,)).
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    last = np.asarray(last, dtype=np.int64)
    movegen = np.asarray(movegen, dtype=np.int64)
    parent, move = _children(last, movegen)
    pts = points[parent][:, None, :] @ lin[move]
    child_points = pts[:, 0, :] + shift[move]
    return child_points, parent.astype(np.int64), move.astype(np.int64)


def _lin_2d(c, s):
    # row-action rotation blocks, one (2,2) per child
    out = np.empty((len(c), 2, 2))
    out[:, 0, 0] = c
    out[:, 0, 1] = s
    out[:, 1, 0] = -s
    out[:, 1, 1] = c
    return out


def expand_peripatetic_2d(points, axes, last, cosv, sinv, movegen):
    """One layer with transported axes in the plane.

    points (N,2), axes (N,G,2), last (N,), cosv/sinv/movegen (M,).
    Returns (child_points, child_axes (K,G,2), child_parent, child_move).
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    axes = np.ascontiguousarray(axes, dtype=np.float64)
    last = np.asarray(last, dtype=np.int64)
    movegen = np.asarray(movegen, dtype=np.int64)
    parent, move = _children(last, movegen)
    lin = _lin_2d(cosv[move], sinv[move])
    center = axes[parent, movegen[move]]  # (K,2) current axis of the letter
    rel = points[parent] - center
    child_points = (rel[:, None, :] @ lin)[:, 0, :] + center
    rel_axes = axes[parent] - center[:, None, :]
    child_axes = rel_axes @ lin + center[:, None, :]
    return child_points, child_axes, parent.astype(np.int64), move.astype(np.int64)


def _lin_3d(c, s, u):
    # axis-angle rotation blocks for the row action, one (3,3) per child
    k = len(c)
    one_c = 1.0 - c
    u0, u1, u2 = u[:, 0], u[:, 1], u[:, 2]
    out = np.empty((k, 3, 3))
    out[:, 0, 0] = c + one_c * u0 * u0
    out[:, 0, 1] = one_c * u0 * u1 + s * u2
    out[:, 0, 2] = one_c * u0 * u2 - s * u1
    out[:, 1, 0] = one_c * u1 * u0 - s * u2
    out[:, 1, 1] = c + one_c * u1 * u1
    out[:, 1, 2] = one_c * u1 * u2 + s * u0
    out[:, 2, 0] = one_c * u2 * u0 + s * u1
    out[:, 2, 1] = one_c * u2 * u1 - s * u0
    out[:, 2, 2] = c + one_c * u2 * u2
    return out


def expand_peripatetic_3d(points, base, dirs, last, cosv, sinv, movegen):
    """One layer with transported axes in space.

    points (N,3), base (N,G,3), dirs (N,G,3) unit rows, last (N,),
    cosv/sinv/movegen (M,).  Returns (child_points, child_base, child_dirs,
    child_parent, child_move); directions are renormalized after transport.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    base = np.ascontiguousarray(base, dtype=np.float64)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64)
    last = np.asarray(last, dtype=np.int64)
    movegen = np.asarray(movegen, dtype=np.int64)
    parent, move = _children(last, movegen)
    u = dirs[parent, movegen[move]]
    lin = _lin_3d(cosv[move], sinv[move], u)
    center = base[parent, movegen[move]]
    rel = points[parent] - center
    child_points = (rel[:, None, :] @ lin)[:, 0, :] + center
    rel_base = base[parent] - center[:, None, :]
    child_base = rel_base @ lin + center[:, None, :]
    child_dirs = dirs[parent] @ lin
    child_dirs /= np.linalg.norm(child_dirs, axis=2, keepdims=True)
    return (child_points, child_base, child_dirs,
            parent.astype(np.int64), move.astype(np.int64))


class Dedup:
    """Streaming spatial-hash deduplicator.

    Points arrive in batches; a point is kept iff no previously kept point
    lies within `cell` of it in Chebyshev distance.  First seen wins, so the
    kept set depends only on arrival order.
    """

    def __init__(self, dim: int, cell: float):
        if dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if not cell > 0:
            raise ValueError("cell must be positive")
        self.dim = dim
        self.cell = float(cell)
        self._cells: dict[tuple, list[int]] = {}
        self._kept: list[tuple] = []
        self._offsets = [off for off in itertools.product((-1, 0, 1), repeat=dim)]

    def __len__(self) -> int:
        return len(self._kept)

    def add_batch(self, points) -> np.ndarray:
        """Mask of which rows were kept (and stored)."""
        points = np.asarray(points, dtype=np.float64)
        cell = self.cell
        keep = np.zeros(len(points), dtype=bool)
        for i in range(len(points)):
            p = points[i]
            key = tuple(int(math.floor(v / cell)) for v in p)
            ok = True
            for off in self._offsets:
                bucket = self._cells.get(tuple(k + o for k, o in zip(key, off)))
                if not bucket:
                    continue
                for j in bucket:
                    q = self._kept[j]
                    d = max(abs(a - b) for a, b in zip(p, q))
                    if d < cell:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                idx = len(self._kept)
                self._kept.append(tuple(float(v) for v in p))
                self._cells.setdefault(key, []).append(idx)
                keep[i] = True
        return keep


class GridIndex:
    """Spatial hash over a fixed point set for nearest-neighbor distances."""

    def __init__(self, points, cell: float | None = None):
        points = np.ascontiguousarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] not in (2, 3):
            raise ValueError("points must be (N,2) or (N,3)")
        if len(points) == 0:
            raise ValueError("empty point set")
        self.points = points
        self.dim = points.shape[1]
        if cell is None:
            extent = float((points.max(axis=0) - points.min(axis=0)).max())
            cell = max(extent / max(len(points) ** (1.0 / self.dim), 1.0), 1e-12)
        if not cell > 0:
            raise ValueError("cell must be positive")
        self.cell = float(cell)
        self._cells: dict[tuple, list[int]] = {}
        keys = np.floor(points / self.cell).astype(np.int64)
        for i, key in enumerate(map(tuple, keys)):
            self._cells.setdefault(key, []).append(i)
        self._key_lo = keys.min(axis=0)
        self._key_hi = keys.max(axis=0)

    def nearest_dist(self, q, exclude: int = -1) -> float:
        """Euclidean distance from q to the nearest stored point whose index
        differs from `exclude`; inf when no such point exists."""
        q = np.asarray(q, dtype=np.float64)
        cell = self.cell
        key0 = np.floor(q / cell).astype(np.int64)
        # occupied-cell window relative to the query cell; rings outside it
        # are empty, so start at the first ring touching the window and stop
        # at the last
        lo = self._key_lo - key0
        hi = self._key_hi - key0
        ring_min = int(max(np.maximum(lo, 0).max(), np.maximum(-hi, 0).max(), 0))
        max_ring = int(np.maximum(np.abs(lo), np.abs(hi)).max())
        best = math.inf
        for ring in range(ring_min, max_ring + 1):
            ranges = [range(max(-ring, int(lo[d])), min(ring, int(hi[d])) + 1)
                      for d in range(self.dim)]
            for off in itertools.product(*ranges):
                if max(abs(o) for o in off) != ring:
                    continue
                bucket = self._cells.get(tuple(int(key0[d]) + off[d]
                                               for d in range(self.dim)))
                if not bucket:
                    continue
                for j in bucket:
                    if j == exclude:
                        continue
                    d = float(np.linalg.norm(self.points[j] - q))
                    if d < best:
                        best = d
            # any unexplored point is at distance >= ring*cell
            if best <= ring * cell:
                break
        return best

    def nearest_batch(self, queries) -> np.ndarray:
        queries = np.asarray(queries, dtype=np.float64)
        return np.array([self.nearest_dist(q) for q in queries])

    def min_pairwise(self) -> float:
        """Smallest distance between two distinct stored points; inf for a
        singleton set."""
        if len(self.points) < 2:
            return math.inf
        best = math.inf
        for i in range(len(self.points)):
            d = self.nearest_dist(self.points[i], exclude=i)
            if d < best:
                best = d
        return best
