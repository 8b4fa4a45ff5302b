"""Orbit samplers and density diagnostics.

The breadth-first sampler enumerates reduced words outward from a seed point
in either composition discipline, deduplicating points on a spatial grid as
it goes.  The ladder sampler implements the two-generator staircase
construction (alternating generators with doubling exponent budgets), and the
circle sampler measures gap statistics of an angle's multiples on the unit
circle.  Diagnostics: mesh estimate, grid coverage, sphere confinement, and
discreteness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from rotorb import kernels
from rotorb.geometry import Angle, Line3, Point2, apply_point
from rotorb.words import GeneratorSet, Letter, Word, peripatetic_eval, stationary_eval

# Nodes expanded per kernel call; bounds peak memory of one batch.
CHUNK = 65536

# Default snapping resolution for orbit clouds.
DEDUP_CELL = 1e-6

MODES = ("stationary", "peripatetic")


@dataclass(frozen=True)
class SamplerBudget:
    """Enumeration bounds; whichever is hit first stops the sampler."""

    max_len: int
    max_exp: int
    max_points: int

    def __post_init__(self):
        if self.max_len < 0:
            raise ValueError("max_len must be nonnegative")
        if self.max_exp < 1:
            raise ValueError("max_exp must be positive")
        if self.max_points < 1:
            raise ValueError("max_points must be positive")


@dataclass(frozen=True)
class WordLog:
    """Flat parent-pointer forest of every enumerated node.

    Node 0 is the root (empty word); node t was reached by appending letter
    (gen[t], exp[t]) to its parent's word.  word_of reconstructs the word."""

    parent: np.ndarray
    gen: np.ndarray
    exp: np.ndarray

    def word_of(self, node: int) -> Word:
        letters = []
        t = int(node)
        while t > 0:
            letters.append(Letter(int(self.gen[t]), int(self.exp[t])))
            t = int(self.parent[t])
        return tuple(reversed(letters))


@dataclass(frozen=True)
class OrbitCloud:
    """Deduplicated orbit sample.

    No two points lie within dedup_cell of each other in Chebyshev distance;
    word_len records each point's generation depth.  node_ids and log, when
    present, tie each point back to the word that produced it (trace audits).
    """

    dim: int
    points: np.ndarray
    word_len: np.ndarray
    dedup_cell: float = DEDUP_CELL
    truncated: bool = False
    node_ids: np.ndarray | None = field(default=None, repr=False)
    log: WordLog | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must be (N,{self.dim})")
        wl = np.asarray(self.word_len, dtype=np.int64)
        if wl.shape != (len(pts),) or (len(wl) and wl.min() < 0):
            raise ValueError("word_len must be one nonnegative int per point")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "word_len", wl)


def _move_table(gens: GeneratorSet, max_exp: int):
    movegen, moveexp = [], []
    for i in range(len(gens)):
        for e in gens.exponent_range(i, max_exp):
            movegen.append(i)
            moveexp.append(e)
    return np.array(movegen, dtype=np.int64), np.array(moveexp, dtype=np.int64)


def bfs_orbit(gens: GeneratorSet, P, mode: str, budget: SamplerBudget,
              dedup_cell: float = DEDUP_CELL) -> OrbitCloud:
    """Enumerate the orbit of P breadth-first over reduced words.

    Children are ordered by generator index then ascending exponent, so the
    enumeration (and hence the deduplicated cloud) is deterministic.  There
    is no visited-state dedup: every reduced word up to the budget is walked,
    even when two words happen to land on the same point.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    dim = gens.dim
    P0 = np.asarray(P, dtype=np.float64)
    if P0.shape != (dim,) or not np.all(np.isfinite(P0)):
        raise ValueError(f"seed point must be a finite {dim}-vector")

    movegen, moveexp = _move_table(gens, budget.max_exp)
    n_moves = len(movegen)
    if mode == "stationary":
        lin = np.empty((n_moves, dim, dim))
        shift = np.empty((n_moves, dim))
        for m in range(n_moves):
            r = gens.rotation(int(movegen[m]), int(moveexp[m]))
            lin[m] = r.linear
            shift[m] = r.shift
    else:
        rads = np.array([gens[int(g)].angle.radians() * int(e)
                         for g, e in zip(movegen, moveexp)])
        cosv, sinv = np.cos(rads), np.sin(rads)
        if dim == 2:
            axes0 = np.array([[ax.x, ax.y] for ax in gens.axes()])
        else:
            axes0 = None
            base0 = np.array([ax.base for ax in gens.axes()])
            dirs0 = np.array([ax.dir for ax in gens.axes()])

    dedup = kernels.Dedup(dim, dedup_cell)
    out_points: list[np.ndarray] = []
    out_len: list[np.ndarray] = []
    out_node: list[np.ndarray] = []
    log_parent = [np.array([-1], dtype=np.int64)]
    log_gen = [np.array([-1], dtype=np.int64)]
    log_exp = [np.array([0], dtype=np.int64)]
    n_nodes = 1
    total = 0
    truncated = False

    keep0 = dedup.add_batch(P0[None, :])
    if keep0[0]:
        out_points.append(P0[None, :].copy())
        out_len.append(np.zeros(1, dtype=np.int64))
        out_node.append(np.zeros(1, dtype=np.int64))
        total = 1
    if total >= budget.max_points and budget.max_len > 0:
        truncated = True

    # frontier state
    f_points = P0[None, :]
    f_last = np.full(1, -1, dtype=np.int64)
    f_node = np.zeros(1, dtype=np.int64)
    if mode == "peripatetic":
        if dim == 2:
            f_axes = axes0[None, :, :]
        else:
            f_base = base0[None, :, :]
            f_dirs = dirs0[None, :, :]

    for depth in range(1, budget.max_len + 1):
        if truncated or len(f_points) == 0:
            break
        nxt_points, nxt_last, nxt_node = [], [], []
        nxt_axes, nxt_base, nxt_dirs = [], [], []
        for lo in range(0, len(f_points), CHUNK):
            hi = min(lo + CHUNK, len(f_points))
            if mode == "stationary":
                cpts, cpar, cmove = kernels.expand_stationary(
                    f_points[lo:hi], f_last[lo:hi], lin, shift, movegen)
            elif dim == 2:
                cpts, caxes, cpar, cmove = kernels.expand_peripatetic_2d(
                    f_points[lo:hi], f_axes[lo:hi], f_last[lo:hi],
                    cosv, sinv, movegen)
                nxt_axes.append(caxes)
            else:
                cpts, cbase, cdirs, cpar, cmove = kernels.expand_peripatetic_3d(
                    f_points[lo:hi], f_base[lo:hi], f_dirs[lo:hi],
                    f_last[lo:hi], cosv, sinv, movegen)
                nxt_base.append(cbase)
                nxt_dirs.append(cdirs)
            k = len(cpts)
            ids = np.arange(n_nodes, n_nodes + k, dtype=np.int64)
            log_parent.append(f_node[lo:hi][cpar])
            log_gen.append(movegen[cmove])
            log_exp.append(moveexp[cmove])
            n_nodes += k
            nxt_points.append(cpts)
            nxt_last.append(movegen[cmove])
            nxt_node.append(ids)

            if not truncated:
                keep = dedup.add_batch(cpts)
                kept_idx = np.nonzero(keep)[0]
                room = budget.max_points - total
                if len(kept_idx) >= room:
                    kept_idx = kept_idx[:room]
                    truncated = True
                if len(kept_idx):
                    out_points.append(cpts[kept_idx])
                    out_len.append(np.full(len(kept_idx), depth, dtype=np.int64))
                    out_node.append(ids[kept_idx])
                    total += len(kept_idx)
        if truncated:
            break
        f_points = np.concatenate(nxt_points) if nxt_points else np.empty((0, dim))
        f_last = np.concatenate(nxt_last) if nxt_last else np.empty(0, dtype=np.int64)
        f_node = np.concatenate(nxt_node) if nxt_node else np.empty(0, dtype=np.int64)
        if mode == "peripatetic":
            if dim == 2:
                f_axes = np.concatenate(nxt_axes) if nxt_axes else np.empty((0, len(gens), 2))
            else:
                f_base = np.concatenate(nxt_base) if nxt_base else np.empty((0, len(gens), 3))
                f_dirs = np.concatenate(nxt_dirs) if nxt_dirs else np.empty((0, len(gens), 3))

    log = WordLog(parent=np.concatenate(log_parent),
                  gen=np.concatenate(log_gen),
                  exp=np.concatenate(log_exp))
    points = np.concatenate(out_points) if out_points else np.empty((0, dim))
    word_len = np.concatenate(out_len) if out_len else np.empty(0, dtype=np.int64)
    node_ids = np.concatenate(out_node) if out_node else np.empty(0, dtype=np.int64)
    return OrbitCloud(dim=dim, points=points, word_len=word_len,
                      dedup_cell=dedup_cell, truncated=truncated,
                      node_ids=node_ids, log=log)


def audit_cloud(gens: GeneratorSet, cloud: OrbitCloud, P, mode: str,
                fraction: float = 0.01, seed: int = 0) -> float:
    """Recompute a sample of cloud points from their generating words through
    the words-module evaluators; returns the max deviation.  This is the
    slow, independent path that keeps the fast kernels honest."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if cloud.log is None or cloud.node_ids is None:
        raise ValueError("cloud carries no word log")
    if len(cloud) == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    k = max(1, int(len(cloud) * fraction))
    sample = rng.choice(len(cloud), size=min(k, len(cloud)), replace=False)
    P0 = np.asarray(P, dtype=np.float64)
    worst = 0.0
    for idx in sample:
        word = cloud.log.word_of(int(cloud.node_ids[idx]))
        if mode == "stationary":
            f = stationary_eval(gens, word)
        else:
            f = peripatetic_eval(gens, word).total
        dev = float(np.abs(apply_point(f, P0) - cloud.points[idx]).max())
        worst = max(worst, dev)
    return worst


# ---------------------------------------------------------------------------
# Circle gaps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapReport:
    """Circular gap structure of {j*x mod 1 : j < n} for x = angle/full turn.

    gaps lists (length, multiplicity) pairs ascending by length; lengths sum
    to 1.  Arithmetic is exact over the rational value of the double x, so
    equal gaps compare equal and the distinct count is trustworthy."""

    n: int
    gaps: tuple[tuple[float, int], ...]
    max_gap: float

    @property
    def distinct_gaps(self) -> int:
        return len(self.gaps)


def circle_gap_stats(angle: Angle, n: int) -> GapReport:
    """Gap statistics of the first n multiples of an angle on the circle."""
    if n < 1:
        raise ValueError("n must be positive")
    x = angle.radians() / (2.0 * math.pi)
    frac = Fraction(*float(x).as_integer_ratio())
    p, q = frac.numerator, frac.denominator
    positions = sorted({(j * p) % q for j in range(n)})
    m = len(positions)
    if m == 1:
        return GapReport(n=n, gaps=((1.0, 1),), max_gap=1.0)
    gap_ints = [positions[i + 1] - positions[i] for i in range(m - 1)]
    gap_ints.append(positions[0] + q - positions[-1])
    counts: dict[int, int] = {}
    for g in gap_ints:
        counts[g] = counts.get(g, 0) + 1
    gaps = tuple((g / q, c) for g, c in sorted(counts.items()))
    return GapReport(n=n, gaps=gaps, max_gap=max(gap_ints) / q)


# ---------------------------------------------------------------------------
# Ladder
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LadderStage:
    stage: int
    points: OrbitCloud
    axis_used: int
    exp_bound: int


# 1/rho this close to an integer makes floor(1/rho) numerically uncertain,
# and the construction needs the strict sandwich k*rho < 1 < (k+1)*rho.
LADDER_COND_TOL = 1e-12


def ladder_k(rho: float) -> int:
    """floor(1/rho) with an ill-conditioning guard."""
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    inv = 1.0 / rho
    if abs(inv - round(inv)) < LADDER_COND_TOL:
        raise ValueError("1/rho is too close to an integer to take floor reliably")
    k = math.floor(inv)
    if not (k * rho < 1.0 < (k + 1) * rho):
        raise ValueError("floor(1/rho) fails the strict sandwich check")
    return k


def ladder_orbit(gens: GeneratorSet, V, stages: int, mode: str = "stationary",
                 dedup_cell: float = DEDUP_CELL) -> list[LadderStage]:
    """Two-generator staircase orbit.

    Stage b applies generator 1 (odd b) or 2 (even b) with exponents
    0..2^b*k_i to every point of the previous stage, starting from {V}.
    Exponent 0 re-emits the previous stage first, so stage clouds are nested
    bit-for-bit.  Both generators must have infinite order (irrational or
    unclassified angles) -- the construction's counting needs it.
    """
    if mode != "stationary":
        raise ValueError("the ladder construction is a stationary-composition device")
    if len(gens) != 2:
        raise ValueError("ladder needs exactly 2 generators")
    if stages < 1:
        raise ValueError("stages must be positive")
    V0 = np.asarray(V, dtype=np.float64)
    if V0.shape != (gens.dim,) or not np.all(np.isfinite(V0)):
        raise ValueError(f"V must be a finite {gens.dim}-vector")
    ks = []
    for i in range(2):
        if gens[i].order.is_rational:
            raise ValueError(f"generator {i} has finite order; ladder needs infinite order")
        rho = gens[i].angle.size() / math.pi
        ks.append(ladder_k(rho))

    prev_points = V0[None, :]
    prev_len = np.zeros(1, dtype=np.int64)
    out: list[LadderStage] = []
    for b in range(1, stages + 1):
        i = 0 if b % 2 == 1 else 1
        bound = (2 ** b) * ks[i]
        dedup = kernels.Dedup(gens.dim, dedup_cell)
        pts_acc, len_acc = [], []
        for j in range(bound + 1):
            if j == 0:
                child = prev_points
                depth = prev_len
            else:
                r = gens.rotation(i, j)
                child = prev_points @ r.linear + r.shift
                depth = np.full(len(child), b, dtype=np.int64)
            keep = dedup.add_batch(child)
            if keep.any():
                pts_acc.append(child[keep])
                len_acc.append(depth[keep])
        prev_points = np.concatenate(pts_acc)
        prev_len = np.concatenate(len_acc)
        cloud = OrbitCloud(dim=gens.dim, points=prev_points, word_len=prev_len,
                           dedup_cell=dedup_cell)
        out.append(LadderStage(stage=b, points=cloud, axis_used=i, exp_bound=bound))
    return out


# ---------------------------------------------------------------------------
# Density diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityReport:
    mesh_estimate: float
    coverage_fraction: float
    probe_region: tuple[tuple[float, ...], float]
    grid_res: int


def _ball_grid(center, radius, n, dim):
    center = np.asarray(center, dtype=np.float64)
    if center.shape != (dim,):
        raise ValueError(f"probe center must be a {dim}-vector")
    if not radius > 0:
        raise ValueError("probe radius must be positive")
    if n < 1:
        raise ValueError("grid resolution must be positive")
    h = 2.0 * radius / n
    axes = [np.linspace(c - radius + h / 2, c + radius - h / 2, n) for c in center]
    mesh = np.meshgrid(*axes, indexing="ij")
    cells = np.stack([m.ravel() for m in mesh], axis=1)
    inside = np.linalg.norm(cells - center, axis=1) <= radius
    return cells, inside, h


def mesh_estimate(cloud: OrbitCloud, probe, grid_res: int) -> float:
    """Largest empty-ball radius over the probe ball, approximated from below:
    the max over a grid of candidate centers of the distance to the nearest
    cloud point."""
    if len(cloud) == 0:
        raise ValueError("mesh of an empty cloud is undefined")
    center, radius = probe
    cells, inside, _ = _ball_grid(center, radius, grid_res, cloud.dim)
    candidates = cells[inside]
    index = kernels.GridIndex(cloud.points)
    return float(index.nearest_batch(candidates).max())


def coverage(cloud: OrbitCloud, ball, n: int) -> float:
    """Fraction of in-ball grid cells holding at least one cloud point."""
    center, radius = ball
    centerv = np.asarray(center, dtype=np.float64)
    cells, inside, h = _ball_grid(center, radius, n, cloud.dim)
    total = int(inside.sum())
    if len(cloud) == 0:
        return 0.0
    lo = centerv - radius
    idx = np.floor((cloud.points - lo) / h).astype(np.int64)
    ok = np.all((idx >= 0) & (idx < n), axis=1)
    idx = idx[ok]
    if len(idx) == 0:
        return 0.0
    flat = idx[:, 0]
    for d in range(1, cloud.dim):
        flat = flat * n + idx[:, d]
    occupied = np.zeros(n ** cloud.dim, dtype=bool)
    occupied[np.unique(flat)] = True
    covered = int((occupied & inside).sum())
    return covered / total


def make_density_report(cloud: OrbitCloud, probe_center, probe_radius: float,
                        grid_res: int) -> DensityReport:
    probe = (tuple(float(v) for v in np.atleast_1d(probe_center)), float(probe_radius))
    return DensityReport(
        mesh_estimate=mesh_estimate(cloud, (probe[0], probe[1]), grid_res),
        coverage_fraction=coverage(cloud, (probe[0], probe[1]), grid_res),
        probe_region=probe,
        grid_res=grid_res,
    )


def sphere_confinement_check(cloud: OrbitCloud, V, r0: float,
                             tol: float = 1e-9) -> tuple[float, bool]:
    """Max deviation of cloud points from the sphere of radius r0 about V,
    and whether it stays within tol."""
    if cloud.dim != 3:
        raise ValueError("sphere confinement is a 3D check")
    if len(cloud) == 0:
        return 0.0, True
    V0 = np.asarray(V, dtype=np.float64)
    dev = float(np.abs(np.linalg.norm(cloud.points - V0, axis=1) - r0).max())
    return dev, dev < tol


def discreteness_report(cloud: OrbitCloud) -> tuple[int, float]:
    """(distinct point count, minimum pairwise distance); the distance is
    inf for a single-point cloud."""
    if len(cloud) == 0:
        raise ValueError("discreteness of an empty cloud is undefined")
    if len(cloud) == 1:
        return 1, math.inf
    index = kernels.GridIndex(cloud.points)
    return len(cloud), float(index.min_pairwise())
