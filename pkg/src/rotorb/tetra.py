"""The regular tetrahedron, its six edge rotations, and tumbling experiments.

Tumbling rolls the solid over an edge: a rotation about the edge line by the
supplement of the dihedral angle (whose cosine is -1/3), applied with
transported axes so the edges travel with the solid.  The hexagon explorer
seeds a plane from a barycenter triple and reports the in-plane structure of
a peripatetic orbit without judging what pattern it forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from rotorb.geometry import (
    GEOMETRIC_TOL,
    Angle,
    DirectedIsometry,
    Line3,
    apply_point,
    compose,
    rotation_parts,
    transform_axis,
)
from rotorb.orbit import SamplerBudget, bfs_orbit
from rotorb.words import (
    GeneratorSet,
    Letter,
    Word,
    make_generators,
    peripatetic_eval,
    reduce,
)
from rotorb import kernels

VERTEX_LABELS = ("A", "B", "C", "D")

# unit template: even-sign corners of the cube, ordered for positive volume
_TEMPLATE = np.array([
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [-1.0, 1.0, -1.0],
])

EDGE_KEYS = (("A", "B"), ("A", "C"), ("A", "D"),
             ("B", "C"), ("B", "D"), ("C", "D"))

# points farther than this from the seed plane are outside the hexagon slab
HEX_SLAB_TOL = 1e-6


@dataclass(frozen=True)
class Tetrahedron:
    """A regular tetrahedron with labeled vertices A, B, C, D.

    All six pairwise vertex distances must equal edge_length (within 1e-9)
    and the labeling must be positively oriented (signed volume > 0)."""

    vertices: np.ndarray
    edge_length: float

    def __post_init__(self):
        verts = np.ascontiguousarray(self.vertices, dtype=np.float64)
        if verts.shape != (4, 3):
            raise ValueError("need four 3D vertices")
        if not self.edge_length > 0:
            raise ValueError("edge_length must be positive")
        for i in range(4):
            for j in range(i + 1, 4):
                d = float(np.linalg.norm(verts[i] - verts[j]))
                if abs(d - self.edge_length) > GEOMETRIC_TOL:
                    raise ValueError(
                        f"edge {VERTEX_LABELS[i]}{VERTEX_LABELS[j]} has length {d}, "
                        f"expected {self.edge_length}")
        vol = float(np.linalg.det(verts[1:] - verts[0])) / 6.0
        if vol <= 0:
            raise ValueError("vertex labeling must have positive signed volume")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    def vertex(self, label: str) -> np.ndarray:
        return self.vertices[VERTEX_LABELS.index(label)]

    def barycenter(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


def regular_tetrahedron(edge_length: float) -> Tetrahedron:
    """Regular tetrahedron on alternating cube corners, barycenter at the
    origin.  Edge sqrt(6) puts the vertices at (sqrt(3)/2)(+-1,+-1,+-1)."""
    if not edge_length > 0:
        raise ValueError("edge_length must be positive")
    scale = edge_length / (2.0 * math.sqrt(2.0))
    return Tetrahedron(vertices=scale * _TEMPLATE, edge_length=float(edge_length))


def _edge_frame(verts: np.ndarray, i: int, j: int, k: int):
    # component of (vertex k - vertex i) perpendicular to edge i->j
    e = verts[j] - verts[i]
    e = e / np.linalg.norm(e)
    w = verts[k] - verts[i]
    return w - (w @ e) * e


def dihedral_cos(verts: np.ndarray, i: int, j: int, k: int, m: int) -> float:
    """Cosine of the angle between faces (i,j,k) and (i,j,m) along edge ij,
    measured inside the solid."""
    v1 = _edge_frame(verts, i, j, k)
    v2 = _edge_frame(verts, i, j, m)
    return float(v1 @ v2 / (np.linalg.norm(v1) * np.linalg.norm(v2)))


def dihedral_angle(t: Tetrahedron) -> Angle:
    """The face-to-face angle, as the exact arccos(1/3), cross-checked
    numerically against the vertex coordinates."""
    got = dihedral_cos(t.vertices, 0, 1, 2, 3)
    if abs(got - 1.0 / 3.0) > GEOMETRIC_TOL:
        raise ValueError(f"dihedral cosine {got} is not 1/3; degenerate input?")
    return Angle.algebraic_cos(Fraction(1, 3), sine_sign=1)


def edge_supplement_angle() -> Angle:
    """Rotation size of one tumble: pi minus the dihedral angle."""
    return Angle.algebraic_cos(Fraction(-1, 3), sine_sign=1)


@dataclass(frozen=True)
class EdgeRotation:
    axis: Line3
    angle: Angle
    flipped: bool  # True when the rolling convention reversed U->V


@dataclass(frozen=True)
class EdgeRotationSet:
    """The six tumbling rotations, keyed by vertex-label pair.

    Each axis runs along one edge and the angle is the dihedral supplement.
    The direction sign follows the rolling convention: the positive rotation
    about edge {U,V} carries the lexicographically larger opposite vertex
    into the plane of the face containing the smaller one.  `flipped` records
    when that reversed the natural U->V direction."""

    entries: dict

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, key) -> EdgeRotation:
        return self.entries[canonical_edge_key(key)]

    def keys(self):
        return EDGE_KEYS

    def index_of(self, key) -> int:
        return EDGE_KEYS.index(canonical_edge_key(key))

    def to_generator_set(self) -> GeneratorSet:
        return make_generators(3, [(self.entries[k].axis, self.entries[k].angle)
                                   for k in EDGE_KEYS])


def canonical_edge_key(key) -> tuple[str, str]:
    if isinstance(key, str):
        parts = tuple(key)
    else:
        parts = tuple(key)
    if (len(parts) != 2 or parts[0] not in VERTEX_LABELS
            or parts[1] not in VERTEX_LABELS or parts[0] == parts[1]):
        raise ValueError(f"unknown edge key {key!r}; use two distinct labels like AB")
    return (parts[0], parts[1]) if parts[0] < parts[1] else (parts[1], parts[0])


def _in_plane(p, a, b, c, tol=GEOMETRIC_TOL) -> bool:
    n = np.cross(b - a, c - a)
    n = n / np.linalg.norm(n)
    return abs(float((p - a) @ n)) <= tol


def edge_rotations(t: Tetrahedron) -> EdgeRotationSet:
    """The six edge rotations with the rolling sign convention baked in."""
    ang = edge_supplement_angle()
    rad = ang.radians()
    entries = {}
    for u, v in EDGE_KEYS:
        others = sorted(set(VERTEX_LABELS) - {u, v})
        w1, w2 = others  # w1 lexicographically smaller
        U, V = t.vertex(u), t.vertex(v)
        P1, P2 = t.vertex(w1), t.vertex(w2)
        axis = Line3.through(U, V)
        lin, sh = rotation_parts(axis, rad)
        image = t.vertex(w2) @ lin + sh
        if _in_plane(image, U, V, P1):
            entries[(u, v)] = EdgeRotation(axis=axis, angle=ang, flipped=False)
            continue
        axis = Line3.through(V, U)
        lin, sh = rotation_parts(axis, rad)
        image = t.vertex(w2) @ lin + sh
        if not _in_plane(image, U, V, P1):
            raise AssertionError("neither direction satisfies the rolling convention")
        entries[(u, v)] = EdgeRotation(axis=axis, angle=ang, flipped=True)
    return EdgeRotationSet(entries=entries)


# ---------------------------------------------------------------------------
# Tumbling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TumbleTrace:
    """Step-by-step record of a tumble sequence.

    Histories include the starting state, so each has len(steps)+1 entries.
    Axes are the current edge lines keyed like the rotation set."""

    total: DirectedIsometry
    vertex_history: np.ndarray  # (steps+1, 4, 3)
    point_history: np.ndarray  # (steps+1, 3)
    axes_history: tuple  # per step: dict key -> Line3
    steps: tuple  # ((key, sign), ...)

    def current_vertices(self) -> np.ndarray:
        return self.vertex_history[-1]


def parse_tumble_steps(spec) -> tuple:
    """Normalize a tumble program: items are 'AB', '-AB', or (key, sign)."""
    steps = []
    for item in spec:
        if isinstance(item, str):
            token = item.strip()
            sign = 1
            if token.startswith("-"):
                sign = -1
                token = token[1:]
            elif token.startswith("+"):
                token = token[1:]
            steps.append((canonical_edge_key(token), sign))
        else:
            key, sign = item
            if sign not in (1, -1):
                raise ValueError(f"tumble sign must be +-1, got {sign!r}")
            steps.append((canonical_edge_key(key), int(sign)))
    return tuple(steps)


def tumble(t: Tetrahedron, P, edges) -> TumbleTrace:
    """Roll the tetrahedron through a sequence of signed edge moves.

    Each move rotates about the named edge's *current* line (axes ride along
    with the solid), by plus or minus the dihedral supplement.  Unlike word
    evaluation, consecutive moves over the same edge are applied literally,
    so a roll followed by its inverse shows up as two steps that cancel."""
    steps = parse_tumble_steps(edges)
    rots = edge_rotations(t)
    rad = edge_supplement_angle().radians()
    P0 = np.asarray(P, dtype=np.float64)
    if P0.shape != (3,):
        raise ValueError("P must be a 3-vector")

    total = DirectedIsometry.identity(3)
    axes = {k: rots[k].axis for k in EDGE_KEYS}
    verts = t.vertices.copy()
    vert_hist = [verts.copy()]
    point_hist = [P0.copy()]
    axes_hist = [dict(axes)]
    for key, sign in steps:
        lin, sh = rotation_parts(axes[key], sign * rad)
        step = DirectedIsometry(3, lin, sh)
        total = compose(total, step)
        verts = verts @ step.linear + step.shift
        axes = {k: transform_axis(step, ax) for k, ax in axes.items()}
        vert_hist.append(verts.copy())
        point_hist.append(apply_point(total, P0))
        axes_hist.append(dict(axes))
    return TumbleTrace(total=total,
                       vertex_history=np.array(vert_hist),
                       point_history=np.array(point_hist),
                       axes_history=tuple(axes_hist),
                       steps=steps)


# ---------------------------------------------------------------------------
# Hexagon explorer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HexReport:
    """In-plane orbit structure near the seed-triple plane.

    Reports raw nearest-neighbor statistics only; it never decides what
    tiling (if any) the points form."""

    plane_point: tuple | None
    plane_normal: tuple | None
    seed_triple: tuple
    in_plane_points: np.ndarray
    nn_histogram: tuple  # ((distance, count), ...) ascending
    min_nn_distance: float
    point_count: int
    slab_tol: float
    budget: SamplerBudget
    degenerate: bool = False
    warnings: tuple = ()
    in_plane_word_len: np.ndarray | None = None


def hexagon_report(t: Tetrahedron, f: Word, budget: SamplerBudget,
                   P=None, dedup_cell: float = 1e-6) -> HexReport:
    """Explore the orbit slice through the plane seeded by
    (Pf, Pf*r_AB, Pf*r_AC) under transported-axis evaluation."""
    warnings = []
    if abs(t.edge_length - math.sqrt(6.0)) > GEOMETRIC_TOL:
        warnings.append(
            f"edge length {t.edge_length} differs from sqrt(6); "
            "reference statements assume sqrt(6)")
    bary = t.barycenter()
    if P is None:
        P0 = bary
    else:
        P0 = np.asarray(P, dtype=np.float64)
        if np.abs(P0 - bary).max() > GEOMETRIC_TOL:
            warnings.append("P is not the barycenter; seed-plane geometry then varies")
    rots = edge_rotations(t)
    gens = rots.to_generator_set()
    f = reduce(gens, f)
    fw = peripatetic_eval(gens, f).total
    seed = [apply_point(fw, P0)]
    for key in (("A", "B"), ("A", "C")):
        idx = rots.index_of(key)
        ext = reduce(gens, tuple(f) + (Letter(idx, 1),))
        seed.append(apply_point(peripatetic_eval(gens, ext).total, P0))
    seed = np.array(seed)

    n = np.cross(seed[1] - seed[0], seed[2] - seed[0])
    nn = float(np.linalg.norm(n))
    if nn < GEOMETRIC_TOL:
        return HexReport(plane_point=None, plane_normal=None,
                         seed_triple=tuple(map(tuple, seed)),
                         in_plane_points=np.empty((0, 3)),
                         nn_histogram=(), min_nn_distance=math.inf,
                         point_count=0, slab_tol=HEX_SLAB_TOL, budget=budget,
                         degenerate=True, warnings=tuple(warnings),
                         in_plane_word_len=np.empty(0, dtype=np.int64))
    n = n / nn

    cloud = bfs_orbit(gens, P0, "peripatetic", budget, dedup_cell=dedup_cell)
    dist = np.abs((cloud.points - seed[0]) @ n)
    mask = dist < HEX_SLAB_TOL
    in_plane = cloud.points[mask]

    if len(in_plane) >= 2:
        index = kernels.GridIndex(in_plane)
        nnd = np.array([index.nearest_dist(in_plane[i], exclude=i)
                        for i in range(len(in_plane))])
        rounded = np.round(nnd, 6)
        values, counts = np.unique(rounded, return_counts=True)
        hist = tuple((float(v), int(c)) for v, c in zip(values, counts))
        min_nn = float(nnd.min())
    else:
        hist = ()
        min_nn = math.inf
    return HexReport(plane_point=tuple(seed[0]), plane_normal=tuple(n),
                     seed_triple=tuple(map(tuple, seed)),
                     in_plane_points=in_plane,
                     nn_histogram=hist, min_nn_distance=min_nn,
                     point_count=int(len(in_plane)), slab_tol=HEX_SLAB_TOL,
                     budget=budget, degenerate=False, warnings=tuple(warnings),
                     in_plane_word_len=cloud.word_len[mask])


# ---------------------------------------------------------------------------
# Irregular input (experimental)
# ---------------------------------------------------------------------------

def irregular_edge_supplements(vertices) -> dict:
    """Per-edge supplement angles for an arbitrary nondegenerate tetrahedron.

    Accepts any four vertices with nonzero volume and returns raw-radian
    angles (pi minus each edge's dihedral).  Input flexibility only: none of
    the regular-tetrahedron statements are claimed for these."""
    verts = np.asarray(vertices, dtype=np.float64)
    if verts.shape != (4, 3):
        raise ValueError("need four 3D vertices")
    vol = float(np.linalg.det(verts[1:] - verts[0])) / 6.0
    if abs(vol) < GEOMETRIC_TOL:
        raise ValueError("degenerate tetrahedron (coplanar vertices)")
    out = {}
    for u, v in EDGE_KEYS:
        i, j = VERTEX_LABELS.index(u), VERTEX_LABELS.index(v)
        k, m = [x for x in range(4) if x not in (i, j)]
        c = dihedral_cos(verts, i, j, k, m)
        out[(u, v)] = Angle.raw(math.pi - math.acos(max(-1.0, min(1.0, c))))
    return out
