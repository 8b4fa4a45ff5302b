"""Exact-tagged angles, rotation axes, and direct isometries of R^2 and R^3.

Angles carry an exactness tag (rational multiple of pi, arccos of a rational,
or raw radians) so that finite rotation orders can be decided exactly while
all matrix arithmetic stays in double precision.  Isometries act on the right:
a point is a row vector and ``P -> P @ linear + shift``, so composing
``f`` then ``g`` multiplies the linear parts in application order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

# Tolerance for geometric predicates (parallelism, incidence, skewness).
GEOMETRIC_TOL = 1e-9
# Tolerance for algebraic identities (unit directions, exact-angle checks).
ALGEBRAIC_TOL = 1e-12

# Compositions between re-orthonormalization passes.  Bounds drift in long
# products without paying an SVD on every compose.
RENORM_INTERVAL = 64

# Raw radian values are recognized as k*pi/n only up to this denominator;
# beyond it the rationality of an untagged angle is numerically undecidable.
MAX_SNAP_DENOMINATOR = 360

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Angles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Angle:
    """A rotation amount in (-pi, pi], tagged by how it is known.

    kind is one of:
      * ``"rational_pi"``  -- radians = (num/den) * pi, num/den in (-1, 1],
        stored in lowest terms.
      * ``"algebraic_cos"`` -- radians = sine_sign * arccos(cos_num/cos_den);
        sine_sign is +1 exactly when the angle lies in (0, pi).
      * ``"raw"`` -- radians given directly, wrapped into (-pi, pi].

    Use the classmethod constructors; they normalize the payloads.
    """

    kind: str
    num: int = 0
    den: int = 1
    cos_num: int = 0
    cos_den: int = 1
    sine_sign: int = 1
    raw_rad: float = 0.0

    @classmethod
    def rational_pi(cls, num: int, den: int = 1) -> "Angle":
        if den == 0:
            raise ValueError("zero denominator")
        rho = Fraction(num, den) % 2
        if rho > 1:
            rho -= 2
        return cls(kind="rational_pi", num=rho.numerator, den=rho.denominator)

    @classmethod
    def algebraic_cos(cls, cosval, sine_sign: int = 1) -> "Angle":
        c = Fraction(cosval)
        if not -1 <= c <= 1:
            raise ValueError(f"cosine {c} outside [-1, 1]")
        if sine_sign not in (1, -1):
            raise ValueError("sine_sign must be +1 or -1")
        if abs(c) == 1:
            sine_sign = 1  # angle is 0 or pi; the sign carries no information
        return cls(kind="algebraic_cos", cos_num=c.numerator,
                   cos_den=c.denominator, sine_sign=sine_sign)

    @classmethod
    def raw(cls, radians: float) -> "Angle":
        if not math.isfinite(radians):
            raise ValueError("angle must be finite")
        r = math.remainder(radians, TWO_PI)
        if r <= -math.pi:
            r = math.pi
        return cls(kind="raw", raw_rad=r)

    @property
    def rho(self) -> Fraction | None:
        """Radians / pi as an exact fraction, when the tag provides one."""
        if self.kind == "rational_pi":
            return Fraction(self.num, self.den)
        return None

    @property
    def cosval(self) -> Fraction | None:
        if self.kind == "algebraic_cos":
            return Fraction(self.cos_num, self.cos_den)
        return None

    def radians(self) -> float:
        if self.kind == "rational_pi":
            return self.num / self.den * math.pi
        if self.kind == "algebraic_cos":
            return self.sine_sign * math.acos(self.cos_num / self.cos_den)
        return self.raw_rad

    def size(self) -> float:
        return abs(self.radians())


@dataclass(frozen=True)
class AngleClass:
    """Rationality verdict for an angle: rational (with exact rotation order),
    irrational, or unknown."""

    verdict: str  # "rational" | "irrational" | "unknown"
    order: int | None = None

    @classmethod
    def rational(cls, order: int) -> "AngleClass":
        if order < 1:
            raise ValueError("order must be positive")
        return cls("rational", order)

    @classmethod
    def irrational(cls) -> "AngleClass":
        return cls("irrational")

    @classmethod
    def unknown(cls) -> "AngleClass":
        return cls("unknown")

    @property
    def is_rational(self) -> bool:
        return self.verdict == "rational"

    @property
    def finite_order(self) -> int | None:
        """Rotation order when finite, else None (infinite or undecided)."""
        return self.order if self.verdict == "rational" else None


def _order_of_rho(rho: Fraction) -> int:
    # least n >= 1 with n * rho an even integer
    p, q = rho.numerator, rho.denominator
    return 2 * q // math.gcd(p, 2 * q)


# Rational cosines of rational angles; everything else rational is ruled out
# by Niven's theorem.
_NIVEN_COS = {
    Fraction(1): Fraction(0),
    Fraction(1, 2): Fraction(1, 3),
    Fraction(0): Fraction(1, 2),
    Fraction(-1, 2): Fraction(2, 3),
    Fraction(-1): Fraction(1),
}


def classify_angle(angle: Angle) -> AngleClass:
    """Decide whether an angle is a rational multiple of pi.

    rational_pi tags are decided exactly.  algebraic_cos tags are decided by
    Niven's theorem: the only rational cosines at rational angles are
    0, +-1/2, +-1.  Raw radians are snapped to k*pi/n for n up to
    MAX_SNAP_DENOMINATOR within ALGEBRAIC_TOL, else reported unknown.
    """
    if angle.kind == "rational_pi":
        return AngleClass.rational(_order_of_rho(angle.rho))
    if angle.kind == "algebraic_cos":
        c = angle.cosval
        if c in _NIVEN_COS:
            return AngleClass.rational(_order_of_rho(_NIVEN_COS[c]))
        return AngleClass.irrational()
    rad = angle.raw_rad
    for n in range(1, MAX_SNAP_DENOMINATOR + 1):
        k = round(rad * n / math.pi)
        if abs(rad - k * math.pi / n) <= ALGEBRAIC_TOL:
            return AngleClass.rational(_order_of_rho(Fraction(k, n)))
    return AngleClass.unknown()


# ---------------------------------------------------------------------------
# Axes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Point2:
    """Rotation center in the plane."""

    x: float
    y: float

    @property
    def dim(self) -> int:
        return 2

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True)
class Line3:
    """Directed line in 3-space: base point plus unit direction.

    The direction must already be unit length (within ALGEBRAIC_TOL); it is
    never renormalized silently.  Use Line3.through to build a line from two
    points with an explicit normalization.
    """

    base: tuple[float, float, float]
    dir: tuple[float, float, float]

    def __post_init__(self):
        b = tuple(float(v) for v in self.base)
        d = tuple(float(v) for v in self.dir)
        if len(b) != 3 or len(d) != 3:
            raise ValueError("Line3 needs 3-vectors")
        n = math.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
        if abs(n - 1.0) > ALGEBRAIC_TOL:
            raise ValueError(f"direction must be unit length, got |d| = {n!r}")
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "dir", d)

    @classmethod
    def through(cls, p, q) -> "Line3":
        """Directed line from p toward q (explicitly normalized)."""
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        d = q - p
        n = float(np.linalg.norm(d))
        if n < GEOMETRIC_TOL:
            raise ValueError("points too close to define a line")
        return cls(base=tuple(p), dir=tuple(d / n))

    @property
    def dim(self) -> int:
        return 3

    def base_array(self) -> np.ndarray:
        return np.array(self.base, dtype=float)

    def dir_array(self) -> np.ndarray:
        return np.array(self.dir, dtype=float)

    def reversed(self) -> "Line3":
        return Line3(self.base, tuple(-v for v in self.dir))


Axis = Point2 | Line3


def same_directed_line(a: Line3, b: Line3, tol: float = GEOMETRIC_TOL) -> bool:
    """Same carrier line and same direction sign."""
    da, db = a.dir_array(), b.dir_array()
    if np.linalg.norm(np.cross(da, db)) > tol or float(da @ db) < 0:
        return False
    off = b.base_array() - a.base_array()
    return bool(np.linalg.norm(np.cross(off, da)) <= tol)


def same_undirected_line(a: Line3, b: Line3, tol: float = GEOMETRIC_TOL) -> bool:
    return same_directed_line(a, b, tol) or same_directed_line(a, b.reversed(), tol)


def axes_coincide(a: Axis, b: Axis, tol: float = GEOMETRIC_TOL) -> bool:
    """True when two axes are the same point set (direction sign ignored)."""
    if isinstance(a, Point2) and isinstance(b, Point2):
        return max(abs(a.x - b.x), abs(a.y - b.y)) <= tol
    if isinstance(a, Line3) and isinstance(b, Line3):
        return same_undirected_line(a, b, tol)
    return False


# ---------------------------------------------------------------------------
# Direct isometries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectedIsometry:
    """Orientation-preserving rigid motion acting on row vectors.

    ``P -> P @ linear + shift``; linear is orthogonal with determinant +1
    (checked at construction within GEOMETRIC_TOL).  ``age`` counts composes
    since the last re-orthonormalization and does not affect value equality.
    """

    dim: int
    linear: np.ndarray
    shift: np.ndarray
    age: int = field(default=0, compare=False)

    def __post_init__(self):
        lin = np.array(self.linear, dtype=float)
        sh = np.array(self.shift, dtype=float)
        d = self.dim
        if lin.shape != (d, d) or sh.shape != (d,):
            raise ValueError(f"expected ({d},{d}) linear part and ({d},) shift")
        if not np.allclose(lin.T @ lin, np.eye(d), atol=GEOMETRIC_TOL):
            raise ValueError("linear part is not orthogonal")
        if abs(np.linalg.det(lin) - 1.0) > GEOMETRIC_TOL:
            raise ValueError("determinant is not +1 (indirect isometry rejected)")
        lin.setflags(write=False)
        sh.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "shift", sh)

    @classmethod
    def identity(cls, dim: int) -> "DirectedIsometry":
        return cls(dim, np.eye(dim), np.zeros(dim))

    def __eq__(self, other):
        if not isinstance(other, DirectedIsometry):
            return NotImplemented
        return (self.dim == other.dim
                and np.array_equal(self.linear, other.linear)
                and np.array_equal(self.shift, other.shift))


def _reorthonormalize(lin: np.ndarray) -> np.ndarray:
    # nearest orthogonal matrix; input is within rounding of a rotation,
    # so the determinant sign is preserved
    u, _, vt = np.linalg.svd(lin)
    return u @ vt


def compose(f: DirectedIsometry, g: DirectedIsometry) -> DirectedIsometry:
    """Isometry that applies f first, then g: P(f then g) = (Pf)g."""
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")
    lin = f.linear @ g.linear
    sh = f.shift @ g.linear + g.shift
    age = f.age + g.age + 1
    if age >= RENORM_INTERVAL:
        lin = _reorthonormalize(lin)
        age = 0
    return DirectedIsometry(f.dim, lin, sh, age=age)


def inverse(f: DirectedIsometry) -> DirectedIsometry:
    lin = f.linear.T
    return DirectedIsometry(f.dim, lin, -f.shift @ lin, age=f.age)


def apply_point(f: DirectedIsometry, point) -> np.ndarray:
    p = np.asarray(point, dtype=float)
    if p.shape != (f.dim,):
        raise ValueError(f"point shape {p.shape} does not match dim {f.dim}")
    return p @ f.linear + f.shift


def apply_points(f: DirectedIsometry, points) -> np.ndarray:
    """Batched right action on an (N, dim) array."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != f.dim:
        raise ValueError(f"points shape {pts.shape} does not match dim {f.dim}")
    return pts @ f.linear + f.shift


def rotation_parts(axis: Axis, radians: float) -> tuple[np.ndarray, np.ndarray]:
    """(linear, shift) of the rotation by `radians` about `axis`.

    Positive angles rotate counterclockwise: in the plane in the usual
    orientation, in space by the right-hand rule about the line's direction.
    """
    c, s = math.cos(radians), math.sin(radians)
    if isinstance(axis, Point2):
        lin = np.array([[c, s], [-s, c]])
        center = axis.as_array()
    elif isinstance(axis, Line3):
        u = axis.dir_array()
        k = np.array([[0.0, -u[2], u[1]],
                      [u[2], 0.0, -u[0]],
                      [-u[1], u[0], 0.0]])
        lin = c * np.eye(3) + (1.0 - c) * np.outer(u, u) - s * k
        center = axis.base_array()
    else:
        raise TypeError(f"not an axis: {axis!r}")
    return lin, center - center @ lin


def make_rotation(axis: Axis, angle: Angle) -> DirectedIsometry:
    """Rotation about an axis; fixes the axis pointwise."""
    lin, sh = rotation_parts(axis, angle.radians())
    return DirectedIsometry(axis.dim, lin, sh)


def transform_axis(f: DirectedIsometry, axis: Axis) -> Axis:
    """Image of an axis under an isometry.

    A Line3 direction is mapped by the linear part alone and renormalized:
    the orthogonal action preserves its length exactly, so the division only
    strips float drift and never changes the direction.
    """
    if isinstance(axis, Point2):
        if f.dim != 2:
            raise ValueError("2D axis under non-2D isometry")
        x, y = apply_point(f, axis.as_array())
        return Point2(float(x), float(y))
    if f.dim != 3:
        raise ValueError("3D axis under non-3D isometry")
    base = apply_point(f, axis.base_array())
    d = axis.dir_array() @ f.linear
    d = d / np.linalg.norm(d)
    return Line3(tuple(base), tuple(d))


# ---------------------------------------------------------------------------
# Line relations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineRelation:
    kind: str  # "parallel" | "intersecting" | "skew"
    point: tuple[float, float, float] | None = None
    coincident: bool = False


def line_relation(l1: Line3, l2: Line3, tol: float = GEOMETRIC_TOL) -> LineRelation:
    """Classify a pair of lines in space as parallel, intersecting, or skew.

    Identical carrier lines are reported as parallel with coincident=True.
    Intersecting lines carry the common point.
    """
    d1, d2 = l1.dir_array(), l2.dir_array()
    b1, b2 = l1.base_array(), l2.base_array()
    cross = np.cross(d1, d2)
    cn = float(np.linalg.norm(cross))
    off = b2 - b1
    if cn <= tol:
        coincident = bool(np.linalg.norm(np.cross(off, d1)) <= tol)
        return LineRelation("parallel", coincident=coincident)
    if abs(float(off @ cross)) / cn > tol:
        return LineRelation("skew")
    t1 = float(np.cross(off, d2) @ cross) / (cn * cn)
    p = b1 + t1 * d1
    return LineRelation("intersecting", point=tuple(p))


# Largest denominator considered when deciding whether a floating cosine is
# "really" a rational number; every float is rational, so an unbounded search
# would defeat the Unknown fallback.
MAX_COS_DENOMINATOR = 1000


def conform_rationally(a, b) -> AngleClass:
    """Rationality of the angle two line directions form when translated to
    meet.

    Accepts Line3 values or bare direction vectors (2 or 3 components).
    When the cosine of the angle is within ALGEBRAIC_TOL of a rational with
    denominator at most MAX_COS_DENOMINATOR, the verdict comes from the
    rational-cosine classification; otherwise Unknown.  Parallel directions
    are rejected.
    """
    da = a.dir_array() if isinstance(a, Line3) else np.asarray(a, dtype=float)
    db = b.dir_array() if isinstance(b, Line3) else np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(da), np.linalg.norm(db)
    if na < GEOMETRIC_TOL or nb < GEOMETRIC_TOL:
        raise ValueError("zero direction")
    cosv = float(da @ db) / (na * nb)
    cosv = max(-1.0, min(1.0, cosv))
    if 1.0 - abs(cosv) <= GEOMETRIC_TOL:
        raise ValueError("parallel lines form no angle")
    frac = Fraction(cosv).limit_denominator(MAX_COS_DENOMINATOR)
    if abs(frac - Fraction(cosv)) <= ALGEBRAIC_TOL:
        return classify_angle(Angle.algebraic_cos(frac))
    return AngleClass.unknown()
