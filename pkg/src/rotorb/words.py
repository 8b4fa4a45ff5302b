"""Reduced words over rotation generators and their two evaluation semantics.

A word is a tuple of letters (generator index, nonzero exponent) with no two
adjacent letters sharing a generator.  Evaluation comes in two flavors:

* fixed-axis: every generator always rotates about its original axis, and a
  word is the left-to-right composite of those rotations;
* transported-axis: each applied rotation carries every axis along with it,
  so later letters rotate about wherever their axis has been moved.

The two are exchanged by reversing the word (transport_isomorphism), which
the test suite exercises as a cross-check between independent code paths.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from rotorb.geometry import (
    Angle,
    AngleClass,
    Axis,
    DirectedIsometry,
    Line3,
    Point2,
    apply_point,
    axes_coincide,
    classify_angle,
    compose,
    make_rotation,
    rotation_parts,
    transform_axis,
)


@dataclass(frozen=True)
class Letter:
    """One generator power inside a word.  gen is a 0-based index into the
    generator set; exp is a nonzero integer."""

    gen: int
    exp: int

    def __post_init__(self):
        if self.gen < 0:
            raise ValueError("generator index must be nonnegative")
        if self.exp == 0:
            raise ValueError("letter exponent must be nonzero")


# A reduced word; the empty tuple is the identity.
Word = tuple[Letter, ...]


@dataclass(frozen=True)
class Generator:
    axis: Axis
    angle: Angle
    order: AngleClass

    @property
    def finite_order(self) -> int | None:
        return self.order.finite_order


@dataclass(frozen=True)
class GeneratorSet:
    dim: int
    gens: tuple[Generator, ...]

    def __len__(self) -> int:
        return len(self.gens)

    def __getitem__(self, i: int) -> Generator:
        return self.gens[i]

    def check_index(self, i: int) -> None:
        if not 0 <= i < len(self.gens):
            raise IndexError(f"generator index {i} out of range for {len(self.gens)} generators")

    def residue(self, i: int, exp: int) -> int:
        """Exponent folded into the balanced range modulo the generator's
        order; unchanged for infinite-order generators."""
        n = self.gens[i].finite_order
        if n is None:
            return exp
        return balanced_residue(exp, n)

    def exponent_range(self, i: int, max_exp: int) -> list[int]:
        """Allowed letter exponents in ascending order.  Finite-order
        generators contribute their full nonzero residue range no matter the
        cap; infinite-order generators contribute -max_exp..max_exp sans 0."""
        n = self.gens[i].finite_order
        if n is None:
            return [e for e in range(-max_exp, max_exp + 1) if e != 0]
        return [e for e in range(-((n - 1) // 2), n // 2 + 1) if e != 0]

    def rotation(self, i: int, exp: int = 1) -> DirectedIsometry:
        """The rotation for one letter.  The exponent scales the exact angle
        before any matrix is built, so r^5 is as accurate as r."""
        g = self.gens[i]
        lin, sh = rotation_parts(g.axis, exp * g.angle.radians())
        return DirectedIsometry(self.dim, lin, sh)

    def axes(self) -> tuple[Axis, ...]:
        return tuple(g.axis for g in self.gens)


def balanced_residue(exp: int, order: int) -> int:
    """exp mod order, represented in (-order/2, order/2]."""
    if order < 1:
        raise ValueError("order must be positive")
    r = exp % order
    if 2 * r > order:
        r -= order
    return r


def make_generators(dim: int, specs) -> GeneratorSet:
    """Build a generator set from (axis, angle) pairs.

    Axes must be pairwise distinct as point sets (one generator per axis) and
    every angle must be a nontrivial rotation: order Rational(1), i.e. a whole
    number of full turns, is rejected.
    """
    specs = list(specs)
    if not specs:
        raise ValueError("need at least one generator")
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    gens = []
    for axis, angle in specs:
        if axis.dim != dim:
            raise ValueError(f"axis {axis!r} does not live in dimension {dim}")
        order = classify_angle(angle)
        if order.finite_order == 1:
            raise ValueError("zero rotation cannot generate anything")
        gens.append(Generator(axis=axis, angle=angle, order=order))
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if axes_coincide(gens[i].axis, gens[j].axis):
                raise ValueError(f"generators {i} and {j} share an axis")
    return GeneratorSet(dim=dim, gens=tuple(gens))


def reduce(gens: GeneratorSet, raw) -> Word:
    """Collapse a raw letter sequence to its reduced word.

    Adjacent same-generator letters merge by exponent addition, exponents
    fold to balanced residues modulo finite orders, vanished letters drop,
    and cancellation cascades (deleting a letter can make its neighbors
    adjacent, so the process repeats until stable -- a single stack pass).
    """
    stack: list[tuple[int, int]] = []
    for lt in raw:
        gens.check_index(lt.gen)
        g, e = lt.gen, lt.exp
        if stack and stack[-1][0] == g:
            e += stack.pop()[1]
        e = gens.residue(g, e)
        if e != 0:
            stack.append((g, e))
    return tuple(Letter(g, e) for g, e in stack)


def is_reduced(gens: GeneratorSet, word) -> bool:
    for k, lt in enumerate(word):
        gens.check_index(lt.gen)
        if lt.exp == 0 or gens.residue(lt.gen, lt.exp) != lt.exp:
            return False
        if k and word[k - 1].gen == lt.gen:
            return False
    return True


def stationary_eval(gens: GeneratorSet, word) -> DirectedIsometry:
    """Left-to-right composite with every axis held fixed."""
    word = reduce(gens, word)
    total = DirectedIsometry.identity(gens.dim)
    for lt in word:
        total = compose(total, gens.rotation(lt.gen, lt.exp))
    return total


@dataclass(frozen=True)
class PeripateticTrace:
    """Everything the transported-axis evaluation saw.

    axis_history[t] is the tuple of all generator axes after t letters
    (entry 0 is the originals); point_history tracks an optional probe point
    the same way.
    """

    total: DirectedIsometry
    axis_history: tuple[tuple[Axis, ...], ...]
    point_history: tuple | None = None

    def current_axes(self) -> tuple[Axis, ...]:
        return self.axis_history[-1]


def peripatetic_eval(gens: GeneratorSet, word, track_point=None) -> PeripateticTrace:
    """Transported-axis evaluation, done literally.

    Keeps the cumulative isometry M and the current position of every axis;
    each letter rotates about its axis's current position, then that rotation
    drags all the axes along.  No use is made of the reversal shortcut, so
    agreement with stationary_eval on reversed words is a real cross-check.
    """
    word = reduce(gens, word)
    total = DirectedIsometry.identity(gens.dim)
    axes = gens.axes()
    axis_history = [axes]
    point_history = None
    if track_point is not None:
        p0 = np.asarray(track_point, dtype=float)
        point_history = [p0.copy()]
    for lt in word:
        g = gens[lt.gen]
        lin, sh = rotation_parts(axes[lt.gen], lt.exp * g.angle.radians())
        step = DirectedIsometry(gens.dim, lin, sh)
        total = compose(total, step)
        axes = tuple(transform_axis(step, ax) for ax in axes)
        axis_history.append(axes)
        if point_history is not None:
            point_history.append(apply_point(total, point_history[0]))
    return PeripateticTrace(
        total=total,
        axis_history=tuple(axis_history),
        point_history=None if point_history is None else tuple(point_history),
    )


def transport_isomorphism(word) -> Word:
    """Reversing a word exchanges the two evaluation semantics:
    peripatetic_eval(w).total acts like stationary_eval(reversed w)."""
    return tuple(reversed(tuple(word)))


def random_reduced_word(gens: GeneratorSet, max_len: int, max_exp: int, seed) -> Word:
    """Deterministic random reduced word: length uniform on 0..max_len,
    generators chosen avoiding adjacency, exponents uniform over the allowed
    range for each generator."""
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    if max_exp < 1:
        raise ValueError("max_exp must be positive")
    rng = random.Random(seed)
    limit = max_len if len(gens) > 1 else min(max_len, 1)
    length = rng.randint(0, limit)
    letters = []
    prev = -1
    for _ in range(length):
        choices = [i for i in range(len(gens)) if i != prev]
        g = rng.choice(choices)
        e = rng.choice(gens.exponent_range(g, max_exp))
        letters.append(Letter(g, e))
        prev = g
    return tuple(letters)


def format_word(word) -> str:
    """Text form with 1-based generator numbers: `1^2,2^-1,1^3`; empty word
    prints as the empty string."""
    return ",".join(f"{lt.gen + 1}^{lt.exp}" for lt in word)


def parse_word(gens: GeneratorSet, text: str) -> Word:
    """Parse the 1-based text form strictly, then reduce.

    Rejects unknown generator numbers, zero exponents, and malformed tokens.
    """
    text = "".join(text.split())
    if not text:
        return ()
    letters = []
    for token in text.split(","):
        head, sep, tail = token.partition("^")
        if not sep:
            raise ValueError(f"bad word token {token!r}: expected i^e")
        try:
            g1 = int(head)
            e = int(tail)
        except ValueError:
            raise ValueError(f"bad word token {token!r}: expected integers") from None
        if not 1 <= g1 <= len(gens):
            raise ValueError(f"bad word token {token!r}: generator {g1} not in 1..{len(gens)}")
        if e == 0:
            raise ValueError(f"bad word token {token!r}: zero exponent")
        letters.append(Letter(g1 - 1, e))
    return reduce(gens, letters)


def probe_frame(dim: int) -> np.ndarray:
    """Small affine frame used to compare isometries by their action: the
    origin plus unit points (4 points in either dimension)."""
    if dim == 2:
        return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    if dim == 3:
        return np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                         [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    raise ValueError("dim must be 2 or 3")


def frame_distance(f: DirectedIsometry, g: DirectedIsometry) -> float:
    """Max deviation of the two actions over the probe frame."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    frame = probe_frame(f.dim)
    fa = frame @ f.linear + f.shift
    ga = frame @ g.linear + g.shift
    return float(np.abs(fa - ga).max())
