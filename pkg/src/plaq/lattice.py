"""Pure geometry of the integer lattice Z^d.

Sites are plain integer tuples.  A bond is stored in canonical form as
(base, axis), joining ``base`` and ``base + e_axis``; every unordered
nearest-neighbour pair has exactly one canonical form.  A plaquette (closed
unit (d-1)-cube that is a face of some lattice unit cube) is stored as the
unique bond crossing it, so Bond <-> Plaquette is a bijection and plaquette
geometry is reconstructed on demand.

Coordinates are assumed to fit in 32 bits; nothing here enforces that in hot
paths, but the samplers encode coordinates with a 2^31 offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

Site = tuple[int, ...]


class Bond(NamedTuple):
    """Canonical bond joining ``base`` and ``base + e_axis``."""

    base: Site
    axis: int

    @property
    def other(self) -> Site:
        x = list(self.base)
        x[self.axis] += 1
        return tuple(x)

    @property
    def midpoint(self) -> tuple[float, ...]:
        return tuple(c + (0.5 if i == self.axis else 0.0)
                     for i, c in enumerate(self.base))


class Plaquette(NamedTuple):
    """A plaquette, identified by the unique bond that crosses it."""

    dual_bond: Bond

    @property
    def center(self) -> tuple[float, ...]:
        return self.dual_bond.midpoint


def bond_between(x: Site, y: Site) -> Bond:
    """Canonical bond for the unordered nearest-neighbour pair {x, y}."""
    diff_axis = -1
    for i, (a, b) in enumerate(zip(x, y)):
        if a != b:
            if diff_axis >= 0 or abs(a - b) != 1:
                raise ValueError(f"sites {x} and {y} are not nearest neighbours")
            diff_axis = i
    if diff_axis < 0:
        raise ValueError(f"sites {x} and {y} are not nearest neighbours")
    base = x if x[diff_axis] < y[diff_axis] else y
    return Bond(base, diff_axis)


def dual_plaquette(e: Bond) -> Plaquette:
    """The unique plaquette crossed by bond e."""
    return Plaquette(e)


def dual_bond(p: Plaquette) -> Bond:
    """The unique bond crossing plaquette p (inverse of dual_plaquette)."""
    return p.dual_bond


def l1_norm(x: Sequence[int]) -> int:
    return sum(abs(c) for c in x)


def s_sum(x: Sequence[int]) -> int:
    """Hyperplane coordinate: the plain coordinate sum."""
    return sum(x)


def neighbors(x: Site) -> list[Site]:
    """The 2d nearest neighbours, axis ascending, minus before plus."""
    out = []
    for i in range(len(x)):
        for delta in (-1, 1):
            y = list(x)
            y[i] += delta
            out.append(tuple(y))
    return out


def precedes(y: Sequence[int], x: Sequence[int]) -> bool:
    """True iff y lies in the closed coordinate cuboid spanned by 0 and x."""
    return all(abs(b) <= abs(a) and a * b >= 0 for a, b in zip(x, y))


def rad_of(points: Iterable[Sequence[float]]) -> float:
    """Max l1 norm over a nonempty collection of points."""
    best = None
    for pt in points:
        r = sum(abs(c) for c in pt)
        if best is None or r > best:
            best = r
    if best is None:
        raise ValueError("rad_of of an empty collection")
    return best


@dataclass(frozen=True)
class Cone:
    """Cone K_{a,b}: sites with x_1 >= 0 and a*x_1 <= x_j <= b*x_1 (j >= 2).

    b may be None, meaning +infinity.  Bounds are exact rationals so that
    membership at the cone boundary is never misclassified.
    """

    a: Fraction
    b: Fraction | None

    def __post_init__(self):
        a = Fraction(self.a)
        b = None if self.b is None else Fraction(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a < 0:
            raise ValueError("cone lower slope must be >= 0")
        if b is not None and not a < b:
            raise ValueError("cone requires a < b")


def in_cone(x: Sequence[int], cone: Cone) -> bool:
    """Exact rational membership test for K_{a,b}."""
    x1 = x[0]
    if x1 < 0:
        return False
    for xj in x[1:]:
        if cone.a * x1 > xj:
            return False
        if cone.b is not None and xj > cone.b * x1:
            return False
    return True
