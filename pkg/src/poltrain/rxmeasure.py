"""Convolution semiring of finite atomic measures on the positive reals.

An ``RxMeasure`` is a finite nonnegative measure on the multiplicative
group of positive reals, stored as exact rational atoms ``t -> w``.  The
normal form keeps at most one atom per location and no zero masses, so
every semiring law is a decidable equality of normal forms.  Both the
total mass and the first moment ``sum(t*w)`` are automatically finite.

Only :func:`mellin` leaves exact arithmetic (it returns a complex float).
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ValidationError
from .rational import fraction_from_str, fraction_to_str


class RxMeasure:
    """Finite atomic measure on the positive reals, exact and immutable."""

    __slots__ = ("_atoms",)

    def __init__(self, atoms: Mapping[Fraction, Fraction] | Iterable[tuple[Fraction, Fraction]] = ()):
        merged: dict[Fraction, Fraction] = {}
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        for t, w in items:
            t = Fraction(t)
            w = Fraction(w)
            if t <= 0:
                raise ValidationError(f"atom location must be positive, got {t}")
            if w < 0:
                raise ValidationError(f"atom mass must be nonnegative, got {w}")
            if w:
                merged[t] = merged.get(t, Fraction(0)) + w
        object.__setattr__(self, "_atoms", tuple(sorted((t, w) for t, w in merged.items() if w)))

    def __setattr__(self, name, value):
        raise AttributeError("RxMeasure is immutable")

    @property
    def atoms(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return self._atoms

    def __eq__(self, other) -> bool:
        return isinstance(other, RxMeasure) and self._atoms == other._atoms

    def __hash__(self) -> int:
        return hash(self._atoms)

    def __len__(self) -> int:
        return len(self._atoms)

    def __repr__(self) -> str:
        body = ", ".join(f"{t}: {w}" for t, w in self._atoms)
        return f"RxMeasure({{{body}}})"

    def to_json(self) -> dict:
        return {"atoms": [{"t": fraction_to_str(t), "w": fraction_to_str(w)} for t, w in self._atoms]}

    @classmethod
    def from_json(cls, data: dict) -> "RxMeasure":
        return cls((fraction_from_str(a["t"]), fraction_from_str(a["w"])) for a in data["atoms"])


ZERO = RxMeasure()


def delta(t: Fraction) -> RxMeasure:
    """Unit mass at ``t``; ``delta(1)`` is the convolution unit."""
    t = Fraction(t)
    if t <= 0:
        raise ValidationError(f"delta location must be positive, got {t}")
    return RxMeasure({t: Fraction(1)})


def mass(a: RxMeasure) -> Fraction:
    return sum((w for _, w in a.atoms), Fraction(0))


def moment(a: RxMeasure) -> Fraction:
    """First moment ``sum(t*w)``, the mass of :func:`tmul`."""
    return sum((t * w for t, w in a.atoms), Fraction(0))


def convolve(a: RxMeasure, b: RxMeasure) -> RxMeasure:
    """Multiplicative convolution: atom pairs multiply locations and masses.

    Both mass and moment are multiplicative under this product.
    """
    out: dict[Fraction, Fraction] = {}
    for t1, w1 in a.atoms:
        for t2, w2 in b.atoms:
            t = t1 * t2
            out[t] = out.get(t, Fraction(0)) + w1 * w2
    return RxMeasure(out)


def add(a: RxMeasure, b: RxMeasure) -> RxMeasure:
    out = dict(a.atoms)
    for t, w in b.atoms:
        out[t] = out.get(t, Fraction(0)) + w
    return RxMeasure(out)


def scale(a: RxMeasure, c: Fraction) -> RxMeasure:
    c = Fraction(c)
    if c < 0:
        raise ValidationError(f"scale factor must be nonnegative, got {c}")
    return RxMeasure({t: w * c for t, w in a.atoms})


def tmul(a: RxMeasure) -> RxMeasure:
    """Multiply by the density ``t``: atom rule ``(t, w) -> (t, w*t)``."""
    return RxMeasure({t: w * t for t, w in a.atoms})


def flip_invert(a: RxMeasure) -> RxMeasure:
    """Pushforward under ``t -> 1/t``; an involution."""
    return RxMeasure({1 / t: w for t, w in a.atoms})


def mellin(a: RxMeasure, r: float, s: float) -> complex:
    """Evaluate ``sum(w * t**(r + i*s))`` at one point of the unit strip.

    ``t**(i*s)`` uses the principal real logarithm; ``t > 0`` keeps it
    unambiguous.  Multiplicative over :func:`convolve`.
    """
    if not 0 <= r <= 1:
        raise ValidationError(f"strip coordinate r must lie in [0, 1], got {r}")
    total = 0j
    for t, w in a.atoms:
        lt = math.log(t)
        total += float(w) * cmath.exp(complex(r * lt, s * lt))
    return total
