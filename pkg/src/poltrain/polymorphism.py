"""The category of polymorphisms of finite atomic measure spaces.

A polymorphism ``X -> Y`` is a measure on ``X x Y x R^x`` subject to two
marginal conditions, stored as exact rational atoms ``(x, y, t, m)``:

  condition 1: for every source atom ``x``, the masses at ``x`` sum to
      the source weight of ``x``;
  condition 2: for every destination atom ``y``, the t-weighted masses
      at ``y`` sum to the destination weight of ``y``.

Composition is a matrix product over the convolution semiring of atomic
measures on the positive reals, realised directly on atoms; the adjoint
``star`` flips the two space factors and inverts the third coordinate
while multiplying masses by it.  Everything except :func:`distance` is
exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping

from . import dudley, rxmeasure
from .errors import ValidationError
from .finspace import FinSpace, Partition, quotient
from .rational import fraction_from_str, fraction_to_str
from .rxmeasure import RxMeasure

Atom = tuple[str, str, Fraction, Fraction]


class Polymorphism:
    """Atomic measure on ``src x dst x R^x`` in normal form.

    The constructor merges atoms sharing ``(x, y, t)`` and drops zero
    masses; it checks labels and positivity but not the marginal
    conditions, so invalid candidates can be built and handed to
    :func:`validate`.
    """

    def __init__(self, src: FinSpace, dst: FinSpace, atoms: Iterable[tuple]):
        merged: dict[tuple[str, str, Fraction], Fraction] = {}
        for x, y, t, m in atoms:
            x, y, t, m = str(x), str(y), Fraction(t), Fraction(m)
            if t <= 0:
                raise ValidationError(f"atom at ({x}, {y}) has nonpositive derivative {t}")
            if m < 0:
                raise ValidationError(f"atom at ({x}, {y}) has negative mass {m}")
            if x not in src.weights:
                raise ValidationError(f"atom source label {x!r} not in the source space")
            if y not in dst.weights:
                raise ValidationError(f"atom destination label {y!r} not in the destination space")
            if m:
                key = (x, y, t)
                merged[key] = merged.get(key, Fraction(0)) + m
        self._src = src
        self._dst = dst
        self._atoms = tuple(sorted((x, y, t, m) for (x, y, t), m in merged.items() if m))

    @property
    def src(self) -> FinSpace:
        return self._src

    @property
    def dst(self) -> FinSpace:
        return self._dst

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return self._atoms

    @cached_property
    def cells(self) -> dict[tuple[str, str], RxMeasure]:
        """Projected measure on the third coordinate per ``(x, y)`` cell."""
        per: dict[tuple[str, str], dict[Fraction, Fraction]] = {}
        for x, y, t, m in self._atoms:
            per.setdefault((x, y), {})[t] = m
        return {cell: RxMeasure(d) for cell, d in per.items()}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polymorphism)
            and self._src == other._src
            and self._dst == other._dst
            and self._atoms == other._atoms
        )

    def __hash__(self) -> int:
        return hash((self._src, self._dst, self._atoms))

    def __repr__(self) -> str:
        return f"Polymorphism({len(self._src)}->{len(self._dst)}, {len(self._atoms)} atoms)"

    def to_json(self) -> dict:
        return {
            "src": self._src.to_json(),
            "dst": self._dst.to_json(),
            "atoms": [
                {"x": x, "y": y, "t": fraction_to_str(t), "m": fraction_to_str(m)}
                for x, y, t, m in self._atoms
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Polymorphism":
        return cls(
            FinSpace.from_json(data["src"]),
            FinSpace.from_json(data["dst"]),
            (
                (a["x"], a["y"], fraction_from_str(a["t"]), fraction_from_str(a["m"]))
                for a in data["atoms"]
            ),
        )


@dataclass(frozen=True)
class MarginalViolation:
    condition: int
    label: str
    expected: Fraction
    actual: Fraction

    def __str__(self) -> str:
        side = "source mass" if self.condition == 1 else "destination t-weighted mass"
        return f"condition {self.condition} at {self.label!r}: {side} is {self.actual}, expected {self.expected}"


def validate(p: Polymorphism) -> list[MarginalViolation]:
    """Exact check of both marginal conditions; empty list means valid."""
    row: dict[str, Fraction] = {}
    col: dict[str, Fraction] = {}
    for x, y, t, m in p.atoms:
        row[x] = row.get(x, Fraction(0)) + m
        col[y] = col.get(y, Fraction(0)) + m * t
    out = []
    for x, w in p.src.atoms:
        got = row.get(x, Fraction(0))
        if got != w:
            out.append(MarginalViolation(1, x, w, got))
    for y, w in p.dst.atoms:
        got = col.get(y, Fraction(0))
        if got != w:
            out.append(MarginalViolation(2, y, w, got))
    return out


def require_valid(p: Polymorphism) -> Polymorphism:
    bad = validate(p)
    if bad:
        raise ValidationError("; ".join(str(v) for v in bad))
    return p


def from_bijection(space: FinSpace, q: Mapping[str, str] | Callable[[str], str]) -> Polymorphism:
    """Embed a nonsingular bijection of the space's atoms.

    The third coordinate of each atom is the weight ratio
    ``weight(q(x)) / weight(x)`` (the discrete Radon-Nikodym derivative);
    on a uniform space every ratio is 1 and the result is measure
    preserving.
    """
    move = q if callable(q) else q.__getitem__
    labels = space.labels
    image = [str(move(x)) for x in labels]
    if sorted(image) != sorted(labels):
        raise ValidationError("map is not a bijection of the atom labels")
    atoms = []
    for x, y in zip(labels, image):
        wx, wy = space.weight(x), space.weight(y)
        atoms.append((x, y, wy / wx, wx))
    return require_valid(Polymorphism(space, space, atoms))


def from_map(src: FinSpace, dst: FinSpace, pi: Mapping[str, str] | Callable[[str], str]) -> Polymorphism:
    """Embed a measure-compatible map as atoms ``(x, pi(x), 1, weight(x))``."""
    move = pi if callable(pi) else pi.__getitem__
    pushed: dict[str, Fraction] = {}
    pairs = []
    for x in src.labels:
        y = str(move(x))
        if y not in dst.weights:
            raise ValidationError(f"map sends {x!r} to {y!r}, which is not in the destination")
        pushed[y] = pushed.get(y, Fraction(0)) + src.weight(x)
        pairs.append((x, y))
    for y, w in dst.atoms:
        if pushed.get(y, Fraction(0)) != w:
            raise ValidationError(
                f"map is not measure compatible at {y!r}: pushforward {pushed.get(y, Fraction(0))}, expected {w}"
            )
    return Polymorphism(src, dst, ((x, y, Fraction(1), src.weight(x)) for x, y in pairs))


def identity(space: FinSpace) -> Polymorphism:
    return Polymorphism(space, space, ((x, x, Fraction(1), w) for x, w in space.atoms))


def compose(first: Polymorphism, then: Polymorphism) -> Polymorphism:
    """Chain ``first: X -> Y`` with ``then: Y -> Z`` into ``X -> Z``.

    Atom pairs sharing the middle label contribute
    ``(x, z, t1*t2, m1*m2 / weight(y))``; the result is re-validated.
    """
    if first.dst != then.src:
        raise ValidationError("middle spaces do not match")
    by_y: dict[str, list[Atom]] = {}
    for atom in then.atoms:
        by_y.setdefault(atom[0], []).append(atom)
    mid = first.dst.weights
    out: dict[tuple[str, str, Fraction], Fraction] = {}
    for x, y, t1, m1 in first.atoms:
        wy = mid[y]
        for _, z, t2, m2 in by_y.get(y, ()):
            key = (x, z, t1 * t2)
            out[key] = out.get(key, Fraction(0)) + m1 * m2 / wy
    result = Polymorphism(first.src, then.dst, ((x, z, t, m) for (x, z, t), m in out.items()))
    return require_valid(result)


def star(p: Polymorphism) -> Polymorphism:
    """The adjoint: atom rule ``(x, y, t, m) -> (y, x, 1/t, m*t)``.

    An involution, and an anti-homomorphism for :func:`compose`.
    """
    flipped = Polymorphism(p.dst, p.src, ((y, x, 1 / t, m * t) for x, y, t, m in p.atoms))
    return require_valid(flipped)


def is_measure_preserving(p: Polymorphism) -> bool:
    return all(t == 1 for _, _, t, _ in p.atoms)


def cond_exp_poly(space: FinSpace, part: Partition) -> tuple[Polymorphism, Polymorphism]:
    """Quotient map polymorphism and the induced averaging projection.

    Returns ``(l, m)`` where ``l`` sends the space onto the block quotient
    and ``m = compose(l, star(l))`` averages within blocks.  ``m`` is
    measure preserving, exactly idempotent and self-adjoint, and
    ``compose(star(l), l)`` is the identity on the quotient.
    """
    qspace, label_map = quotient(space, part)
    l = from_map(space, qspace, label_map)
    m = compose(l, star(l))
    return l, m


def kernel(p: Polymorphism, x: str, y: str) -> RxMeasure:
    """Kernel view: the cell measure scaled by ``1/(weight(x)*weight(y))``."""
    cell = p.cells.get((x, y), rxmeasure.ZERO)
    return rxmeasure.scale(cell, 1 / (p.src.weight(x) * p.dst.weight(y)))


def distance(p: Polymorphism, q: Polymorphism) -> float:
    """Convergence pseudometric: the worst cell defect.

    For each cell ``(x, y)`` the projected measure and its t-weighted
    version are compared with the bounded-Lipschitz distance in the log
    coordinate; the two defects are summed and the maximum over cells is
    returned.  Zero exactly when the normal forms are equal.
    """
    if p.src != q.src or p.dst != q.dst:
        raise ValidationError("distance requires identical source and destination spaces")
    if p.atoms == q.atoms:
        return 0.0
    worst = 0.0
    for cell in set(p.cells) | set(q.cells):
        a = p.cells.get(cell, rxmeasure.ZERO)
        b = q.cells.get(cell, rxmeasure.ZERO)
        d = dudley.dbl_rx(a, b) + dudley.dbl_rx(rxmeasure.tmul(a), rxmeasure.tmul(b))
        worst = max(worst, d)
    return worst
