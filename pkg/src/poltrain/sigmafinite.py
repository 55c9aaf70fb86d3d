"""Polymorphism triples for sigma-finite spaces, with escape and arrival parts.

Between spaces of possibly non-unit total mass a transport plan may lose
mass to infinity or gain mass from it.  A triple ``(r, r_minus, r_plus)``
keeps the plan ``r`` on ``X x Y x R^x`` together with the escaping part
``r_minus`` on ``X x R^x`` and the arriving part ``r_plus`` on
``Y x R^x``, subject to two exact balance conditions:

  balance 1: per source atom, plan mass plus escaping mass is the weight;
  balance 2: per destination atom, t-weighted plan mass plus t-weighted
      arriving mass is the weight.

No product is defined on triples here: the data model and the convergence
functionals are enough to explore limits of bijection embeddings, which
is all the desk experiments need.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from . import dudley, rxmeasure
from .errors import ValidationError
from .finspace import SIGMA_FINITE, FinSpace
from .polymorphism import Polymorphism
from .rational import fraction_from_str, fraction_to_str
from .rxmeasure import RxMeasure


def _merge_side(atoms: Iterable[tuple], space: FinSpace, side: str) -> tuple:
    merged: dict[tuple[str, Fraction], Fraction] = {}
    for label, t, m in atoms:
        label, t, m = str(label), Fraction(t), Fraction(m)
        if t <= 0:
            raise ValidationError(f"{side} atom at {label!r} has nonpositive derivative {t}")
        if m < 0:
            raise ValidationError(f"{side} atom at {label!r} has negative mass {m}")
        if label not in space.weights:
            raise ValidationError(f"{side} atom label {label!r} not in its space")
        if m:
            key = (label, t)
            merged[key] = merged.get(key, Fraction(0)) + m
    return tuple(sorted((l, t, m) for (l, t), m in merged.items() if m))


class SigmaFiniteTriple:
    """Plan plus escaping and arriving parts, in atom normal form."""

    def __init__(
        self,
        src: FinSpace,
        dst: FinSpace,
        atoms: Iterable[tuple] = (),
        minus: Iterable[tuple] = (),
        plus: Iterable[tuple] = (),
    ):
        # The plan part reuses the polymorphism normal form but not its
        # marginal conditions (those move to the balance equations).
        self._plan = Polymorphism(src, dst, atoms)
        self._minus = _merge_side(minus, src, "escaping")
        self._plus = _merge_side(plus, dst, "arriving")

    @property
    def src(self) -> FinSpace:
        return self._plan.src

    @property
    def dst(self) -> FinSpace:
        return self._plan.dst

    @property
    def plan(self) -> Polymorphism:
        return self._plan

    @property
    def minus(self) -> tuple[tuple[str, Fraction, Fraction], ...]:
        return self._minus

    @property
    def plus(self) -> tuple[tuple[str, Fraction, Fraction], ...]:
        return self._plus

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SigmaFiniteTriple)
            and self._plan == other._plan
            and self._minus == other._minus
            and self._plus == other._plus
        )

    def __hash__(self) -> int:
        return hash((self._plan, self._minus, self._plus))

    def __repr__(self) -> str:
        return (
            f"SigmaFiniteTriple({len(self.src)}->{len(self.dst)}, "
            f"{len(self._plan.atoms)} plan / {len(self._minus)} escaping / {len(self._plus)} arriving)"
        )

    def to_json(self) -> dict:
        data = self._plan.to_json()
        data["r_minus"] = [
            {"x": l, "t": fraction_to_str(t), "m": fraction_to_str(m)} for l, t, m in self._minus
        ]
        data["r_plus"] = [
            {"y": l, "t": fraction_to_str(t), "m": fraction_to_str(m)} for l, t, m in self._plus
        ]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "SigmaFiniteTriple":
        plan = Polymorphism.from_json(data)
        return cls(
            plan.src,
            plan.dst,
            plan.atoms,
            ((a["x"], fraction_from_str(a["t"]), fraction_from_str(a["m"])) for a in data.get("r_minus", ())),
            ((a["y"], fraction_from_str(a["t"]), fraction_from_str(a["m"])) for a in data.get("r_plus", ())),
        )


@dataclass(frozen=True)
class BalanceViolation:
    condition: int
    label: str
    expected: Fraction
    actual: Fraction

    def __str__(self) -> str:
        what = "plan + escaping mass" if self.condition == 1 else "t-weighted plan + arriving mass"
        return f"balance {self.condition} at {self.label!r}: {what} is {self.actual}, expected {self.expected}"


def validate_triple(tr: SigmaFiniteTriple) -> list[BalanceViolation]:
    row: dict[str, Fraction] = {}
    col: dict[str, Fraction] = {}
    for x, y, t, m in tr.plan.atoms:
        row[x] = row.get(x, Fraction(0)) + m
        col[y] = col.get(y, Fraction(0)) + m * t
    for x, t, m in tr.minus:
        row[x] = row.get(x, Fraction(0)) + m
    for y, t, m in tr.plus:
        col[y] = col.get(y, Fraction(0)) + m * t
    out = []
    for x, w in tr.src.atoms:
        got = row.get(x, Fraction(0))
        if got != w:
            out.append(BalanceViolation(1, x, w, got))
    for y, w in tr.dst.atoms:
        got = col.get(y, Fraction(0))
        if got != w:
            out.append(BalanceViolation(2, y, w, got))
    return out


def require_balanced(tr: SigmaFiniteTriple) -> SigmaFiniteTriple:
    bad = validate_triple(tr)
    if bad:
        raise ValidationError("; ".join(str(v) for v in bad))
    return tr


def embed_bijection(space: FinSpace, q: Mapping[str, str] | Callable[[str], str]) -> SigmaFiniteTriple:
    """Embed a nonsingular bijection with empty escape and arrival parts."""
    move = q if callable(q) else q.__getitem__
    labels = space.labels
    image = [str(move(x)) for x in labels]
    if sorted(image) != sorted(labels):
        raise ValidationError("map is not a bijection of the atom labels")
    atoms = [(x, y, space.weight(y) / space.weight(x), space.weight(x)) for x, y in zip(labels, image)]
    return require_balanced(SigmaFiniteTriple(space, space, atoms))


def from_polymorphism(p: Polymorphism) -> SigmaFiniteTriple:
    return SigmaFiniteTriple(p.src, p.dst, p.atoms)


def _row_measures(tr: SigmaFiniteTriple) -> dict[str, RxMeasure]:
    per: dict[str, dict[Fraction, Fraction]] = {}
    for x, _, t, m in tr.plan.atoms:
        d = per.setdefault(x, {})
        d[t] = d.get(t, Fraction(0)) + m
    for x, t, m in tr.minus:
        d = per.setdefault(x, {})
        d[t] = d.get(t, Fraction(0)) + m
    return {x: RxMeasure(d) for x, d in per.items()}


def _col_measures_t(tr: SigmaFiniteTriple) -> dict[str, RxMeasure]:
    per: dict[str, dict[Fraction, Fraction]] = {}
    for _, y, t, m in tr.plan.atoms:
        d = per.setdefault(y, {})
        d[t] = d.get(t, Fraction(0)) + m * t
    for y, t, m in tr.plus:
        d = per.setdefault(y, {})
        d[t] = d.get(t, Fraction(0)) + m * t
    return {y: RxMeasure(d) for y, d in per.items()}


def triple_distance(a: SigmaFiniteTriple, b: SigmaFiniteTriple) -> float:
    """Worst bounded-Lipschitz defect over four families of functionals:
    the plan cell measures, their t-weighted versions, the combined
    row measures (plan + escaping), and the combined t-weighted column
    measures (plan + arriving)."""
    if a.src != b.src or a.dst != b.dst:
        raise ValidationError("triple distance requires identical spaces")
    if a == b:
        return 0.0
    worst = 0.0
    acells, bcells = a.plan.cells, b.plan.cells
    for cell in set(acells) | set(bcells):
        ca = acells.get(cell, rxmeasure.ZERO)
        cb = bcells.get(cell, rxmeasure.ZERO)
        worst = max(worst, dudley.dbl_rx(ca, cb))
        worst = max(worst, dudley.dbl_rx(rxmeasure.tmul(ca), rxmeasure.tmul(cb)))
    arow, brow = _row_measures(a), _row_measures(b)
    for x in set(arow) | set(brow):
        worst = max(worst, dudley.dbl_rx(arow.get(x, rxmeasure.ZERO), brow.get(x, rxmeasure.ZERO)))
    acol, bcol = _col_measures_t(a), _col_measures_t(b)
    for y in set(acol) | set(bcol):
        worst = max(worst, dudley.dbl_rx(acol.get(y, rxmeasure.ZERO), bcol.get(y, rxmeasure.ZERO)))
    return worst


def escape_ladder(n: int) -> tuple[SigmaFiniteTriple, SigmaFiniteTriple]:
    """A rung-``n`` desk model of mass walking off to infinity.

    The space is a ladder of ``n`` atoms of equal weight ``2**-n`` (sigma
    finite, not a probability space); the moving triple embeds the cyclic
    shift pushing every atom to the next one, and the limiting triple has
    an empty plan with all mass escaping and arriving at derivative 1.
    The two agree on every combined row and column functional, so their
    distance is the worst plan cell mass, ``2**-n``.
    """
    if n < 2:
        raise ValidationError("ladder needs at least two rungs")
    w = Fraction(1, 2**n)
    labels = [f"x{i}" for i in range(1, n + 1)]
    space = FinSpace([(l, w) for l in labels], flavor=SIGMA_FINITE)
    shift = {labels[i]: labels[(i + 1) % n] for i in range(n)}
    moving = embed_bijection(space, shift)
    pure = require_balanced(
        SigmaFiniteTriple(
            space,
            space,
            (),
            ((l, Fraction(1), w) for l in labels),
            ((l, Fraction(1), w) for l in labels),
        )
    )
    return moving, pure
