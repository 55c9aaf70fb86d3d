"""Finitely supported permutations acting on an i.i.d. coin space.

The space is the infinite product of Bernoulli(p) coins indexed by the
positive integers; permutations act by relabelling coordinates.  Cylinder
functions (exact rational functions of finitely many coordinates) make
the whole lab computable without truncation error:

* conditional expectation onto the first ``alpha`` coordinates integrates
  the rest out exactly;
* compressions of the permutation action between invariant subspaces are
  exact rational matrices, and their products match a single compression
  of a block-swap sandwiched product;
* each permutation induces an exactly computable coupling between the
  marginal cubes, and those couplings compose the same way.

All block-swap cutoffs are verified at two consecutive safe values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .dcosets import FinPerm, theta
from .errors import StabilizationError, ValidationError
from .finspace import FinSpace, Partition, bernoulli_cube, cube_labels, refines
from .mellin import bilinear_form
from .polymorphism import Polymorphism, compose, cond_exp_poly, distance, from_bijection, from_map

Bits = tuple[int, ...]


def _bern(bit: int, p: Fraction) -> Fraction:
    return p if bit else 1 - p


class CylFunction:
    """Rational-valued function of finitely many coin coordinates.

    Stored as a sorted coordinate tuple plus a complete value table over
    the bit assignments of those coordinates.  Padding with unused
    coordinates never changes the represented function; equality compares
    the normalized forms.
    """

    __slots__ = ("_coords", "_table")

    def __init__(self, coords: Sequence[int], table: Mapping[Bits, Fraction]):
        given = tuple(int(c) for c in coords)
        if len(set(given)) != len(given):
            raise ValidationError("repeated coordinate")
        if given and min(given) < 1:
            raise ValidationError("coordinates are positive integers")
        order = sorted(range(len(given)), key=given.__getitem__)
        sorted_coords = tuple(given[k] for k in order)
        want = 2 ** len(given)
        tbl = {}
        for bits, value in table.items():
            bits = tuple(int(b) for b in bits)
            if len(bits) != len(given) or any(b not in (0, 1) for b in bits):
                raise ValidationError(f"bad bit assignment {bits} for coordinates {given}")
            tbl[tuple(bits[k] for k in order)] = Fraction(value)
        if len(tbl) != want:
            raise ValidationError(f"value table has {len(tbl)} entries, expected {want}")
        object.__setattr__(self, "_coords", sorted_coords)
        object.__setattr__(self, "_table", tbl)

    def __setattr__(self, name, value):
        raise AttributeError("CylFunction is immutable")

    @property
    def coords(self) -> tuple[int, ...]:
        return self._coords

    @property
    def table(self) -> dict[Bits, Fraction]:
        return dict(self._table)

    @classmethod
    def constant(cls, value: Fraction) -> "CylFunction":
        return cls((), {(): Fraction(value)})

    @classmethod
    def coordinate(cls, i: int) -> "CylFunction":
        return cls((i,), {(0,): Fraction(0), (1,): Fraction(1)})

    @classmethod
    def indicator(cls, coords: Sequence[int], bits: Bits) -> "CylFunction":
        coords = tuple(coords)
        bits = tuple(int(b) for b in bits)
        table = {b: Fraction(1 if b == bits else 0) for b in itertools.product((0, 1), repeat=len(coords))}
        return cls(coords, table)

    def value_at(self, assignment: Mapping[int, int]) -> Fraction:
        try:
            key = tuple(int(assignment[c]) for c in self._coords)
        except KeyError as exc:
            raise ValidationError(f"assignment misses coordinate {exc.args[0]}") from None
        return self._table[key]

    def with_coords(self, coords: Iterable[int]) -> "CylFunction":
        """Reindex over a superset of the active coordinates."""
        coords = tuple(sorted(set(coords) | set(self._coords)))
        pos = {c: k for k, c in enumerate(coords)}
        table = {}
        for bits in itertools.product((0, 1), repeat=len(coords)):
            key = tuple(bits[pos[c]] for c in self._coords)
            table[bits] = self._table[key]
        return CylFunction(coords, table)

    def normalize(self) -> "CylFunction":
        """Drop coordinates the function does not actually depend on."""
        coords = list(self._coords)
        table = dict(self._table)
        k = 0
        while k < len(coords):
            zero = {bits[:k] + bits[k + 1:]: v for bits, v in table.items() if bits[k] == 0}
            one = {bits[:k] + bits[k + 1:]: v for bits, v in table.items() if bits[k] == 1}
            if zero == one:
                coords.pop(k)
                table = zero
            else:
                k += 1
        return CylFunction(coords, table)

    def _zip(self, other: "CylFunction"):
        coords = tuple(sorted(set(self._coords) | set(other._coords)))
        a = self.with_coords(coords)
        b = other.with_coords(coords)
        return coords, a._table, b._table

    def __add__(self, other: "CylFunction") -> "CylFunction":
        coords, a, b = self._zip(other)
        return CylFunction(coords, {bits: a[bits] + b[bits] for bits in a})

    def __sub__(self, other: "CylFunction") -> "CylFunction":
        coords, a, b = self._zip(other)
        return CylFunction(coords, {bits: a[bits] - b[bits] for bits in a})

    def __mul__(self, other: "CylFunction") -> "CylFunction":
        coords, a, b = self._zip(other)
        return CylFunction(coords, {bits: a[bits] * b[bits] for bits in a})

    def scale(self, c: Fraction) -> "CylFunction":
        c = Fraction(c)
        return CylFunction(self._coords, {bits: v * c for bits, v in self._table.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, CylFunction):
            return NotImplemented
        a = self.normalize()
        b = other.normalize()
        return a._coords == b._coords and a._table == b._table

    def __hash__(self) -> int:
        a = self.normalize()
        return hash((a._coords, tuple(sorted(a._table.items()))))

    def __repr__(self) -> str:
        return f"CylFunction(coords={self._coords}, {len(self._table)} values)"


def act(g: FinPerm, f: CylFunction) -> CylFunction:
    """Substitute coordinates along the permutation: the result reads
    coordinate ``g^-1(j)`` wherever ``f`` read coordinate ``j``."""
    ginv = g.inverse()
    renamed = {c: ginv.apply(c) for c in f.coords}
    new_coords = tuple(sorted(renamed.values()))
    pos = {c: k for k, c in enumerate(new_coords)}
    table = {}
    for bits in itertools.product((0, 1), repeat=len(new_coords)):
        key = tuple(bits[pos[renamed[c]]] for c in f.coords)
        table[bits] = f.table[key]
    return CylFunction(new_coords, table)


def expectation(f: CylFunction, p: Fraction) -> Fraction:
    p = Fraction(p)
    total = Fraction(0)
    for bits, v in f.table.items():
        w = Fraction(1)
        for b in bits:
            w *= _bern(b, p)
        total += w * v
    return total


def inner(f: CylFunction, h: CylFunction, p: Fraction) -> Fraction:
    return expectation(f * h, p)


def cond_expect(f: CylFunction, alpha: int, p: Fraction) -> CylFunction:
    """Integrate out every coordinate above ``alpha`` with coin weights."""
    p = Fraction(p)
    keep = tuple(c for c in f.coords if c <= alpha)
    drop = tuple(c for c in f.coords if c > alpha)
    if not drop:
        return f
    pos = {c: k for k, c in enumerate(f.coords)}
    table: dict[Bits, Fraction] = {}
    for kept_bits in itertools.product((0, 1), repeat=len(keep)):
        total = Fraction(0)
        for drop_bits in itertools.product((0, 1), repeat=len(drop)):
            assignment = {}
            assignment.update(zip(keep, kept_bits))
            assignment.update(zip(drop, drop_bits))
            key = tuple(assignment[c] for c in f.coords)
            w = Fraction(1)
            for c, b in zip(drop, drop_bits):
                w *= _bern(b, p)
            total += w * f.table[key]
        table[kept_bits] = total
    return CylFunction(keep, table)


def theta_limit_index(alpha: int, f: CylFunction, h: CylFunction, p: Fraction, window: int = 4) -> int:
    """Smallest block size from which the swapped pairing is exactly the
    projected pairing, verified across ``window`` consecutive sizes.

    ``<act(theta(alpha, j), f), h> == <E_alpha f, E_alpha h>`` holds for
    every ``j`` past the coordinate span, so the search always halts.
    """
    target = inner(cond_expect(f, alpha, p), cond_expect(h, alpha, p), p)
    span = max([alpha, *f.coords, *h.coords])
    limit = span - alpha + window + 2 if span > alpha else window + 2
    hits = 0
    for j in range(1, limit + window + 1):
        if inner(act(theta(alpha, j), f), h, p) == target:
            hits += 1
            if hits == window:
                return j - window + 1
        else:
            hits = 0
    raise StabilizationError("swapped pairing never stabilized; the search bound is wrong")


@dataclass(frozen=True)
class CompressedOp:
    """Exact matrix of (project to the first ``alpha`` coordinates) after
    (act by a permutation), restricted to functions of the first ``beta``
    coordinates.  Rows range over the alpha-cube, columns over the
    beta-cube, both in bit-string order."""

    alpha: int
    beta: int
    p: Fraction
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.rows) != 2 ** self.alpha or any(len(r) != 2 ** self.beta for r in self.rows):
            raise ValidationError("compressed matrix shape does not match its indices")

    def matmul(self, other: "CompressedOp") -> "CompressedOp":
        if self.beta != other.alpha or self.p != other.p:
            raise ValidationError("inner indices (or coins) do not match")
        rows = tuple(
            tuple(
                sum((self.rows[i][k] * other.rows[k][j] for k in range(2 ** self.beta)), Fraction(0))
                for j in range(2 ** other.beta)
            )
            for i in range(2 ** self.alpha)
        )
        return CompressedOp(self.alpha, other.beta, self.p, rows)

    def max_abs_diff(self, other: "CompressedOp") -> Fraction:
        if (self.alpha, self.beta) != (other.alpha, other.beta):
            raise ValidationError("shapes do not match")
        return max(
            (abs(a - b) for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)),
            default=Fraction(0),
        )


def compressed_op(g: FinPerm, alpha: int, beta: int, p: Fraction) -> CompressedOp:
    """Columns are the projected images of the beta-cube indicators."""
    p = Fraction(p)
    alpha_bits = list(itertools.product((0, 1), repeat=alpha))
    beta_coords = tuple(range(1, beta + 1))
    cols = []
    for v in itertools.product((0, 1), repeat=beta):
        ind = CylFunction.indicator(beta_coords, v) if beta else CylFunction.constant(Fraction(1))
        projected = cond_expect(act(g, ind), alpha, p)
        cols.append([projected.value_at(dict(zip(range(1, alpha + 1), u))) for u in alpha_bits])
    rows = tuple(tuple(cols[j][i] for j in range(2 ** beta)) for i in range(2 ** alpha))
    return CompressedOp(alpha, beta, p, rows)


def _sandwich(g: FinPerm, h: FinPerm, beta: int, n: int) -> FinPerm:
    return g.then(theta(beta, n)).then(h)


def _safe_cutoff(g: FinPerm, h: FinPerm, *indices: int) -> int:
    return max([g.support_bound(), h.support_bound(), 1, *indices])


def compression_product_defect(
    g: FinPerm, h: FinPerm, alpha: int, beta: int, gamma: int, p: Fraction
) -> Fraction:
    """Exact defect between the product of two compressions and the single
    compression of the block-swap sandwich; zero by multiplicativity."""
    prod = compressed_op(g, alpha, beta, p).matmul(compressed_op(h, beta, gamma, p))
    n0 = _safe_cutoff(g, h, alpha, beta, gamma)
    first = compressed_op(_sandwich(g, h, beta, n0), alpha, gamma, p)
    second = compressed_op(_sandwich(g, h, beta, n0 + 1), alpha, gamma, p)
    if first != second:
        raise StabilizationError(f"compression sandwich not constant at cutoffs {n0}, {n0 + 1}")
    return prod.max_abs_diff(first)


def cube_coupling(g: FinPerm, alpha: int, beta: int, p: Fraction) -> Polymorphism:
    """Measure-preserving coupling between the alpha- and beta-cubes.

    The mass at ``(u, v)`` is the probability that the first ``alpha``
    coins read ``u`` while the coins at positions ``g^-1(1..beta)`` read
    ``v``.  Depends only on the double coset of ``g``.
    """
    p = Fraction(p)
    src = bernoulli_cube(alpha, p)
    dst = bernoulli_cube(beta, p)
    ginv = g.inverse()
    pulled = [ginv.apply(j) for j in range(1, beta + 1)]
    atoms = []
    for ui, u in enumerate(itertools.product((0, 1), repeat=alpha)):
        base = Fraction(1)
        for b in u:
            base *= _bern(b, p)
        for vi, v in enumerate(itertools.product((0, 1), repeat=beta)):
            m = base
            for j, c in enumerate(pulled):
                if c <= alpha:
                    if v[j] != u[c - 1]:
                        m = Fraction(0)
                        break
                else:
                    m *= _bern(v[j], p)
            if m:
                atoms.append((cube_labels(alpha)[ui], cube_labels(beta)[vi], Fraction(1), m))
    return Polymorphism(src, dst, atoms)


def cube_permutation(g: FinPerm, n: int, p: Fraction) -> Polymorphism:
    """The permutation action on the n-cube as a bijection polymorphism."""
    if g.support_bound() > n:
        raise ValidationError(f"cube dimension {n} does not cover the support bound {g.support_bound()}")
    ginv = g.inverse()

    def move(label: str) -> str:
        return "".join(label[ginv.apply(j) - 1] for j in range(1, n + 1))

    return from_bijection(bernoulli_cube(n, p), move)


def cube_restriction(n: int, k: int, p: Fraction) -> Polymorphism:
    """Quotient map polymorphism from the n-cube onto the k-cube."""
    if not 0 <= k <= n:
        raise ValidationError(f"cannot restrict an {n}-cube to {k} coordinates")
    return from_map(bernoulli_cube(n, p), bernoulli_cube(k, p), lambda label: label[:k])


def coupling_product_check(
    g: FinPerm, h: FinPerm, alpha: int, beta: int, gamma: int, p: Fraction
) -> bool:
    """Exact equality of the composed cube couplings with the coupling of
    the stabilized block-swap sandwich."""
    lhs = compose(cube_coupling(g, alpha, beta, p), cube_coupling(h, beta, gamma, p))
    n0 = _safe_cutoff(g, h, alpha, beta, gamma)
    first = cube_coupling(_sandwich(g, h, beta, n0), alpha, gamma, p)
    second = cube_coupling(_sandwich(g, h, beta, n0 + 1), alpha, gamma, p)
    if first != second:
        raise StabilizationError(f"coupling sandwich not constant at cutoffs {n0}, {n0 + 1}")
    return lhs == first


def stabilization_cutoff(g: FinPerm, h: FinPerm, *indices: int) -> int:
    """The block-swap cutoff used by the product checks (for reporting)."""
    return _safe_cutoff(g, h, *indices)


@dataclass(frozen=True)
class ClosureReport:
    distances: tuple[float, ...]
    defects: tuple[tuple[int, float, float, float], ...]  # (step, r, s, defect)


def _default_test_functions(labels: Sequence[str]) -> list[tuple[dict, dict]]:
    n = len(labels)
    ones = {l: Fraction(1) for l in labels}
    signs = {l: Fraction((-1) ** k) for k, l in enumerate(labels)}
    ramp = {l: Fraction(k + 1, n + 1) for k, l in enumerate(labels)}
    return [(ones, ones), (signs, ramp), (ramp, signs)]


def closure_experiment(
    poly: Polymorphism,
    chain: Sequence[Partition],
    grid: Sequence[tuple[float, float]] = ((0.0, 0.0), (0.5, 1.0), (1.0, 0.0)),
    funcs: Sequence[tuple[Mapping, Mapping]] | None = None,
) -> ClosureReport:
    """Squeeze a polymorphism between block averagings along a refining
    partition chain and record how fast it is recovered.

    For each step the averaged polymorphism is compared with the original
    in the convergence pseudometric, and the bilinear pairings against a
    set of test functions are compared on the given strip grid.  The
    distance hits exactly zero when a step's partition is the singleton
    partition.
    """
    if poly.src != poly.dst:
        raise ValidationError("closure experiment needs an endomorphism (same source and destination)")
    if not chain:
        raise ValidationError("empty partition chain")
    for part in chain:
        if not part.covers(poly.src.labels):
            raise ValidationError("chain partition does not cover the space")
    for fine, coarse in zip(chain[1:], chain):
        if not refines(fine, coarse):
            raise ValidationError("partition chain is not refining")
    if funcs is None:
        funcs = _default_test_functions(poly.src.labels)
    distances = []
    defects = []
    for k, part in enumerate(chain):
        _, m = cond_exp_poly(poly.src, part)
        squeezed = compose(compose(m, poly), m)
        distances.append(distance(squeezed, poly))
        for r, s in grid:
            worst = 0.0
            for phi, psi in funcs:
                lhs = bilinear_form(squeezed, phi, psi, r, s)
                rhs = bilinear_form(poly, phi, psi, r, s)
                worst = max(worst, abs(lhs - rhs))
            defects.append((k, float(r), float(s), worst))
    return ClosureReport(tuple(distances), tuple(defects))
