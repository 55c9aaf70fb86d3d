"""Transforms of polymorphisms on the unit strip, as finite matrices.

At a strip point ``r + i*s`` (``0 <= r <= 1``) a polymorphism ``X -> Y``
induces a matrix acting on functions of the destination space,

    M[x, y] = (1 / weight(x)) * sum over atoms (x, y, t, m) of m * t**(r+i*s),

so that ``(M psi)(x)`` pairs with functions on ``X`` through the bilinear
form ``B(phi, psi) = sum phi(x) psi(y) m t**(r+i*s)``.  The matrix of a
composition is the product of the matrices, and in the weighted norms
matching ``r`` in ``{0, 1/2, 1}`` every valid polymorphism is a
contraction.

Measure-preserving polymorphisms (all ``t == 1``) have exact rational,
s-independent matrices; :func:`transform_exact` exposes that path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .finspace import FinSpace
from .polymorphism import Polymorphism, compose, is_measure_preserving


@dataclass(frozen=True)
class MellinMatrix:
    r: float
    s: float
    src_labels: tuple[str, ...]
    dst_labels: tuple[str, ...]
    src_weights: tuple[Fraction, ...]
    dst_weights: tuple[Fraction, ...]
    entries: np.ndarray  # complex, shape (len(src), len(dst))

    def apply(self, psi: Sequence[complex] | Mapping[str, complex]) -> np.ndarray:
        return self.entries @ as_vector(self.dst_labels, psi)

    def __eq__(self, other) -> bool:  # ndarray equality needs help
        return (
            isinstance(other, MellinMatrix)
            and (self.r, self.s, self.src_labels, self.dst_labels) ==
            (other.r, other.s, other.src_labels, other.dst_labels)
            and np.array_equal(self.entries, other.entries)
        )


def as_vector(labels: Sequence[str], func: Sequence[complex] | Mapping[str, complex]) -> np.ndarray:
    if isinstance(func, Mapping):
        return np.array([complex(func[l]) for l in labels])
    vec = np.asarray([complex(v) for v in func])
    if vec.shape != (len(labels),):
        raise ValidationError(f"function vector has shape {vec.shape}, expected ({len(labels)},)")
    return vec


def _check_r(r: float) -> None:
    if not 0 <= r <= 1:
        raise ValidationError(f"strip coordinate r must lie in [0, 1], got {r}")


def bilinear_form(p: Polymorphism, phi, psi, r: float, s: float) -> complex:
    _check_r(r)
    fx = dict(zip(p.src.labels, as_vector(p.src.labels, phi)))
    fy = dict(zip(p.dst.labels, as_vector(p.dst.labels, psi)))
    total = 0j
    for x, y, t, m in p.atoms:
        lt = math.log(t)
        total += fx[x] * fy[y] * float(m) * complex(math.cos(s * lt), math.sin(s * lt)) * math.exp(r * lt)
    return total


def bilinear_form_exact(p: Polymorphism, phi: Mapping[str, Fraction], psi: Mapping[str, Fraction], r: int) -> Fraction:
    """Exact bilinear form at the strip edges ``r in {0, 1}``, ``s = 0``."""
    if r not in (0, 1):
        raise ValidationError("exact bilinear form is only available at r = 0 or r = 1")
    total = Fraction(0)
    for x, y, t, m in p.atoms:
        total += Fraction(phi[x]) * Fraction(psi[y]) * m * (t if r == 1 else 1)
    return total


def transform(p: Polymorphism, r: float, s: float) -> MellinMatrix:
    _check_r(r)
    xs = p.src.labels
    ys = p.dst.labels
    xi = {l: i for i, l in enumerate(xs)}
    yi = {l: i for i, l in enumerate(ys)}
    entries = np.zeros((len(xs), len(ys)), dtype=complex)
    for x, y, t, m in p.atoms:
        lt = math.log(t)
        entries[xi[x], yi[y]] += float(m) * math.exp(r * lt) * complex(math.cos(s * lt), math.sin(s * lt))
    for i, x in enumerate(xs):
        entries[i, :] /= float(p.src.weight(x))
    return MellinMatrix(
        r=float(r),
        s=float(s),
        src_labels=xs,
        dst_labels=ys,
        src_weights=tuple(w for _, w in p.src.atoms),
        dst_weights=tuple(w for _, w in p.dst.atoms),
        entries=entries,
    )


def transform_exact(p: Polymorphism) -> tuple[tuple[Fraction, ...], ...]:
    """Exact matrix of a measure-preserving polymorphism.

    All atoms sit at ``t == 1`` so the matrix has rational entries and
    does not depend on the strip point at all.
    """
    if not is_measure_preserving(p):
        raise ValidationError("exact transform applies to measure-preserving polymorphisms only")
    xi = {l: i for i, l in enumerate(p.src.labels)}
    yi = {l: i for i, l in enumerate(p.dst.labels)}
    rows = [[Fraction(0)] * len(yi) for _ in xi]
    for x, y, _, m in p.atoms:
        rows[xi[x]][yi[y]] += m
    for i, x in enumerate(p.src.labels):
        w = p.src.weight(x)
        rows[i] = [v / w for v in rows[i]]
    return tuple(tuple(row) for row in rows)


def conditional_expectation_matrix(space: FinSpace, label_map: Mapping[str, str]) -> tuple[tuple[Fraction, ...], ...]:
    """Block-averaging matrix of a quotient, rows and columns over ``space``.

    Entry ``(x, y)`` is ``weight(y) / weight(block of x)`` when ``x`` and
    ``y`` share a block and zero otherwise.
    """
    labels = space.labels
    block_mass: dict[str, Fraction] = {}
    for l in labels:
        block_mass[label_map[l]] = block_mass.get(label_map[l], Fraction(0)) + space.weight(l)
    return tuple(
        tuple(
            space.weight(y) / block_mass[label_map[x]] if label_map[x] == label_map[y] else Fraction(0)
            for y in labels
        )
        for x in labels
    )


def functoriality_defect(p: Polymorphism, q: Polymorphism, r: float, s: float) -> float:
    """Max entry modulus of ``T(p) T(q) - T(compose(p, q))``."""
    if p.dst != q.src:
        raise ValidationError("middle spaces do not match")
    prod = transform(p, r, s).entries @ transform(q, r, s).entries
    direct = transform(compose(p, q), r, s).entries
    return float(np.max(np.abs(prod - direct))) if prod.size else 0.0


def operator_norm(mat: MellinMatrix, exponent) -> float:
    """Weighted operator norm for exponents 1, 2 and infinity.

    exponent 1   : L1 -> L1 with the space weights (matches r = 1);
    exponent 2   : L2 -> L2, largest singular value of the
                   weight-conjugated matrix (matches r = 1/2);
    exponent inf : sup norm, plain maximum row sum (matches r = 0).
    """
    a = np.abs(mat.entries)
    xw = np.array([float(w) for w in mat.src_weights])
    yw = np.array([float(w) for w in mat.dst_weights])
    if exponent == 1:
        return float(np.max((xw @ a) / yw)) if a.size else 0.0
    if exponent == 2:
        conj = np.sqrt(xw)[:, None] * mat.entries * (1.0 / np.sqrt(yw))[None, :]
        return float(np.linalg.svd(conj, compute_uv=False)[0]) if a.size else 0.0
    if exponent in (math.inf, float("inf"), "inf"):
        return float(np.max(a @ np.ones(a.shape[1]))) if a.size else 0.0
    raise ValidationError(f"unsupported exponent {exponent!r}; use 1, 2 or inf")


def exponent_for_r(r: float):
    table = {0.0: math.inf, 0.5: 2, 1.0: 1}
    if float(r) not in table:
        raise ValidationError(f"no matching norm exponent for r = {r}; supported r are 0, 1/2, 1")
    return table[float(r)]


def s_independence_defect(p: Polymorphism, s_values: Iterable[float], r: float = 0.5) -> float:
    """Max entry deviation of the transform across an ``s`` grid."""
    mats = [transform(p, r, s).entries for s in s_values]
    base = mats[0]
    return max(float(np.max(np.abs(m - base))) if m.size else 0.0 for m in mats)


def _distinct_t_count(*polys: Polymorphism) -> int:
    ts = set()
    for p in polys:
        ts.update(t for _, _, t, _ in p.atoms)
    return len(ts)


def injectivity_separates(p: Polymorphism, q: Polymorphism, tol: float = 1e-9) -> bool:
    """Probe two polymorphisms at ``k + 1`` transform points (k distinct
    derivative values between them, fixed ``r = 1/2``, integer ``s``).

    Returns True when some entry differs by more than ``tol``.  Agreement
    at all probes pins every cell measure, so distinct normal forms on the
    same spaces always separate.
    """
    if p.src != q.src or p.dst != q.dst:
        raise ValidationError("injectivity probe requires identical spaces")
    k = _distinct_t_count(p, q)
    for s in range(k + 1):
        diff = transform(p, 0.5, float(s)).entries - transform(q, 0.5, float(s)).entries
        if diff.size and float(np.max(np.abs(diff))) > tol:
            return True
    return False


def transform_rows(p: Polymorphism, grid: Iterable[tuple[float, float]]):
    """Rows ``(r, s, x, y, re, im)`` for CSV dumps, one per grid point and cell."""
    for r, s in grid:
        mat = transform(p, r, s)
        for i, x in enumerate(mat.src_labels):
            for j, y in enumerate(mat.dst_labels):
                z = mat.entries[i, j]
                yield (r, s, x, y, z.real, z.imag)
