"""Finitely supported permutations and their stabilizer double cosets.

Conventions, fixed once for the whole package:

* permutations act on the right of the positive integers and products
  read left to right: ``(g * h)(i) = h(g(i))``;
* ``K(a)`` denotes the pointwise stabilizer of ``{1..a}``;
* the double coset of ``g`` with respect to ``(K(a), K(b))`` is the orbit
  ``{k * g * l : k in K(a), l in K(b)}`` in the product above, i.e. the
  ``K(a)`` factor acts on the domain side of ``g`` and the ``K(b)``
  factor on the value side.

The canonical form of such a coset is the partial injection
``{(i, g(i)) : i <= a, g(i) <= b}`` from ``{1..a}`` into ``{1..b}``; the
test suite certifies completeness of this invariant against brute-force
orbit enumeration on truncations.  Products of cosets are computed by
sandwiching a block swap between representatives and reading the coset of
the result once the block clears every support; the sandwich index is
checked at two consecutive safe cutoffs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import StabilizationError, ValidationError


class FinPerm:
    """Permutation of the positive integers with finite support."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        mp = {}
        for i, j in items:
            i, j = int(i), int(j)
            if i < 1 or j < 1:
                raise ValidationError("permutations act on the positive integers")
            if i in mp:
                raise ValidationError(f"duplicate source {i} in permutation")
            if i != j:
                mp[i] = j
        values = list(mp.values())
        if len(set(values)) != len(values) or set(values) != set(mp):
            raise ValidationError("mapping is not a permutation of its support")
        object.__setattr__(self, "_map", mp)

    def __setattr__(self, name, value):
        raise AttributeError("FinPerm is immutable")

    def apply(self, i: int) -> int:
        return self._map.get(i, i)

    def __call__(self, i: int) -> int:
        return self.apply(i)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self._map)

    def support_bound(self) -> int:
        return max(self._map, default=0)

    def then(self, other: "FinPerm") -> "FinPerm":
        """Left-to-right product: apply ``self`` first, then ``other``."""
        keys = set(self._map) | set(other._map)
        return FinPerm({i: other.apply(self.apply(i)) for i in keys})

    def __mul__(self, other: "FinPerm") -> "FinPerm":
        return self.then(other)

    def inverse(self) -> "FinPerm":
        return FinPerm({j: i for i, j in self._map.items()})

    def is_identity(self) -> bool:
        return not self._map

    def __eq__(self, other) -> bool:
        return isinstance(other, FinPerm) and self._map == other._map

    def __hash__(self) -> int:
        return hash(frozenset(self._map.items()))

    def __repr__(self) -> str:
        return f"FinPerm({self.to_cycles()!r})"

    def to_cycles(self) -> str:
        seen = set()
        cycles = []
        for start in sorted(self._map):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self._map[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self._map[nxt]
            cycles.append("(" + " ".join(map(str, cycle)) + ")")
        return "".join(cycles) or "()"

    @classmethod
    def from_cycles(cls, text: str) -> "FinPerm":
        text = text.strip()
        if text in ("", "()"):
            return cls()
        if not re.fullmatch(r"(\(\s*\d+(\s+\d+)*\s*\))+", text):
            raise ValidationError(f"bad cycle notation {text!r}")
        mapping: dict[int, int] = {}
        for body in re.findall(r"\(([^()]*)\)", text):
            entries = [int(tok) for tok in body.split()]
            if len(set(entries)) != len(entries):
                raise ValidationError(f"repeated point inside cycle ({body})")
            for a, b in zip(entries, entries[1:] + entries[:1]):
                if a in mapping:
                    raise ValidationError(f"point {a} appears in two cycles")
                mapping[a] = b
        return cls(mapping)


IDENTITY = FinPerm()


def transposition(i: int, j: int) -> FinPerm:
    if i == j:
        return FinPerm()
    return FinPerm({i: j, j: i})


def theta(alpha: int, n: int) -> FinPerm:
    """Block swap exchanging ``alpha+i`` and ``alpha+n+i`` for ``1 <= i <= n``.

    An involution fixing ``{1..alpha}`` pointwise, hence a member of the
    stabilizer ``K(alpha)``.
    """
    if alpha < 0:
        raise ValidationError(f"stabilizer index must be nonnegative, got {alpha}")
    if n < 1:
        raise ValidationError(f"block size must be positive, got {n}")
    mp = {}
    for i in range(1, n + 1):
        mp[alpha + i] = alpha + n + i
        mp[alpha + n + i] = alpha + i
    return FinPerm(mp)


@dataclass(frozen=True)
class DCoset:
    """Double coset of ``(K(alpha), K(beta))`` as a canonical partial injection
    from ``{1..alpha}`` into ``{1..beta}``, stored as sorted ``(i, g(i))`` pairs."""

    alpha: int
    beta: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("stabilizer indices must be nonnegative")
        doms = [i for i, _ in self.pairs]
        imgs = [j for _, j in self.pairs]
        if len(set(doms)) != len(doms) or len(set(imgs)) != len(imgs):
            raise ValidationError("partial injection has a repeated point")
        if any(not (1 <= i <= self.alpha) for i in doms) or any(not (1 <= j <= self.beta) for j in imgs):
            raise ValidationError("partial injection leaves its index ranges")
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "pinj": [list(p) for p in self.pairs]}

    @classmethod
    def from_json(cls, data: dict) -> "DCoset":
        return cls(int(data["alpha"]), int(data["beta"]), tuple((int(i), int(j)) for i, j in data["pinj"]))


def dcoset_of(g: FinPerm, alpha: int, beta: int) -> DCoset:
    """Canonical form of the coset of ``g``: the graph of ``g`` restricted
    to ``{1..alpha}`` and corestricted to ``{1..beta}``."""
    if alpha < 0 or beta < 0:
        raise ValidationError("stabilizer indices must be nonnegative")
    pairs = tuple((i, g.apply(i)) for i in range(1, alpha + 1) if g.apply(i) <= beta)
    return DCoset(alpha, beta, pairs)


def coset_representative(d: DCoset) -> FinPerm:
    """A finitely supported permutation whose coset is exactly ``d``.

    Matched points follow the partial injection; unmatched domain points
    are sent beyond ``beta`` and unmatched image points are hit from
    beyond ``alpha``, so no spurious pairs appear.
    """
    mp = d.as_dict()
    fresh = max([d.alpha, d.beta, *mp.values(), *mp.keys(), 0]) + 1
    mapping = dict(mp)
    for i in range(1, d.alpha + 1):
        if i not in mapping:
            mapping[i] = fresh
            fresh += 1
    used_targets = set(mapping.values())
    for j in range(1, d.beta + 1):
        if j not in used_targets:
            mapping[fresh] = j
            used_targets.add(j)
            fresh += 1
    # Close the finite set: pair leftover sources with leftover targets.
    points = set(mapping) | set(mapping.values())
    free_src = sorted(points - set(mapping))
    free_dst = sorted(points - set(mapping.values()))
    mapping.update(zip(free_src, free_dst))
    rep = FinPerm(mapping)
    got = dcoset_of(rep, d.alpha, d.beta)
    if got != d:
        raise AssertionError(f"representative construction is wrong: {got} != {d}")
    return rep


def pinj_compose(d1: DCoset, d2: DCoset) -> DCoset:
    """Composition of partial injections, the expected value of :func:`mult`."""
    if d1.beta != d2.alpha:
        raise ValidationError("inner indices do not match")
    m2 = d2.as_dict()
    pairs = tuple((i, m2[j]) for i, j in d1.pairs if j in m2)
    return DCoset(d1.alpha, d2.beta, pairs)


def mult(d1: DCoset, d2: DCoset, extra: int = 0) -> DCoset:
    """Product of double cosets through the stabilized block-swap sandwich.

    Representatives ``g`` of ``d1`` and ``h`` of ``d2`` are chained as
    ``g * theta(beta, N) * h``; the coset of the result is constant once
    ``N`` clears every support bound, which is verified by recomputing at
    ``N + 1``.  ``extra`` enlarges the cutoff (useful for stress tests).
    """
    if d1.beta != d2.alpha:
        raise ValidationError(f"inner indices do not match: {d1.beta} vs {d2.alpha}")
    g = coset_representative(d1)
    h = coset_representative(d2)
    beta = d1.beta
    n0 = max(g.support_bound(), h.support_bound(), d1.alpha, beta, d2.beta, 1) + extra
    first = dcoset_of(g.then(theta(beta, n0)).then(h), d1.alpha, d2.beta)
    second = dcoset_of(g.then(theta(beta, n0 + 1)).then(h), d1.alpha, d2.beta)
    if first != second:
        raise StabilizationError(
            f"coset product did not stabilize between cutoffs {n0} and {n0 + 1}"
        )
    return first


def identity_coset(alpha: int, beta: int) -> DCoset:
    return dcoset_of(IDENTITY, alpha, beta)
