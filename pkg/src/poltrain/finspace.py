"""Finite atomic measure spaces and finite partitions.

A ``FinSpace`` is an ordered list of labelled atoms with exact positive
rational weights.  Atom order is part of the value (it fixes matrix row
and column indexing downstream) but equality of spaces ignores it.
The ``probability`` flavor pins the total weight to exactly 1; the
``sigma-finite`` flavor leaves it free.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import ValidationError
from .rational import fraction_from_str, fraction_to_str

PROBABILITY = "probability"
SIGMA_FINITE = "sigma-finite"


class FinSpace:
    def __init__(self, atoms: Iterable[tuple[str, Fraction]], flavor: str = PROBABILITY):
        pairs = []
        seen = set()
        for label, weight in atoms:
            label = str(label)
            weight = Fraction(weight)
            if weight <= 0:
                raise ValidationError(f"atom {label!r} has nonpositive weight {weight}")
            if label in seen:
                raise ValidationError(f"duplicate atom label {label!r}")
            seen.add(label)
            pairs.append((label, weight))
        if flavor not in (PROBABILITY, SIGMA_FINITE):
            raise ValidationError(f"unknown flavor {flavor!r}")
        total = sum((w for _, w in pairs), Fraction(0))
        if flavor == PROBABILITY and total != 1:
            raise ValidationError(f"probability space must have total weight 1, got {total}")
        self._atoms = tuple(pairs)
        self._flavor = flavor

    @property
    def atoms(self) -> tuple[tuple[str, Fraction], ...]:
        return self._atoms

    @property
    def flavor(self) -> str:
        return self._flavor

    @cached_property
    def weights(self) -> dict[str, Fraction]:
        return dict(self._atoms)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self._atoms)

    def weight(self, label: str) -> Fraction:
        try:
            return self.weights[label]
        except KeyError:
            raise ValidationError(f"unknown atom label {label!r}") from None

    def total(self) -> Fraction:
        return sum((w for _, w in self._atoms), Fraction(0))

    def __len__(self) -> int:
        return len(self._atoms)

    def __eq__(self, other) -> bool:
        # Order-insensitive: two spaces are equal when they assign the same
        # weight to the same labels under the same flavor.
        return (
            isinstance(other, FinSpace)
            and self._flavor == other._flavor
            and sorted(self._atoms) == sorted(other._atoms)
        )

    def __hash__(self) -> int:
        return hash((self._flavor, tuple(sorted(self._atoms))))

    def __repr__(self) -> str:
        body = ", ".join(f"{l}: {w}" for l, w in self._atoms)
        return f"FinSpace({{{body}}}, {self._flavor})"

    def to_json(self) -> dict:
        return {
            "flavor": self._flavor,
            "atoms": [{"label": l, "weight": fraction_to_str(w)} for l, w in self._atoms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FinSpace":
        return cls(
            ((a["label"], fraction_from_str(a["weight"])) for a in data["atoms"]),
            flavor=data.get("flavor", PROBABILITY),
        )


class Partition:
    """Disjoint nonempty blocks of labels covering a label set exactly."""

    def __init__(self, blocks: Iterable[Iterable[str]]):
        blks = []
        seen: set[str] = set()
        for block in blocks:
            fs = frozenset(str(l) for l in block)
            if not fs:
                raise ValidationError("empty partition block")
            if fs & seen:
                raise ValidationError(f"overlapping partition blocks at {sorted(fs & seen)}")
            seen |= fs
            blks.append(fs)
        self._blocks = tuple(sorted(blks, key=lambda b: sorted(b)))

    @property
    def blocks(self) -> tuple[frozenset[str], ...]:
        return self._blocks

    @cached_property
    def label_set(self) -> frozenset[str]:
        return frozenset().union(*self._blocks) if self._blocks else frozenset()

    def block_of(self, label: str) -> frozenset[str]:
        for b in self._blocks:
            if label in b:
                return b
        raise ValidationError(f"label {label!r} not covered by partition")

    def covers(self, labels: Iterable[str]) -> bool:
        return self.label_set == frozenset(labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self._blocks == other._blocks

    def __hash__(self) -> int:
        return hash(self._blocks)

    def __repr__(self) -> str:
        body = ", ".join("{" + ",".join(sorted(b)) + "}" for b in self._blocks)
        return f"Partition({body})"

    def to_json(self) -> list:
        return [sorted(b) for b in self._blocks]

    @classmethod
    def from_json(cls, data: list) -> "Partition":
        return cls(data)

    @classmethod
    def singletons(cls, labels: Iterable[str]) -> "Partition":
        return cls([l] for l in labels)

    @classmethod
    def one_block(cls, labels: Iterable[str]) -> "Partition":
        return cls([list(labels)])


def block_label(block: frozenset[str]) -> str:
    return "|".join(sorted(block))


def quotient(space: FinSpace, part: Partition) -> tuple[FinSpace, dict[str, str]]:
    """Collapse each block to one atom carrying the block's total weight.

    Returns the quotient space and the map sending each label to its block
    atom.  Block atoms are ordered by first appearance in ``space`` so that
    quotient indexing stays stable.
    """
    if not part.covers(space.labels):
        raise ValidationError("partition does not cover the space's label set exactly")
    order: list[frozenset[str]] = []
    for label in space.labels:
        b = part.block_of(label)
        if b not in order:
            order.append(b)
    atoms = []
    label_map: dict[str, str] = {}
    for b in order:
        name = block_label(b)
        atoms.append((name, sum((space.weight(l) for l in b), Fraction(0))))
        for l in b:
            label_map[l] = name
    return FinSpace(atoms, flavor=space.flavor), label_map


def refines(p1: Partition, p2: Partition) -> bool:
    """True when every block of ``p1`` sits inside a block of ``p2``."""
    if p1.label_set != p2.label_set:
        raise ValidationError("partitions live on different label sets")
    for b in p1.blocks:
        rep = next(iter(b))
        if not b <= p2.block_of(rep):
            return False
    return True


def induced_partition(coarse: Partition, label_map: dict[str, str]) -> Partition:
    """Push a coarser partition through a finer quotient's label map.

    Requires the partition behind ``label_map`` to refine ``coarse``; the
    blocks of the result are the images of the coarse blocks.
    """
    return Partition({label_map[l] for l in b} for b in coarse.blocks)


def cube_labels(n: int) -> tuple[str, ...]:
    """Bit-string labels of the n-cube in lexicographic (integer) order."""
    if n < 0:
        raise ValidationError(f"cube dimension must be nonnegative, got {n}")
    return tuple(format(i, f"0{n}b") if n else "" for i in range(2**n))


def bernoulli_cube(n: int, p: Fraction) -> FinSpace:
    """Product space {0,1}^n with i.i.d. coin weight ``p`` per coordinate."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValidationError(f"coin parameter must lie strictly in (0, 1), got {p}")
    if n < 1:
        if n < 0:
            raise ValidationError(f"cube dimension must be nonnegative, got {n}")
        return FinSpace([("", Fraction(1))])
    atoms = []
    for label in cube_labels(n):
        w = Fraction(1)
        for ch in label:
            w *= p if ch == "1" else 1 - p
        atoms.append((label, w))
    return FinSpace(atoms)
