"""Deterministic random generators for exact test objects.

Everything derives from one ``numpy`` seed sequence so that a report can
name a single integer and every case can be replayed: case ``k`` of a
battery uses the child generator ``spawn(seed, k)``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .dcosets import FinPerm
from .finspace import FinSpace, Partition
from .polymorphism import Polymorphism, require_valid
from .rxmeasure import RxMeasure


def rng_from(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def spawn(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def rand_fraction(rng, max_part: int = 9) -> Fraction:
    """Positive rational with numerator and denominator up to ``max_part``."""
    return Fraction(int(rng.integers(1, max_part + 1)), int(rng.integers(1, max_part + 1)))


def rand_rxmeasure(rng, max_atoms: int = 6, max_part: int = 9) -> RxMeasure:
    k = int(rng.integers(0, max_atoms + 1))
    return RxMeasure(
        ((rand_fraction(rng, max_part), rand_fraction(rng, max_part)) for _ in range(k))
    )


def rand_space(rng, max_atoms: int = 8, min_atoms: int = 1, max_part: int = 9, prefix: str = "a") -> FinSpace:
    n = int(rng.integers(min_atoms, max_atoms + 1))
    raw = [Fraction(int(rng.integers(1, max_part + 1))) for _ in range(n)]
    total = sum(raw)
    return FinSpace((f"{prefix}{k}", w / total) for k, w in enumerate(raw))


def rand_mass_split(rng, total: Fraction, parts: int) -> list[Fraction]:
    cuts = [Fraction(int(rng.integers(1, 10))) for _ in range(parts)]
    s = sum(cuts)
    return [total * c / s for c in cuts]


def rand_polymorphism(
    rng,
    src: FinSpace | None = None,
    max_atoms: int = 8,
    fanout: int = 3,
    tmax_part: int = 8,
    dst_prefix: str = "b",
) -> Polymorphism:
    """Random valid polymorphism out of ``src``.

    Masses at each source atom split its weight exactly (condition 1 by
    construction); the destination space is defined as the t-weighted
    pushforward, rescaled along the third coordinate so it is a
    probability space (condition 2 by construction).
    """
    if src is None:
        src = rand_space(rng, max_atoms=max_atoms)
    pool = [f"{dst_prefix}{k}" for k in range(int(rng.integers(1, max_atoms + 1)))]
    raw_atoms: list[tuple[str, str, Fraction, Fraction]] = []
    for x, w in src.atoms:
        parts = int(rng.integers(1, fanout + 1))
        masses = rand_mass_split(rng, w, parts)
        for m in masses:
            y = pool[int(rng.integers(0, len(pool)))]
            t = rand_fraction(rng, tmax_part)
            raw_atoms.append((x, y, t, m))
    total = sum((m * t for _, _, t, m in raw_atoms), Fraction(0))
    atoms = [(x, y, t / total, m) for x, y, t, m in raw_atoms]
    col: dict[str, Fraction] = {}
    for x, y, t, m in atoms:
        col[y] = col.get(y, Fraction(0)) + m * t
    dst = FinSpace((y, col[y]) for y in pool if y in col)
    return require_valid(Polymorphism(src, dst, atoms))


def rand_composable(rng, count: int = 2, max_atoms: int = 8, **kw) -> list[Polymorphism]:
    out = [rand_polymorphism(rng, max_atoms=max_atoms, dst_prefix="s1_", **kw)]
    for k in range(1, count):
        out.append(rand_polymorphism(rng, src=out[-1].dst, max_atoms=max_atoms, dst_prefix=f"s{k + 1}_", **kw))
    return out


def rand_permutation_map(rng, space: FinSpace) -> dict[str, str]:
    labels = list(space.labels)
    perm = rng.permutation(len(labels))
    return {labels[i]: labels[int(perm[i])] for i in range(len(labels))}


def rand_partition(rng, labels) -> Partition:
    labels = list(labels)
    k = int(rng.integers(1, len(labels) + 1))
    assignment = rng.integers(0, k, size=len(labels))
    blocks: dict[int, list[str]] = {}
    for label, b in zip(labels, assignment):
        blocks.setdefault(int(b), []).append(label)
    return Partition(blocks.values())


def refining_chain(rng, labels, steps: int = 4) -> list[Partition]:
    """Coarse-to-fine partition chain ending in singletons."""
    labels = list(labels)
    chain = [Partition.one_block(labels)]
    for _ in range(max(0, steps - 2)):
        blocks = []
        for block in chain[-1].blocks:
            members = sorted(block)
            if len(members) > 1 and rng.random() < 0.8:
                cut = int(rng.integers(1, len(members)))
                order = rng.permutation(len(members))
                blocks.append([members[int(i)] for i in order[:cut]])
                blocks.append([members[int(i)] for i in order[cut:]])
            else:
                blocks.append(members)
        chain.append(Partition(blocks))
    chain.append(Partition.singletons(labels))
    return chain


def rand_finperm(rng, bound: int = 6) -> FinPerm:
    perm = rng.permutation(bound)
    return FinPerm({i + 1: int(perm[i]) + 1 for i in range(bound)})


def rand_stabilizer_elem(rng, alpha: int, bound: int) -> FinPerm:
    """Random permutation fixing ``{1..alpha}`` with support in ``{1..bound}``."""
    n = max(bound - alpha, 0)
    perm = rng.permutation(n)
    return FinPerm({alpha + i + 1: alpha + int(perm[i]) + 1 for i in range(n)})


def rand_function(rng, labels, max_part: int = 9) -> dict[str, Fraction]:
    sign = lambda: Fraction(1) if rng.random() < 0.5 else Fraction(-1)
    return {l: sign() * rand_fraction(rng, max_part) for l in labels}
