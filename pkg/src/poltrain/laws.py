"""Randomized law batteries over the exact core.

Each law draws its own cases from a child generator of one master seed,
so any failure can be replayed from the report alone.  Laws about exact
arithmetic assert equality of normal forms and report a zero defect;
laws about float transforms report their worst defect against the
battery tolerance.

The batteries resolve operations through the module objects (``poly.star``
and friends) on purpose: fault-injection tests replace an operation on
its module and expect exactly the right laws to start failing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import mellin, polymorphism as poly, randgen, rxmeasure as rx
from .errors import PoltrainError


class LawFailure(PoltrainError):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}


@dataclass
class LawResult:
    name: str
    cases: int
    max_defect: float = 0.0
    failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def _spawn(seed: int, law_index: int, case: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(law_index, case)))


def _require(condition: bool, message: str, payload: dict) -> None:
    if not condition:
        raise LawFailure(message, payload)


# --- semiring laws ---------------------------------------------------------

def _law_conv_assoc(rng, size, tol):
    a, b, c = (randgen.rand_rxmeasure(rng, max_atoms=size) for _ in range(3))
    pay = {"a": a.to_json(), "b": b.to_json(), "c": c.to_json()}
    _require(rx.convolve(rx.convolve(a, b), c) == rx.convolve(a, rx.convolve(b, c)),
             "convolution is not associative", pay)
    _require(rx.convolve(a, b) == rx.convolve(b, a), "convolution is not commutative", pay)
    _require(rx.convolve(a, rx.delta(Fraction(1))) == a, "unit atom is not neutral", pay)
    return 0.0


def _law_semiring_homs(rng, size, tol):
    a = randgen.rand_rxmeasure(rng, max_atoms=size)
    b = randgen.rand_rxmeasure(rng, max_atoms=size)
    pay = {"a": a.to_json(), "b": b.to_json()}
    _require(rx.mass(rx.convolve(a, b)) == rx.mass(a) * rx.mass(b), "mass is not multiplicative", pay)
    _require(rx.moment(rx.convolve(a, b)) == rx.moment(a) * rx.moment(b), "moment is not multiplicative", pay)
    _require(rx.mass(rx.tmul(a)) == rx.moment(a), "density-t mass does not equal the moment", pay)
    _require(rx.flip_invert(rx.flip_invert(a)) == a, "inversion is not an involution", pay)
    return 0.0


def _law_linear_structure(rng, size, tol):
    a, b, c = (randgen.rand_rxmeasure(rng, max_atoms=size) for _ in range(3))
    factor = randgen.rand_fraction(rng)
    pay = {"a": a.to_json(), "b": b.to_json(), "c": c.to_json(), "factor": str(factor)}
    _require(rx.convolve(a, rx.add(b, c)) == rx.add(rx.convolve(a, b), rx.convolve(a, c)),
             "convolution does not distribute over addition", pay)
    _require(rx.convolve(rx.scale(a, factor), b) == rx.scale(rx.convolve(a, b), factor),
             "scaling does not commute with convolution", pay)
    return 0.0


def _law_mellin_multiplicative(rng, size, tol):
    a = randgen.rand_rxmeasure(rng, max_atoms=size)
    b = randgen.rand_rxmeasure(rng, max_atoms=size)
    r = float(rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]))
    s = float(rng.uniform(-3, 3))
    left = rx.mellin(rx.convolve(a, b), r, s)
    right = rx.mellin(a, r, s) * rx.mellin(b, r, s)
    defect = abs(left - right) / max(1.0, abs(right))
    _require(defect <= tol, "transform is not multiplicative over convolution",
             {"a": a.to_json(), "b": b.to_json(), "r": r, "s": s, "defect": defect})
    bound = rx.mellin(a, r, 0).real
    _require(abs(rx.mellin(a, r, s)) <= bound + tol, "oscillatory value exceeds the real-axis value",
             {"a": a.to_json(), "r": r, "s": s})
    _require(bound <= max(float(rx.mass(a)), float(rx.moment(a))) + tol,
             "real-axis value exceeds the endpoint bound", {"a": a.to_json(), "r": r})
    return defect


SEMIRING_LAWS: list[tuple[str, Callable]] = [
    ("conv-assoc-comm-unit", _law_conv_assoc),
    ("mass-moment-homs", _law_semiring_homs),
    ("linear-structure", _law_linear_structure),
    ("mellin-multiplicative", _law_mellin_multiplicative),
]


# --- category laws ---------------------------------------------------------

def _law_compose_assoc(rng, size, tol):
    p, q, r = randgen.rand_composable(rng, 3, max_atoms=size)
    pay = {"p": p.to_json(), "q": q.to_json(), "r": r.to_json()}
    _require(poly.compose(poly.compose(p, q), r) == poly.compose(p, poly.compose(q, r)),
             "composition is not associative", pay)
    return 0.0


def _law_star_antihom(rng, size, tol):
    p, q = randgen.rand_composable(rng, 2, max_atoms=size)
    pay = {"p": p.to_json(), "q": q.to_json()}
    _require(poly.star(poly.compose(p, q)) == poly.compose(poly.star(q), poly.star(p)),
             "adjoint is not an anti-homomorphism", pay)
    _require(poly.star(poly.star(p)) == p, "adjoint is not an involution", pay)
    return 0.0


def _law_validity_closure(rng, size, tol):
    p, q = randgen.rand_composable(rng, 2, max_atoms=size)
    pay = {"p": p.to_json(), "q": q.to_json()}
    _require(poly.validate(poly.compose(p, q)) == [], "composition broke the marginal conditions", pay)
    _require(poly.validate(poly.star(p)) == [], "adjoint broke the marginal conditions", pay)
    return 0.0


def _law_bijection_embedding(rng, size, tol):
    space = randgen.rand_space(rng, max_atoms=size)
    g = randgen.rand_permutation_map(rng, space)
    h = randgen.rand_permutation_map(rng, space)
    pay = {"space": space.to_json(), "g": g, "h": h}
    gh = {x: h[g[x]] for x in space.labels}
    _require(poly.compose(poly.from_bijection(space, g), poly.from_bijection(space, h))
             == poly.from_bijection(space, gh),
             "bijection embedding is not a homomorphism", pay)
    ginv = {v: k for k, v in g.items()}
    _require(poly.star(poly.from_bijection(space, g)) == poly.from_bijection(space, ginv),
             "adjoint does not invert the bijection embedding", pay)
    _require(poly.compose(poly.from_bijection(space, g), poly.star(poly.from_bijection(space, g)))
             == poly.identity(space),
             "bijection roundtrip is not the identity", pay)
    return 0.0


def _law_projections(rng, size, tol):
    space = randgen.rand_space(rng, max_atoms=size)
    part = randgen.rand_partition(rng, space.labels)
    l, m = poly.cond_exp_poly(space, part)
    pay = {"space": space.to_json(), "partition": part.to_json()}
    _require(poly.compose(m, m) == m, "block averaging is not idempotent", pay)
    _require(poly.star(m) == m, "block averaging is not self-adjoint", pay)
    _require(poly.is_measure_preserving(m), "block averaging moved the derivative off 1", pay)
    _require(poly.compose(poly.star(l), l) == poly.identity(l.dst),
             "quotient roundtrip is not the unit on the quotient", pay)
    return 0.0


def _law_distance_metric(rng, size, tol):
    p = randgen.rand_polymorphism(rng, max_atoms=size)
    shuffle = poly.from_bijection(p.src, randgen.rand_permutation_map(rng, p.src))
    q = poly.compose(shuffle, p)
    dpq = poly.distance(p, q)
    dqp = poly.distance(q, p)
    pay = {"p": p.to_json(), "q": q.to_json()}
    _require(poly.distance(p, p) == 0.0, "distance of a value to itself is not zero", pay)
    defect = abs(dpq - dqp)
    _require(defect <= tol, "distance is not symmetric", pay)
    if p != q:
        _require(dpq > 0.0, "distinct normal forms at distance zero", pay)
    return defect


CATEGORY_LAWS: list[tuple[str, Callable]] = [
    ("compose-assoc", _law_compose_assoc),
    ("star-antihom-involution", _law_star_antihom),
    ("validity-closure", _law_validity_closure),
    ("gms-embedding-roundtrip", _law_bijection_embedding),
    ("projection-laws", _law_projections),
    ("distance-pseudometric", _law_distance_metric),
]


# --- transform laws --------------------------------------------------------

GRID_R = (0.0, 0.25, 0.5, 0.75, 1.0)
GRID_S = (-2.0, -1.0, 0.0, 1.0, 3.0)
DEFAULT_GRID = tuple((r, s) for r in GRID_R for s in GRID_S)


def _law_duality(rng, size, tol):
    p = randgen.rand_polymorphism(rng, max_atoms=size)
    phi = randgen.rand_function(rng, p.src.labels)
    psi = randgen.rand_function(rng, p.dst.labels)
    r = float(rng.choice(GRID_R))
    s = float(rng.choice(GRID_S))
    mat = mellin.transform(p, r, s)
    lhs = sum(
        float(w) * complex(phi[x]) * v
        for (x, w), v in zip(p.src.atoms, mat.apply(psi))
    )
    rhs = mellin.bilinear_form(p, phi, psi, r, s)
    defect = abs(lhs - rhs)
    _require(defect <= tol, "matrix action does not reproduce the bilinear form",
             {"p": p.to_json(), "r": r, "s": s, "defect": defect})
    return defect


def _law_functoriality(rng, size, tol):
    p, q = randgen.rand_composable(rng, 2, max_atoms=size)
    r = float(rng.choice(GRID_R))
    s = float(rng.choice(GRID_S))
    defect = mellin.functoriality_defect(p, q, r, s)
    _require(defect <= tol, "transform of a composition is not the matrix product",
             {"p": p.to_json(), "q": q.to_json(), "r": r, "s": s, "defect": defect})
    return defect


def _law_contraction(rng, size, tol):
    p = randgen.rand_polymorphism(rng, max_atoms=size)
    s = float(rng.choice(GRID_S))
    worst = 0.0
    for r in (0.0, 0.5, 1.0):
        norm = mellin.operator_norm(mellin.transform(p, r, s), mellin.exponent_for_r(r))
        worst = max(worst, norm - 1.0)
        _require(norm <= 1.0 + tol, "transform norm exceeds 1",
                 {"p": p.to_json(), "r": r, "s": s, "norm": norm})
    return max(worst, 0.0)


def _law_s_independence(rng, size, tol):
    space = randgen.rand_space(rng, max_atoms=size)
    part = randgen.rand_partition(rng, space.labels)
    _, m = poly.cond_exp_poly(space, part)
    defect = mellin.s_independence_defect(m, GRID_S)
    _require(defect <= tol, "measure-preserving transform depends on the oscillation",
             {"space": space.to_json(), "partition": part.to_json(), "defect": defect})
    return defect


def _law_injectivity(rng, size, tol):
    p = randgen.rand_polymorphism(rng, max_atoms=size)
    x, y, t, m = p.atoms[int(rng.integers(0, len(p.atoms)))]
    bump = Fraction(int(rng.integers(2, 5)))
    perturbed = poly.Polymorphism(
        p.src, p.dst,
        [(ax, ay, at * bump if (ax, ay, at) == (x, y, t) else at, am) for ax, ay, at, am in p.atoms],
    )
    pay = {"p": p.to_json(), "perturbed": perturbed.to_json()}
    _require(mellin.injectivity_separates(p, perturbed), "perturbed atom list was not separated", pay)
    _require(not mellin.injectivity_separates(p, poly.Polymorphism(p.src, p.dst, p.atoms)),
             "equal normal forms were separated", pay)
    return 0.0


TRANSFORM_LAWS: list[tuple[str, Callable]] = [
    ("duality", _law_duality),
    ("functoriality", _law_functoriality),
    ("contraction", _law_contraction),
    ("s-independence", _law_s_independence),
    ("injectivity", _law_injectivity),
]

ALL_LAWS = SEMIRING_LAWS + CATEGORY_LAWS + TRANSFORM_LAWS


def _minimize(law: Callable, seed: int, law_index: int, tol: float, size: int) -> dict | None:
    """Look for a failing case at the smallest size bound that still fails."""
    for small in range(1, size + 1):
        for attempt in range(300):
            rng = _spawn(seed, law_index, 1_000_000 + small * 1000 + attempt)
            try:
                law(rng, small, tol)
            except LawFailure as exc:
                return {"size": small, "message": str(exc), **exc.payload}
            except PoltrainError as exc:
                return {"size": small, "message": f"{type(exc).__name__}: {exc}"}
    return None


def run_battery(
    laws: list[tuple[str, Callable]],
    seed: int,
    cases: int,
    tol: float = 1e-12,
    size: int = 6,
) -> list[LawResult]:
    results = []
    for law_index, (name, law) in enumerate(laws):
        result = LawResult(name=name, cases=cases)
        for case in range(cases):
            rng = _spawn(seed, law_index, case)
            try:
                result.max_defect = max(result.max_defect, float(law(rng, size, tol)))
            except LawFailure as exc:
                result.failure = {"case": case, "message": str(exc), **exc.payload}
            except PoltrainError as exc:
                result.failure = {"case": case, "message": f"{type(exc).__name__}: {exc}"}
            if result.failure is not None:
                smaller = _minimize(law, seed, law_index, tol, size)
                if smaller is not None:
                    result.failure = {"case": case, **smaller}
                break
        results.append(result)
    return results
