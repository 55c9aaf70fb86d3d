"""Exact arithmetic for polymorphisms of finite atomic measure spaces,
their strip transforms, and the double-coset train of the finitary
symmetric group acting on an i.i.d. coin space."""

__version__ = "0.1.0"

from .errors import PoltrainError, StabilizationError, ValidationError
from .rxmeasure import RxMeasure, convolve, delta, flip_invert, mass, mellin, moment, scale, tmul
from .finspace import FinSpace, Partition, bernoulli_cube, quotient, refines
from .polymorphism import (
    Polymorphism,
    compose,
    cond_exp_poly,
    distance,
    from_bijection,
    from_map,
    identity,
    is_measure_preserving,
    star,
    validate,
)
from .dcosets import DCoset, FinPerm, dcoset_of, mult, theta
from .bernoulli import (
    CompressedOp,
    CylFunction,
    act,
    closure_experiment,
    compressed_op,
    cond_expect,
    coupling_product_check,
    cube_coupling,
    inner,
    theta_limit_index,
)
from .sigmafinite import SigmaFiniteTriple, embed_bijection, escape_ladder, triple_distance, validate_triple

__all__ = [
    "PoltrainError",
    "StabilizationError",
    "ValidationError",
    "RxMeasure",
    "convolve",
    "delta",
    "flip_invert",
    "mass",
    "mellin",
    "moment",
    "scale",
    "tmul",
    "FinSpace",
    "Partition",
    "bernoulli_cube",
    "quotient",
    "refines",
    "Polymorphism",
    "compose",
    "cond_exp_poly",
    "distance",
    "from_bijection",
    "from_map",
    "identity",
    "is_measure_preserving",
    "star",
    "validate",
    "DCoset",
    "FinPerm",
    "dcoset_of",
    "mult",
    "theta",
    "CompressedOp",
    "CylFunction",
    "act",
    "closure_experiment",
    "compressed_op",
    "cond_expect",
    "coupling_product_check",
    "cube_coupling",
    "inner",
    "theta_limit_index",
    "SigmaFiniteTriple",
    "embed_bijection",
    "escape_ladder",
    "triple_distance",
    "validate_triple",
]
