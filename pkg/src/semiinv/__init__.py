"""Exact construction and verification of semi-invariants of tuples of 2x2 matrices."""

from .catalog import (
    ExponentPattern,
    GeneratorDescriptor,
    bracket,
    canonicalize_alpha,
    cycle_pattern,
    det_generator,
    enumerate_alphas,
    enumerate_generators,
    parse_descriptor,
    reconstruct,
    sigma_star,
    spanning_element,
    trace_poly,
    xi,
)
from .poly import Polynomial, coeff_extract, multidegree, parse, serialize, substitute
from .ring import GF, QQ, ZZ, CoefficientRing
from .symmat import GenericMatrix, determinant, kronecker, x_otimes_t

__version__ = "0.1.0"

__all__ = [
    "CoefficientRing", "ExponentPattern", "GF", "GeneratorDescriptor", "GenericMatrix", "Polynomial", "QQ", "ZZ",
    "bracket", "canonicalize_alpha", "coeff_extract", "cycle_pattern", "det_generator", "determinant",
    "enumerate_alphas", "enumerate_generators", "kronecker", "multidegree", "parse", "parse_descriptor",
    "reconstruct", "serialize", "sigma_star", "spanning_element", "substitute", "trace_poly", "x_otimes_t", "xi",
]
