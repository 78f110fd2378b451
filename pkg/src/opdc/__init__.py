"""Orthogonal polynomials on the unit circle, CMV pencils, Darboux-type
transformations and the Bannai-Ito / Racah-Wilson families they connect."""

from .core import Polynomial, Rational, format_rational, parse_rational
from .errors import OPDCError
from .opuc import ReflectionSequence, classify, szego_polynomials

__all__ = [
    "OPDCError",
    "Polynomial",
    "Rational",
    "ReflectionSequence",
    "classify",
    "format_rational",
    "parse_rational",
    "szego_polynomials",
]
__version__ = "0.1.0"
