"""Exact polynomial algebra for locally nilpotent derivations and their kernels."""

from .poly import (
    GREVLEX,
    LEX,
    MonomialOrder,
    NotDivisibleError,
    PolyRing,
    Polynomial,
    RingMismatchError,
    render,
    univariate_gcd,
)
from .parser import ParseError, UndeclaredVariableError, parse

__version__ = "0.1.0"
