"""Desk-scale tools for polynomial equations over the primes."""

from ._backend import BACKEND
from .errors import (
    ConstructionError,
    DomainError,
    GuardError,
    IntegrityError,
    NoUnitRoot,
    PrimeregError,
)
from .numtheory import cf_approx, crt_solve, li, sieve_primes
from .poly import IntPoly, parse_poly, taylor_shift

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConstructionError",
    "DomainError",
    "GuardError",
    "IntPoly",
    "IntegrityError",
    "NoUnitRoot",
    "PrimeregError",
    "cf_approx",
    "crt_solve",
    "li",
    "parse_poly",
    "sieve_primes",
    "taylor_shift",
]
