"""Sieve-driven experiments on Mobius sums sliced by the Frobenius class
of the smallest prime factor, plus exact checks of the underlying
divisor-sum dualities."""

from .errors import IntegrityError, NotSquarefreeError
from .sieve import FactorSieve
from .galois import GaloisContext, ClassOutcome, new_cyclotomic, new_splitting_field

__all__ = [
    "FactorSieve",
    "GaloisContext",
    "ClassOutcome",
    "new_cyclotomic",
    "new_splitting_field",
    "IntegrityError",
    "NotSquarefreeError",
]

__version__ = "0.1.0"
