"""Exact base fields, their automorphisms and sigma-derivations."""

from .coeffs import GaloisField, PrimeField, Rationals, find_irreducible, is_prime, prime_power
from .field import FieldDescriptor, FieldElem
from .maps import (
    Automorphism,
    SigmaDerivation,
    ValidationResult,
    apply_auto,
    apply_derivation,
    check_automorphism,
    check_sigma_derivation,
    inner_derivation,
)
from .poly import Poly, gcd

__all__ = [
    "Automorphism", "FieldDescriptor", "FieldElem", "GaloisField", "Poly", "PrimeField", "Rationals",
    "SigmaDerivation", "ValidationResult", "apply_auto", "apply_derivation", "check_automorphism",
    "check_sigma_derivation", "find_irreducible", "gcd", "inner_derivation", "is_prime", "prime_power",
]
