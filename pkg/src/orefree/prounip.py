"""Pro-unipotent units (1 + a)(1 + b)^-1 with a, b in x K[x; sigma], and lifting them.

A graded homomorphism R[x; sigma] -> S[x; tau] is given by a coefficient map
phi (images of the generators of R) together with an explicit section iota of
phi. Lifting pulls a pro-unipotent element of the target back through iota.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

from .basefield import FieldElem
from .basefield.maps import ValidationResult
from .skewpoly import LeftFraction, RingMismatch, SkewPoly, SkewPolyRing, frac_mul, lclm
from .skewseries import SkewSeries, from_poly, series_invert, series_mul


class ProUnipotentError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ProUnipotent:
    """u = (1 + a)(1 + b)^-1; build through make_prounipotent."""

    a: SkewPoly
    b: SkewPoly

    @property
    def ring(self) -> SkewPolyRing:
        return self.a.ring

    def __str__(self):
        return f"(1 + {_part_str(self.a)})(1 + {_part_str(self.b)})^-1"

    def __repr__(self):
        return f"ProUnipotent({self})"

    def __eq__(self, other):
        if not isinstance(other, ProUnipotent):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def inverse(self) -> "ProUnipotent":
        return pu_inv(self)

    def to_series(self, prec: int) -> SkewSeries:
        return to_series(self, prec)

    def to_fraction(self) -> LeftFraction:
        return to_fraction(self)


def _part_str(p: SkewPoly) -> str:
    s = str(p)
    return f"({s})" if " - " in s else s


def make_prounipotent(a: SkewPoly, b: Optional[SkewPoly] = None) -> ProUnipotent:
    ring = a.ring
    if b is None:
        b = ring.zero()
    if b.ring is not ring:
        raise RingMismatch("a and b must share a ring")
    if not ring.delta.is_zero:
        raise ProUnipotentError("pro-unipotent elements need an automorphism-type ring (delta = 0)")
    for name, part in (("a", a), ("b", b)):
        if part.coeffs and min(part.coeffs) < 1:
            raise ProUnipotentError(f"{name} must lie in x*K[x; sigma] (valuation >= 1), got {part}")
    return ProUnipotent(a, b)


def to_series(u: ProUnipotent, prec: int) -> SkewSeries:
    """(1 + a) * (1 + b)^-1 expanded to O(x^prec)."""
    ring = u.ring
    one = ring.one()
    num = from_poly(one + u.a, prec)
    if not u.b.coeffs:
        return num
    return series_mul(num, series_invert(from_poly(one + u.b, prec)))


def to_fraction(u: ProUnipotent) -> LeftFraction:
    """The same unit as a left fraction U^-1 V, where U(1 + a) = V(1 + b)."""
    ring = u.ring
    one = ring.one()
    if not u.b.coeffs:
        return LeftFraction(one, one + u.a)
    if u.a == u.b:
        return LeftFraction.one(ring)
    _, big_u, big_v = lclm(one + u.a, one + u.b)
    return normalize_unit_fraction(LeftFraction(big_u, big_v))


def normalize_unit_fraction(f: LeftFraction) -> LeftFraction:
    """Left-scale so the denominator has constant term 1 when that term is nonzero."""
    c0 = f.den.coeffs.get(0)
    if c0 is None or c0.is_one():
        return f
    inv = c0.inverse()
    return LeftFraction(f.den.left_scale(inv), f.num.left_scale(inv))


def pu_inv(u: ProUnipotent) -> ProUnipotent:
    """((1 + a)(1 + b)^-1)^-1 = (1 + b)(1 + a)^-1."""
    return ProUnipotent(u.b, u.a)


def pu_mul(u: ProUnipotent, v: ProUnipotent) -> LeftFraction:
    if u.ring is not v.ring:
        raise RingMismatch("pro-unipotent factors live in different rings")
    return normalize_unit_fraction(frac_mul(to_fraction(u), to_fraction(v)))


# graded homomorphisms ---------------------------------------------------------

class GradedHom:
    """phi-hat: R[x; sigma] -> S[x; tau], x -> x, coefficients through phi.

    ``phi`` maps variable ids of R's field to elements of S's field;
    ``section`` maps variable ids of S's field to elements of R's field.
    Constants pass through unchanged, so both fields need the same constants.
    """

    def __init__(self, source: SkewPolyRing, target: SkewPolyRing,
                 phi: Mapping[int, FieldElem], section: Mapping[int, FieldElem]):
        if source.field.dom != target.field.dom:
            raise ValueError("source and target need the same constant field")
        if not (source.delta.is_zero and target.delta.is_zero):
            raise ValueError("graded homomorphisms are between automorphism-type rings")
        self.source = source
        self.target = target
        self.phi = dict(phi)
        self.section = dict(section)

    @classmethod
    def identity(cls, ring: SkewPolyRing) -> "GradedHom":
        f = ring.field
        ids = {v: f.from_vid(v) for v in f.materialized_ids()}
        return cls(ring, ring, ids, ids)

    def phi_elem(self, a: FieldElem) -> FieldElem:
        missing = a.variables() - set(self.phi)
        if missing:
            names = sorted(self.source.field.var_name(v) for v in missing)
            raise ValueError(f"phi undefined on {names}")
        return a.substitute(self.phi, self.target.field)

    def section_elem(self, s: FieldElem) -> FieldElem:
        missing = s.variables() - set(self.section)
        if missing:
            names = sorted(self.target.field.var_name(v) for v in missing)
            raise ValueError(f"section undefined on {names}")
        return s.substitute(self.section, self.source.field)

    def apply_poly(self, p: SkewPoly) -> SkewPoly:
        if p.ring is not self.source:
            raise RingMismatch("polynomial is not in the source ring")
        return p.map_coeffs(self.phi_elem, self.target)

    def apply(self, u: ProUnipotent) -> ProUnipotent:
        return make_prounipotent(self.apply_poly(u.a), self.apply_poly(u.b))

    def apply_series(self, s: SkewSeries) -> SkewSeries:
        return SkewSeries(self.target, [self.phi_elem(c) for c in s.coeffs])

    def section_poly(self, p: SkewPoly) -> SkewPoly:
        if p.ring is not self.target:
            raise RingMismatch("polynomial is not in the target ring")
        return p.map_coeffs(self.section_elem, self.source)

    def validate(self, trials: int = 16, seed: int = 0) -> ValidationResult:
        """phi o sigma = tau o phi on generators, and phi o section = id on samples."""
        src, tgt = self.source.field, self.target.field
        gens = [src.from_vid(v) for v in src.materialized_ids()]
        if src.ext_degree > 1:
            gens.append(src.gen_const())
        try:
            for g in gens:
                lhs = self.phi_elem(self.source.sigma.apply(g))
                rhs = self.target.sigma.apply(self.phi_elem(g))
                if lhs != rhs:
                    return ValidationResult(False, f"phi(sigma({g})) = {lhs} != tau(phi({g})) = {rhs}")
            rng = random.Random(seed)
            tgens = [tgt.from_vid(v) for v in tgt.materialized_ids()]
            samples = tgens + [tgt.random_elem(rng, rational=False) for _ in range(trials)]
            for s in samples:
                back = self.phi_elem(self.section_elem(s))
                if back != s:
                    return ValidationResult(False, f"phi(section({s})) = {back} != {s}")
        except (ValueError, ZeroDivisionError) as exc:
            return ValidationResult(False, str(exc))
        return ValidationResult(True)


def lift(u: ProUnipotent, h: GradedHom) -> ProUnipotent:
    """u' = (1 + section(a))(1 + section(b))^-1, so that phi-hat(u') = u."""
    if u.ring is not h.target:
        raise RingMismatch("element does not live in the target of the homomorphism")
    return make_prounipotent(h.section_poly(u.a), h.section_poly(u.b))
