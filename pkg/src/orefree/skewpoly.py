"""Ore extensions K[x; sigma, delta], twisted Laurent rings, and left fractions.

Elements are stored with coefficients on the left, f = sum a_i x^i, and
multiplied with the rule x * a = sigma(a) x + delta(a). Fractions are left
fractions g^-1 f; their equality is decided by cross-multiplying through a
least common left multiple, never by a canonical form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .basefield import Automorphism, FieldDescriptor, FieldElem, SigmaDerivation
from .basefield.maps import check_automorphism


class RingMismatch(ValueError):
    pass


class SkewPolyRing:
    """K[x; sigma, delta], or K[x, x^-1; sigma] when ``laurent`` is set."""

    def __init__(self, field: FieldDescriptor, sigma: Optional[Automorphism] = None,
                 delta: Optional[SigmaDerivation] = None, laurent: bool = False,
                 var: str = "x", validate: bool = False):
        self.field = field
        self.sigma = sigma if sigma is not None else Automorphism.identity(field)
        self.delta = delta if delta is not None else SigmaDerivation.zero(self.sigma)
        if self.delta.sigma is not self.sigma and not self.delta.is_zero:
            raise ValueError("delta must be twisted by the ring's sigma")
        self.laurent = laurent
        self.var = var
        if laurent and not self.delta.is_zero:
            raise ValueError("a Laurent ring needs delta = 0")
        if validate:
            res = check_automorphism(self.sigma)
            if not res:
                raise ValueError(f"sigma is not an automorphism: {res.witness}")

    @property
    def automorphism_type(self) -> bool:
        return self.delta.is_zero

    def is_commutative(self) -> bool:
        return self.sigma.is_identity() and self.delta.is_zero

    def zero(self) -> "SkewPoly":
        return SkewPoly(self, {})

    def one(self) -> "SkewPoly":
        return SkewPoly(self, {0: self.field.one()})

    def gen(self, power: int = 1) -> "SkewPoly":
        if power < 0 and not self.laurent:
            raise ValueError("negative powers of x need a Laurent ring")
        return SkewPoly(self, {power: self.field.one()})

    def const(self, c) -> "SkewPoly":
        if isinstance(c, int):
            c = self.field.from_int(c)
        return SkewPoly(self, {0: c})

    def monomial(self, c: FieldElem, k: int) -> "SkewPoly":
        return SkewPoly(self, {k: c})

    def from_coeffs(self, coeffs) -> "SkewPoly":
        if isinstance(coeffs, dict):
            return SkewPoly(self, dict(coeffs))
        return SkewPoly(self, dict(enumerate(coeffs)))

    def describe(self) -> str:
        xs = f"{self.var}, {self.var}^-1" if self.laurent else self.var
        parts = [f"sigma: {self.sigma.describe()}"]
        if not self.delta.is_zero:
            parts.append(f"delta: {self.delta.describe()}")
        return f"{self.field.describe()}[{xs}] with " + "; ".join(parts)


class SkewPoly:
    """Element sum_i a_i x^i of a SkewPolyRing (no zero coefficients stored)."""

    __slots__ = ("ring", "coeffs", "_hash")

    def __init__(self, ring: SkewPolyRing, coeffs: Dict[int, FieldElem]):
        self.ring = ring
        self.coeffs = {k: c for k, c in coeffs.items() if c}
        if not ring.laurent and any(k < 0 for k in self.coeffs):
            raise ValueError("negative exponent outside a Laurent ring")
        self._hash = None

    # structure -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def degree(self) -> int:
        """Degree in x; -1 for the zero polynomial."""
        return max(self.coeffs) if self.coeffs else -1

    def valuation(self) -> Optional[int]:
        return min(self.coeffs) if self.coeffs else None

    def lc(self) -> FieldElem:
        return self.coeffs[self.degree()]

    def coeff(self, k: int) -> FieldElem:
        c = self.coeffs.get(k)
        return c if c is not None else self.ring.field.zero()

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.lc().is_one()

    def is_const(self) -> bool:
        return not self.coeffs or set(self.coeffs) == {0}

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, SkewPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.coeffs.items()))
        return self._hash

    def _check(self, other: "SkewPoly"):
        if other.ring is not self.ring:
            raise RingMismatch("operands live in different skew polynomial rings")

    def _coerce(self, other) -> "SkewPoly":
        if isinstance(other, SkewPoly):
            self._check(other)
            return other
        if isinstance(other, (int, FieldElem)):
            return self.ring.const(other)
        raise TypeError(f"cannot combine SkewPoly with {type(other).__name__}")

    # arithmetic --------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return SkewPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return SkewPoly(self.ring, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, FieldElem)):
            other = self.ring.const(other)
        if not isinstance(other, SkewPoly):
            return NotImplemented
        return skew_mul(self, other)

    def __rmul__(self, other):
        # scalar on the left: plain coefficientwise product
        if isinstance(other, int):
            other = self.ring.field.from_int(other)
        if isinstance(other, FieldElem):
            return SkewPoly(self.ring, {k: other * c for k, c in self.coeffs.items()})
        return NotImplemented

    def left_scale(self, c: FieldElem) -> "SkewPoly":
        return SkewPoly(self.ring, {k: c * a for k, a in self.coeffs.items()})

    def __pow__(self, n: int) -> "SkewPoly":
        if n < 0:
            raise ValueError("negative power; use LeftFraction")
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def monic(self) -> "SkewPoly":
        """Left-multiply by the inverse of the leading coefficient."""
        if not self.coeffs:
            return self
        lc = self.lc()
        return self if lc.is_one() else self.left_scale(lc.inverse())

    def shift_left(self, k: int) -> "SkewPoly":
        """x^k * self."""
        return skew_mul(self.ring.gen(k), self) if k else self

    def map_coeffs(self, fn, ring: Optional[SkewPolyRing] = None) -> "SkewPoly":
        return SkewPoly(ring or self.ring, {k: fn(c) for k, c in self.coeffs.items()})

    # printing ------------------------------------------------------------------
    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"SkewPoly({self})"


_SIMPLE = re.compile(r"^[A-Za-z0-9_\[\]\^\*]+$")


def _xpow(var: str, k: int) -> str:
    return var if k == 1 else f"{var}^{k}"


def poly_str(f: SkewPoly) -> str:
    if not f.coeffs:
        return "0"
    var = f.ring.var
    pieces = []
    for k in sorted(f.coeffs, reverse=True):
        c = f.coeffs[k]
        negative = False
        s = str(c)
        if s.startswith("-"):
            ns = str(-c)
            if _SIMPLE.match(ns):
                negative, s = True, ns
        if k == 0:
            body = s if (_SIMPLE.match(s) or not pieces) else f"({s})"
        elif s == "1":
            body = _xpow(var, k)
        else:
            cs = s if _SIMPLE.match(s) else f"({s})"
            body = f"{cs}*{_xpow(var, k)}"
        pieces.append((negative, body))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


# multiplication ------------------------------------------------------------------

def _x_times(ring: SkewPolyRing, g: Dict[int, FieldElem]) -> Dict[int, FieldElem]:
    """x * g under x a = sigma(a) x + delta(a)."""
    sigma, delta = ring.sigma, ring.delta
    out: Dict[int, FieldElem] = {}
    for k, c in g.items():
        s = sigma.apply(c)
        out[k + 1] = out[k + 1] + s if k + 1 in out else s
        d = delta.apply(c)
        if d:
            out[k] = out[k] + d if k in out else d
    return {k: c for k, c in out.items() if c}


def skew_mul(f: SkewPoly, g: SkewPoly) -> SkewPoly:
    """Product in K[x; sigma, delta]."""
    if g.ring is not f.ring:
        raise RingMismatch("operands live in different skew polynomial rings")
    ring = f.ring
    if not f.coeffs or not g.coeffs:
        return ring.zero()
    out: Dict[int, FieldElem] = {}
    if ring.delta.is_zero:
        sigma = ring.sigma
        for i, a in f.coeffs.items():
            for j, b in g.coeffs.items():
                term = a * sigma.apply(b, i)
                k = i + j
                out[k] = out[k] + term if k in out else term
        return SkewPoly(ring, out)
    # derivation part present: walk x^i * g upwards
    h = dict(g.coeffs)
    top = f.degree()
    for i in range(0, top + 1):
        a = f.coeffs.get(i)
        if a is not None:
            for k, c in h.items():
                term = a * c
                out[k] = out[k] + term if k in out else term
        if i < top:
            h = _x_times(ring, h)
    return SkewPoly(ring, out)


# Euclidean structure ----------------------------------------------------------------

def _divmod_right(f: SkewPoly, g: SkewPoly) -> Tuple[SkewPoly, SkewPoly]:
    ring = f.ring
    sigma = ring.sigma
    if not g.coeffs:
        raise ZeroDivisionError("right division by zero")
    m = g.degree()
    b = g.lc()
    q: Dict[int, FieldElem] = {}
    r = f
    while r.coeffs and r.degree() >= m:
        n = r.degree()
        c = r.lc() / sigma.apply(b, n - m)
        q[n - m] = c
        r = r - skew_mul(ring.monomial(c, n - m), g)
        if r.coeffs.get(n):
            raise ArithmeticError("leading term did not cancel; sigma is not injective on this input")
    return SkewPoly(ring, q), r


def _divmod_left(f: SkewPoly, g: SkewPoly) -> Tuple[SkewPoly, SkewPoly]:
    ring = f.ring
    sigma = ring.sigma
    if not g.coeffs:
        raise ZeroDivisionError("left division by zero")
    m = g.degree()
    b = g.lc()
    q: Dict[int, FieldElem] = {}
    r = f
    while r.coeffs and r.degree() >= m:
        n = r.degree()
        # (b x^m)(c x^(n-m)) leads with b sigma^m(c) x^n
        c = sigma.apply(r.lc() / b, -m)
        q[n - m] = c
        r = r - skew_mul(g, ring.monomial(c, n - m))
        if r.coeffs.get(n):
            raise ArithmeticError("leading term did not cancel in left division")
    return SkewPoly(ring, q), r


def _require_polynomial(*ps: SkewPoly):
    for p in ps:
        if p.coeffs and min(p.coeffs) < 0:
            raise ValueError("Euclidean operations need nonnegative exponents")


def right_divide(f: SkewPoly, g: SkewPoly) -> Tuple[SkewPoly, SkewPoly]:
    """(q, r) with f = q*g + r and deg r < deg g."""
    f._check(g)
    if f.ring.laurent:
        raise ValueError("right_divide is defined on K[x; sigma, delta], not the Laurent ring")
    return _divmod_right(f, g)


def left_divide(f: SkewPoly, g: SkewPoly) -> Tuple[SkewPoly, SkewPoly]:
    """(q, r) with f = g*q + r and deg r < deg g."""
    f._check(g)
    _require_polynomial(f, g)
    return _divmod_left(f, g)


def gcrd(f: SkewPoly, g: SkewPoly) -> SkewPoly:
    """Monic greatest common right divisor."""
    f._check(g)
    _require_polynomial(f, g)
    if not f.coeffs and not g.coeffs:
        raise ValueError("gcrd(0, 0) is undefined")
    a, b = f, g
    while b.coeffs:
        _, r = _divmod_right(a, b)
        a, b = b, r
    return a.monic()


def gcld(f: SkewPoly, g: SkewPoly) -> SkewPoly:
    """Greatest common left divisor, normalized to leading coefficient 1."""
    f._check(g)
    _require_polynomial(f, g)
    a, b = f, g
    while b.coeffs:
        _, r = _divmod_left(a, b)
        a, b = b, r
    if not a.coeffs:
        return a
    # right-scale so the lead is 1: a * c has lead lc(a) sigma^d(c)
    d = a.degree()
    c = a.ring.sigma.apply(a.lc().inverse(), -d)
    return skew_mul(a, a.ring.const(c))


def lclm(f: SkewPoly, g: SkewPoly) -> Tuple[SkewPoly, SkewPoly, SkewPoly]:
    """(m, u, v) with m = u*f = v*g monic of least degree."""
    f._check(g)
    _require_polynomial(f, g)
    if not f.coeffs or not g.coeffs:
        raise ValueError("lclm of zero")
    ring = f.ring
    # extended right Euclid: r_i = s_i f + t_i g
    r0, r1 = f, g
    s0, s1 = ring.one(), ring.zero()
    t0, t1 = ring.zero(), ring.one()
    while r1.coeffs:
        q, r = _divmod_right(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - skew_mul(q, s1)
        t0, t1 = t1, t0 - skew_mul(q, t1)
    # s1 f + t1 g = 0 and s1 f is the least common left multiple
    m = skew_mul(s1, f)
    c = m.lc().inverse()
    u = s1.left_scale(c)
    v = (-t1).left_scale(c)
    return m.left_scale(c), u, v


# fractions -------------------------------------------------------------------

class LeftFraction:
    """den^-1 * num in Frac(K[x; sigma, delta]).

    In a Laurent ring both parts are left-multiplied by a power of x so that
    every exponent is nonnegative; Frac is the same either way.
    """

    __slots__ = ("den", "num")

    def __init__(self, den: SkewPoly, num: SkewPoly):
        den._check(num)
        if not den.coeffs:
            raise ZeroDivisionError("left fraction with zero denominator")
        if den.ring.laurent:
            low = min(min(den.coeffs), min(num.coeffs) if num.coeffs else 0)
            if low < 0:
                den, num = den.shift_left(-low), num.shift_left(-low)
            # strip a common left power of x
            vd = min(den.coeffs)
            vn = min(num.coeffs) if num.coeffs else vd
            k = min(vd, vn)
            if k > 0:
                den, num = den.shift_left(-k), num.shift_left(-k)
        self.den = den
        self.num = num

    @property
    def ring(self) -> SkewPolyRing:
        return self.den.ring

    @classmethod
    def from_poly(cls, f: SkewPoly) -> "LeftFraction":
        return cls(f.ring.one(), f)

    @classmethod
    def one(cls, ring: SkewPolyRing) -> "LeftFraction":
        return cls(ring.one(), ring.one())

    def _coerce(self, other) -> "LeftFraction":
        if isinstance(other, LeftFraction):
            return other
        if isinstance(other, SkewPoly):
            return LeftFraction.from_poly(other)
        if isinstance(other, (int, FieldElem)):
            return LeftFraction.from_poly(self.ring.const(other))
        raise TypeError(f"cannot combine LeftFraction with {type(other).__name__}")

    def is_zero(self) -> bool:
        return not self.num.coeffs

    def is_one(self) -> bool:
        return self.num == self.den

    def __add__(self, other):
        return frac_add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return LeftFraction(self.den, -self.num)

    def __sub__(self, other):
        return frac_add(self, -self._coerce(other))

    def __rsub__(self, other):
        return frac_add(self._coerce(other), -self)

    def __mul__(self, other):
        return frac_mul(self, self._coerce(other))

    def __rmul__(self, other):
        return frac_mul(self._coerce(other), self)

    def inverse(self) -> "LeftFraction":
        return frac_inv(self)

    def __truediv__(self, other):
        return frac_mul(self, frac_inv(self._coerce(other)))

    def __pow__(self, n: int) -> "LeftFraction":
        base = self if n >= 0 else frac_inv(self)
        out = LeftFraction.one(self.ring)
        for _ in range(abs(n)):
            out = frac_mul(out, base)
        return out

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return frac_eq(self, other)

    __hash__ = None

    def reduced(self) -> "LeftFraction":
        """Cancel the greatest common left divisor of den and num."""
        if not self.num.coeffs:
            return LeftFraction(self.ring.one(), self.num)
        d = gcld(self.den, self.num)
        if d.degree() > 0:
            den, r1 = _divmod_left(self.den, d)
            num, r2 = _divmod_left(self.num, d)
            if r1.coeffs or r2.coeffs:
                raise ArithmeticError("gcld does not divide its inputs")
        else:
            den, num = self.den, self.num
        c = den.lc().inverse()
        return LeftFraction(den.left_scale(c), num.left_scale(c))

    def as_poly(self) -> Optional[SkewPoly]:
        """The polynomial equal to self, if there is one."""
        q, r = _divmod_left(self.num, self.den)
        return None if r.coeffs else q

    def __str__(self):
        red = self.reduced()
        p = red.as_poly()
        if p is not None:
            return str(p)
        return f"({red.den})^-1*({red.num})"

    def __repr__(self):
        return f"LeftFraction({self})"


def frac_add(a: LeftFraction, b: LeftFraction) -> LeftFraction:
    a.den._check(b.den)
    if a.den == b.den:
        return LeftFraction(a.den, a.num + b.num)
    m, u, v = lclm(a.den, b.den)
    return LeftFraction(m, skew_mul(u, a.num) + skew_mul(v, b.num))


def frac_mul(a: LeftFraction, b: LeftFraction) -> LeftFraction:
    a.den._check(b.den)
    if not a.num.coeffs or not b.num.coeffs:
        return LeftFraction(a.ring.one(), a.ring.zero())
    _, u, v = lclm(a.num, b.den)
    # u f = v d, so f d^-1 = u^-1 v
    return LeftFraction(skew_mul(u, a.den), skew_mul(v, b.num))


def frac_inv(a: LeftFraction) -> LeftFraction:
    if not a.num.coeffs:
        raise ZeroDivisionError("inverse of zero in Frac(R)")
    return LeftFraction(a.num, a.den)


def frac_eq(a: LeftFraction, b: LeftFraction) -> bool:
    a.den._check(b.den)
    if a.den == b.den:
        return a.num == b.num
    _, u, v = lclm(a.den, b.den)
    return skew_mul(u, a.num) == skew_mul(v, b.num)


# normalization ----------------------------------------------------------------

COMMUTATIVE = "COMMUTATIVE"
DERIVATION_TYPE = "DERIVATION_TYPE"
AUTOMORPHISM_TYPE = "AUTOMORPHISM_TYPE"
TWISTED_REDUCED = "TWISTED_REDUCED"
UNREDUCED = "UNREDUCED"


@dataclass
class NormalizationResult:
    kind: str
    ring: SkewPolyRing
    w: Optional[FieldElem] = None
    y: Optional[SkewPoly] = None
    witness: Optional[str] = None

    def report(self) -> str:
        lines = [f"kind: {self.kind}"]
        if self.w is not None:
            lines.append(f"w: {self.w}")
        if self.y is not None:
            lines.append(f"y = {self.y}")
            lines.append(f"ring: {self.ring.describe().replace('[x', '[y')}")
        if self.witness:
            lines.append(f"witness: {self.witness}")
        return "\n".join(lines)


def _generators(field: FieldDescriptor):
    gens = [field.from_vid(v) for v in field.materialized_ids()]
    if field.ext_degree > 1:
        gens.append(field.gen_const())
    return gens


def normalize_ore(ring: SkewPolyRing) -> NormalizationResult:
    """Classify the ring; when delta = delta_w is inner, change variable to y = x + w."""
    sigma, delta = ring.sigma, ring.delta
    sid = sigma.is_identity()
    if sid and delta.is_zero:
        return NormalizationResult(COMMUTATIVE, ring)
    if sid:
        return NormalizationResult(DERIVATION_TYPE, ring)
    if delta.is_zero:
        return NormalizationResult(AUTOMORPHISM_TYPE, ring)
    gens = _generators(ring.field)
    c = next((g for g in gens if sigma.apply(g) != g), None)
    if c is None:
        return NormalizationResult(UNREDUCED, ring, witness="no generator is moved by sigma")
    w = delta.apply(c) / (sigma.apply(c) - c)
    for a in gens:
        if delta.apply(a) != w * (sigma.apply(a) - a):
            return NormalizationResult(UNREDUCED, ring, w=w,
                                       witness=f"delta({a}) = {delta.apply(a)} != w*(sigma({a}) - {a})")
    y = ring.gen() + ring.const(w)
    for a in gens:
        lhs = skew_mul(y, ring.const(a))
        rhs = skew_mul(ring.const(sigma.apply(a)), y)
        if lhs != rhs:
            return NormalizationResult(UNREDUCED, ring, w=w, witness=f"y*{a} != sigma({a})*y")
    reduced = SkewPolyRing(ring.field, sigma, None, var="y")
    return NormalizationResult(TWISTED_REDUCED, reduced, w=w, y=y)
