"""Truncated skew power series in K[[x; sigma]] (automorphism type only)."""

from __future__ import annotations

from typing import List, Optional, Sequence

from .basefield import FieldElem
from .skewpoly import _SIMPLE, RingMismatch, SkewPoly, SkewPolyRing, _xpow


class PrecisionError(ValueError):
    pass


def _require_series_ring(ring: SkewPolyRing):
    if not ring.delta.is_zero:
        raise ValueError("skew power series need delta = 0; (x) is not two-sided otherwise")


class SkewSeries:
    """c_0 + c_1 x + ... + c_{N-1} x^{N-1} + O(x^N)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: SkewPolyRing, coeffs: Sequence[FieldElem], prec: Optional[int] = None):
        _require_series_ring(ring)
        coeffs = list(coeffs)
        if prec is None:
            prec = len(coeffs)
        if prec < 1:
            raise PrecisionError("precision must be at least 1")
        zero = ring.field.zero()
        if len(coeffs) < prec:
            coeffs += [zero] * (prec - len(coeffs))
        self.ring = ring
        self.coeffs: List[FieldElem] = coeffs[:prec]

    @property
    def prec(self) -> int:
        return len(self.coeffs)

    @classmethod
    def one(cls, ring: SkewPolyRing, prec: int) -> "SkewSeries":
        return cls(ring, [ring.field.one()], prec)

    def _check(self, other: "SkewSeries"):
        if other.ring is not self.ring:
            raise RingMismatch("series live in different rings")

    def __add__(self, other: "SkewSeries") -> "SkewSeries":
        self._check(other)
        n = min(self.prec, other.prec)
        return SkewSeries(self.ring, [self.coeffs[i] + other.coeffs[i] for i in range(n)])

    def __neg__(self) -> "SkewSeries":
        return SkewSeries(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other: "SkewSeries") -> "SkewSeries":
        return self + (-other)

    def __mul__(self, other: "SkewSeries") -> "SkewSeries":
        return series_mul(self, other)

    def __pow__(self, n: int) -> "SkewSeries":
        if n < 0:
            return series_invert(self) ** (-n)
        out = SkewSeries.one(self.ring, self.prec)
        base = self
        while n:
            if n & 1:
                out = series_mul(out, base)
            n >>= 1
            if n:
                base = series_mul(base, base)
        return out

    def __eq__(self, other):
        if not isinstance(other, SkewSeries):
            return NotImplemented
        n = min(self.prec, other.prec)
        return self.coeffs[:n] == other.coeffs[:n]

    __hash__ = None

    def is_one(self) -> bool:
        return self.coeffs[0].is_one() and not any(self.coeffs[1:])

    def valuation(self) -> Optional[int]:
        return valuation(self)

    def __str__(self):
        var = self.ring.var
        pieces = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            negative = False
            s = str(c)
            if s.startswith("-") and _SIMPLE.match(str(-c)):
                negative, s = True, str(-c)
            if k == 0:
                body = s if (_SIMPLE.match(s) or not pieces) else f"({s})"
            elif s == "1":
                body = _xpow(var, k)
            else:
                body = f"{s if _SIMPLE.match(s) else f'({s})'}*{_xpow(var, k)}"
            pieces.append((negative, body))
        pieces.append((False, f"O({_xpow(var, self.prec)})"))
        out = ("-" if pieces[0][0] else "") + pieces[0][1]
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self):
        return f"SkewSeries({self})"


def series_mul(f: SkewSeries, g: SkewSeries) -> SkewSeries:
    """Coefficient k is sum_{i+j=k} f_i sigma^i(g_j)."""
    f._check(g)
    ring = f.ring
    sigma = ring.sigma
    n = min(f.prec, g.prec)
    fc, gc = f.coeffs, g.coeffs
    fnz = [(i, c) for i, c in enumerate(fc[:n]) if c]
    gnz = [(j, c) for j, c in enumerate(gc[:n]) if c]
    out: List[Optional[FieldElem]] = [None] * n
    for i, a in fnz:
        for j, b in gnz:
            k = i + j
            if k >= n:
                break
            term = a * (sigma.apply(b, i) if i else b)
            out[k] = term if out[k] is None else out[k] + term
    zero = ring.field.zero()
    return SkewSeries(ring, [c if c is not None else zero for c in out])


def series_invert(f: SkewSeries) -> SkewSeries:
    """Two-sided inverse of a unit, solving c_0 b_n = -sum_{i>=1} c_i sigma^i(b_{n-i})."""
    c0 = f.coeffs[0]
    if not c0:
        raise ZeroDivisionError("series with zero constant term is not a unit")
    sigma = f.ring.sigma
    inv0 = c0.inverse()
    b = [inv0]
    nz = [(i, c) for i, c in enumerate(f.coeffs) if c and i]
    for n in range(1, f.prec):
        acc = None
        for i, c in nz:
            if i > n:
                break
            term = c * sigma.apply(b[n - i], i)
            acc = term if acc is None else acc + term
        b.append(-(inv0 * acc) if acc is not None else f.ring.field.zero())
    return SkewSeries(f.ring, b)


def valuation(f: SkewSeries) -> Optional[int]:
    """Least k with c_k != 0, or None when every stored coefficient vanishes."""
    for k, c in enumerate(f.coeffs):
        if c:
            return k
    return None


def from_poly(p: SkewPoly, prec: int) -> SkewSeries:
    _require_series_ring(p.ring)
    if p.coeffs and min(p.coeffs) < 0:
        raise ValueError("negative exponents have no power series expansion")
    return SkewSeries(p.ring, [p.coeff(k) for k in range(prec)], prec)


def truncate(f: SkewSeries, prec: int) -> SkewSeries:
    if prec > f.prec:
        raise PrecisionError(f"cannot raise precision from {f.prec} to {prec}")
    return SkewSeries(f.ring, f.coeffs[:prec], prec)
