"""Sparse multivariate polynomials over a coefficient domain.

A monomial is a sorted tuple of integer variable ids with repetition, so
``t0^2*t3`` is ``(t0, t0, t3)``. Products are tuple concatenation plus a sort,
which keeps the shift automorphism (add a constant to every id) trivial.

Monomials are compared by ``(degree, tuple)``. That is a graded term order
(a graded reverse-lex order on reversed variable ids), so leading terms are
multiplicative and exact division by leading terms terminates.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Callable, Dict, Iterable, Optional, Tuple

import flint
from gmpy2 import mpq
from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_gcd

from .coeffs import PrimeField, Rationals

Mono = Tuple[int, ...]

ONE_MONO: Mono = ()


def mono_key(m: Mono):
    return (len(m), m)


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


def mono_div(m: Mono, d: Mono) -> Optional[Mono]:
    """``m / d`` as a monomial, or None if d does not divide m."""
    if not d:
        return m
    out = []
    i = j = 0
    lm, ld = len(m), len(d)
    while i < lm:
        if j < ld and m[i] == d[j]:
            i += 1
            j += 1
        elif j < ld and d[j] < m[i]:
            return None
        else:
            out.append(m[i])
            i += 1
    if j < ld:
        return None
    return tuple(out)


def mono_gcd(a: Mono, b: Mono) -> Mono:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            out.append(a[i])
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return tuple(out)


_PACKED_MIN = 64


def _packed_mul(dom, a: Dict[Mono, object], b: Dict[Mono, object]) -> Dict[Mono, object]:
    """Product of two term dicts with exponent vectors packed into one int.

    Every variable gets a fixed-width bit field wide enough for the product's
    degree, so multiplying monomials is integer addition.
    """
    vs = sorted({v for m in a for v in m} | {v for m in b for v in m})
    deg = max(len(m) for m in a) + max(len(m) for m in b)
    width = deg.bit_length() + 1
    shift = {v: i * width for i, v in enumerate(vs)}

    def pack(terms):
        out = []
        for m, c in terms.items():
            k = 0
            for v in m:
                k += 1 << shift[v]
            out.append((k, c))
        return out

    pa, pb = pack(a), pack(b)
    acc: Dict[int, object] = {}
    get = acc.get
    if isinstance(dom, PrimeField):
        # plain ints: accumulate, reduce once
        for ka, ca in pa:
            for kb, cb in pb:
                k = ka + kb
                acc[k] = get(k, 0) + ca * cb
        p = dom.p
        items = ((k, c % p) for k, c in acc.items())
    else:
        mul, add = dom.mul, dom.add
        for ka, ca in pa:
            for kb, cb in pb:
                k = ka + kb
                c = mul(ca, cb)
                prev = get(k)
                acc[k] = c if prev is None else add(prev, c)
        items = acc.items()
    mask = (1 << width) - 1
    out: Dict[Mono, object] = {}
    zero = dom.zero
    for k, c in items:
        if c == zero:
            continue
        mono = []
        for v in vs:
            n = (k >> shift[v]) & mask
            if n:
                mono.extend([v] * n)
        out[tuple(mono)] = c
    return out


class Poly:
    """Immutable-by-convention sparse polynomial ``{monomial: coefficient}``."""

    __slots__ = ("dom", "terms", "_hash")

    def __init__(self, dom, terms: Optional[Dict[Mono, object]] = None, _clean: bool = False):
        self.dom = dom
        if terms is None:
            terms = {}
        elif not _clean:
            terms = {m: c for m, c in terms.items() if c != 0}
        self.terms = terms
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, dom, c) -> "Poly":
        """Constant polynomial from a domain value."""
        return cls(dom, {ONE_MONO: c} if c != 0 else {}, _clean=True)

    @classmethod
    def from_int(cls, dom, n: int) -> "Poly":
        return cls.const(dom, dom.coerce(n))

    @classmethod
    def var(cls, dom, vid: int, exp: int = 1) -> "Poly":
        return cls(dom, {(vid,) * exp: dom.one}, _clean=True)

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(ONE_MONO, 0) == self.dom.one

    def const_value(self):
        return self.terms.get(ONE_MONO, self.dom.zero)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # structure --------------------------------------------------------
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(len(m) for m in self.terms)

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            out.update(m)
        return out

    def lead(self) -> Tuple[Mono, object]:
        m = max(self.terms, key=mono_key)
        return m, self.terms[m]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: mono_key(mc[0]), reverse=True)

    # arithmetic -------------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        dom = self.dom
        if len(self.terms) < len(other.terms):
            small, big = self.terms, other.terms
        else:
            small, big = other.terms, self.terms
        out = dict(big)
        add = dom.add
        for m, c in small.items():
            if m in out:
                s = add(out[m], c)
                if s == 0:
                    del out[m]
                else:
                    out[m] = s
            else:
                out[m] = c
        return Poly(dom, out, _clean=True)

    def __neg__(self) -> "Poly":
        neg = self.dom.neg
        return Poly(self.dom, {m: neg(c) for m, c in self.terms.items()}, _clean=True)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        dom = self.dom
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly(dom)
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 1:
            (m, c), = a.items()
            return other.mul_term(m, c) if a is self.terms else self.mul_term(m, c)
        if len(a) * len(b) >= _PACKED_MIN:
            return Poly(dom, _packed_mul(dom, a, b))
        out: Dict[Mono, object] = {}
        mul, add = dom.mul, dom.add
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                c = mul(ca, cb)
                if m in out:
                    out[m] = add(out[m], c)
                else:
                    out[m] = c
        return Poly(dom, out)

    def mul_term(self, mono: Mono, c) -> "Poly":
        dom = self.dom
        if c == 0:
            return Poly(dom)
        mul = dom.mul
        if c == dom.one:
            if not mono:
                return self
            return Poly(dom, {mono_mul(m, mono): cc for m, cc in self.terms.items()}, _clean=True)
        return Poly(dom, {mono_mul(m, mono): mul(cc, c) for m, cc in self.terms.items()}, _clean=True)

    def scale(self, c) -> "Poly":
        return self.mul_term(ONE_MONO, c)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(self.dom, self.dom.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def map_monomials(self, fn: Callable[[Mono], Mono]) -> "Poly":
        """Apply an injective monomial map (e.g. an index shift)."""
        return Poly(self.dom, {fn(m): c for m, c in self.terms.items()}, _clean=True)

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.dom, {m: fn(c) for m, c in self.terms.items()})

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        _, lc = self.lead()
        if lc == self.dom.one:
            return self
        return self.scale(self.dom.inv(lc))

    def divexact(self, d: "Poly") -> "Poly":
        """Exact quotient; raises ArithmeticError if d does not divide self."""
        if isinstance(self.dom, PrimeField) and len(d.terms) > 1 and self.terms:
            v = _univariate_var(self, d)
            if v is not None:
                q, r = _gf_divmod(_dense(self), _dense(d), self.dom.p)
                if r:
                    raise ArithmeticError("inexact polynomial division")
                return Poly(self.dom, {(v,) * e: c for e, c in enumerate(q) if c}, _clean=True)
        q, r = self.divmod_lead(d)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def divmod_lead(self, d: "Poly"):
        if not d.terms:
            raise ZeroDivisionError("polynomial division by zero")
        dom = self.dom
        dm, dc = d.lead()
        dinv = dom.inv(dc)
        if len(d.terms) == 1:
            qt, rt = {}, {}
            for m, c in self.terms.items():
                mq = mono_div(m, dm)
                if mq is None:
                    rt[m] = c
                else:
                    qt[mq] = dom.mul(c, dinv)
            return Poly(dom, qt, _clean=True), Poly(dom, rt, _clean=True)
        q_terms: Dict[Mono, object] = {}
        rem = dict(self.terms)
        r_terms: Dict[Mono, object] = {}
        while rem:
            m = max(rem, key=mono_key)
            c = rem[m]
            mq = mono_div(m, dm)
            if mq is None:
                r_terms[m] = rem.pop(m)
                continue
            cq = dom.mul(c, dinv)
            q_terms[mq] = cq
            for md, cd in d.terms.items():
                mm = mono_mul(md, mq)
                v = dom.sub(rem.get(mm, dom.zero), dom.mul(cd, cq))
                if v == 0:
                    rem.pop(mm, None)
                else:
                    rem[mm] = v
        return Poly(dom, q_terms, _clean=True), Poly(dom, r_terms, _clean=True)

    # evaluation -------------------------------------------------------
    def evaluate(self, values: Dict[int, object], one, coeff: Callable = None):
        """Evaluate with ``values[vid]`` in any ring whose elements support + and *.

        ``coeff`` maps a coefficient into that ring (default: multiply ``one``).
        """
        total = None
        powers: Dict[Tuple[int, int], object] = {}
        for m, c in self.terms.items():
            term = coeff(c) if coeff else one * c
            i = 0
            while i < len(m):
                v = m[i]
                e = 1
                while i + e < len(m) and m[i + e] == v:
                    e += 1
                i += e
                key = (v, e)
                if key not in powers:
                    powers[key] = values[v] ** e if e > 1 else values[v]
                term = term * powers[key]
            total = term if total is None else total + term
        if total is None:
            return one * self.dom.zero if coeff is None else coeff(self.dom.zero)
        return total

    # univariate view --------------------------------------------------
    def as_univariate(self, v: int) -> Dict[int, "Poly"]:
        """Coefficients of self as a polynomial in variable v."""
        parts: Dict[int, Dict[Mono, object]] = {}
        for m, c in self.terms.items():
            e = m.count(v)
            rest = tuple(x for x in m if x != v) if e else m
            parts.setdefault(e, {})[rest] = c
        return {e: Poly(self.dom, t, _clean=True) for e, t in parts.items()}

    def __repr__(self):
        return f"Poly({self.sorted_terms()!r})"


def from_univariate(dom, v: int, coeffs: Dict[int, Poly]) -> Poly:
    out: Dict[Mono, object] = {}
    for e, p in coeffs.items():
        vv = (v,) * e
        for m, c in p.terms.items():
            out[mono_mul(m, vv)] = c
    return Poly(dom, out, _clean=True)


# gcd ------------------------------------------------------------------

def _univariate_var(a: Poly, b: Poly) -> Optional[int]:
    vs = a.variables() | b.variables()
    if len(vs) == 1:
        return next(iter(vs))
    return None


def _int_coeffs(p: Poly) -> list:
    # dense high-to-low integer coefficients of a nonzero multiple of p
    dense = {len(m): c for m, c in p.terms.items()}
    den = 1
    for c in dense.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    return [int(dense.get(e, 0) * den) for e in range(max(dense), -1, -1)]


def _uni_gcd(a: Poly, b: Poly, v: int) -> Poly:
    dom = a.dom
    if isinstance(dom, Rationals):
        # over Q plain Euclid blows up coefficients; use sympy's integer gcd
        g = dup_gcd(_int_coeffs(a), _int_coeffs(b), ZZ)
        n = len(g) - 1
        lc = mpq(int(g[0]))
        return Poly(dom, {(v,) * (n - i): mpq(int(c)) / lc for i, c in enumerate(g) if c}, _clean=True)
    if isinstance(dom, PrimeField):
        g = _gf_gcd(_dense(a), _dense(b), dom.p)
        return Poly(dom, {(v,) * e: c for e, c in enumerate(g) if c}, _clean=True)
    while b:
        _, r = _uni_divmod(a, b, v)
        a, b = b, r
    return a.monic()


def _dense(p: Poly) -> list:
    # low-to-high coefficient list of a univariate polynomial
    out = [0] * (p.degree() + 1)
    for m, c in p.terms.items():
        out[len(m)] = c
    return out


def _gf_divmod(a: list, b: list, p: int):
    """(q, r) for dense low-to-high lists over F_p; r is trimmed."""
    a = a[:]
    db = len(b) - 1
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - db, 0)
    while len(a) > db:
        c = a[-1] * inv % p
        off = len(a) - 1 - db
        q[off] = c
        if c:
            for i in range(db):
                a[off + i] = (a[off + i] - c * b[i]) % p
        a.pop()
    while a and not a[-1]:
        a.pop()
    return q, a


def _gf_gcd(a: list, b: list, p: int) -> list:
    """Monic gcd of dense low-to-high coefficient lists over F_p."""
    if len(a) < len(b):
        a, b = b, a
    a, b = a[:], b[:]
    while b:
        inv = pow(b[-1], p - 2, p)
        db = len(b) - 1
        while len(a) > db:
            c = a[-1] * inv % p
            if c:
                off = len(a) - 1 - db
                for i in range(db):
                    a[off + i] = (a[off + i] - c * b[i]) % p
            a.pop()
            while a and not a[-1]:
                a.pop()
        a, b = b, a
    inv = pow(a[-1], p - 2, p)
    return [c * inv % p for c in a]


def _uni_divmod(a: Poly, b: Poly, v: int):
    # dense univariate remainder over a field
    dom = a.dom
    da = {len(m): c for m, c in a.terms.items()}
    db = {len(m): c for m, c in b.terms.items()}
    n, m = max(da), max(db)
    inv = dom.inv(db[m])
    q = {}
    while da and n >= m:
        c = dom.mul(da[n], inv)
        q[n - m] = c
        for e, cb in db.items():
            k = e + n - m
            val = dom.sub(da.get(k, dom.zero), dom.mul(cb, c))
            if val == 0:
                da.pop(k, None)
            else:
                da[k] = val
        n = max(da) if da else -1
    qp = Poly(dom, {(v,) * e: c for e, c in q.items()}, _clean=True)
    rp = Poly(dom, {(v,) * e: c for e, c in da.items()}, _clean=True)
    return qp, rp


class _FlintBridge:
    """Converts between Poly and a FLINT mpoly over F_p or Q on given variables."""

    def __init__(self, dom, polys):
        self.dom = dom
        self.vs = sorted(set().union(*(p.variables() for p in polys)))
        self.pos = {v: i for i, v in enumerate(self.vs)}
        n = max(len(self.vs), 1)
        if isinstance(dom, PrimeField):
            self.ctx = flint.nmod_mpoly_ctx.get(("v", n), modulus=dom.p)
        else:
            self.ctx = flint.fmpq_mpoly_ctx.get(("v", n))
        self.n = n

    def to_flint(self, p: Poly):
        n, pos = self.n, self.pos
        prime = isinstance(self.dom, PrimeField)
        d = {}
        for m, c in p.terms.items():
            e = [0] * n
            for v, k in Counter(m).items():
                e[pos[v]] = k
            d[tuple(e)] = int(c) if prime else flint.fmpq(int(c.numerator), int(c.denominator))
        return self.ctx.from_dict(d)

    def from_flint(self, g) -> Poly:
        prime = isinstance(self.dom, PrimeField)
        vs = self.vs
        terms = {}
        for e, c in g.to_dict().items():
            m = tuple(v for v, k in zip(vs, e) for _ in range(k))
            terms[m] = int(c) if prime else mpq(int(c.p), int(c.q))
        return Poly(self.dom, terms, _clean=True)


def _flint_gcd(a: Poly, b: Poly) -> Poly:
    br = _FlintBridge(a.dom, (a, b))
    return br.from_flint(br.to_flint(a).gcd(br.to_flint(b))).monic()


def cancel(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    """(a/g, b/g) for g = gcd(a, b); b must be nonzero."""
    dom = a.dom
    if a and isinstance(dom, (PrimeField, Rationals)) and not (a.is_const() or b.is_const()):
        br = _FlintBridge(dom, (a, b))
        fa, fb = br.to_flint(a), br.to_flint(b)
        g = fa.gcd(fb)
        if g.is_one():
            return a, b
        return br.from_flint(fa / g), br.from_flint(fb / g)
    g = gcd(a, b)
    if g.is_one():
        return a, b
    return a.divexact(g), b.divexact(g)


def _content(coeffs: Iterable[Poly]) -> Poly:
    g = None
    for c in coeffs:
        g = c if g is None else gcd(g, c)
        if g.is_const():
            return g.monic()
    return g.monic()


def _pseudo_rem(a: Dict[int, Poly], b: Dict[int, Poly]) -> Dict[int, Poly]:
    """Pseudo-remainder of a by b as polynomials in a main variable."""
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        shift = dr - db
        new: Dict[int, Poly] = {}
        for e, c in r.items():
            new[e] = c * lb
        for e, c in b.items():
            k = e + shift
            new[k] = new.get(k, Poly(lb.dom)) - c * lr
        r = {e: c for e, c in new.items() if c}
    return r


def _primitive(coeffs: Dict[int, Poly]) -> Dict[int, Poly]:
    cont = _content(coeffs.values())
    if cont.is_one():
        return coeffs
    return {e: c.divexact(cont) for e, c in coeffs.items()}


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd of two multivariate polynomials over a field."""
    dom = a.dom
    if not a:
        return b.monic()
    if not b:
        return a.monic()
    if a.is_const() or b.is_const():
        return Poly.const(dom, dom.one)
    if a == b:
        return a.monic()
    v = _univariate_var(a, b)
    if v is not None:
        return _uni_gcd(a, b, v)
    if isinstance(dom, (PrimeField, Rationals)):
        return _flint_gcd(a, b)
    # pull out monomial content first; cheap and common
    ma = None
    for m in a.terms:
        ma = m if ma is None else mono_gcd(ma, m)
    mb = None
    for m in b.terms:
        mb = m if mb is None else mono_gcd(mb, m)
    mg = mono_gcd(ma, mb)
    if ma or mb:
        a = a.divexact(Poly(dom, {ma: dom.one}, _clean=True)) if ma else a
        b = b.divexact(Poly(dom, {mb: dom.one}, _clean=True)) if mb else b
        g = gcd(a, b)
        return g.mul_term(mg, dom.one) if mg else g
    if a.is_const() or b.is_const():
        return Poly.const(dom, dom.one)
    v = _univariate_var(a, b)
    if v is not None:
        return _uni_gcd(a, b, v)
    va, vb = a.variables(), b.variables()
    common = va & vb
    if not common:
        # gcd divides every coefficient with respect to any variable
        x = max(va)
        return gcd(_content(a.as_univariate(x).values()), b)
    x = max(common)
    ua, ub = a.as_univariate(x), b.as_univariate(x)
    ca, cb = _content(ua.values()), _content(ub.values())
    cg = gcd(ca, cb)
    pa = {e: c.divexact(ca) for e, c in ua.items()} if not ca.is_one() else ua
    pb = {e: c.divexact(cb) for e, c in ub.items()} if not cb.is_one() else ub
    if max(pa) < max(pb):
        pa, pb = pb, pa
    while True:
        r = _pseudo_rem(pa, pb)
        if not r:
            g = from_univariate(dom, x, _primitive(pb))
            break
        if max(r) == 0:
            g = Poly.const(dom, dom.one)
            break
        pa, pb = pb, _primitive(r)
    return (g * cg).monic()
