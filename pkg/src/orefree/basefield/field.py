"""Base fields: prime fields, Q, small F_{p^k}, and rational function fields over them.

Variables are either named (``t``, ``u``, ``v``) or members of an indexed
family ``t[i]`` for i in Z. Family members are addressed by a closed-form id,
so "materializing" ``t[i]`` never mutates shared state beyond a bookkeeping
set of indices that the validators sample from.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Dict, Iterable, Optional, Tuple

from .coeffs import GaloisField, PrimeField, Rationals, is_prime
from .poly import ONE_MONO, Poly, cancel

_IDX_BITS = 40
_IDX_OFFSET = 1 << 39


def make_vid(pos: int, idx: int = 0) -> int:
    return (pos << _IDX_BITS) | (idx + _IDX_OFFSET)


def split_vid(vid: int) -> Tuple[int, int]:
    return vid >> _IDX_BITS, (vid & ((1 << _IDX_BITS) - 1)) - _IDX_OFFSET


@dataclass(frozen=True)
class FieldDescriptor:
    """A field k(variables, family[i] : i in Z) with k = Q, F_p or F_{p^k}.

    ``characteristic`` is 0 or a prime; ``ext_degree > 1`` adjoins a constant
    generator named ``gen`` with the given ``modulus`` (low-to-high, monic).
    """

    characteristic: int = 0
    variables: Tuple[str, ...] = ()
    families: Tuple[str, ...] = ()
    ext_degree: int = 1
    modulus: Optional[Tuple[int, ...]] = None
    gen: str = "w"
    _materialized: Dict[str, set] = dc_field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.characteristic != 0 and not is_prime(self.characteristic):
            raise ValueError(f"characteristic must be 0 or prime, got {self.characteristic}")
        names = list(self.variables) + list(self.families)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if self.ext_degree > 1 and self.characteristic == 0:
            raise ValueError("constant extensions are only supported in positive characteristic")
        if self.gen in names and self.ext_degree > 1:
            raise ValueError(f"constant generator {self.gen!r} clashes with a variable")
        if self.characteristic and self.characteristic >= 1 << 31:
            raise ValueError("characteristic must be a machine-word prime")

    @cached_property
    def dom(self):
        if self.characteristic == 0:
            return Rationals()
        if self.ext_degree == 1:
            return PrimeField(self.characteristic)
        return GaloisField(self.characteristic, self.ext_degree, self.modulus, gen=self.gen)

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("dom", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    # variables ---------------------------------------------------------
    def var_id(self, name: str, index: Optional[int] = None) -> int:
        if name in self.variables:
            if index is not None:
                raise KeyError(f"{name} is not an indexed family")
            return make_vid(self.variables.index(name))
        if name in self.families:
            if index is None:
                raise KeyError(f"family {name} needs an index, e.g. {name}[0]")
            self._materialized.setdefault(name, set()).add(index)
            return make_vid(len(self.variables) + self.families.index(name), index)
        raise KeyError(f"unknown variable {name!r}")

    def family_of(self, vid: int) -> Optional[str]:
        pos, _ = split_vid(vid)
        j = pos - len(self.variables)
        return self.families[j] if j >= 0 else None

    def var_name(self, vid: int) -> str:
        pos, idx = split_vid(vid)
        if pos < len(self.variables):
            return self.variables[pos]
        return f"{self.families[pos - len(self.variables)]}[{idx}]"

    def materialized_ids(self):
        """Named variables plus every family member touched so far."""
        out = [make_vid(i) for i in range(len(self.variables))]
        for j, fam in enumerate(self.families):
            for idx in sorted(self._materialized.get(fam, {0})):
                out.append(make_vid(len(self.variables) + j, idx))
        return out

    # elements ----------------------------------------------------------
    def zero(self) -> "FieldElem":
        return FieldElem(self, Poly(self.dom), _normalized=True)

    def one(self) -> "FieldElem":
        return FieldElem(self, Poly.const(self.dom, self.dom.one), _normalized=True)

    def from_int(self, n) -> "FieldElem":
        return FieldElem(self, Poly.from_int(self.dom, n), _normalized=True)

    def const(self, c) -> "FieldElem":
        return FieldElem(self, Poly.const(self.dom, c), _normalized=True)

    def gen_const(self) -> "FieldElem":
        if self.ext_degree == 1:
            raise KeyError("field has no constant generator")
        return self.const(self.dom.generator())

    def var(self, name: str, index: Optional[int] = None) -> "FieldElem":
        return FieldElem(self, Poly.var(self.dom, self.var_id(name, index)), _normalized=True)

    def from_vid(self, vid: int) -> "FieldElem":
        return FieldElem(self, Poly.var(self.dom, vid), _normalized=True)

    def poly(self, p: Poly) -> "FieldElem":
        return FieldElem(self, p, _normalized=True)

    def random_poly(self, rng: random.Random, degree: int = 2, nterms: int = 3, vids=None) -> Poly:
        vids = list(vids) if vids is not None else self.materialized_ids()
        dom = self.dom
        p = Poly(dom)
        for _ in range(nterms):
            mono = tuple(sorted(rng.choice(vids) for _ in range(rng.randint(0, degree)))) if vids else ()
            p = p + Poly(dom, {mono: dom.random(rng)})
        return p

    def random_elem(self, rng: random.Random, degree: int = 2, nterms: int = 3, rational: bool = True,
                    nonzero: bool = False, vids=None) -> "FieldElem":
        while True:
            num = self.random_poly(rng, degree, nterms, vids)
            if rational and rng.random() < 0.5:
                den = self.random_poly(rng, degree, nterms, vids)
                if not den:
                    den = Poly.const(self.dom, self.dom.one)
                e = FieldElem(self, num, den)
            else:
                e = FieldElem(self, num)
            if not nonzero or e:
                return e

    # printing ----------------------------------------------------------
    def poly_str(self, p: Poly) -> str:
        dom = self.dom
        if not p.terms:
            return "0"
        pieces = []
        # display order only; canonical normalization uses the term order in poly.py
        items = sorted(p.terms.items(), key=lambda mc: (-len(mc[0]), mc[0]))
        for mono, c in items:
            negative = False
            if isinstance(dom, Rationals) and c < 0:
                negative, c = True, -c
            cstr = dom.to_str(c)
            if " " in cstr:
                cstr = f"({cstr})"
            mstr = self._mono_str(mono)
            if not mstr:
                body = cstr
            elif c == dom.one:
                body = mstr
            else:
                body = f"{cstr}*{mstr}"
            pieces.append((negative, body))
        out = ("-" if pieces[0][0] else "") + pieces[0][1]
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def _mono_str(self, mono) -> str:
        parts = []
        i = 0
        while i < len(mono):
            v = mono[i]
            e = 1
            while i + e < len(mono) and mono[i + e] == v:
                e += 1
            i += e
            name = self.var_name(v)
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)

    def describe(self) -> str:
        k = "QQ" if self.characteristic == 0 else (
            f"GF({self.characteristic})" if self.ext_degree == 1 else f"GF({self.characteristic}^{self.ext_degree})")
        gens = list(self.variables) + [f"{f}[i]" for f in self.families]
        return f"{k}({', '.join(gens)})" if gens else k


class FieldElem:
    """Element num/den of a FieldDescriptor in canonical form.

    Canonical: gcd(num, den) = 1 and den has leading coefficient 1 in the
    graded term order, so equality is comparison of the two term dicts.
    """

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field: FieldDescriptor, num: Poly, den: Optional[Poly] = None, _normalized: bool = False):
        self.field = field
        self._hash = None
        dom = num.dom
        if den is None:
            self.num = num
            self.den = Poly.const(dom, dom.one)
            return
        if _normalized:
            self.num, self.den = num, den
            return
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = num, Poly.const(dom, dom.one)
            return
        if den.is_const():
            c = den.const_value()
            self.num = num if c == dom.one else num.scale(dom.inv(c))
            self.den = Poly.const(dom, dom.one)
            return
        num, den = cancel(num, den)
        _, lc = den.lead()
        if lc != dom.one:
            inv = dom.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        if den.is_const():
            den = Poly.const(dom, dom.one)
        self.num, self.den = num, den

    @classmethod
    def coprime(cls, field: FieldDescriptor, num: Poly, den: Poly) -> "FieldElem":
        """num/den for polynomials already known to be coprime; only rescales."""
        if not den:
            raise ZeroDivisionError("zero denominator")
        dom = num.dom
        _, lc = den.lead()
        if lc != dom.one:
            inv = dom.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        if den.is_const():
            den = Poly.const(dom, dom.one)
        return cls(field, num, den, _normalized=True)

    # predicates ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self):
        return bool(self.num.terms)

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_one()

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.from_int(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.num.terms == other.num.terms and self.den.terms == other.den.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            return other
        if isinstance(other, int):
            return self.field.from_int(other)
        raise TypeError(f"cannot combine FieldElem with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        f = self.field
        if self.den.is_one() and other.den.is_one():
            return FieldElem(f, self.num + other.num, _normalized=True)
        if self.den == other.den:
            return FieldElem(f, self.num + other.num, self.den)
        return FieldElem(f, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.field, -self.num, self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, FieldElem):
            if isinstance(other, int):
                return FieldElem(self.field, self.num.scale(self.field.dom.coerce(other)), self.den)
            return NotImplemented
        f = self.field
        if self.den.is_one() and other.den.is_one():
            return FieldElem(f, self.num * other.num, _normalized=True)
        if not self.num or not other.num:
            return f.zero()
        a, b, c, d = self.num, self.den, other.num, other.den
        a, d = cancel(a, d)
        c, b = cancel(c, b)
        # both inputs are reduced, so after cross-cancelling nothing is left to cancel
        return FieldElem.coprime(f, a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if not self.num:
            raise ZeroDivisionError("inverse of zero field element")
        return FieldElem(self.field, self.den, self.num)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if self.den.is_one():
            return FieldElem(self.field, self.num ** n, _normalized=True)
        return FieldElem(self.field, self.num ** n, self.den ** n, _normalized=True)

    # maps ----------------------------------------------------------------
    def substitute(self, values: Dict[int, "FieldElem"], target: FieldDescriptor, coeff=None) -> "FieldElem":
        """Image under the field map sending variable ``vid`` to ``values[vid]``."""
        one = target.one()
        if coeff is None:
            conv = target.const
        else:
            conv = coeff
        num = self.num.evaluate(values, one, conv)
        if self.den.is_one():
            return num
        den = self.den.evaluate(values, one, conv)
        if not den:
            raise ZeroDivisionError("denominator vanishes under substitution")
        return num / den

    def __str__(self):
        if self.den.is_one():
            return self.field.poly_str(self.num)
        return f"({self.field.poly_str(self.num)})/({self.field.poly_str(self.den)})"

    def __repr__(self):
        return f"FieldElem({self})"

    def __getstate__(self):
        return (self.field, self.num.terms, self.den.terms)

    def __setstate__(self, state):
        f, n, d = state
        self.field = f
        self.num = Poly(f.dom, n, _clean=True)
        self.den = Poly(f.dom, d, _clean=True)
        self._hash = None
