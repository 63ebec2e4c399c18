"""Automorphisms sigma and sigma-derivations delta of a base field."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Union

from .field import FieldDescriptor, FieldElem, split_vid
from .poly import Poly

Order = Union[int, str]  # a positive int, "infinite" or "unknown"

_CACHE_LIMIT = 200_000


@dataclass
class ValidationResult:
    ok: bool
    witness: Optional[str] = None

    def __bool__(self):
        return self.ok


class Automorphism:
    """A field automorphism given by variable images.

    ``images``/``inverse_images`` map variable ids to FieldElems (unlisted named
    variables are fixed). ``shifts`` maps an indexed family to a step s, meaning
    t[i] -> t[i+s]. ``frobenius`` = e acts on constants by c -> c^(p^e).
    """

    def __init__(self, field: FieldDescriptor, images: Optional[Mapping[int, FieldElem]] = None,
                 inverse_images: Optional[Mapping[int, FieldElem]] = None,
                 shifts: Optional[Mapping[str, int]] = None, frobenius: int = 0,
                 order: Order = "unknown", name: str = "sigma"):
        self.field = field
        self.images = dict(images or {})
        self.inverse_images = dict(inverse_images or {})
        self.shifts = dict(shifts or {})
        self.frobenius = frobenius
        self.order = order
        self.name = name
        for fam in self.shifts:
            if fam not in field.families:
                raise ValueError(f"shift rule for unknown family {fam!r}")
        missing = set(self.images) ^ set(self.inverse_images)
        if missing:
            names = sorted(field.var_name(v) for v in missing)
            raise ValueError(f"image and inverse image must be given together for {names}")
        self._var_cache: Dict[tuple, FieldElem] = {}
        self._elem_cache: Dict[tuple, FieldElem] = {}

    @classmethod
    def identity(cls, field: FieldDescriptor) -> "Automorphism":
        return cls(field, order=1, name="id")

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_var_cache"] = {}
        state["_elem_cache"] = {}
        return state

    def is_identity(self) -> bool:
        if self.frobenius % max(self.field.ext_degree, 1):
            return False
        if any(s for s in self.shifts.values()):
            return False
        for vid, img in self.images.items():
            if img != self.field.from_vid(vid):
                return False
        return True

    def inverse(self) -> "Automorphism":
        inv = Automorphism(self.field, self.inverse_images, self.images,
                           {f: -s for f, s in self.shifts.items()}, -self.frobenius,
                           self.order, name=f"{self.name}^-1")
        return inv

    # variable images -----------------------------------------------------
    def _is_renaming(self, vid: int) -> bool:
        return vid not in self.images

    def _shift_of(self, vid: int) -> int:
        fam = self.field.family_of(vid)
        if fam is None:
            return 0
        return self.shifts.get(fam, 0)

    def var_power(self, vid: int, n: int) -> FieldElem:
        """sigma^n of a single variable (memoized per (variable, power))."""
        f = self.field
        if vid not in self.images:
            return f.from_vid(vid + n * self._shift_of(vid))
        key = (vid, n)
        hit = self._var_cache.get(key)
        if hit is not None:
            return hit
        if n == 0:
            res = f.from_vid(vid)
        elif n > 0:
            # sigma^n(v) = sigma^(n-1)(sigma(v))
            res = self.apply(self.images[vid], n - 1)
        else:
            res = self.apply(self.inverse_images[vid], n + 1)
        self._var_cache[key] = res
        return res

    # application -----------------------------------------------------------
    def apply(self, a: FieldElem, n: int = 1) -> FieldElem:
        if n == 0 or not a:
            return a
        key = (a, n)
        hit = self._elem_cache.get(key)
        if hit is not None:
            return hit
        res = self._apply(a, n)
        if len(self._elem_cache) > _CACHE_LIMIT:
            self._elem_cache.clear()
        self._elem_cache[key] = res
        return res

    def _apply(self, a: FieldElem, n: int) -> FieldElem:
        f = self.field
        dom = f.dom
        frob = self.frobenius * n
        vars_ = a.variables()
        if all(v not in self.images for v in vars_):
            shift = {v: v + n * self._shift_of(v) for v in vars_}
            moving = any(shift[v] != v for v in vars_)
            if moving:
                for v in vars_:
                    if shift[v] != v:
                        fam = f.family_of(v)
                        f._materialized.setdefault(fam, set()).add(split_vid(shift[v])[1])

                def ren(m, shift=shift):
                    return tuple(shift[x] for x in m)
            num, den = a.num, a.den
            if moving:
                num, den = num.map_monomials(ren), den.map_monomials(ren)
            if frob % f.ext_degree:
                num = num.map_coeffs(lambda c: dom.frobenius(c, frob))
                den = den.map_coeffs(lambda c: dom.frobenius(c, frob))
            return FieldElem(f, num, den, _normalized=True)
        values = {v: self.var_power(v, n) for v in vars_}
        coeff = None
        if frob % f.ext_degree:
            def coeff(c):
                return f.const(dom.frobenius(c, frob))
        if not a.den.is_one() and self._polynomial_on(vars_):
            # sigma restricts to an automorphism of k[vars], so it keeps num and den coprime
            one = f.one()
            conv = coeff or f.const
            num = a.num.evaluate(values, one, conv)
            den = a.den.evaluate(values, one, conv)
            return FieldElem.coprime(f, num.num, den.num)
        return a.substitute(values, f, coeff)

    def _polynomial_on(self, vids) -> bool:
        for v in vids:
            img, inv = self.images.get(v), self.inverse_images.get(v)
            if img is not None and not (img.den.is_one() and inv.den.is_one()):
                return False
        return True

    def __call__(self, a: FieldElem, n: int = 1) -> FieldElem:
        return self.apply(a, n)

    def describe(self) -> str:
        f = self.field
        parts = [f"{f.var_name(v)} -> {img}" for v, img in sorted(self.images.items())]
        parts += [f"{fam}[i] -> {fam}[i{s:+d}]" for fam, s in self.shifts.items() if s]
        if self.frobenius % max(f.ext_degree, 1):
            parts.append(f"c -> c^{f.characteristic}^{self.frobenius}")
        return ", ".join(parts) if parts else "identity"


def apply_auto(sigma: Automorphism, a: FieldElem, power: int = 1) -> FieldElem:
    """sigma^power(a) in canonical form; negative powers use the inverse rule."""
    return sigma.apply(a, power)


class SigmaDerivation:
    """Additive map delta with delta(ab) = delta(a) b + sigma(a) delta(b).

    Given either by its values on variables (extended by the twisted Leibniz
    rule, or by the ordinary one when ``twisted=False``) or as the inner
    derivation a -> w (sigma(a) - a). Constants of the prime field go to 0.
    """

    def __init__(self, sigma: Automorphism, images: Optional[Mapping[int, FieldElem]] = None,
                 inner: Optional[FieldElem] = None, twisted: bool = True):
        self.sigma = sigma
        self.field = sigma.field
        self.images = {v: img for v, img in (images or {}).items() if img}
        self.inner = inner if inner else None
        self.twisted = twisted
        self._mono_cache: Dict[tuple, FieldElem] = {}

    @classmethod
    def zero(cls, sigma: Automorphism) -> "SigmaDerivation":
        return cls(sigma)

    @property
    def is_zero(self) -> bool:
        return not self.images and self.inner is None

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_mono_cache"] = {}
        return state

    def var_image(self, vid: int) -> FieldElem:
        if self.inner is not None:
            return self.apply(self.field.from_vid(vid))
        img = self.images.get(vid)
        return img if img is not None else self.field.zero()

    def _mono(self, m) -> FieldElem:
        f = self.field
        if not m:
            return f.zero()
        hit = self._mono_cache.get(m)
        if hit is not None:
            return hit
        head = m[0]
        rest = m[1:]
        rest_elem = f.poly(Poly(f.dom, {rest: f.dom.one}, _clean=True))
        head_elem = f.from_vid(head)
        d_head = self.images.get(head)
        out = f.zero()
        if d_head is not None:
            out = d_head * rest_elem
        if rest:
            left = self.sigma.apply(head_elem) if self.twisted else head_elem
            out = out + left * self._mono(rest)
        self._mono_cache[m] = out
        return out

    def _poly(self, p: Poly) -> FieldElem:
        f = self.field
        dom = f.dom
        out = f.zero()
        frob = self.sigma.frobenius
        for m, c in p.terms.items():
            if not m:
                continue
            dm = self._mono(m)
            if not dm:
                continue
            if self.twisted and frob % f.ext_degree:
                c = dom.frobenius(c, frob)
            out = out + dm * f.const(c)
        return out

    def apply(self, a: FieldElem) -> FieldElem:
        f = self.field
        if self.is_zero or not a:
            return f.zero()
        if self.inner is not None:
            return self.inner * (self.sigma.apply(a) - a)
        dp = self._poly(a.num)
        if a.den.is_one():
            return dp
        q = f.poly(a.den)
        dq = self._poly(a.den)
        # delta(p) = delta(q * (p/q)) = delta(q)(p/q) + sigma(q) delta(p/q)
        q_tw = self.sigma.apply(q) if self.twisted else q
        return (dp - dq * a) / q_tw

    def __call__(self, a: FieldElem) -> FieldElem:
        return self.apply(a)

    def describe(self) -> str:
        if self.is_zero:
            return "0"
        if self.inner is not None:
            return f"a -> ({self.inner})*(sigma(a) - a)"
        f = self.field
        return ", ".join(f"{f.var_name(v)} -> {img}" for v, img in sorted(self.images.items()))


def apply_derivation(delta: SigmaDerivation, a: FieldElem) -> FieldElem:
    return delta.apply(a)


def _random_pool(field: FieldDescriptor, rng: random.Random, trials: int):
    gens = [field.from_vid(v) for v in field.materialized_ids()]
    if field.ext_degree > 1:
        gens.append(field.gen_const())
    pool = list(gens)
    for _ in range(trials):
        pool.append(field.random_elem(rng, degree=2, nterms=3))
    return pool


def check_automorphism(sigma: Automorphism, trials: int = 64, seed: int = 0) -> ValidationResult:
    """Sampled check that sigma is an automorphism with the declared inverse."""
    f = sigma.field
    rng = random.Random(seed)
    try:
        for vid in f.materialized_ids():
            v = f.from_vid(vid)
            if sigma.apply(sigma.apply(v, 1), -1) != v:
                return ValidationResult(False, f"inverse(sigma({v})) = {sigma.apply(sigma.apply(v, 1), -1)} != {v}")
            if sigma.apply(sigma.apply(v, -1), 1) != v:
                return ValidationResult(False, f"sigma(inverse({v})) = {sigma.apply(sigma.apply(v, -1), 1)} != {v}")
        pool = _random_pool(f, rng, trials)
        for a in pool:
            if sigma.apply(sigma.apply(a, 1), -1) != a:
                return ValidationResult(False, f"inverse(sigma(a)) != a for a = {a}")
        for _ in range(trials):
            a, b = rng.choice(pool), rng.choice(pool)
            if sigma.apply(a * b) != sigma.apply(a) * sigma.apply(b):
                return ValidationResult(False, f"sigma(ab) != sigma(a)sigma(b) for a = {a}, b = {b}")
            if sigma.apply(a + b) != sigma.apply(a) + sigma.apply(b):
                return ValidationResult(False, f"sigma(a+b) != sigma(a)+sigma(b) for a = {a}, b = {b}")
            if a and not sigma.apply(a):
                return ValidationResult(False, f"sigma kills the nonzero element {a}")
    except ZeroDivisionError as exc:
        return ValidationResult(False, f"undefined image: {exc}")
    return ValidationResult(True)


def check_sigma_derivation(delta: SigmaDerivation, trials: int = 64, seed: int = 0) -> ValidationResult:
    """Sampled check of additivity and delta(ab) = delta(a) b + sigma(a) delta(b)."""
    f = delta.field
    sigma = delta.sigma
    rng = random.Random(seed)
    gens = [f.from_vid(v) for v in f.materialized_ids()]
    pairs = [(a, b) for a in gens for b in gens]
    pool = _random_pool(f, rng, trials)
    pairs += [(rng.choice(pool), rng.choice(pool)) for _ in range(trials)]
    for a, b in pairs:
        lhs = delta.apply(a * b)
        rhs = delta.apply(a) * b + sigma.apply(a) * delta.apply(b)
        if lhs != rhs:
            return ValidationResult(False, f"Leibniz fails at a = {a}, b = {b}: {lhs} != {rhs}")
        if delta.apply(a + b) != delta.apply(a) + delta.apply(b):
            return ValidationResult(False, f"additivity fails at a = {a}, b = {b}")
    return ValidationResult(True)


def inner_derivation(sigma: Automorphism, w: FieldElem) -> SigmaDerivation:
    """delta_w(a) = w (sigma(a) - a)."""
    return SigmaDerivation(sigma, inner=w)
