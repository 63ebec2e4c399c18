"""Explicit generator recipes and small-scale stand-ins for the reduction steps.

* sanchez_pair: u = 1 + c sigma(c) x^3, v = 1 + c sigma^2(c) x^3.
* weyl_embedding: p = delta(c)^-1 x satisfies p c - c p = 1 when sigma = id.
* group_algebra_bridge: k[Z^d semidirect Z] as a twisted Laurent ring.
* twisted_point_search / frobenius_orbit_check: brute force over F_{q^k}.
* candidate_search: relation search over a pool of small pairs.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from itertools import product
from math import gcd as igcd
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from .basefield import Automorphism, FieldDescriptor, FieldElem, Poly, check_automorphism, prime_power
from .basefield.coeffs import GaloisField, PrimeField, find_irreducible
from .freeness import NO_RELATION_UP_TO, Certificate, search_relations
from .prounip import ProUnipotent, make_prounipotent
from .skewpoly import LeftFraction, SkewPoly, SkewPolyRing, frac_mul


# Sanchez pair -------------------------------------------------------------------

def sanchez_pair(ring: SkewPolyRing, c: FieldElem) -> Tuple[ProUnipotent, ProUnipotent]:
    """u = 1 + c sigma(c) x^3 = 1 + (cx)(cx^2), v = 1 + c sigma^2(c) x^3 = 1 + (cx^2)(cx)."""
    if not ring.delta.is_zero:
        raise ValueError("sanchez_pair needs an automorphism-type ring (delta = 0)")
    if not c:
        raise ValueError("c must be nonzero")
    sigma = ring.sigma
    a = ring.monomial(c * sigma.apply(c, 1), 3)
    b = ring.monomial(c * sigma.apply(c, 2), 3)
    return make_prounipotent(a), make_prounipotent(b)


# Weyl embedding -----------------------------------------------------------------

@dataclass
class WeylWitness:
    c: FieldElem
    b: FieldElem
    p: LeftFraction
    commutator: LeftFraction

    @property
    def ok(self) -> bool:
        return self.commutator.is_one()

    def __str__(self):
        return f"p = ({self.b})^-1*x, [p, {self.c}] = {self.commutator}"


def weyl_embedding(ring: SkewPolyRing, c: FieldElem) -> WeylWitness:
    """p = b^-1 x with b = delta(c); in a derivation-type ring p c - c p = 1."""
    if not ring.sigma.is_identity():
        raise ValueError("weyl_embedding needs sigma = id")
    b = ring.delta.apply(c)
    if not b:
        raise ValueError(f"delta({c}) = 0; choose another c")
    p = LeftFraction(ring.const(b), ring.gen())
    cf = LeftFraction.from_poly(ring.const(c))
    comm = frac_mul(p, cf) - frac_mul(cf, p)
    return WeylWitness(c, b, p, comm)


# group algebra bridge -----------------------------------------------------------

INFINITE_ORDER = "INFINITE_ORDER"
PI_CASE = "PI_CASE"


@dataclass(frozen=True)
class GroupAlgebraInput:
    """E = Z^d semidirect Z, the generator acting on Z^d by the integer matrix M."""

    M: Tuple[Tuple[int, ...], ...]
    characteristic: int = 0
    ext_degree: int = 1
    names: Optional[Tuple[str, ...]] = None
    modulus: Optional[Tuple[int, ...]] = None
    gen: str = "w"

    @property
    def d(self) -> int:
        return len(self.M)


@dataclass
class BridgeResult:
    ring: SkewPolyRing
    order: Optional[int]
    flag: str
    names: Tuple[str, ...]

    def report(self) -> str:
        lines = [f"ring: {self.ring.describe()}",
                 f"sigma order: {'infinite' if self.order is None else self.order}",
                 f"flag: {self.flag}"]
        return "\n".join(lines)


def torsion_order_bound(d: int) -> int:
    """lcm of all n with phi(n) <= d; every finite order in GL_d(Z) divides it."""
    out = 1
    n = 1
    # phi(n) >= sqrt(n/2), so n <= 2 d^2 suffices
    while n <= 2 * d * d + 2:
        if sympy.totient(n) <= d:
            out = out * n // igcd(out, n)
        n += 1
    return out


def matrix_order(M: Sequence[Sequence[int]]) -> Optional[int]:
    """Multiplicative order of M in GL_d(Z), or None when infinite."""
    m = sympy.Matrix(M)
    d = m.rows
    eye = sympy.eye(d)
    bound = torsion_order_bound(d)
    if (m ** bound) != eye:
        return None
    cur = m
    for n in range(1, bound + 1):
        if cur == eye:
            return n
        cur = cur * m
    return None


def _monomial(f: FieldDescriptor, vids: Sequence[int], exps: Sequence[int]) -> FieldElem:
    out = f.one()
    for v, e in zip(vids, exps):
        if e:
            out = out * f.from_vid(v) ** int(e)
    return out


def group_algebra_bridge(g: GroupAlgebraInput, validate: bool = True) -> BridgeResult:
    """k(u_1..u_d)[x, x^-1; sigma] with sigma(u_i) = prod_j u_j^M[j][i]."""
    d = g.d
    if d < 1 or any(len(row) != d for row in g.M):
        raise ValueError("M must be a nonempty square matrix")
    m = sympy.Matrix(g.M)
    if m == sympy.eye(d):
        raise ValueError("M = identity gives an abelian group; pick a non-commuting x")
    det = m.det()
    if det not in (1, -1):
        raise ValueError(f"det M = {det}; M must lie in GL_d(Z)")
    minv = m.inv()
    if g.names is not None:
        names = tuple(g.names)
        if len(names) != d:
            raise ValueError(f"M is {d}x{d} but {len(names)} variables were given")
    else:
        names = ("u", "v") if d == 2 else (("u",) if d == 1 else tuple(f"u{i + 1}" for i in range(d)))
    f = FieldDescriptor(g.characteristic, names, (), g.ext_degree, g.modulus, g.gen)
    vids = [f.var_id(n) for n in names]
    images = {vids[i]: _monomial(f, vids, [m[j, i] for j in range(d)]) for i in range(d)}
    inverse = {vids[i]: _monomial(f, vids, [minv[j, i] for j in range(d)]) for i in range(d)}
    order = matrix_order(g.M)
    sigma = Automorphism(f, images, inverse, order=order if order is not None else "infinite")
    if validate:
        res = check_automorphism(sigma)
        if not res:
            raise ValueError(f"bridge automorphism failed validation: {res.witness}")
    ring = SkewPolyRing(f, sigma, laurent=True)
    return BridgeResult(ring, order, PI_CASE if order is not None else INFINITE_ORDER, names)


# twisted points over finite fields ---------------------------------------------

@dataclass
class TwistedPointQuery:
    """Points x of (F_{q^k})^d with phi(x) = x^(q^m) coordinatewise and no W vanishing at x.

    ``phi`` and ``avoid`` are elements of ``field``, a rational function field
    over F_p in d named variables; q is a power of p.
    """

    q: int
    field: FieldDescriptor
    phi: Tuple[FieldElem, ...]
    avoid: Tuple[FieldElem, ...] = ()
    m_max: int = 1
    k_max: int = 1
    m_min: int = 1
    budget: int = 1 << 20
    moduli: Dict[int, Tuple[int, ...]] = dc_field(default_factory=dict)

    def __post_init__(self):
        pp = prime_power(self.q)
        if pp is None:
            raise ValueError(f"q = {self.q} is not a prime power")
        if pp[0] != self.field.characteristic or self.field.ext_degree != 1:
            raise ValueError("phi must have coefficients in the prime field of F_q")
        if len(self.phi) != len(self.field.variables) or self.field.families:
            raise ValueError("phi needs one coordinate per variable")
        for c in self.phi:
            if not c.den:
                raise ValueError("phi has a zero denominator")

    @property
    def p(self) -> int:
        return self.field.characteristic

    @property
    def e(self) -> int:
        return prime_power(self.q)[1]

    @property
    def d(self) -> int:
        return len(self.phi)

    def level_field(self, k: int):
        """F_{q^k} as a table field."""
        n = self.e * k
        if n == 1:
            return PrimeField(self.p)
        mod = self.moduli.get(k)
        return GaloisField(self.p, n, mod if mod is not None else find_irreducible(self.p, n))


@dataclass(frozen=True)
class TwistedPoint:
    x: Tuple[int, ...]
    m: int
    k: int
    text: Tuple[str, ...]

    def to_json(self) -> dict:
        return {"x": list(self.text), "m": self.m, "k": self.k}


@dataclass
class PointList:
    query: TwistedPointQuery
    points: List[TwistedPoint]

    def to_json(self) -> dict:
        moduli = {}
        for k in sorted({pt.k for pt in self.points}):
            dom = self.query.level_field(k)
            if isinstance(dom, GaloisField):
                moduli[str(k)] = list(dom.modulus)
        return {
            "q": self.query.q,
            "phi": [str(c) for c in self.query.phi],
            "avoid": [str(w) for w in self.query.avoid],
            "m_max": self.query.m_max,
            "k_max": self.query.k_max,
            "moduli": moduli,
            "points": [pt.to_json() for pt in self.points],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _eval_poly(p: Poly, point: Dict[int, int], dom) -> int:
    total = dom.zero
    for mono, c in p.terms.items():
        term = dom.coerce(c) if not isinstance(dom, GaloisField) else c
        for v in mono:
            term = dom.mul(term, point[v])
        total = dom.add(total, term)
    return total


def eval_rational(a: FieldElem, point: Dict[int, int], dom) -> Optional[int]:
    """a at the point, or None where its denominator vanishes."""
    den = _eval_poly(a.den, point, dom)
    if den == 0:
        return None
    return dom.mul(_eval_poly(a.num, point, dom), dom.inv(den))


def _frob(dom, a: int, e: int) -> int:
    return dom.frobenius(a, e) if isinstance(dom, GaloisField) else a


def _apply_phi(qry: TwistedPointQuery, x: Sequence[int], dom) -> Optional[Tuple[int, ...]]:
    vids = [qry.field.var_id(n) for n in qry.field.variables]
    point = dict(zip(vids, x))
    out = []
    for c in qry.phi:
        val = eval_rational(c, point, dom)
        if val is None:
            return None
        out.append(val)
    return tuple(out)


def _min_level(dom, x: Sequence[int], e: int, k: int) -> int:
    """Least j dividing k with every coordinate in F_{q^j}."""
    for j in range(1, k + 1):
        if k % j == 0 and all(_frob(dom, c, e * j) == c for c in x):
            return j
    return k


def _level_points(qry: TwistedPointQuery, k: int) -> List[TwistedPoint]:
    dom = qry.level_field(k)
    e = qry.e
    vids = [qry.field.var_id(n) for n in qry.field.variables]
    out = []
    for x in product(range(dom.order), repeat=qry.d):
        if k > 1 and _min_level(dom, x, e, k) != k:
            continue  # reported at a smaller level
        point = dict(zip(vids, x))
        if any(_eval_poly(w.num, point, dom) == 0 for w in qry.avoid):
            continue
        y = _apply_phi(qry, x, dom)
        if y is None:
            continue
        for m in range(qry.m_min, qry.m_max + 1):
            if all(_frob(dom, xi, e * m) == yi for xi, yi in zip(x, y)):
                out.append(TwistedPoint(tuple(x), m, k, tuple(dom.to_str(c) for c in x)))
    return out


def twisted_point_search(qry: TwistedPointQuery, jobs: int = 1) -> PointList:
    """Every point is reported once, at the least k with x in (F_{q^k})^d."""
    total = sum(qry.q ** (k * qry.d) for k in range(1, qry.k_max + 1))
    if total > qry.budget:
        raise ValueError(f"search space of {total} points exceeds the budget {qry.budget}")
    ks = list(range(1, qry.k_max + 1))
    if jobs > 1 and len(ks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_level_points, [qry] * len(ks), ks))
    else:
        parts = [_level_points(qry, k) for k in ks]
    pts = [pt for part in parts for pt in part]
    pts.sort(key=lambda pt: (pt.k, pt.m, pt.x))
    return PointList(qry, pts)


PERIODIC = "PERIODIC"
NOT_PERIODIC_WITHIN = "NOT_PERIODIC_WITHIN"
INDETERMINATE = "INDETERMINATE"


@dataclass
class OrbitReport:
    status: str
    period: Optional[int]
    orbit: List[Tuple[str, ...]]
    consistent: bool
    first_inconsistency: Optional[int] = None
    indeterminate_at: Optional[int] = None
    bound: int = 0

    def to_json(self) -> dict:
        return {
            "status": self.status if self.status != NOT_PERIODIC_WITHIN else f"{self.status}({self.bound})",
            "period": self.period,
            "orbit": [list(o) for o in self.orbit],
            "orbit_size": len(self.orbit),
            "frobenius_consistent": self.consistent,
            "first_inconsistency": self.first_inconsistency,
            "indeterminate_at": self.indeterminate_at,
        }


def frobenius_orbit_check(qry: TwistedPointQuery, x, j: int, bound: int, k: Optional[int] = None) -> OrbitReport:
    """Iterate phi from x; check phi^n(x) = Frob^(jn)(x) and find the least period.

    ``x`` is a TwistedPoint or a tuple of table ints in F_{q^k}. A failed
    Frobenius check is reported, not raised, so that the period is still found.
    """
    if isinstance(x, TwistedPoint):
        k = x.k
        x = x.x
    k = k or 1
    dom = qry.level_field(k)
    e = qry.e
    x = tuple(x)
    cur = x
    orbit = [x]
    consistent, first_bad = True, None
    for n in range(1, bound + 1):
        nxt = _apply_phi(qry, cur, dom)
        if nxt is None:
            return OrbitReport(INDETERMINATE, None, [tuple(dom.to_str(c) for c in o) for o in orbit],
                               consistent, first_bad, n, bound)
        want = tuple(_frob(dom, c, e * j * n) for c in x)
        if consistent and nxt != want:
            consistent, first_bad = False, n
        if nxt == x:
            return OrbitReport(PERIODIC, n, [tuple(dom.to_str(c) for c in o) for o in orbit],
                               consistent, first_bad, None, bound)
        orbit.append(nxt)
        cur = nxt
    return OrbitReport(NOT_PERIODIC_WITHIN, None, [tuple(dom.to_str(c) for c in o) for o in orbit],
                       consistent, first_bad, None, bound)


# candidate search ---------------------------------------------------------------

@dataclass
class Candidate:
    u: ProUnipotent
    v: ProUnipotent
    certificate: Certificate
    score: Tuple[int, int]

    def to_json(self) -> dict:
        return {"u": str(self.u), "v": str(self.v), "score": list(self.score),
                "status": self.certificate.status}


def _pool_parts(ring: SkewPolyRing, pool: Sequence[FieldElem], max_degree: int) -> List[SkewPoly]:
    out = []
    for coeffs in product(pool, repeat=max_degree):
        out.append(SkewPoly(ring, {i + 1: c for i, c in enumerate(coeffs) if c}))
    return out


def _score(cert: Certificate) -> Tuple[int, int]:
    vals = [vd.witness for vd in cert.verdicts if isinstance(vd.witness, int)]
    return (max(vals, default=0), sum(vals))


def _run_candidate(task):
    a, b, L, N = task
    u, v = make_prounipotent(a), make_prounipotent(b)
    cert = search_relations(u, v, L, N, timestamp=False)
    return u, v, cert


def candidate_search(ring: SkewPolyRing, pool: Sequence[FieldElem], L: int = 3, N: int = 20,
                     max_degree: int = 2, jobs: int = 1) -> List[Candidate]:
    """Pairs u = 1 + a, v = 1 + b with a, b in x*pool[x] of x-degree <= max_degree.

    Only pairs with no relation up to (L, N) are kept, ranked by the largest
    witness valuation (smaller first: every word is separated from 1 earliest).
    """
    if not ring.delta.is_zero:
        raise ValueError("candidate_search needs delta = 0")
    parts = _pool_parts(ring, list(pool), max_degree)
    tasks = [(parts[i], parts[j], L, N) for i in range(len(parts)) for j in range(i + 1, len(parts))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_candidate, tasks))
    else:
        results = [_run_candidate(t) for t in tasks]
    out = []
    for idx, (u, v, cert) in enumerate(results):
        if cert.status == NO_RELATION_UP_TO:
            out.append((_score(cert), idx, Candidate(u, v, cert, _score(cert))))
    out.sort(key=lambda t: (t[0], t[1]))
    return [c for _, _, c in out]
