"""Relation search for a pair of pro-unipotent units.

Reduced words in U, U^-1, V, V^-1 are walked depth first; each node costs one
truncated series product (prefix times letter). A word whose series differs
from 1 below x^N is certainly not a relation. Words that look trivial to that
precision are settled by exact left-fraction arithmetic, or reported as
UNRESOLVED when the exact pass is switched off.
"""

from __future__ import annotations

import json
import logging
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .basefield import Poly, gcd
from .basefield.coeffs import RATIONAL_TYPES, PrimeField, Rationals
from .prounip import ProUnipotent, pu_inv, to_fraction, to_series
from .skewpoly import LeftFraction, RingMismatch, SkewPoly, frac_mul
from .skewseries import SkewSeries, series_mul, valuation

log = logging.getLogger(__name__)

U, U_INV, V, V_INV = 0, 1, 2, 3
LETTERS = ("U", "U^-1", "V", "V^-1")

Word = Tuple[int, ...]

NONTRIVIAL = "NONTRIVIAL"
RELATION = "RELATION"
UNRESOLVED = "UNRESOLVED"

NO_RELATION_UP_TO = "NO_RELATION_UP_TO"
RELATION_FOUND = "RELATION_FOUND"
UNRESOLVED_PRESENT = "UNRESOLVED_PRESENT"

# over Q coefficient growth makes long words slow; see search_relations
_Q_WARN_LENGTH = 5


def word_str(w: Word) -> str:
    return " ".join(LETTERS[a] for a in w)


def parse_word(s: str) -> Word:
    names = {n: i for i, n in enumerate(LETTERS)}
    out = []
    for tok in s.split():
        if tok not in names:
            raise ValueError(f"unknown letter {tok!r}; expected one of {', '.join(LETTERS)}")
        out.append(names[tok])
    return tuple(out)


def word_inverse(w: Word) -> Word:
    return tuple(a ^ 1 for a in reversed(w))


def is_reduced(w: Word) -> bool:
    return all(b != a ^ 1 for a, b in zip(w, w[1:]))


def _children(w: Word):
    last = w[-1] if w else None
    for a in range(4):
        if last is None or a != last ^ 1:
            yield a


def word_key(w: Word):
    return (len(w), w)


def enumerate_reduced_words(L: int) -> List[Word]:
    """All reduced words of length 1..L in length-then-lex order (U < U^-1 < V < V^-1)."""
    if L < 1:
        raise ValueError("L must be at least 1")
    out: List[Word] = []
    level: List[Word] = [()]
    for _ in range(L):
        level = [w + (a,) for w in level for a in _children(w)]
        out.extend(level)
    return out


def _check_pair(u: ProUnipotent, v: ProUnipotent):
    if u.ring is not v.ring:
        raise RingMismatch("generators live in different rings")


def letter_series(u: ProUnipotent, v: ProUnipotent, N: int) -> List[SkewSeries]:
    _check_pair(u, v)
    return [to_series(u, N), to_series(pu_inv(u), N), to_series(v, N), to_series(pu_inv(v), N)]


def evaluate_word_series(w: Word, u: ProUnipotent, v: ProUnipotent, N: int) -> SkewSeries:
    letters = letter_series(u, v, N)
    out = SkewSeries.one(u.ring, N)
    for a in w:
        out = series_mul(out, letters[a])
    return out


def letter_fractions(u: ProUnipotent, v: ProUnipotent) -> List[LeftFraction]:
    _check_pair(u, v)
    fu, fv = to_fraction(u), to_fraction(v)
    return [fu, fu.inverse(), fv, fv.inverse()]


def evaluate_word_exact(w: Word, u: ProUnipotent, v: ProUnipotent,
                        letters: Optional[Sequence[LeftFraction]] = None) -> LeftFraction:
    if letters is None:
        letters = letter_fractions(u, v)
    out = LeftFraction.one(u.ring)
    for a in w:
        out = frac_mul(out, letters[a])
    return out


def _nontrivial_valuation(s: SkewSeries) -> Optional[int]:
    """Least k with (s - 1)_k != 0, or None if s = 1 to the stored precision."""
    c = s.coeffs
    if not c[0].is_one():
        return 0
    for k in range(1, len(c)):
        if c[k]:
            return k
    return None


# certificates -----------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    word: Word
    verdict: str
    witness: object = None  # valuation k for series witnesses, "exact" for exact ones

    def to_json(self) -> dict:
        return {"word": word_str(self.word), "verdict": self.verdict, "witness": self.witness}


@dataclass
class Certificate:
    scenario: str
    generators: Dict[str, str]
    L: int
    N: int
    verdicts: List[Verdict]
    exact_on_unresolved: bool = True
    timestamp: Optional[str] = None
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def status(self) -> str:
        kinds = {v.verdict for v in self.verdicts}
        if RELATION in kinds:
            return RELATION_FOUND
        if UNRESOLVED in kinds:
            return UNRESOLVED_PRESENT
        return NO_RELATION_UP_TO

    @property
    def summary(self) -> str:
        st = self.status
        if st == NO_RELATION_UP_TO:
            return f"{st}({self.L},{self.N})"
        if st == RELATION_FOUND:
            return f"{st} at {word_str(self.first_relation().word)}"
        n = sum(v.verdict == UNRESOLVED for v in self.verdicts)
        return f"{st} ({n} words)"

    def first_relation(self) -> Optional[Verdict]:
        for v in self.verdicts:
            if v.verdict == RELATION:
                return v
        return None

    def counts(self) -> Dict[str, int]:
        out = {NONTRIVIAL: 0, RELATION: 0, UNRESOLVED: 0}
        for v in self.verdicts:
            out[v.verdict] += 1
        return out

    def to_json(self, include_timestamp: bool = True) -> dict:
        doc = {
            "scenario": self.scenario,
            "generators": dict(self.generators),
            "L": self.L,
            "N": self.N,
            "exact_on_unresolved": self.exact_on_unresolved,
            "status": self.status,
            "summary": self.summary,
            "counts": self.counts(),
            "words": [v.to_json() for v in self.verdicts],
        }
        doc.update(self.extra)
        if include_timestamp and self.timestamp is not None:
            doc["timestamp"] = self.timestamp
        return doc

    def dumps(self, include_timestamp: bool = True) -> str:
        return json.dumps(self.to_json(include_timestamp), indent=2, sort_keys=True) + "\n"


def strip_timestamp(doc: str) -> str:
    """Certificate JSON text with the timestamp field removed."""
    d = json.loads(doc)
    d.pop("timestamp", None)
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


# search -----------------------------------------------------------------------

def _search_subtree(task) -> List[Verdict]:
    root, u, v, L, N, exact = task
    letters = letter_series(u, v, N)
    fracs: Optional[List[LeftFraction]] = None
    out: List[Verdict] = []
    one = SkewSeries.one(u.ring, N)

    prefix = one
    for a in root:
        prefix = series_mul(prefix, letters[a])

    stack = [(root, prefix)]
    while stack:
        w, s = stack.pop()
        if w:
            k = _nontrivial_valuation(s)
            if k is not None:
                out.append(Verdict(w, NONTRIVIAL, k))
            elif exact:
                if fracs is None:
                    fracs = letter_fractions(u, v)
                if evaluate_word_exact(w, u, v, fracs).is_one():
                    out.append(Verdict(w, RELATION, "exact"))
                else:
                    out.append(Verdict(w, NONTRIVIAL, "exact"))
            else:
                out.append(Verdict(w, UNRESOLVED, None))
        if len(w) < L:
            for a in reversed(list(_children(w))):
                stack.append((w + (a,), series_mul(s, letters[a])))
    return out


def search_relations(u: ProUnipotent, v: ProUnipotent, L: int = 5, N: int = 30,
                     exact_on_unresolved: bool = True, jobs: int = 1,
                     scenario: str = "", generators: Optional[Dict[str, str]] = None,
                     timestamp: bool = True) -> Certificate:
    """Check every reduced word of length <= L; the result does not depend on ``jobs``."""
    if L < 1:
        raise ValueError("L must be at least 1")
    if N < 2:
        raise ValueError("N must be at least 2")
    _check_pair(u, v)
    if u.ring.field.characteristic == 0 and L > _Q_WARN_LENGTH:
        warnings.warn("long words over a characteristic-0 field suffer coefficient growth; "
                      "a positive-characteristic scenario is much faster", RuntimeWarning, stacklevel=2)

    if jobs <= 1:
        verdicts = _search_subtree(((), u, v, L, N, exact_on_unresolved))
    else:
        # one subtree per word of length 1 or 2 (4 or 16 tasks); roots are
        # evaluated as part of the subtree search
        roots = [w for w in enumerate_reduced_words(min(L, 2)) if len(w) == min(L, 2)]
        tasks = [(r, u, v, L, N, exact_on_unresolved) for r in roots]
        verdicts = []
        if L >= 2:
            verdicts.extend(_search_subtree(((), u, v, 1, N, exact_on_unresolved)))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_search_subtree, tasks):
                verdicts.extend(part)
    verdicts.sort(key=lambda vd: word_key(vd.word))
    gens = generators if generators is not None else {"u": str(u), "v": str(v)}
    stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()) if timestamp else None
    cert = Certificate(scenario, gens, L, N, verdicts, exact_on_unresolved, stamp)
    log.info("search finished: %s", cert.summary)
    return cert


# free associative algebra step -------------------------------------------------

@dataclass
class IndependenceReport:
    words: List[Tuple[int, ...]]
    independent: bool
    rank: int
    dependency: Optional[List[Tuple[object, Tuple[int, ...]]]] = None
    names: List[str] = field(default_factory=list)

    def word_str(self, w: Tuple[int, ...]) -> str:
        return "".join(f"({self.names[i]})" for i in w)

    def dependency_str(self) -> Optional[str]:
        if self.dependency is None:
            return None
        parts = []
        for c, w in self.dependency:
            s = str(c)
            if s == "1":
                parts.append((False, self.word_str(w)))
            elif s.startswith("-"):
                body = s[1:]
                parts.append((True, self.word_str(w) if body == "1" else f"{body}*{self.word_str(w)}"))
            else:
                parts.append((False, f"{s}*{self.word_str(w)}"))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out + " = 0"


def _poly_lcm(a: Poly, b: Poly) -> Poly:
    g = gcd(a, b)
    return a * b.divexact(g)


def free_algebra_independence(elems: Sequence[SkewPoly], D: int) -> IndependenceReport:
    """Are all products of the elems (in every order, word length 1..D) independent over the prime field?"""
    if not elems:
        raise ValueError("need at least one element")
    ring = elems[0].ring
    for e in elems:
        if e.ring is not ring:
            raise RingMismatch("elements live in different rings")
        if not e:
            raise ValueError("elements must be nonzero")
    if not ring.delta.is_zero:
        raise ValueError("free_algebra_independence needs delta = 0")

    words: List[Tuple[int, ...]] = []
    values: List[SkewPoly] = []
    for n in range(1, D + 1):
        for w in product(range(len(elems)), repeat=n):
            p = elems[w[0]]
            for i in w[1:]:
                p = p * elems[i]
            words.append(w)
            values.append(p)

    f = ring.field
    dom = f.dom
    scal = Rationals() if f.characteristic == 0 else PrimeField(f.characteristic)

    # per x-degree, bring coefficients to a common denominator; multiplying a
    # whole coordinate block by a fixed nonzero element is injective and linear
    degs = sorted({k for p in values for k in p.coeffs})
    common: Dict[int, Poly] = {}
    for k in degs:
        d = Poly.const(dom, dom.one)
        for p in values:
            c = p.coeffs.get(k)
            if c is not None and not c.den.is_one():
                d = _poly_lcm(d, c.den)
        common[k] = d

    rows: List[Dict[tuple, object]] = []
    for p in values:
        row: Dict[tuple, object] = {}
        for k, c in p.coeffs.items():
            numer = c.num * common[k].divexact(c.den)
            for mono, coef in numer.terms.items():
                for j, pc in enumerate(dom.prime_coords(coef)):
                    if pc != scal.zero:
                        row[(k, mono, j)] = pc
        rows.append(row)

    rank, dep = _find_dependency(rows, scal)
    names = [str(e) for e in elems]
    if dep is None:
        return IndependenceReport(words, True, rank, None, names)
    dependency = [(_scalar_elem(f, c), words[i]) for i, c in dep]
    return IndependenceReport(words, False, rank, dependency, names)


def _scalar_elem(f, c):
    if isinstance(c, RATIONAL_TYPES):
        return f.from_int(c.numerator) / f.from_int(c.denominator)
    return f.from_int(int(c))


def _find_dependency(rows: List[Dict[tuple, object]], scal) -> Tuple[int, Optional[List[Tuple[int, object]]]]:
    """Row reduction that tracks combinations; returns (rank, first dependency or None)."""
    pivots: Dict[tuple, Tuple[Dict[tuple, object], Dict[int, object]]] = {}
    rank = 0
    for i, row in enumerate(rows):
        vec = dict(row)
        combo = {i: scal.one}
        while vec:
            key = min(vec)
            if key not in pivots:
                break
            prow, pcombo = pivots[key]
            factor = vec[key]
            for kk, val in prow.items():
                nv = scal.sub(vec.get(kk, scal.zero), scal.mul(factor, val))
                if nv == scal.zero:
                    vec.pop(kk, None)
                else:
                    vec[kk] = nv
            for kk, val in pcombo.items():
                nv = scal.sub(combo.get(kk, scal.zero), scal.mul(factor, val))
                if nv == scal.zero:
                    combo.pop(kk, None)
                else:
                    combo[kk] = nv
        if not vec:
            return rank, sorted(combo.items())
        key = min(vec)
        inv = scal.inv(vec[key])
        pivots[key] = ({kk: scal.mul(inv, val) for kk, val in vec.items()},
                       {kk: scal.mul(inv, val) for kk, val in combo.items()})
        rank += 1
    return rank, None
