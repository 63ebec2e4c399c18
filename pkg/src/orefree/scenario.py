"""Scenario files: a field, sigma, delta, two generators and search parameters.

Example::

    [field]
    characteristic = 5
    families = t

    [sigma]
    rule = shift

    [generators]
    pair = sanchez_pair(t[0])

    [params]
    L = 5
    N = 30

Sections hold ``key = value`` lines; ``#`` starts a comment. Per-variable
sigma images come with inverses (``t = t + 1`` / ``inverse t = t - 1``);
named rules are ``shift``, ``shift(k)``, ``frobenius``, ``frobenius(e)`` and
``monomial([[1, 1], [0, 1]])``.
"""

from __future__ import annotations

import ast
import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .basefield import (
    Automorphism,
    FieldDescriptor,
    FieldElem,
    SigmaDerivation,
    check_automorphism,
    check_sigma_derivation,
)
from .constructions import GroupAlgebraInput, group_algebra_bridge, sanchez_pair
from .parsing import Evaluator, ParseError, parse_ast, parse_field_elem, split_fraction_ast
from .prounip import ProUnipotent, make_prounipotent
from .skewpoly import LeftFraction, SkewPoly, SkewPolyRing

SECTIONS = ("field", "sigma", "delta", "generators", "params")


class ScenarioError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None, col: Optional[int] = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + msg)
        self.line = line
        self.col = col


@dataclass
class Entry:
    key: str
    value: str
    line: int
    col: int  # column of the first character of value


@dataclass
class Scenario:
    name: str
    digest: str
    field: FieldDescriptor
    ring: SkewPolyRing
    generators: Optional[Tuple[ProUnipotent, ProUnipotent]]
    generator_text: Dict[str, str]
    L: int = 5
    N: int = 30
    exact_on_unresolved: bool = True
    bridge: Optional[object] = None
    sections: Dict[str, List[Entry]] = field(default_factory=dict)

    @property
    def u(self) -> ProUnipotent:
        return self._gens()[0]

    @property
    def v(self) -> ProUnipotent:
        return self._gens()[1]

    def _gens(self):
        if self.generators is None:
            raise ScenarioError("scenario defines no generators")
        return self.generators


def digest(text: str) -> str:
    """sha256 of the text with comments and all whitespace removed."""
    lines = []
    for raw in text.splitlines():
        s = re.sub(r"\s+", "", raw.split("#", 1)[0])
        if s:
            lines.append(s)
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()


def split_sections(text: str) -> Dict[str, List[Entry]]:
    out: Dict[str, List[Entry]] = {}
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        s = body.strip()
        if not s:
            continue
        m = re.fullmatch(r"\[\s*([A-Za-z_]+)\s*\]", s)
        if m:
            current = m.group(1).lower()
            if current not in SECTIONS:
                raise ScenarioError(f"unknown section [{current}]; expected one of {', '.join(SECTIONS)}", n, 1)
            if current in out:
                raise ScenarioError(f"section [{current}] appears twice", n, 1)
            out[current] = []
            continue
        if current is None:
            raise ScenarioError("content before the first [section]", n, 1)
        if "=" not in body:
            raise ScenarioError("expected 'key = value'", n, len(body) - len(body.lstrip()) + 1)
        key, value = body.split("=", 1)
        vcol = len(key) + 2 + (len(value) - len(value.lstrip()))
        out[current].append(Entry(" ".join(key.split()), value.strip(), n, vcol))
    return out


def _bool(e: Entry) -> bool:
    v = e.value.lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ScenarioError(f"expected true or false, got {e.value!r}", e.line, e.col)


def _int(e: Entry) -> int:
    try:
        return int(e.value)
    except ValueError:
        raise ScenarioError(f"expected an integer, got {e.value!r}", e.line, e.col) from None


def _names(e: Entry) -> Tuple[str, ...]:
    names = tuple(s.strip() for s in e.value.split(",") if s.strip())
    for s in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", s):
            raise ScenarioError(f"bad variable name {s!r}", e.line, e.col)
    return names


def _field_from(entries: List[Entry]) -> Tuple[FieldDescriptor, dict]:
    opts = {"characteristic": 0, "variables": (), "families": (), "extension": 1,
            "modulus": None, "generator": "w", "laurent": False, "var": "x"}
    seen = set()
    for e in entries:
        k = {"char": "characteristic", "p": "characteristic", "vars": "variables"}.get(e.key, e.key)
        if k not in opts:
            raise ScenarioError(f"unknown [field] key {e.key!r}", e.line, 1)
        if k in seen:
            raise ScenarioError(f"duplicate [field] key {e.key!r}", e.line, 1)
        seen.add(k)
        if k in ("characteristic", "extension"):
            opts[k] = _int(e)
        elif k in ("variables", "families"):
            opts[k] = _names(e)
        elif k == "modulus":
            try:
                opts[k] = tuple(int(s) for s in e.value.split(","))
            except ValueError:
                raise ScenarioError("modulus is a comma-separated list of integers", e.line, e.col) from None
        elif k == "laurent":
            opts[k] = _bool(e)
        else:
            opts[k] = e.value
    try:
        f = FieldDescriptor(opts["characteristic"], opts["variables"], opts["families"],
                            opts["extension"], opts["modulus"], opts["generator"])
        f.dom  # builds the constant field, validating p and the modulus
    except ValueError as exc:
        line = entries[0].line if entries else None
        raise ScenarioError(f"invalid field: {exc}", line) from None
    if opts["var"] in opts["variables"] + opts["families"]:
        raise ScenarioError(f"ring variable {opts['var']!r} clashes with a field variable")
    return f, opts


_RULE = re.compile(r"([a-z_]+)\s*(?:\((.*)\))?\s*$", re.S)


def _sigma_from(entries: List[Entry], f: FieldDescriptor):
    images, inverses = {}, {}
    shifts: Dict[str, int] = {}
    frob = 0
    order = "unknown"
    monomial = None
    for e in entries:
        key = e.key
        if key == "rule":
            m = _RULE.match(e.value)
            if not m:
                raise ScenarioError(f"cannot read rule {e.value!r}", e.line, e.col)
            name, arg = m.group(1), m.group(2)
            if name == "shift":
                step = int(arg) if arg else 1
                if not f.families:
                    raise ScenarioError("rule shift needs an indexed family in [field]", e.line, e.col)
                for fam in f.families:
                    shifts[fam] = step
            elif name == "frobenius":
                frob = int(arg) if arg else 1
                if f.ext_degree == 1:
                    raise ScenarioError("rule frobenius needs extension > 1 in [field]", e.line, e.col)
            elif name == "monomial":
                try:
                    monomial = tuple(tuple(int(x) for x in row) for row in ast.literal_eval(arg or ""))
                except (ValueError, SyntaxError, TypeError):
                    raise ScenarioError("monomial(...) takes an integer matrix like [[1, 1], [0, 1]]",
                                        e.line, e.col) from None
            else:
                raise ScenarioError(f"unknown rule {name!r}; use shift, frobenius or monomial", e.line, e.col)
        elif key == "order":
            order = "infinite" if e.value == "infinite" else _int(e)
        else:
            inverse = key.startswith("inverse ")
            var = key.split(" ", 1)[1].strip() if inverse else key
            if var not in f.variables:
                raise ScenarioError(f"sigma images are given for named variables; {var!r} is not one", e.line, 1)
            try:
                img = parse_field_elem(e.value, f, e.line, e.col)
            except ParseError as exc:
                raise ScenarioError(exc.msg, exc.line, exc.col) from None
            (inverses if inverse else images)[f.var_id(var)] = img
    if monomial is not None:
        if images or shifts:
            raise ScenarioError("monomial(...) cannot be combined with other sigma rules")
        try:
            br = group_algebra_bridge(GroupAlgebraInput(monomial, f.characteristic, f.ext_degree,
                                                        f.variables, f.modulus, f.gen))
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        return br.ring.field, br.ring.sigma, br
    try:
        sigma = Automorphism(f, images, inverses, shifts, frob, order)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    return f, sigma, None


def _delta_from(entries: List[Entry], f: FieldDescriptor, sigma: Automorphism) -> SigmaDerivation:
    images = {}
    inner = None
    twisted = True
    for e in entries:
        if e.key == "twisted":
            twisted = _bool(e)
            continue
        try:
            val = parse_field_elem(e.value, f, e.line, e.col)
        except ParseError as exc:
            raise ScenarioError(exc.msg, exc.line, exc.col) from None
        if e.key == "inner":
            inner = val
        elif e.key in f.variables:
            images[f.var_id(e.key)] = val
        else:
            raise ScenarioError(f"delta images are given for named variables; {e.key!r} is not one", e.line, 1)
    if inner is not None and images:
        raise ScenarioError("give either inner = w or per-variable images, not both")
    return SigmaDerivation(sigma, images, inner, twisted)


def _unit_part(node, ev: Evaluator, e: Entry) -> SkewPoly:
    """p - 1 for an expression p in K[x; sigma] with constant term 1."""
    val = ev.eval(node)
    ring = ev.ring
    if isinstance(val, LeftFraction):
        val = val.as_poly()
    elif isinstance(val, (int, FieldElem)):
        val = ring.const(val)
    if val is None:
        raise ScenarioError("generator parts must be polynomials in x", e.line, e.col)
    if val.coeffs and min(val.coeffs) < 0:
        raise ScenarioError("generator parts must not contain negative powers of x", e.line, e.col)
    if not val.coeff(0).is_one():
        raise ScenarioError(f"generator part {val} must have constant term 1", e.line, e.col)
    return val - ring.one()


def _generators_from(entries: List[Entry], ring: SkewPolyRing):
    f = ring.field
    gens: Dict[str, ProUnipotent] = {}
    text: Dict[str, str] = {}
    pair_ring = ring

    def _sanchez(c):
        if not hasattr(c, "num"):
            raise ValueError("sanchez_pair takes a field element")
        return sanchez_pair(pair_ring, c)

    for e in entries:
        ev = Evaluator(f, ring, {"sanchez_pair": _sanchez}, e.line)
        try:
            node = parse_ast(e.value, e.line, e.col)
            if e.key == "pair":
                if node[0] != "call":
                    raise ScenarioError("pair = sanchez_pair(c) is the only pair construction", e.line, e.col)
                u, v = ev.eval(node)
                gens["u"], gens["v"] = u, v
                text["pair"] = e.value
                continue
            if e.key not in ("u", "v"):
                raise ScenarioError(f"unknown generator {e.key!r}; use u, v or pair", e.line, 1)
            num, den = split_fraction_ast(node)
            a = _unit_part(num, ev, e)
            b = _unit_part(den, ev, e) if den is not None else ring.zero()
            gens[e.key] = make_prounipotent(a, b)
            text[e.key] = e.value
        except ParseError as exc:
            raise ScenarioError(exc.msg, exc.line, exc.col) from None
        except ValueError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(str(exc), e.line, e.col) from None
    if not gens:
        return None, text
    if set(gens) != {"u", "v"}:
        raise ScenarioError("[generators] must define both u and v (or pair = ...)")
    return (gens["u"], gens["v"]), text


def parse_scenario(text: str, name: str = "scenario", seed: int = 0, validate: bool = True) -> Scenario:
    sections = split_sections(text)
    if "field" not in sections:
        raise ScenarioError("missing [field] section")
    f, opts = _field_from(sections["field"])
    f, sigma, bridge = _sigma_from(sections.get("sigma", []), f)
    delta = _delta_from(sections.get("delta", []), f, sigma) if sections.get("delta") else None
    laurent = opts["laurent"] or bridge is not None
    try:
        ring = SkewPolyRing(f, sigma, delta, laurent=laurent, var=opts["var"])
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    gens, gtext = _generators_from(sections.get("generators", []), ring)

    params = {"L": 5, "N": 30, "exact": True, "name": name}
    for e in sections.get("params", []):
        k = {"max_len": "L", "precision": "N", "exact_on_unresolved": "exact"}.get(e.key, e.key)
        if k in ("L", "N"):
            params[k] = _int(e)
        elif k == "exact":
            params[k] = _bool(e)
        elif k == "name":
            params[k] = e.value
        else:
            raise ScenarioError(f"unknown [params] key {e.key!r}", e.line, 1)

    if validate:
        res = check_automorphism(sigma, seed=seed)
        if not res:
            raise ScenarioError(f"sigma is not an automorphism: {res.witness}")
        if delta is not None and not delta.is_zero:
            res = check_sigma_derivation(delta, seed=seed)
            if not res:
                raise ScenarioError(f"delta is not a sigma-derivation: {res.witness}")

    return Scenario(params["name"], digest(text), f, ring, gens, gtext, params["L"], params["N"],
                    params["exact"], bridge, sections)


def load_scenario(path, seed: int = 0) -> Scenario:
    p = Path(path)
    text = p.read_text()
    return parse_scenario(text, name=p.stem, seed=seed)
