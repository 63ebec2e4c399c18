"""Command-line interface.

Exit codes: 0 no relation up to (L, N) / success, 1 error, 2 relation found,
3 some words unresolved.
"""

from __future__ import annotations

import argparse
import ast
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import report
from .basefield import FieldDescriptor
from .constructions import (
    GroupAlgebraInput,
    TwistedPointQuery,
    candidate_search,
    frobenius_orbit_check,
    group_algebra_bridge,
    twisted_point_search,
    weyl_embedding,
)
from .freeness import (
    NO_RELATION_UP_TO,
    RELATION_FOUND,
    free_algebra_independence,
    search_relations,
)
from .parsing import ParseError, parse_field_elem, parse_skew
from .scenario import ScenarioError, load_scenario
from .skewpoly import SkewPoly, normalize_ore

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_RELATION = 2
EXIT_UNRESOLVED = 3

log = logging.getLogger("orefree")


class CliError(Exception):
    pass


def _status_exit(status: str) -> int:
    if status == NO_RELATION_UP_TO:
        return EXIT_OK
    if status == RELATION_FOUND:
        return EXIT_RELATION
    return EXIT_UNRESOLVED


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str, seed: int):
    if not Path(path).is_file():
        raise CliError(f"no such scenario file: {path}")
    return load_scenario(path, seed=seed)


def _certificate(args, scn):
    L = args.max_len if args.max_len is not None else scn.L
    N = args.precision if args.precision is not None else scn.N
    exact = scn.exact_on_unresolved if args.exact is None else args.exact
    cert = search_relations(scn.u, scn.v, L, N, exact, jobs=args.jobs, scenario=scn.digest,
                            timestamp=not args.no_timestamp)
    cert.extra["scenario_name"] = scn.name
    return cert


# subcommands --------------------------------------------------------------------

def cmd_verify(args) -> int:
    scn = _load(args.scenario, args.seed)
    cert = _certificate(args, scn)
    _emit(cert.dumps(), args.out)
    if args.figure:
        report.plot_certificate(cert, args.figure, title=f"{scn.name}: {cert.summary}")
    print(cert.summary, file=sys.stderr)
    return _status_exit(cert.status)


def cmd_report(args) -> int:
    scn = _load(args.scenario, args.seed)
    cert = _certificate(args, scn)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{scn.name}.json").write_text(cert.dumps())
    report.write_csv(cert, out / f"{scn.name}.csv")
    report.plot_certificate(cert, out / f"{scn.name}.png", title=f"{scn.name}: {cert.summary}")
    print(f"wrote {out / scn.name}.json, .csv and .png")
    print(cert.summary)
    return _status_exit(cert.status)


def cmd_normalize(args) -> int:
    scn = _load(args.scenario, args.seed)
    res = normalize_ore(scn.ring)
    print(res.report())
    return EXIT_OK


def cmd_compute(args) -> int:
    scn = _load(args.scenario, args.seed)
    val = parse_skew(args.expr, scn.ring)
    print(val)
    return EXIT_OK


def cmd_weyl(args) -> int:
    scn = _load(args.scenario, args.seed)
    c = parse_field_elem(args.c, scn.field)
    w = weyl_embedding(scn.ring, c)
    print(w)
    return EXIT_OK if w.ok else EXIT_ERROR


def cmd_independence(args) -> int:
    scn = _load(args.scenario, args.seed)
    elems: List[SkewPoly] = []
    for s in args.elems:
        v = parse_skew(s, scn.ring)
        if not isinstance(v, SkewPoly):
            raise CliError(f"{s!r} is not a polynomial in x")
        elems.append(v)
    rep = free_algebra_independence(elems, args.depth)
    print(f"words: {len(rep.words)}, rank: {rep.rank}")
    if rep.independent:
        print("independent")
        return EXIT_OK
    print("dependent: " + rep.dependency_str())
    return EXIT_RELATION


def cmd_bridge(args) -> int:
    try:
        M = tuple(tuple(int(x) for x in row) for row in ast.literal_eval(args.matrix))
    except (ValueError, SyntaxError, TypeError):
        raise CliError("--matrix takes an integer matrix like '[[1, 1], [0, 1]]'") from None
    br = group_algebra_bridge(GroupAlgebraInput(M, args.characteristic))
    print(br.report())
    return EXIT_OK


def _parse_moduli(items: List[str]):
    out = {}
    for it in items or []:
        k, _, rest = it.partition(":")
        try:
            out[int(k)] = tuple(int(x) for x in rest.split(","))
        except ValueError:
            raise CliError(f"--modulus takes k:c0,c1,...; got {it!r}") from None
    return out


def cmd_twisted_points(args) -> int:
    from .basefield import prime_power

    pp = prime_power(args.q)
    if pp is None:
        raise CliError(f"q = {args.q} is not a prime power")
    names = tuple(n.strip() for n in args.vars.split(","))
    f = FieldDescriptor(pp[0], names)
    phi = tuple(parse_field_elem(s, f) for s in args.map)
    avoid = tuple(parse_field_elem(s, f) for s in args.avoid or [])
    qry = TwistedPointQuery(args.q, f, phi, avoid, args.m_max, args.k_max, args.m_min, args.budget,
                            _parse_moduli(args.modulus))
    pts = twisted_point_search(qry, jobs=args.jobs)
    doc = pts.to_json()
    if args.orbit_bound:
        doc["orbits"] = [frobenius_orbit_check(qry, pt, pt.m, args.orbit_bound).to_json() for pt in pts.points]
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    print(f"{len(pts.points)} points", file=sys.stderr)
    return EXIT_OK


def cmd_candidates(args) -> int:
    scn = _load(args.scenario, args.seed)
    pool = [parse_field_elem(s, scn.field) for s in args.pool]
    cands = candidate_search(scn.ring, pool, args.max_len, args.precision, args.max_degree, jobs=args.jobs)
    shown = cands[: args.top] if args.top else cands
    doc = {"scenario": scn.digest, "L": args.max_len, "N": args.precision,
           "candidates": [c.to_json() for c in shown]}
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    print(f"{len(cands)} candidates with no relation up to ({args.max_len}, {args.precision})", file=sys.stderr)
    return EXIT_OK


# argument parsing -------------------------------------------------------------

def _search_flags(p):
    p.add_argument("--max-len", "-L", type=int, default=None, help="longest word checked (default: scenario, else 5)")
    p.add_argument("--precision", "-N", type=int, default=None, help="series precision (default: scenario, else 30)")
    p.add_argument("--exact", dest="exact", action="store_true", default=None,
                   help="settle words that look trivial by exact fractions")
    p.add_argument("--no-exact", dest="exact", action="store_false", help="report such words as UNRESOLVED")
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized validators (default 0)")
    common.add_argument("-v", "--verbose", action="store_true")
    ap = argparse.ArgumentParser(prog="orefree", description="Skew polynomial arithmetic and free-pair searches.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("verify", help="search for relations between the scenario's generators")
    p.add_argument("scenario")
    _search_flags(p)
    p.add_argument("--out", "-o", help="certificate path (default stdout)")
    p.add_argument("--figure", help="also write a PNG of witness valuations")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("report", help="certificate JSON, CSV table and PNG figure in one directory")
    p.add_argument("scenario")
    _search_flags(p)
    p.add_argument("--out-dir", "-d", default="report")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("normalize", help="classify the Ore extension and reduce inner derivations")
    p.add_argument("scenario")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("compute", help="evaluate a skew expression to canonical form")
    p.add_argument("scenario")
    p.add_argument("expr")
    p.set_defaults(fn=cmd_compute)

    p = sub.add_parser("weyl", help="check [delta(c)^-1 x, c] = 1 in a derivation-type ring")
    p.add_argument("scenario")
    p.add_argument("c")
    p.set_defaults(fn=cmd_weyl)

    p = sub.add_parser("independence", help="linear independence of products in the free algebra")
    p.add_argument("scenario")
    p.add_argument("elems", nargs="+")
    p.add_argument("--depth", "-D", type=int, default=4)
    p.set_defaults(fn=cmd_independence)

    p = sub.add_parser("bridge", help="twisted Laurent ring of Z^d semidirect Z")
    p.add_argument("--matrix", required=True)
    p.add_argument("--characteristic", type=int, default=0)
    p.set_defaults(fn=cmd_bridge)

    p = sub.add_parser("twisted-points", help="points with phi(x) = x^(q^m) over F_{q^k}")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--map", nargs="+", required=True, help="one coordinate expression per variable")
    p.add_argument("--vars", default="x")
    p.add_argument("--avoid", nargs="*")
    p.add_argument("--m-min", type=int, default=1)
    p.add_argument("--m-max", type=int, default=1)
    p.add_argument("--k-max", type=int, default=1)
    p.add_argument("--budget", type=int, default=1 << 20)
    p.add_argument("--modulus", nargs="*", help="k:c0,c1,...,1 pins the modulus of F_{q^k}")
    p.add_argument("--orbit-bound", type=int, default=0, help="also iterate phi from each point")
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.add_argument("--out", "-o")
    p.set_defaults(fn=cmd_twisted_points)

    p = sub.add_parser("candidates", help="rank small pairs with no relation up to (L, N)")
    p.add_argument("scenario")
    p.add_argument("--pool", nargs="+", required=True)
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--max-len", "-L", type=int, default=3)
    p.add_argument("--precision", "-N", type=int, default=20)
    p.add_argument("--top", type=int, default=0)
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.add_argument("--out", "-o")
    p.set_defaults(fn=cmd_candidates)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except (CliError, ScenarioError, ParseError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
