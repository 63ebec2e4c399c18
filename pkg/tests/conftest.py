import random
from pathlib import Path

import pytest
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from orefree.scenario import load_scenario, parse_scenario
from orefree.skewpoly import SkewPoly

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"

_TRANSFORMS = standard_transformations + (convert_xor,)


def scenario(name, seed=0):
    return load_scenario(SCENARIOS / f"{name}.scn", seed=seed)


def inline(text, name="inline"):
    return parse_scenario(text, name=name)


def to_sympy(elem):
    """A FieldElem over Q with named variables as a sympy expression."""
    return parse_expr(str(elem), transformations=_TRANSFORMS)


def rand_skew(ring, rng, deg, rational=False, exact_deg=False, nterms=2):
    f = ring.field
    n = deg if exact_deg else rng.randint(0, deg)
    coeffs = {k: f.random_elem(rng, degree=2, nterms=nterms, rational=rational) for k in range(n + 1)}
    if exact_deg and not coeffs[n]:
        coeffs[n] = f.one()
    return SkewPoly(ring, coeffs)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def sc_a():
    return scenario("sc_a_weyl")


@pytest.fixture(scope="session")
def sc_b():
    return scenario("sc_b_shift_mod5")


@pytest.fixture(scope="session")
def sc_c():
    return scenario("sc_c_sanchez")


# one PASS/FAIL line per acceptance criterion ---------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    prev = _CRITERIA.get(n, (title, True, 0.0))
    ok = prev[1] and not rep.failed
    dur = prev[2] + (rep.duration if rep.when == "call" else 0.0)
    _CRITERIA[n] = (title, ok, dur)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, dur = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title} ({dur:.2f}s)")


__all__ = ["inline", "rand_skew", "scenario", "sympy", "to_sympy", "SCENARIOS", "ROOT"]
