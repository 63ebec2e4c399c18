import pytest
from conftest import SCENARIOS, inline, rand_skew, scenario

from orefree.constructions import sanchez_pair
from orefree.parsing import ParseError, evaluate, parse_field_elem, parse_skew
from orefree.scenario import ScenarioError, digest, load_scenario, parse_scenario
from orefree.skewpoly import LeftFraction


@pytest.mark.parametrize("name", sorted(p.stem for p in SCENARIOS.glob("*.scn")))
def test_shipped_scenarios_load(name):
    scn = scenario(name)
    assert scn.name == name
    assert len(scn.digest) == 64


def test_print_parse_round_trip(sc_a, sc_b, sc_c, rng):
    for scn in (sc_a, sc_b, sc_c):
        for _ in range(30):
            p = rand_skew(scn.ring, rng, 4, rational=scn is sc_a)
            assert parse_skew(str(p), scn.ring) == p


def test_field_round_trip(sc_b, rng):
    f = sc_b.field
    for _ in range(30):
        a = f.random_elem(rng, rational=True)
        assert parse_field_elem(str(a), f) == a


def test_expressions_follow_ring_rules(sc_b):
    ring = sc_b.ring
    assert parse_skew("x*t - t*x", ring) == ring.gen()
    assert parse_skew("x*t - (t + 1)*x", ring) == ring.zero()
    fr = parse_skew("(x - t)^-1 * x", ring)
    assert isinstance(fr, LeftFraction)
    assert fr == LeftFraction(ring.gen() - ring.const(sc_b.field.var("t")), ring.gen())


def test_parse_error_position(sc_b):
    with pytest.raises(ParseError) as exc:
        evaluate("t + $", sc_b.field, sc_b.ring, line=3)
    assert exc.value.line == 3 and exc.value.col == 5
    with pytest.raises(ParseError) as exc:
        evaluate("t + s", sc_b.field, sc_b.ring)
    assert exc.value.col == 5
    with pytest.raises(ParseError):
        evaluate("(t + 1", sc_b.field, sc_b.ring)


def test_scenario_error_reports_line():
    text = "[field]\ncharacteristic = 5\nvariables = t\n\n[generators]\nu = 1 + t*x\nv = 2 + x\n"
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(text)
    assert exc.value.line == 7
    assert "constant term 1" in str(exc.value)


def test_non_automorphism_rejected():
    text = "[field]\ncharacteristic = 0\nvariables = t\n[sigma]\nt = t^2\ninverse t = t\n"
    with pytest.raises(ScenarioError, match="not an automorphism"):
        parse_scenario(text)


def test_bad_structure():
    with pytest.raises(ScenarioError, match="unknown section"):
        parse_scenario("[feild]\ncharacteristic = 0\n")
    with pytest.raises(ScenarioError, match="missing"):
        parse_scenario("[params]\nL = 3\n")
    with pytest.raises(ScenarioError, match="before the first"):
        parse_scenario("L = 3\n[field]\ncharacteristic = 0\n")
    with pytest.raises(ScenarioError, match="both u and v"):
        parse_scenario("[field]\ncharacteristic = 0\n[generators]\nu = 1 + x\n")
    with pytest.raises(ScenarioError, match="negative powers"):
        parse_scenario("[field]\ncharacteristic = 0\nlaurent = true\n[generators]\nu = 1 + x^-1\nv = 1 + x\n")
    with pytest.raises(ScenarioError, match="shift needs"):
        parse_scenario("[field]\ncharacteristic = 5\nvariables = t\n[sigma]\nrule = shift\n")


def test_digest_ignores_whitespace_and_comments():
    a = "[field]\ncharacteristic = 5\nvariables = t\n"
    b = "# a comment\n[field]\n  characteristic=5   # trailing\n\nvariables =   t\n"
    assert digest(a) == digest(b)
    assert digest(a) != digest(a.replace("5", "7"))
    assert parse_scenario(a).digest == parse_scenario(b).digest


def test_generator_fractions():
    scn = inline("[field]\ncharacteristic = 5\nvariables = t\n[generators]\n"
                 "u = (1 + t*x)/(1 + x^2)\nv = 1 + x\n")
    ring = scn.ring
    t = ring.const(scn.field.var("t"))
    assert scn.u.a == t * ring.gen()
    assert scn.u.b == ring.gen(2)
    assert not scn.v.b


def test_sanchez_scenario_matches_construction(sc_c):
    u, v = sanchez_pair(sc_c.ring, sc_c.field.var("t", 0))
    assert sc_c.u == u and sc_c.v == v
    assert (sc_c.L, sc_c.N) == (5, 30)


def test_monomial_rule_builds_bridge_ring():
    scn = scenario("bridge_heisenberg")
    assert scn.bridge is not None
    assert scn.ring.laurent
    f = scn.field
    assert scn.ring.sigma.apply(f.var("v")) == f.var("u") * f.var("v")


def test_load_scenario_by_path(tmp_path):
    p = tmp_path / "mine.scn"
    p.write_text("[field]\ncharacteristic = 3\n[generators]\nu = 1 + x\nv = 1 + 2*x\n[params]\nL = 2\n")
    scn = load_scenario(p)
    assert scn.name == "mine" and scn.L == 2 and scn.N == 30
    with pytest.raises(ScenarioError, match="no generators"):
        parse_scenario("[field]\ncharacteristic = 0\n").u
