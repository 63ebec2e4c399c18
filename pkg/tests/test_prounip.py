import pytest
from conftest import inline, rand_skew

from orefree.prounip import (
    GradedHom,
    ProUnipotentError,
    lift,
    make_prounipotent,
    pu_inv,
    pu_mul,
    to_fraction,
    to_series,
)
from orefree.skewpoly import LeftFraction, RingMismatch, frac_eq
from orefree.skewseries import from_poly, series_invert

F4_Y = """
[field]
characteristic = 2
extension = 2
modulus = 1, 1, 1
variables = y

[sigma]
rule = frobenius
order = 2
"""

F4 = F4_Y.replace("variables = y\n", "")


def _t(scn):
    return scn.ring.const(scn.field.var("t"))


def _rand_pu(ring, rng, deg=3, nterms=2):
    return make_prounipotent(rand_skew(ring, rng, deg, nterms=nterms).shift_left(1),
                             rand_skew(ring, rng, deg, nterms=nterms).shift_left(1))


def _fraction_series(fr: LeftFraction, prec):
    return series_invert(from_poly(fr.den, prec)) * from_poly(fr.num, prec)


def test_equal_parts_give_one(sc_b):
    x = sc_b.ring.gen()
    u = make_prounipotent(x, x)
    assert to_series(u, 10).is_one()
    assert to_fraction(u).is_one()


def test_inverse_of_one_plus_x(sc_b):
    ring = sc_b.ring
    x = ring.gen()
    u = make_prounipotent(ring.zero(), x)
    want = ring.one() - x + x * x - x * x * x
    assert to_series(u, 4) == from_poly(want, 4)


def test_construction_errors(sc_a, sc_b, sc_c):
    ring = sc_b.ring
    with pytest.raises(ProUnipotentError):
        make_prounipotent(ring.one() + ring.gen())
    with pytest.raises(ProUnipotentError):
        make_prounipotent(ring.gen(), _t(sc_b))
    with pytest.raises(ProUnipotentError):
        make_prounipotent(sc_a.ring.gen())
    with pytest.raises(RingMismatch):
        make_prounipotent(ring.gen(), sc_c.ring.gen())


def test_string_form(sc_b):
    ring = sc_b.ring
    x, t = ring.gen(), _t(sc_b)
    assert str(make_prounipotent(t * x)) == "(1 + t*x)(1 + 0)^-1"


def test_pu_inv_is_group_inverse(sc_b, rng):
    ring = sc_b.ring
    for _ in range(10):
        u = _rand_pu(ring, rng)
        assert pu_inv(pu_inv(u)) == u
        assert pu_mul(u, pu_inv(u)).is_one()
        assert pu_mul(pu_inv(u), u).is_one()
        assert (to_series(u, 8) * to_series(pu_inv(u), 8)).is_one()


def test_pu_mul_matches_series(sc_b, rng):
    ring = sc_b.ring
    for _ in range(10):
        u, v = _rand_pu(ring, rng), _rand_pu(ring, rng)
        prod = pu_mul(u, v)
        assert _fraction_series(prod, 10) == to_series(u, 10) * to_series(v, 10)


def test_pu_mul_commutes_when_sigma_is_trivial(rng):
    ring = inline("[field]\ncharacteristic = 7\nvariables = t\n").ring
    for _ in range(5):
        u, v = _rand_pu(ring, rng, 2), _rand_pu(ring, rng, 2)
        assert frac_eq(pu_mul(u, v), pu_mul(v, u))


def test_fraction_matches_series(sc_b, sc_c, rng):
    # dense coefficients over the shifted family swell quickly under Euclid
    for ring, deg, nterms in ((sc_b.ring, 2, 2), (sc_c.ring, 1, 1)):
        for _ in range(10):
            u = _rand_pu(ring, rng, deg, nterms)
            fr = to_fraction(u)
            assert fr.den.coeffs[0].is_one()
            assert _fraction_series(fr, 9) == to_series(u, 9)


def test_identity_hom(sc_b, rng):
    h = GradedHom.identity(sc_b.ring)
    assert h.validate()
    for _ in range(10):
        u = _rand_pu(sc_b.ring, rng)
        assert lift(u, h) == u
        assert h.apply(u) == u


def test_f4_lift_of_conjugate_pair():
    up, down = inline(F4_Y).ring, inline(F4).ring
    h = GradedHom(up, down, {up.field.var_id("y"): down.field.zero()}, {})
    w = down.field.gen_const()
    x = down.gen()
    u = make_prounipotent(down.const(w) * x, down.const(w * w) * x)
    top = lift(u, h)
    assert top.ring is up
    assert top.a == up.const(up.field.gen_const()) * up.gen()
    assert h.apply(top) == u
    assert h.apply_series(to_series(top, 12)) == to_series(u, 12)
    with pytest.raises(RingMismatch):
        lift(make_prounipotent(up.gen()), h)


def test_validate_reports_failures(sc_b):
    ring = sc_b.ring
    f = ring.field
    vid = f.var_id("t")
    t = f.var("t")
    # t -> 2t does not commute with t -> t + 1
    bad = GradedHom(ring, ring, {vid: 2 * t}, {vid: 3 * t})
    res = bad.validate()
    assert not res
    assert "sigma" in res.witness
    up = inline(F4_Y).ring
    y = up.field.var("y")
    yid = up.field.var_id("y")
    res = GradedHom(up, up, {yid: y + 1}, {yid: y}).validate()
    assert not res and "section" in res.witness


def test_hom_needs_same_constants(sc_b):
    with pytest.raises(ValueError):
        GradedHom(sc_b.ring, inline(F4).ring, {}, {})
