import pytest
from conftest import inline, rand_skew

from orefree.skewpoly import RingMismatch
from orefree.skewseries import (
    PrecisionError,
    SkewSeries,
    from_poly,
    series_invert,
    series_mul,
    truncate,
    valuation,
)


def _t(scn):
    return scn.field.var("t")


def test_mul_follows_commutation_rule(sc_b, sc_c):
    ring = sc_b.ring
    f = sc_b.field
    x = SkewSeries(ring, [f.zero(), f.one()], 4)
    t = SkewSeries(ring, [_t(sc_b)], 4)
    assert series_mul(x, t) == SkewSeries(ring, [f.zero(), _t(sc_b) + 1], 4)

    g = sc_c.field
    c = g.var("t", 0)
    cx = SkewSeries(sc_c.ring, [g.zero(), c], 4)
    assert (cx * cx).coeffs[2] == c * g.var("t", 1)
    assert valuation(cx * cx) == 2


def test_mul_by_one_keeps_precision(sc_b, rng):
    ring = sc_b.ring
    f = from_poly(rand_skew(ring, rng, 5), 7)
    assert f * SkewSeries.one(ring, 10) == f
    assert (f * SkewSeries.one(ring, 10)).prec == 7
    assert (SkewSeries.one(ring, 5) * f).prec == 5


def test_geometric_series():
    ring = inline("[field]\ncharacteristic = 0\n").ring
    one = ring.one()
    inv = series_invert(from_poly(one - ring.gen(), 4))
    assert inv == from_poly(one + ring.gen() + ring.gen(2) + ring.gen(3), 4)
    assert str(inv) == "1 + x + x^2 + x^3 + O(x^4)"


def test_invert_example_over_f5(sc_b):
    ring, f = sc_b.ring, sc_b.field
    t = _t(sc_b)
    u = from_poly(ring.one() + ring.const(t) * ring.gen(), 3)
    inv = series_invert(u)
    # b_1 = -t = 4t and b_2 = -t sigma(b_1) = t(t + 1) over F_5
    assert inv.coeffs == [f.one(), 4 * t, t * t + t]
    assert str(inv) == "1 + 4*t*x + (t^2 + t)*x^2 + O(x^3)"
    assert (u * inv).is_one() and (inv * u).is_one()


def test_invert_one_and_non_unit(sc_b):
    one = SkewSeries.one(sc_b.ring, 6)
    assert series_invert(one) == one
    with pytest.raises(ZeroDivisionError):
        series_invert(from_poly(sc_b.ring.gen(), 4))


def test_valuation_examples(sc_b, sc_c):
    ring = sc_b.ring
    f = from_poly(ring.gen(3) + ring.gen(5), 8)
    assert valuation(f) == 3
    assert valuation(SkewSeries(ring, [], 8)) is None
    c = sc_c.field.var("t", 0)
    u = from_poly(sc_c.ring.one() + sc_c.ring.monomial(c * sc_c.field.var("t", 1), 3), 10)
    assert valuation(u - SkewSeries.one(sc_c.ring, 10)) == 3


def test_from_poly_and_truncate(sc_b):
    ring, f = sc_b.ring, sc_b.field
    t = _t(sc_b)
    s = from_poly(ring.gen() - ring.const(t), 3)
    assert s.coeffs == [-t, f.one(), f.zero()]
    g = from_poly(ring.one() + ring.gen() + ring.gen(2), 3)
    assert truncate(g, 2) == from_poly(ring.one() + ring.gen(), 2)
    with pytest.raises(PrecisionError):
        truncate(g, 5)
    with pytest.raises(ValueError):
        from_poly(inline("[field]\ncharacteristic = 0\nlaurent = true\n").ring.gen(-1), 3)


def test_precision_is_minimum(sc_b, rng):
    ring = sc_b.ring
    a = from_poly(rand_skew(ring, rng, 4), 5)
    b = from_poly(rand_skew(ring, rng, 4), 9)
    assert (a * b).prec == 5
    assert (a + b).prec == 5


def test_series_product_matches_polynomial_product(sc_b, rng):
    ring = sc_b.ring
    for _ in range(20):
        p, q = rand_skew(ring, rng, 5), rand_skew(ring, rng, 5)
        assert from_poly(p, 8) * from_poly(q, 8) == from_poly(p * q, 8)


def test_series_rejects_derivation_rings(sc_a):
    with pytest.raises(ValueError):
        SkewSeries.one(sc_a.ring, 4)


def test_series_ring_mismatch(sc_b, sc_c):
    with pytest.raises(RingMismatch):
        SkewSeries.one(sc_b.ring, 3) * SkewSeries.one(sc_c.ring, 3)


def test_bad_precision(sc_b):
    with pytest.raises(PrecisionError):
        SkewSeries(sc_b.ring, [], 0)
