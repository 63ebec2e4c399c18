import json
import warnings

import pytest
from conftest import inline, rand_skew

from orefree.freeness import (
    NO_RELATION_UP_TO,
    NONTRIVIAL,
    RELATION,
    RELATION_FOUND,
    UNRESOLVED,
    UNRESOLVED_PRESENT,
    enumerate_reduced_words,
    evaluate_word_exact,
    evaluate_word_series,
    free_algebra_independence,
    is_reduced,
    parse_word,
    search_relations,
    strip_timestamp,
    word_inverse,
    word_str,
)
from orefree.prounip import make_prounipotent, to_series
from orefree.skewpoly import RingMismatch
from orefree.skewseries import from_poly


def _valuation_minus_one(s):
    for k, c in enumerate(s.coeffs):
        if (k == 0 and not c.is_one()) or (k > 0 and c):
            return k
    return None


def test_word_counts():
    # 4 * 3^(n-1) reduced words of length n
    assert len(enumerate_reduced_words(1)) == 4
    assert len([w for w in enumerate_reduced_words(2) if len(w) == 2]) == 12
    assert len(enumerate_reduced_words(2)) == 16
    assert len(enumerate_reduced_words(5)) == 4 + 12 + 36 + 108 + 324 == 484
    words = enumerate_reduced_words(4)
    assert len(set(words)) == len(words)
    assert all(is_reduced(w) for w in words)
    with pytest.raises(ValueError):
        enumerate_reduced_words(0)


def test_word_order_and_parsing():
    words = enumerate_reduced_words(2)
    assert [word_str(w) for w in words[:4]] == ["U", "U^-1", "V", "V^-1"]
    assert word_str(words[4]) == "U U"
    w = parse_word("U V U^-1 V^-1")
    assert word_str(w) == "U V U^-1 V^-1"
    assert word_inverse(w) == parse_word("V U V^-1 U^-1")
    assert not is_reduced(parse_word("U U^-1"))
    with pytest.raises(ValueError):
        parse_word("U W")


def test_prefix_search_matches_naive_evaluation(sc_b, rng):
    ring = sc_b.ring
    u = make_prounipotent(rand_skew(ring, rng, 2).shift_left(1) + ring.gen())
    v = make_prounipotent(ring.zero(), ring.gen(2) + rand_skew(ring, rng, 1).shift_left(3))
    N = 10
    cert = search_relations(u, v, 3, N, exact_on_unresolved=False)
    assert [vd.word for vd in cert.verdicts] == enumerate_reduced_words(3)
    for vd in cert.verdicts:
        k = _valuation_minus_one(evaluate_word_series(vd.word, u, v, N))
        if k is None:
            assert vd.verdict == UNRESOLVED
        else:
            assert vd.verdict == NONTRIVIAL and vd.witness == k


def test_inverse_words_agree(sc_c):
    cert = search_relations(sc_c.u, sc_c.v, 3, 20)
    by_word = {vd.word: vd for vd in cert.verdicts}
    for w, vd in by_word.items():
        inv = by_word[word_inverse(w)]
        assert inv.verdict == vd.verdict
        assert inv.witness == vd.witness


def test_sanchez_commutator_coefficient(sc_c):
    f, ring = sc_c.field, sc_c.ring
    t = [f.var("t", i) for i in range(6)]
    w = parse_word("U V U^-1 V^-1")
    s = evaluate_word_series(w, sc_c.u, sc_c.v, 8)
    # 1 + [a, b] + O(x^9) with a = t0 t1 x^3, b = t0 t2 x^3 and sigma shifting indices
    want = t[0] * t[1] * t[3] * t[5] - t[0] * t[2] * t[3] * t[4]
    assert all(not c for c in s.coeffs[1:6])
    assert s.coeffs[6] == want
    assert s.coeffs[6] == t[0] * t[1] * t[3] * t[5] + 4 * t[0] * t[2] * t[3] * t[4]
    # the same number from plain polynomial products
    uv = sc_c.u.a * sc_c.v.a - sc_c.v.a * sc_c.u.a
    assert uv.coeffs[6] == want
    assert not evaluate_word_exact(w, sc_c.u, sc_c.v).is_one()


def test_without_exact_fallback_relations_stay_unresolved():
    scn = inline("[field]\ncharacteristic = 0\n[generators]\nu = 1 + x\nv = 1 + x^2\n")
    cert = search_relations(scn.u, scn.v, 4, 12, exact_on_unresolved=False)
    assert cert.status == UNRESOLVED_PRESENT
    assert cert.counts()[RELATION] == 0
    unresolved = [vd.word for vd in cert.verdicts if vd.verdict == UNRESOLVED]
    assert parse_word("U V U^-1 V^-1") in unresolved
    assert cert.first_relation() is None
    assert cert.summary.startswith(UNRESOLVED_PRESENT)


def test_certificate_json(sc_c):
    cert = search_relations(sc_c.u, sc_c.v, 2, 12, scenario="sc_c")
    doc = json.loads(cert.dumps())
    assert set(doc) >= {"scenario", "generators", "L", "N", "status", "summary", "counts", "words", "timestamp"}
    assert doc["status"] == NO_RELATION_UP_TO
    assert doc["summary"] == "NO_RELATION_UP_TO(2,12)"
    assert doc["counts"] == {NONTRIVIAL: 16, RELATION: 0, UNRESOLVED: 0}
    assert len(doc["words"]) == 16
    assert doc["words"][0] == {"word": "U", "verdict": NONTRIVIAL, "witness": 3}
    stripped = json.loads(strip_timestamp(cert.dumps()))
    assert "timestamp" not in stripped
    assert strip_timestamp(cert.dumps()) == cert.dumps(include_timestamp=False)


def test_search_argument_checks(sc_b, sc_c):
    u = make_prounipotent(sc_b.ring.gen())
    with pytest.raises(ValueError):
        search_relations(u, u, 0, 10)
    with pytest.raises(ValueError):
        search_relations(u, u, 2, 1)
    with pytest.raises(RingMismatch):
        search_relations(u, sc_c.u, 2, 10)


def test_relation_found_for_powers(sc_b):
    # v = u^2, so U U V^-1 is the first relation
    ring = sc_b.ring
    a = ring.const(sc_b.field.var("t")) * ring.gen()
    one = ring.one()
    u = make_prounipotent(a)
    v = make_prounipotent((one + a) * (one + a) - one)
    cert = search_relations(u, v, 3, 12)
    assert cert.status == RELATION_FOUND
    assert word_str(cert.first_relation().word) == "U U V^-1"
    assert to_series(v, 12) == to_series(u, 12) * to_series(u, 12)


def test_char_zero_warning():
    scn = inline("[field]\ncharacteristic = 0\n[generators]\nu = 1 + x\nv = 1 + 2*x\n")
    with pytest.warns(RuntimeWarning):
        search_relations(scn.u, scn.v, 6, 3, exact_on_unresolved=False)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        search_relations(scn.u, scn.v, 2, 3)


# free algebra step --------------------------------------------------------------


def _check_dependency(rep, elems):
    total = None
    for c, w in rep.dependency:
        p = elems[w[0]]
        for i in w[1:]:
            p = p * elems[i]
        term = p.left_scale(c)
        total = term if total is None else total + term
    assert not total.coeffs


def test_independence_equal_elements(sc_b):
    x = sc_b.ring.gen()
    rep = free_algebra_independence([x, x], 2)
    assert not rep.independent
    assert rep.rank == 1
    _check_dependency(rep, [x, x])
    assert rep.dependency_str().endswith(" = 0")


def test_independence_commutative_ring():
    ring = inline("[field]\ncharacteristic = 0\n").ring
    x = ring.gen()
    elems = [x, x * x]
    rep = free_algebra_independence(elems, 3)
    assert not rep.independent
    _check_dependency(rep, elems)
    # (x)(x) = (x^2) already clashes at length 2
    assert sorted(w for _, w in rep.dependency) == [(0, 0), (1,)]
    rep = free_algebra_independence([x, x * x * x], 2)
    assert sorted(w for _, w in rep.dependency) == [(0, 1), (1, 0)]


def test_independence_sanchez_step(sc_c):
    ring, f = sc_c.ring, sc_c.field
    c = f.var("t", 0)
    rep = free_algebra_independence([ring.monomial(c, 1), ring.monomial(c, 2)], 3)
    assert rep.independent and rep.dependency is None
    assert rep.rank == 2 + 4 + 8


def test_independence_rejects_bad_input(sc_a, sc_b):
    with pytest.raises(ValueError):
        free_algebra_independence([], 2)
    with pytest.raises(ValueError):
        free_algebra_independence([sc_b.ring.zero()], 2)
    with pytest.raises(ValueError):
        free_algebra_independence([sc_a.ring.gen()], 2)


def test_series_evaluation_of_empty_word(sc_b):
    u = make_prounipotent(sc_b.ring.gen())
    assert evaluate_word_series((), u, u, 5) == from_poly(sc_b.ring.one(), 5)
