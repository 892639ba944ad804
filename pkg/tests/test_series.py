import math

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from invlift.series import (
    ConstantTermZero, GaussQ, MultiIndex, NotDivisible, OrderExhausted, ParseError, Poly, RootNotInField, Series,
    approx_field, exact_root, exp_to_multi, gauss, multi_indices, multi_to_exp, parse_poly, parse_series, series_root,
)

from conftest import rand_series, sympy_series, sympy_truncate, to_sympy

NAMES2 = ["X1", "X2"]


def S(src, p=1, order=8):
    return parse_series(src, p, order)


# ------------------------------------------------------------------ coefficients

def test_gauss_exact_roundtrip():
    a = gauss(mpq(1, 3), mpq(-2, 5))
    b = gauss(mpq(7, 2), mpq(1, 9))
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert gauss(mpq(2), mpq(0)) == 2 and not isinstance(gauss(mpq(2), mpq(0)), GaussQ)


def test_approx_equality_tolerance():
    f = approx_field(1e-9)
    assert f.eq(1.0, 1.0 + 5e-10)
    assert not f.eq(1.0, 1.0 + 5e-9)
    assert f.eq(1e6, 1e6 * (1 + 5e-10))


def test_exact_root_finds_gaussian_roots():
    assert exact_root(mpq(4), 2)[0] == 2
    roots = exact_root(mpq(-1), 2)
    assert {complex(r) for r in roots} == {1j, -1j}
    assert exact_root(mpq(2), 2) == []
    assert exact_root(mpq(-8, 27), 3)[0] == mpq(-2, 3) or complex(exact_root(mpq(-8, 27), 3)[0]) ** 3 == -8 / 27


# ------------------------------------------------------------------ multi-indices

def test_multi_index_canonical_and_bijection():
    assert MultiIndex((2, 1, 2)) == MultiIndex((1, 2, 2))
    for A in multi_indices(3, 3):
        assert exp_to_multi(multi_to_exp(A, 3)) == A
    assert len(multi_indices(2, 2)) == 1 + 2 + 3
    assert len(multi_indices(2, 2, include_empty=False)) == 5


# ------------------------------------------------------------------ spec examples

def test_add_examples():
    assert (S("X1 + X1^2") + S("-X1")).agrees(S("X1^2"))
    s = S("3 + X1^5")
    assert (Series.zero(1, 8) + s).agrees(s)
    r = parse_series("1 + X1", 1, 3) + parse_series("X1^3 + X1^4", 1, 4)
    assert r.order == 3 and r.agrees(parse_series("1 + X1 + X1^3", 1, 3))


def test_mul_examples():
    assert (S("1 + X1") * S("1 - X1")).agrees(S("1 - X1^2"))
    assert (parse_series("X1", 2, 4) * parse_series("X2", 2, 4)).agrees(parse_series("X1*X2", 2, 4))
    geo = Series.from_dict(1, 10, {(k,): 1 for k in range(11)})
    assert (geo * Series.from_dict(1, 10, {(0,): 1, (1,): -1})).agrees(Series.const(1, 10, 1))


def test_compose_examples():
    outer = Poly.from_dict(1, {(2,): 1})
    r = outer.compose([parse_series("X1 + X2", 2, 6)])
    assert r.agrees(parse_series("X1^2 + 2*X1*X2 + X2^2", 2, 6))
    s = S("X1 + 3*X1^4")
    assert Poly.var(1, 0).compose([s]).agrees(s)
    w = Poly.from_dict(2, {(1, 1): 1}).compose([S("X1"), S("X1^2")])
    assert w.agrees(S("X1^3"))


def test_compose_rejects_constant_inner_for_truncated_outer():
    with pytest.raises(ValueError):
        S("X1 + X1^2").compose([S("1 + X1")])


def test_derive_examples():
    s = parse_series("X1^2*X2", 2, 6)
    assert s.derive(0).agrees(parse_series("2*X1*X2", 2, 5))
    assert S("X1").derive(0).agrees(S("1", order=7))
    assert parse_series("X1", 2, 4).derive(1).is_zero()
    assert S("X1^3").derive_multi((1, 1)).agrees(S("6*X1", order=6))
    assert S("X1^3").derive(0).order == 7


def test_divide_exact_examples():
    assert S("X1^2 + X1^3").divide_exact(S("X1")).agrees(S("X1 + X1^2", order=7))
    with pytest.raises(NotDivisible) as exc:
        S("X1").divide_exact(S("X1^2"))
    assert exc.value.degree == -1


def test_divide_exact_reports_obstructed_degree():
    # (X1^2 + X2) / X1 fails in degree 0 of the quotient (the X2 term)
    with pytest.raises(NotDivisible) as exc:
        parse_series("X1^2 + X2", 2, 6).divide_exact(parse_series("X1", 2, 6))
    assert exc.value.degree == 0


def test_nth_root_unit_examples():
    r = S("1 + X1", order=6).nth_root_unit(2)
    want = [sp.binomial(sp.Rational(1, 2), k) for k in range(7)]
    assert [sp.Rational(str(r.coeff((k,)))) for k in range(7)] == want
    assert Series.const(1, 5, 1).nth_root_unit(4).agrees(Series.const(1, 5, 1))
    r = S("4 + 8*X1").nth_root_unit(2)
    assert (r * r).agrees(S("4 + 8*X1"))
    assert r.agrees(parse_series("2 + 2*X1 - X1^2", 1, 2), 2)


def test_nth_root_errors():
    with pytest.raises(ConstantTermZero):
        S("X1").nth_root_unit(2)
    with pytest.raises(RootNotInField):
        S("2 + X1").nth_root_unit(2, allow_approx=False)
    approx = S("2 + X1").nth_root_unit(2)
    assert not approx.field.exact and abs(complex(approx.constant()) - math.sqrt(2)) < 1e-12


def test_valuation_examples():
    assert parse_series("X1^2 + X2^3", 2, 8).valuation() == 2
    assert Series.zero(1, 8).valuation() == 9
    f = [parse_series("X1^2/2", 1, 8), parse_series("0", 1, 8)]
    delta = parse_poly("8*W1^3 - 9*W2^2", ["W1", "W2"])
    assert delta.compose(f).valuation() == 6


# ------------------------------------------------------------------ sympy oracles

def test_products_match_sympy(rng, X):
    for _ in range(10):
        a, b = rand_series(rng, 2, 5), rand_series(rng, 2, 5)
        want = sympy_truncate(to_sympy(a, X[:2]) * to_sympy(b, X[:2]), X[:2], 5)
        assert sp.expand(to_sympy(a * b, X[:2]) - want) == 0


def test_unit_powers_match_sympy(rng, X):
    x = X[0]
    for n in (2, 3, 5):
        u = Series.from_dict(1, 6, {(0,): 1, (1,): mpq(rng.randint(-3, 3), 2), (2,): mpq(rng.randint(-3, 3))})
        r = u.nth_root_unit(n)
        want = sympy_series(to_sympy(u, [x]) ** sp.Rational(1, n), [x], 6)
        assert sp.expand(to_sympy(r, [x]) - want) == 0


def test_series_root_multivariate_matches_sympy(X):
    x1, x2 = X[:2]
    L = parse_series("X1 + 2*X2", 2, 9)
    U = parse_series("1 + X1 - X2^2", 2, 9)
    f = L ** 3 * U
    r = series_root(f, 3)
    assert r.order == 9 - 2
    assert (r ** 3).agrees(f, r.order)
    ref = sympy_series((x1 + 2 * x2) * (1 + x1 - x2 ** 2) ** sp.Rational(1, 3), [x1, x2], r.order)
    assert sp.expand(to_sympy(r, [x1, x2]) - ref) == 0


def test_series_root_refuses_non_powers():
    with pytest.raises(NotDivisible):
        series_root(S("X1^3"), 2)
    with pytest.raises(NotDivisible):
        series_root(parse_series("X1^3 + X2^4", 2, 8), 3)


# ------------------------------------------------------------------ properties

exact_rat = st.builds(lambda a, b: mpq(a, b), st.integers(-5, 5), st.integers(1, 4))


@st.composite
def series_st(draw, p=2, order=4, unit=False):
    terms = {}
    for d in range(order + 1):
        for e in [(k, d - k) for k in range(d + 1)] if p == 2 else [(d,)]:
            c = draw(exact_rat)
            if c:
                terms[e] = c
    if unit:
        terms[(0,) * p] = draw(st.sampled_from([mpq(1), mpq(4), mpq(-1), mpq(9, 4)]))
    return Series.from_dict(p, order, terms)


@settings(max_examples=25, deadline=None)
@given(series_st(), series_st(), series_st())
def test_ring_axioms(a, b, c):
    assert ((a * b) * c).agrees(a * (b * c))
    assert (a * (b + c)).agrees(a * b + a * c)
    assert ((a + b) - b).agrees(a)


@settings(max_examples=25, deadline=None)
@given(series_st(), series_st(order=4))
def test_divide_undoes_multiply(a, b):
    if b.is_zero():
        return
    q = (a * b).divide_exact(b)
    assert q.agrees(a, q.order)


@settings(max_examples=20, deadline=None)
@given(series_st(unit=True), st.integers(1, 6))
def test_nth_root_power(s, n):
    r = s.nth_root_unit(n)
    assert (r ** n).agrees(s, r.order)


@settings(max_examples=20, deadline=None)
@given(series_st(p=1, order=5))
def test_derivatives_commute(s):
    t = Series.from_poly(Poly.from_dict(2, {(e[0], 1): c for e, c in s.to_dict().items()}), 6)
    assert t.derive(0).derive(1).agrees(t.derive(1).derive(0))


def test_compose_associative(rng):
    f = Poly.from_dict(2, {(2, 0): 1, (1, 1): mpq(-1, 2), (0, 3): 3})
    g = [Poly.from_dict(1, {(1,): 2, (2,): 1}), Poly.from_dict(1, {(1,): -1, (3,): 1})]
    h = [parse_series("X1 + X1^2*X2", 2, 7)]
    lhs = Series.from_poly(f.compose(g), 9).compose(h)
    rhs = f.compose([gi.compose(h) for gi in g])
    assert lhs.agrees(rhs, 7)


# ------------------------------------------------------------------ parsing and printing

def test_parse_print_roundtrip(rng):
    for _ in range(20):
        s = rand_series(rng, 2, 4)
        text = s.to_string(NAMES2)
        assert parse_series(text, 2, 4, names=NAMES2).agrees(s)


def test_print_canonical_forms():
    s = parse_series("1/2*X1^2 - X1 + 3 + i*X2", 2, 3)
    assert s.to_string() == "3 - X1 + i*X2 + 1/2*X1^2 + O(4)"
    assert parse_series("0.1*X1", 1, 2).coeff((1,)) == mpq(1, 10)


def test_parse_errors_have_positions():
    with pytest.raises(ParseError) as exc:
        parse_poly("X1 + $", ["X1"])
    assert exc.value.col == 6
    with pytest.raises(ParseError):
        parse_poly("X1 ** 2", ["X1"])
    with pytest.raises(ParseError):
        parse_poly("Y + 1", ["X1"])


def test_tail_markers_are_accepted():
    assert parse_poly("X1 + X1^2 + ...", ["X1"]) == parse_poly("X1 + X1^2", ["X1"])
    assert parse_poly("X1 + O(5)", ["X1"]) == parse_poly("X1", ["X1"])


def test_coeff_beyond_order_raises():
    with pytest.raises(OrderExhausted):
        S("X1", order=2).coeff((3,))
