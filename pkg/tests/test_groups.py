
import pytest
import sympy as sp
from gmpy2 import mpq

from invlift.groups import (
    CustomUnsupported, NoChoiceFound, NotInvariant, OnDiscriminant, apply_element, canonical_representative,
    choose_invariant_coordinates, dihedral_sigma2, make_custom, make_cyclic, make_dihedral, make_product,
    orbit_match, parse_group_spec, point_preimage, rewrite_invariant,
)
from invlift.series import Series, approx_field, parse_poly, parse_series

from conftest import rand_poly, to_sympy

CATALOG = ["C2", "C3", "C4", "D3", "D4", "D5", "C2*C2", "C2*D3"]
U = ["u1", "u2"]


def P(src, names=U):
    return parse_poly(src, names)


# ------------------------------------------------------------------ construction

def test_cyclic_examples():
    c2 = make_cyclic(2)
    assert c2.sigma == [P("u1^2", ["u1"])] and c2.J == P("2*u1", ["u1"])
    assert c2.delta == P("W1", ["W1"])
    assert make_cyclic(3).delta == P("W1", ["W1"])
    minus = ((mpq(-1),),)
    assert apply_element(minus, [parse_series("X1", 1, 3)])[0].agrees(parse_series("-X1", 1, 3))
    with pytest.raises(ValueError):
        make_cyclic(1)


def test_dihedral_examples():
    d3 = make_dihedral(3)
    assert d3.sigma[0] == P("u1^2/2 + u2^2/2")
    assert d3.sigma[1] == P("u1^3/3 - u1*u2^2")
    assert d3.delta == P("8*W1^3 - 9*W2^2", ["W1", "W2"])
    assert make_dihedral(4).sigma[1] == P("(u1^4 - 6*u1^2*u2^2 + u2^4)/4")
    with pytest.raises(ValueError):
        make_dihedral(2)


def test_dihedral_sigma2_matches_real_part_of_power():
    x, y = sp.symbols("u1 u2", real=True)
    for l in (3, 4, 5, 6):
        want = sp.expand(sp.re(sp.expand((x + sp.I * y) ** l)) / l)
        assert sp.expand(to_sympy(dihedral_sigma2(l), [x, y]) - want) == 0


def test_product_examples():
    c22 = make_product([make_cyclic(2), make_cyclic(2)])
    assert c22.sigma == [P("u1^2"), P("u2^2")]
    assert c22.delta == P("W1*W2", ["W1", "W2"])
    one = make_product([make_dihedral(3)])
    assert one.sigma == make_dihedral(3).sigma and one.delta == make_dihedral(3).delta
    mixed = parse_group_spec("C2*D3")
    assert mixed.m == 3 and mixed.n == 3


@pytest.mark.parametrize("spec", CATALOG)
def test_generators_invariant_under_every_element(spec):
    sys = parse_group_spec(spec)
    fld = approx_field()
    for g in sys.float_elements:
        for s in sys.sigma:
            moved = s.to_field(fld).linear_substitute(g)
            diff = moved - s.to_field(fld)
            assert all(abs(c) < 1e-9 for c in diff.to_dict().values())


@pytest.mark.parametrize("spec", CATALOG)
def test_jacobian_divides_discriminant(spec):
    sys = parse_group_spec(spec)
    D = sys.delta_upstairs()
    assert sys.J.divides(D)


def test_discriminant_closed_forms():
    # cyclic: Δ / J = z / n ; dihedral: Δ / J = -Im z^l  (J = -Im z^l in real coordinates)
    for n in (2, 3, 5):
        sys = make_cyclic(n)
        assert sys.delta_upstairs().divide_exact(sys.J) == P(f"u1/{n}", ["u1"])
    x, y = sp.symbols("u1 u2", real=True)
    for l in (3, 4, 5):
        sys = make_dihedral(l)
        im = sp.expand(sp.im(sp.expand((x + sp.I * y) ** l)))
        assert sp.expand(to_sympy(sys.J, [x, y]) + im) == 0
        assert sp.expand(to_sympy(sys.delta_upstairs(), [x, y]) - im ** 2) == 0


def test_group_closure_and_identity():
    for spec in CATALOG:
        sys = parse_group_spec(spec)
        els = sys.float_elements
        assert len(els) == sys.order
        ident = tuple(tuple(complex(int(i == j)) for j in range(sys.n)) for i in range(sys.n))
        assert any(all(abs(a - b) < 1e-12 for ra, rb in zip(g, ident) for a, b in zip(ra, rb)) for g in els)


# ------------------------------------------------------------------ coordinates

def test_choose_coordinates_examples():
    d3 = make_dihedral(3)
    f = [parse_series("X1^2/2", 1, 10), parse_series("X1^3/3 - X1^5", 1, 10)]
    chosen, q = choose_invariant_coordinates(d3, f, 10)
    assert chosen.coord_choice == (0, 1) and q == 8
    with pytest.raises(NoChoiceFound):
        choose_invariant_coordinates(make_cyclic(2), [Series.zero(1, 8)], 8)
    c22 = make_product([make_cyclic(2), make_cyclic(2)])
    with pytest.raises(NoChoiceFound):
        choose_invariant_coordinates(c22, [parse_series("X1^2", 2, 8), Series.zero(2, 8)], 8)


# ------------------------------------------------------------------ rewriting

def test_rewrite_examples():
    assert rewrite_invariant(make_cyclic(3), P("u1^6", ["u1"])) == P("W1^2", ["W1"])
    d3 = make_dihedral(3)
    assert rewrite_invariant(d3, P("(u1^2 + u2^2)^2/4")) == P("W1^2", ["W1", "W2"])
    assert rewrite_invariant(d3, d3.delta_upstairs()) == d3.delta
    with pytest.raises(NotInvariant):
        rewrite_invariant(d3, P("u1"))


@pytest.mark.parametrize("spec", ["C2", "C3", "D3", "D4", "C2*C2"])
def test_rewrite_is_left_inverse(spec, rng):
    sys = parse_group_spec(spec)
    for _ in range(5):
        q = rand_poly(rng, sys.m, 3)
        assert rewrite_invariant(sys, q.compose(sys.sigma)) == q


# ------------------------------------------------------------------ preimages

def test_point_preimage_examples():
    v, fld = point_preimage(make_cyclic(2), [mpq(4)])
    assert v == [2] and fld.exact
    d3 = make_dihedral(3)
    z = [mpq(1, 2), mpq(1, 3)]
    v, fld = point_preimage(d3, z)
    assert [s.evaluate(v) for s in d3.sigma] == z
    with pytest.raises(OnDiscriminant):
        point_preimage(make_cyclic(2), [mpq(0)])


@pytest.mark.parametrize("spec", ["C2", "C3", "C4", "D3", "D4", "D5", "C2*D3"])
def test_point_preimage_reproduces_point(spec, rng):
    sys = parse_group_spec(spec)
    for _ in range(5):
        v0 = [mpq(rng.randint(-3, 3), rng.choice((1, 2))) or mpq(1) for _ in range(sys.n)]
        z = [s.evaluate(v0) for s in sys.sigma]
        if sys.delta.evaluate(z) == 0:
            continue
        v, fld = point_preimage(sys, z)
        back = [s.to_field(fld).evaluate(v) for s in sys.sigma]
        if fld.exact:
            assert back == z
        else:
            assert all(abs(complex(a) - complex(b)) < 1e-9 for a, b in zip(back, z))


def test_custom_preimage_unsupported():
    sys = make_custom([((-1, 0), (0, -1)), ((1, 0), (0, 1))], [P("u1^2"), P("u1*u2"), P("u2^2")],
                      P("W1*W3", ["W1", "W2", "W3"]), [P("W2^2 - W1*W3", ["W1", "W2", "W3"])])
    with pytest.raises(CustomUnsupported):
        point_preimage(sys, [mpq(1), mpq(1), mpq(1)])


# ------------------------------------------------------------------ orbits

def test_orbit_match_examples():
    c2 = make_cyclic(2)
    F = [parse_series("X1 + X1^2", 1, 6)]
    G = [parse_series("-X1 - X1^2", 1, 6)]
    g = orbit_match(c2, F, G)
    assert g is not None and g[0][0] == -1
    g = orbit_match(c2, F, F)
    assert g[0][0] == 1
    assert orbit_match(c2, F, [parse_series("X1", 1, 6)]) is None


def test_orbit_match_recovers_rotation():
    d3 = make_dihedral(3)
    F = [parse_series("1 + X1 - X2", 2, 5), parse_series("X1*X2 + 2*X2", 2, 5)]
    for g in d3.float_elements:
        G = apply_element(g, [s.to_field(approx_field()) for s in F])
        h = orbit_match(d3, F, G)
        assert h is not None
        assert all(abs(a - b) < 1e-9 for ra, rb in zip(g, h) for a, b in zip(ra, rb))


def test_canonical_representative_is_orbit_invariant():
    d4 = make_dihedral(4)
    F = [parse_series("X1 + 2*X1^2", 1, 5), parse_series("-X1^2", 1, 5)]
    reps = {tuple(s.to_string() for s in canonical_representative(d4, apply_element(g, F)))
            for g in d4.elements(exact=True)}
    assert len(reps) == 1
