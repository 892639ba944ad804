import random

import pytest
import sympy as sp
from gmpy2 import mpq

from invlift.series import GaussQ, Poly, Series


def to_sympy_coeff(c):
    if isinstance(c, GaussQ):
        return sp.Rational(str(c.re)) + sp.I * sp.Rational(str(c.im))
    if isinstance(c, complex):
        return sp.Float(c.real) + sp.I * sp.Float(c.imag)
    return sp.Rational(str(c))


def to_sympy(obj, syms):
    """Poly or Series as a sympy expression (truncation dropped)."""
    expr = sp.Integer(0)
    for e, c in obj.to_dict().items():
        term = to_sympy_coeff(c)
        for s, k in zip(syms, e):
            term *= s ** k
        expr += term
    return sp.expand(expr)


def sympy_truncate(expr, syms, order):
    """Drop every term of total degree > order."""
    poly = sp.Poly(sp.expand(expr), *syms)
    return sp.expand(sum((c * sp.prod([s ** k for s, k in zip(syms, m)]) for m, c in poly.terms() if sum(m) <= order),
                         sp.Integer(0)))


def sympy_series(expr, syms, order):
    """Taylor expansion to total degree ``order`` via a scaling variable."""
    t = sp.Symbol("_t")
    scaled = expr.subs({s: t * s for s in syms}, simultaneous=True)
    ser = sp.series(scaled, t, 0, order + 1).removeO()
    return sp.expand(ser.subs(t, 1))


def rand_poly(rng: random.Random, p: int, max_deg: int, min_deg: int = 0, density: float = 0.6) -> Poly:
    terms = {}
    for deg in range(min_deg, max_deg + 1):
        for e in _exps(p, deg):
            if rng.random() < density:
                terms[e] = mpq(rng.randint(-4, 4), rng.choice((1, 2, 3)))
    return Poly.from_dict(p, terms)


def _exps(p, d):
    if p == 1:
        return [(d,)]
    return [(k,) + r for k in range(d, -1, -1) for r in _exps(p - 1, d - k)]


def rand_series(rng, p, order, min_deg=0, density=0.6) -> Series:
    return Series.from_poly(rand_poly(rng, p, order, min_deg, density), order)


@pytest.fixture
def rng():
    return random.Random(20261015)


@pytest.fixture
def X():
    return sp.symbols("X1:4")


def cyclic_power_solvable(n: int, f_coeffs, order: int) -> bool:
    """Undetermined-coefficient search for F with F^n = f mod X^(order+1), p = 1.

    Equations are taken degree by degree; each one, after substituting the
    coefficients already fixed, has at most one fresh unknown, so the search
    branches over all complex roots of that equation.
    """
    x = sp.Symbol("x")
    c = sp.symbols(f"c0:{order + 1}")
    F = sum(ci * x ** k for k, ci in enumerate(c))
    f = sum(sp.Rational(str(a)) * x ** k for k, a in enumerate(f_coeffs) if k <= order)
    poly = sp.Poly(sp.expand(F ** n - f), x)
    eqs = [poly.coeff_monomial(x ** k) for k in range(order + 1)]

    def search(k, subs):
        while k <= order:
            eq = sp.expand(eqs[k].subs(subs))
            free = sorted(eq.free_symbols, key=lambda s: c.index(s))
            if not free:
                if sp.simplify(eq) != 0:
                    return False
                k += 1
                continue
            if len(free) > 1:
                raise AssertionError("more than one fresh unknown in one equation")
            s = free[0]
            roots = sp.roots(sp.Poly(eq, s))
            if not roots:
                return False
            return any(search(k + 1, {**subs, s: r}) for r in roots)
        return True

    return search(0, {})
