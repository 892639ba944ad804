"""Exact polynomials and truncated multivariate power series.

Coefficients live in one of two fields:

* ``EXACT``: Gaussian rationals.  Real values are plain ``gmpy2.mpq``; values
  with a nonzero imaginary part are :class:`GaussQ`.  Every operation
  normalises back to ``mpq`` when the imaginary part vanishes, so the common
  real case never pays for complex arithmetic.
* ``ApproxField(eps)``: Python ``complex`` with a relative comparison
  tolerance.

A :class:`Series` stores its terms graded by total degree (``parts[k]`` maps a
packed exponent to a coefficient) together with the reliable order ``q``:
terms of degree ``> q`` are unknown, not zero.  Every operation documents the
order of its result.
"""

from __future__ import annotations

import ast
import cmath
import itertools
import math
import os
import re
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz

__all__ = [
    "GaussQ", "Field", "ExactField", "ApproxField", "EXACT", "approx_field",
    "default_epsilon", "coerce_exact", "Poly", "Series", "NotDivisible",
    "RootNotInField", "ConstantTermZero", "OrderExhausted", "ParseError",
    "pack", "unpack", "MultiIndex", "multi_indices", "exp_to_multi",
    "multi_to_exp", "parse_poly", "parse_series", "format_coeff", "exact_root",
    "series_root", "homogeneous_root",
]

# --------------------------------------------------------------------------
# errors

class NotDivisible(ArithmeticError):
    """The formal quotient does not exist.

    ``degree`` is the first obstructed degree of the quotient (negative when
    the numerator's valuation is already too small), ``residual`` the
    offending homogeneous residual as a Series.
    """

    def __init__(self, degree: int, residual=None, note: str = ""):
        self.degree = degree
        self.residual = residual
        self.note = note
        super().__init__(f"not divisible at degree {degree}" + (f" ({note})" if note else ""))


class RootNotInField(ArithmeticError):
    pass


class ConstantTermZero(ArithmeticError):
    pass


class OrderExhausted(ArithmeticError):
    """Reliable order dropped below what the computation needs."""


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 0):
        self.msg = msg
        self.line = line
        self.col = col
        super().__init__(f"{msg} (line {line}, column {col})")


# --------------------------------------------------------------------------
# coefficients

_ZERO = mpq(0)
_ONE = mpq(1)


class GaussQ:
    """Exact element re + im*i of Q(i) with ``im != 0``.

    Construct through :func:`gauss`, which returns a plain ``mpq`` when the
    imaginary part is zero.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = re
        self.im = im

    # arithmetic ---------------------------------------------------------
    def __add__(self, o):
        if isinstance(o, GaussQ):
            return gauss(self.re + o.re, self.im + o.im)
        if isinstance(o, (int, type(_ZERO), Fraction)):
            return GaussQ(self.re + o, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, GaussQ):
            return gauss(self.re - o.re, self.im - o.im)
        if isinstance(o, (int, type(_ZERO), Fraction)):
            return GaussQ(self.re - o, self.im)
        return NotImplemented

    def __rsub__(self, o):
        if isinstance(o, (int, type(_ZERO), Fraction)):
            return GaussQ(o - self.re, -self.im)
        return NotImplemented

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __mul__(self, o):
        if isinstance(o, GaussQ):
            return gauss(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
        if isinstance(o, (int, type(_ZERO), Fraction)):
            if o == 0:
                return _ZERO
            return GaussQ(self.re * o, self.im * o)
        return NotImplemented

    __rmul__ = __mul__

    def norm(self):
        return self.re * self.re + self.im * self.im

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def inverse(self):
        n = self.norm()
        return GaussQ(self.re / n, -self.im / n)

    def __truediv__(self, o):
        if isinstance(o, GaussQ):
            return self * o.inverse()
        if isinstance(o, (int, type(_ZERO), Fraction)):
            return GaussQ(self.re / o, self.im / o)
        return NotImplemented

    def __rtruediv__(self, o):
        if isinstance(o, (int, type(_ZERO), Fraction)):
            return o * self.inverse()
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        r = _ONE
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, o):
        if isinstance(o, GaussQ):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, type(_ZERO), Fraction)):
            return False  # im != 0 by construction
        if isinstance(o, complex):
            return complex(self) == o
        return NotImplemented

    def __ne__(self, o):
        r = self.__eq__(o)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return True

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"


def gauss(re, im):
    if im == 0:
        return re if isinstance(re, type(_ZERO)) else mpq(re)
    return GaussQ(mpq(re), mpq(im))


_MPQ = type(_ZERO)


def coerce_exact(x):
    """Convert ints, Fractions, decimal strings, mpq or GaussQ to an exact element."""
    if isinstance(x, (_MPQ, GaussQ)):
        return x
    if isinstance(x, (int, Fraction)):
        return mpq(x)
    if isinstance(x, str):
        return mpq(Fraction(x))
    if isinstance(x, complex):
        re_, im_ = Fraction(x.real), Fraction(x.imag)
        return gauss(mpq(re_), mpq(im_))
    if isinstance(x, float):
        return mpq(Fraction(x))
    if isinstance(x, type(mpz(0))):
        return mpq(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to an exact coefficient")


def re_im(c):
    """Real and imaginary parts of an exact element, as mpq."""
    if isinstance(c, GaussQ):
        return c.re, c.im
    return c, _ZERO


class Field:
    """Coefficient field interface shared by ``EXACT`` and ``ApproxField``."""

    exact: bool
    zero: object
    one: object
    eps: float

    def coerce(self, x):
        raise NotImplementedError

    def is_zero(self, c) -> bool:
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        raise NotImplementedError

    def inv(self, c):
        return self.one / c

    def imag_unit(self):
        raise NotImplementedError


class ExactField(Field):
    exact = True
    zero = _ZERO
    one = _ONE
    eps = 0.0

    def coerce(self, x):
        return coerce_exact(x)

    def is_zero(self, c) -> bool:
        return c == 0

    def eq(self, a, b) -> bool:
        return a == b

    def imag_unit(self):
        return GaussQ(_ZERO, _ONE)

    def __repr__(self):
        return "EXACT"


class ApproxField(Field):
    exact = False
    zero = 0j
    one = 1 + 0j

    def __init__(self, eps: float = 1e-9):
        self.eps = float(eps)

    def coerce(self, x):
        if isinstance(x, GaussQ):
            return complex(x)
        if isinstance(x, (_MPQ, Fraction)):
            return complex(float(x))
        return complex(x)

    def is_zero(self, c) -> bool:
        return abs(c) <= self.eps

    def eq(self, a, b) -> bool:
        a, b = complex(a), complex(b)
        return abs(a - b) <= self.eps * max(1.0, abs(a), abs(b))

    def imag_unit(self):
        return 1j

    def __eq__(self, o):
        return isinstance(o, ApproxField) and o.eps == self.eps

    def __hash__(self):
        return hash(("approx", self.eps))

    def __repr__(self):
        return f"ApproxField({self.eps:g})"


EXACT = ExactField()


def default_epsilon() -> float:
    """Float tolerance, overridable through ``INVLIFT_EPSILON``."""
    v = os.environ.get("INVLIFT_EPSILON")
    return float(v) if v else 1e-9


def approx_field(eps: float | None = None) -> ApproxField:
    return ApproxField(default_epsilon() if eps is None else eps)


def join_fields(a: Field, b: Field) -> Field:
    if a.exact and b.exact:
        return EXACT
    if not a.exact and not b.exact:
        return a if a.eps >= b.eps else b
    return b if a.exact else a


# --------------------------------------------------------------------------
# exact roots of constants

def _gauss_int_pow(a: int, b: int, n: int):
    re_, im_ = 1, 0
    for _ in range(n):
        re_, im_ = re_ * a - im_ * b, re_ * b + im_ * a
    return re_, im_


def exact_root(c, n: int):
    """All n-th roots of an exact constant that lie in Q(i).

    Ordered deterministically: the principal root first, then counter-
    clockwise.  Returns an empty list when no root is representable.
    """
    if n == 1:
        return [c]
    if c == 0:
        return [_ZERO]
    re_, im_ = re_im(c)
    den = int(gmpy2.lcm(re_.denominator, im_.denominator))
    A, B = int(re_ * den), int(im_ * den)
    # c = (A + iB)/den ;  c^(1/n) = ((A+iB) den^(n-1))^(1/n) / den
    MA, MB = A * den ** (n - 1), B * den ** (n - 1)
    bits = max(abs(MA), abs(MB), 1).bit_length() // n + 64
    out = []
    with gmpy2.context(gmpy2.get_context(), precision=bits + 64):
        z = gmpy2.mpc(MA, MB)
        mod = gmpy2.root(abs(z), n)
        arg = gmpy2.atan2(gmpy2.mpfr(MB), gmpy2.mpfr(MA))
        for k in range(n):
            theta = (arg + 2 * gmpy2.const_pi() * k) / n
            xr = mod * gmpy2.cos(theta)
            yr = mod * gmpy2.sin(theta)
            a = int(gmpy2.rint(xr))
            b = int(gmpy2.rint(yr))
            if _gauss_int_pow(a, b, n) == (MA, MB):
                out.append(gauss(mpq(a, den), mpq(b, den)))
    return out


def _principal_root_complex(c: complex, n: int) -> complex:
    if c == 0:
        return 0j
    return cmath.exp(cmath.log(c) / n)


# --------------------------------------------------------------------------
# exponent packing

BITS = 16
MASK = (1 << BITS) - 1


def pack(exps: Sequence[int]) -> int:
    k = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MASK:
            raise ValueError("exponent out of range")
        k |= e << (BITS * i)
    return k


def unpack(key: int, p: int) -> tuple:
    return tuple((key >> (BITS * i)) & MASK for i in range(p))


def key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & MASK
        key >>= BITS
    return d


def unit_key(i: int) -> int:
    return 1 << (BITS * i)


def _grevlex_sort_key(exps: tuple):
    # graded reverse lexicographic, descending: larger monomials first
    return (sum(exps), tuple(-e for e in reversed(exps)))


# --------------------------------------------------------------------------
# multi-indices

class MultiIndex(tuple):
    """Unordered index tuple stored in canonical non-decreasing form (1-based)."""

    def __new__(cls, entries: Iterable[int] = ()):
        return super().__new__(cls, sorted(int(a) for a in entries))

    @property
    def order(self) -> int:
        return len(self)

    def add(self, a: int) -> "MultiIndex":
        return MultiIndex(tuple(self) + (a,))

    def to_exponents(self, p: int) -> tuple:
        return multi_to_exp(self, p)

    def factorial(self) -> int:
        r = 1
        for e in multi_to_exp(self, max(self) if self else 1):
            r *= math.factorial(e)
        return r

    def __repr__(self):
        return "(" + ",".join(str(a) for a in self) + ")"


def multi_to_exp(A: Sequence[int], p: int) -> tuple:
    r = [0] * p
    for a in A:
        if not 1 <= a <= p:
            raise ValueError(f"index {a} outside 1..{p}")
        r[a - 1] += 1
    return tuple(r)


def exp_to_multi(r: Sequence[int]) -> MultiIndex:
    out = []
    for i, e in enumerate(r):
        out.extend([i + 1] * e)
    return MultiIndex(out)


def multi_indices(p: int, q: int, *, include_empty: bool = True) -> list:
    """The set of multi-indices of order at most ``q`` over ``1..p``, by order then lexicographically."""
    out = []
    for s in range(0 if include_empty else 1, q + 1):
        for comb in itertools.combinations_with_replacement(range(1, p + 1), s):
            out.append(MultiIndex(comb))
    return out


# --------------------------------------------------------------------------
# coefficient formatting

def _fmt_rat(x) -> str:
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_coeff(c) -> str:
    """Canonical text of a coefficient: ``a/b``, ``c/d*i`` or ``(a/b + c/d*i)``."""
    if isinstance(c, complex):
        if c.imag == 0:
            return repr(c.real)
        if c.real == 0:
            return f"{c.imag!r}*i"
        sign = "+" if c.imag >= 0 else "-"
        return f"({c.real!r} {sign} {abs(c.imag)!r}*i)"
    re_, im_ = re_im(c)
    if im_ == 0:
        return _fmt_rat(re_)
    if re_ == 0:
        if im_ == 1:
            return "i"
        if im_ == -1:
            return "-i"
        return f"{_fmt_rat(im_)}*i"
    sign = "+" if im_ > 0 else "-"
    return f"({_fmt_rat(re_)} {sign} {_fmt_rat(abs(im_))}*i)"


def _monomial_text(exps: tuple, names: Sequence[str]) -> str:
    parts = []
    for e, nm in zip(exps, names):
        if e == 1:
            parts.append(nm)
        elif e > 1:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def _terms_text(terms: list, names: Sequence[str], field: Field) -> str:
    """Join (exps, coeff) pairs with explicit signs."""
    out = []
    for exps, c in terms:
        mono = _monomial_text(exps, names)
        neg = False
        if isinstance(c, complex):
            if c.imag == 0 and c.real < 0:
                neg, c = True, -c
        else:
            re_, im_ = re_im(c)
            if (im_ == 0 and re_ < 0) or (re_ == 0 and im_ < 0):
                neg, c = True, -c
        if mono and ((field.exact and c == 1) or (not field.exact and c == 1 + 0j)):
            body = mono
        else:
            cs = format_coeff(c)
            body = f"{cs}*{mono}" if mono else cs
        out.append(("-" if neg else "+", body))
    if not out:
        return "0"
    first_sign, first = out[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


# --------------------------------------------------------------------------
# polynomials

def _default_names(prefix: str, n: int) -> list:
    return [f"{prefix}{i + 1}" for i in range(n)]


def _mul_dicts(a: dict, b: dict, field_zero_test=None) -> dict:
    out: dict = {}
    get = out.get
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    if field_zero_test is None:
        return {k: c for k, c in out.items() if c != 0}
    return {k: c for k, c in out.items() if not field_zero_test(c)}


class Poly:
    """Exact (untruncated) polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "terms", "field")

    def __init__(self, nvars: int, terms: dict | None = None, field: Field = EXACT):
        self.nvars = nvars
        self.field = field
        if terms:
            self.terms = {k: c for k, c in terms.items() if not field.is_zero(c)}
        else:
            self.terms = {}

    # construction ------------------------------------------------------
    @classmethod
    def const(cls, nvars: int, c, field: Field = EXACT) -> "Poly":
        return cls(nvars, {0: field.coerce(c)}, field)

    @classmethod
    def var(cls, nvars: int, i: int, field: Field = EXACT) -> "Poly":
        """The coordinate function of variable ``i`` (0-based)."""
        return cls(nvars, {unit_key(i): field.one}, field)

    @classmethod
    def from_dict(cls, nvars: int, d: dict, field: Field = EXACT) -> "Poly":
        """Build from ``{exponent tuple: coefficient}``."""
        return cls(nvars, {pack(e): field.coerce(c) for e, c in d.items()}, field)

    def to_dict(self) -> dict:
        return {unpack(k, self.nvars): c for k, c in self.terms.items()}

    # basic queries -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((key_degree(k) for k in self.terms), default=-1)

    def low_degree(self) -> int:
        return min((key_degree(k) for k in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({key_degree(k) for k in self.terms}) <= 1

    def homogeneous_parts(self) -> dict:
        out: dict = {}
        for k, c in self.terms.items():
            out.setdefault(key_degree(k), {})[k] = c
        return {d: Poly(self.nvars, t, self.field) for d, t in out.items()}

    def weighted_degree(self, weights: Sequence[int]) -> int:
        best = -1
        for k in self.terms:
            e = unpack(k, self.nvars)
            best = max(best, sum(w * x for w, x in zip(weights, e)))
        return best

    def constant(self):
        return self.terms.get(0, self.field.zero)

    def coeff(self, exps: Sequence[int]):
        return self.terms.get(pack(exps), self.field.zero)

    # arithmetic --------------------------------------------------------
    def _lift(self, o) -> "Poly":
        if isinstance(o, Poly):
            if o.nvars != self.nvars:
                raise ValueError("variable-count mismatch")
            return o
        return Poly.const(self.nvars, o, self.field)

    def _with_field(self, o: "Poly"):
        f = join_fields(self.field, o.field)
        a = self if self.field is f else self.to_field(f)
        b = o if o.field is f else o.to_field(f)
        return a, b, f

    def to_field(self, field: Field) -> "Poly":
        if field is self.field:
            return self
        if field.exact and not self.field.exact:
            raise TypeError("cannot convert approximate coefficients to exact ones")
        return Poly(self.nvars, {k: field.coerce(c) for k, c in self.terms.items()}, field)

    def __add__(self, o):
        a, b, f = self._with_field(self._lift(o))
        t = dict(a.terms)
        for k, c in b.terms.items():
            t[k] = t.get(k, 0) + c
        return Poly(self.nvars, t, f)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {k: -c for k, c in self.terms.items()}, self.field)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, Poly):
            c = self.field.coerce(o)
            if self.field.is_zero(c):
                return Poly(self.nvars, {}, self.field)
            return Poly(self.nvars, {k: v * c for k, v in self.terms.items()}, self.field)
        a, b, f = self._with_field(self._lift(o))
        return Poly(self.nvars, _mul_dicts(a.terms, b.terms, f.is_zero), f)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Poly):
            return self.divide_exact(o)
        c = self.field.coerce(o)
        return self * (self.field.one / c)

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        r = Poly.const(self.nvars, 1, self.field)
        b = self
        while k:
            if k & 1:
                r = r * b
            k >>= 1
            if k:
                b = b * b
        return r

    def __eq__(self, o):
        if not isinstance(o, Poly):
            try:
                o = self._lift(o)
            except (TypeError, ValueError):
                return NotImplemented
        if o.nvars != self.nvars:
            return False
        d = self - o
        return d.is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def derive(self, i: int) -> "Poly":
        """Partial derivative in variable ``i`` (0-based)."""
        shift = BITS * i
        u = unit_key(i)
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & MASK
            if e:
                out[k - u] = c * e
        return Poly(self.nvars, out, self.field)

    def evaluate(self, point: Sequence):
        """Value at a point (coefficients coerced into this field)."""
        fld = self.field
        if fld.exact and any(isinstance(x, (complex, float)) for x in point):
            fld = approx_field()
        pt = [fld.coerce(x) for x in point]
        total = fld.zero
        powcache: dict = {}
        for k, c in self.terms.items():
            term = fld.coerce(c)
            for i, e in enumerate(unpack(k, self.nvars)):
                if e:
                    key = (i, e)
                    if key not in powcache:
                        powcache[key] = pt[i] ** e
                    term = term * powcache[key]
            total = total + term
        return total

    def compose(self, inner: Sequence):
        """Substitute ``inner[i]`` for variable ``i``.

        ``inner`` may hold Polys (result is a Poly) or Series (result is a
        Series whose order is the minimum inner order).
        """
        if len(inner) != self.nvars:
            raise ValueError("composition arity mismatch")
        if inner and isinstance(inner[0], Series):
            return _compose_poly_series(self, list(inner))
        ring_vars = inner[0].nvars if inner else 0
        fld = self.field
        for g in inner:
            fld = join_fields(fld, g.field)
        result = Poly(ring_vars, {}, fld)
        powers = [[Poly.const(ring_vars, 1, fld)] for _ in inner]
        for k, c in self.terms.items():
            term = Poly.const(ring_vars, c, fld)
            for i, e in enumerate(unpack(k, self.nvars)):
                while len(powers[i]) <= e:
                    powers[i].append(powers[i][-1] * inner[i])
                if e:
                    term = term * powers[i][e]
            result = result + term
        return result

    def linear_substitute(self, matrix) -> "Poly":
        """``p(M u)``: substitute ``u_i -> sum_j M[i][j] u_j``."""
        n = self.nvars
        lin = []
        for i in range(n):
            lin.append(Poly(n, {unit_key(j): self.field.coerce(matrix[i][j]) if self.field.exact else complex(matrix[i][j])
                               for j in range(n) if matrix[i][j] != 0}, self.field))
        return self.compose(lin)

    def divide_exact(self, d: "Poly") -> "Poly":
        """Exact quotient ``self / d``; raises :class:`NotDivisible` if a remainder is left."""
        q, r = _poly_divmod(self.terms, d.terms, self.nvars, join_fields(self.field, d.field))
        if r:
            raise NotDivisible(-1, None, "polynomial remainder is nonzero")
        return Poly(self.nvars, q, join_fields(self.field, d.field))

    def divides(self, n: "Poly") -> bool:
        _, r = _poly_divmod(n.terms, self.terms, self.nvars, join_fields(self.field, n.field))
        return not r

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.nvars, {k: fn(c) for k, c in self.terms.items()}, self.field)

    def rename(self, nvars: int, index_map: Sequence[int]) -> "Poly":
        """Re-index variables: old variable ``i`` becomes new variable ``index_map[i]``."""
        out = {}
        for k, c in self.terms.items():
            e = unpack(k, self.nvars)
            ne = [0] * nvars
            for i, x in enumerate(e):
                ne[index_map[i]] += x
            out[pack(ne)] = c
        return Poly(nvars, out, self.field)

    # text --------------------------------------------------------------
    def sorted_terms(self) -> list:
        items = [(unpack(k, self.nvars), c) for k, c in self.terms.items()]
        items.sort(key=lambda t: _grevlex_sort_key(t[0]), reverse=True)
        return items

    def to_string(self, names: Sequence[str] | None = None, prefix: str = "u") -> str:
        names = names or _default_names(prefix, self.nvars)
        return _terms_text(self.sorted_terms(), names, self.field)

    def __repr__(self):
        return f"Poly({self.to_string()})"


def _poly_divmod(a: dict, b: dict, nvars: int, field: Field):
    """Multivariate division by leading term in lex order (variable 0 most significant)."""
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")

    def lexkey(k):
        return unpack(k, nvars)

    lead_b = max(b, key=lexkey)
    lb_exp = unpack(lead_b, nvars)
    lb_c = b[lead_b]
    inv_lb = field.one / lb_c
    rem = dict(a)
    quot: dict = {}
    out_rem: dict = {}
    while rem:
        lead = max(rem, key=lexkey)
        c = rem[lead]
        le = unpack(lead, nvars)
        if all(x >= y for x, y in zip(le, lb_exp)):
            qk = lead - lead_b
            qc = c * inv_lb
            quot[qk] = quot.get(qk, 0) + qc
            for kb, cb in b.items():
                kk = qk + kb
                v = rem.get(kk, 0) - qc * cb
                if field.is_zero(v):
                    rem.pop(kk, None)
                else:
                    rem[kk] = v
            rem.pop(lead, None)
        else:
            out_rem[lead] = c
            del rem[lead]
    return quot, out_rem


# --------------------------------------------------------------------------
# series

def _trim(d: dict, is_zero) -> dict:
    return {k: c for k, c in d.items() if not is_zero(c)}


class Series:
    """Truncated power series in ``p`` variables with reliable order ``order``.

    Immutable by convention: operations never modify their operands.
    """

    __slots__ = ("p", "order", "parts", "field")

    def __init__(self, p: int, order: int, parts: list | None = None, field: Field = EXACT):
        if p < 1:
            raise ValueError("a series needs at least one variable")
        self.p = p
        self.order = order
        self.field = field
        if parts is None:
            parts = []
        n = max(order + 1, 0)
        if len(parts) < n:
            parts = list(parts) + [{} for _ in range(n - len(parts))]
        elif len(parts) > n:
            parts = parts[:n]
        self.parts = parts

    # construction ------------------------------------------------------
    @classmethod
    def zero(cls, p: int, order: int, field: Field = EXACT) -> "Series":
        return cls(p, order, None, field)

    @classmethod
    def const(cls, p: int, order: int, c, field: Field = EXACT) -> "Series":
        c = field.coerce(c)
        parts = [{0: c}] if not field.is_zero(c) else [{}]
        return cls(p, order, parts, field)

    @classmethod
    def var(cls, p: int, i: int, order: int, field: Field = EXACT) -> "Series":
        """Coordinate series ``X_{i+1}`` (``i`` 0-based)."""
        parts = [{}, {unit_key(i): field.one}] if order >= 1 else []
        return cls(p, order, parts, field)

    @classmethod
    def from_poly(cls, poly: Poly, order: int) -> "Series":
        parts: list = [{} for _ in range(max(order + 1, 0))]
        for k, c in poly.terms.items():
            d = key_degree(k)
            if d <= order:
                parts[d][k] = c
        return cls(poly.nvars, order, parts, poly.field)

    @classmethod
    def from_dict(cls, p: int, order: int, d: dict, field: Field = EXACT) -> "Series":
        parts: list = [{} for _ in range(max(order + 1, 0))]
        for e, c in d.items():
            c = field.coerce(c)
            deg = sum(e)
            if deg <= order and not field.is_zero(c):
                parts[deg][pack(e)] = c
        return cls(p, order, parts, field)

    def to_dict(self) -> dict:
        return {unpack(k, self.p): c for part in self.parts for k, c in part.items()}

    def to_poly(self) -> Poly:
        t = {}
        for part in self.parts:
            t.update(part)
        return Poly(self.p, t, self.field)

    # queries -----------------------------------------------------------
    def is_zero(self) -> bool:
        return all(not part for part in self.parts)

    def valuation(self) -> int:
        """Minimal degree of a nonzero term; ``order + 1`` for the zero truncation."""
        for k, part in enumerate(self.parts):
            if part:
                return k
        return self.order + 1

    def constant(self):
        if self.parts and self.parts[0]:
            return self.parts[0].get(0, self.field.zero)
        return self.field.zero

    def coeff(self, exps: Sequence[int]):
        d = sum(exps)
        if d > self.order:
            raise OrderExhausted(f"coefficient of degree {d} beyond reliable order {self.order}")
        return self.parts[d].get(pack(exps), self.field.zero)

    def lowest_form(self) -> dict:
        v = self.valuation()
        return self.parts[v] if v <= self.order else {}

    def nterms(self) -> int:
        return sum(len(p) for p in self.parts)

    def is_polynomial_below(self, degree: int) -> bool:
        """True when every term of degree > ``degree`` (within order) vanishes."""
        return all(not self.parts[k] for k in range(degree + 1, self.order + 1))

    def degree(self) -> int:
        for k in range(self.order, -1, -1):
            if self.parts[k]:
                return k
        return -1

    # field handling ----------------------------------------------------
    def to_field(self, field: Field) -> "Series":
        if field is self.field or (field.exact and self.field.exact):
            return self
        if field.exact:
            raise TypeError("cannot convert approximate coefficients to exact ones")
        parts = [{k: field.coerce(c) for k, c in part.items()} for part in self.parts]
        return Series(self.p, self.order, parts, field)

    def _binary(self, o):
        if isinstance(o, Series):
            if o.p != self.p:
                raise ValueError("variable-count mismatch")
            f = join_fields(self.field, o.field)
            return self.to_field(f), o.to_field(f), f
        if isinstance(o, Poly):
            if o.nvars != self.p:
                raise ValueError("variable-count mismatch")
            s = Series.from_poly(o, self.order)
            f = join_fields(self.field, s.field)
            return self.to_field(f), s.to_field(f), f
        f = self.field
        return self, Series.const(self.p, self.order, o, f), f

    # arithmetic --------------------------------------------------------
    def __add__(self, o):
        a, b, f = self._binary(o)
        q = min(a.order, b.order)
        parts = []
        for k in range(q + 1):
            d = dict(a.parts[k])
            for key, c in b.parts[k].items():
                v = d.get(key, 0) + c
                if f.is_zero(v):
                    d.pop(key, None)
                else:
                    d[key] = v
            parts.append(d)
        return Series(self.p, q, parts, f)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.p, self.order, [{k: -c for k, c in part.items()} for part in self.parts], self.field)

    def __sub__(self, o):
        a, b, _ = self._binary(o)
        return a + (-b)

    def __rsub__(self, o):
        a, b, _ = self._binary(o)
        return b + (-a)

    def scale(self, c) -> "Series":
        c = self.field.coerce(c) if self.field.exact or not isinstance(c, complex) else c
        if isinstance(c, complex) and self.field.exact:
            return self.to_field(approx_field()).scale(c)
        if self.field.is_zero(c):
            return Series(self.p, self.order, None, self.field)
        return Series(self.p, self.order, [{k: v * c for k, v in part.items()} for part in self.parts], self.field)

    def __mul__(self, o):
        if not isinstance(o, (Series, Poly)):
            if isinstance(o, complex) and self.field.exact:
                return self.to_field(approx_field()).scale(o)
            return self.scale(o)
        a, b, f = self._binary(o)
        q = min(a.order, b.order)
        return Series(self.p, q, _graded_mul(a.parts, b.parts, q, f.is_zero), f)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, (Series, Poly)):
            return self.divide_exact(o)
        return self.scale(self.field.one / self.field.coerce(o))

    def __pow__(self, k: int) -> "Series":
        if not isinstance(k, int) or k < 0:
            raise ValueError("series powers must be non-negative integers")
        r = Series.const(self.p, self.order, 1, self.field)
        b = self
        while k:
            if k & 1:
                r = r * b
            k >>= 1
            if k:
                b = b * b
        return r

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise OrderExhausted(f"cannot raise reliable order from {self.order} to {order}")
        return Series(self.p, order, [dict(part) for part in self.parts[: order + 1]], self.field)

    def with_order(self, order: int) -> "Series":
        """Reinterpret with a different order; only valid for exact polynomials or when lowering."""
        return Series(self.p, order, [dict(part) for part in self.parts[: order + 1]], self.field)

    def derive(self, i: int) -> "Series":
        """Partial derivative in variable ``i`` (0-based); the order drops by one."""
        shift = BITS * i
        u = unit_key(i)
        parts = []
        for k in range(1, self.order + 1):
            d = {}
            for key, c in self.parts[k].items():
                e = (key >> shift) & MASK
                if e:
                    d[key - u] = c * e
            parts.append(d)
        return Series(self.p, self.order - 1, parts, self.field)

    def derive_multi(self, A: Sequence[int]) -> "Series":
        """``∂_A`` for a 1-based multi-index."""
        s = self
        for a in A:
            s = s.derive(a - 1)
        return s

    def shift_order(self, k: int) -> "Series":
        return self.truncate(self.order - k)

    # equality ----------------------------------------------------------
    def agrees(self, o: "Series", order: int | None = None) -> bool:
        """Coefficientwise equality up to ``order`` (default: both reliable orders)."""
        q = min(self.order, o.order) if order is None else order
        if q > min(self.order, o.order):
            return False
        f = join_fields(self.field, o.field)
        for k in range(q + 1):
            a, b = self.parts[k], o.parts[k]
            for key in set(a) | set(b):
                x, y = a.get(key, f.zero), b.get(key, f.zero)
                if f.exact:
                    if x != y:
                        return False
                elif not f.eq(f.coerce(x), f.coerce(y)):
                    return False
        return True

    def __eq__(self, o):
        if not isinstance(o, Series):
            return NotImplemented
        return self.p == o.p and self.order == o.order and self.agrees(o)

    def __hash__(self):
        return hash((self.p, self.order, tuple(frozenset(p.items()) for p in self.parts)))

    def max_abs(self) -> float:
        return max((abs(complex(c)) for part in self.parts for c in part.values()), default=0.0)

    # division and roots ------------------------------------------------
    def inverse(self) -> "Series":
        """Reciprocal of a unit; order unchanged."""
        c0 = self.constant()
        if self.field.is_zero(c0):
            raise ConstantTermZero("inverse of a series without constant term")
        return self.unit_power_frac(-1, 1, self.field.one / c0)

    def divide_exact(self, den) -> "Series":
        """Formal quotient ``self / den``.

        Result order is ``min(q_num, q_den) - v`` with ``v = valuation(den)``.
        Raises :class:`NotDivisible` with the first obstructed quotient degree.
        """
        a, b, f = self._binary(den)
        v = b.valuation()
        if v > b.order:
            raise ZeroDivisionError("division by a series that vanishes to its reliable order")
        q_in = min(a.order, b.order)
        q_out = q_in - v
        # numerator terms below degree v are an immediate obstruction
        for k in range(min(v, a.order + 1)):
            if a.parts[k]:
                res = Series(self.p, k, [{} for _ in range(k)] + [dict(a.parts[k])], f)
                raise NotDivisible(k - v, res, "valuation shortfall")
        if q_out < 0:
            raise OrderExhausted(f"quotient order {q_out} < 0")
        h = b.parts[v]
        quot: list = []
        p = self.p
        # cache: homogeneous division by h (monomial h is the fast path)
        mono = len(h) == 1
        if mono:
            (hk, hc), = h.items()
            hinv = f.one / hc
            he = unpack(hk, p)
        for k in range(q_out + 1):
            deg = k + v
            r = dict(a.parts[deg])
            for j in range(k):
                bj = b.parts[deg - j] if deg - j <= b.order else {}
                if not bj or not quot[j]:
                    continue
                for k1, c1 in quot[j].items():
                    for k2, c2 in bj.items():
                        kk = k1 + k2
                        r[kk] = r.get(kk, 0) - c1 * c2
            r = _trim(r, f.is_zero)
            if mono:
                qk = {}
                for kk, c in r.items():
                    e = unpack(kk, p)
                    if any(x < y for x, y in zip(e, he)):
                        res = Series(p, deg, [{} for _ in range(deg)] + [r], f)
                        raise NotDivisible(k, res, "lowest form does not divide residual")
                    qk[kk - hk] = c * hinv
            else:
                qk, rem = _poly_divmod(r, h, p, f)
                if rem:
                    res = Series(p, deg, [{} for _ in range(deg)] + [r], f)
                    raise NotDivisible(k, res, "lowest form does not divide residual")
                qk = _trim(qk, f.is_zero)
            quot.append(qk)
        return Series(p, q_out, quot, f)

    def unit_power_frac(self, num: int, den: int, c0_root) -> "Series":
        """``self ** (num/den)`` for a unit, given the chosen root of the constant term.

        Uses the Euler-operator recurrence ``s * E(r) = alpha * r * E(s)`` which
        costs one truncated product.  Order is preserved.
        """
        f = self.field
        s0 = self.constant()
        if f.is_zero(s0):
            raise ConstantTermZero("power of a series without constant term")
        alpha = mpq(num, den) if f.exact else num / den
        q = self.order
        r: list = [{0: c0_root}]
        inv_s0 = f.one / s0
        for k in range(1, q + 1):
            acc: dict = {}
            for j in range(1, k + 1):
                sj = self.parts[j]
                rk = r[k - j]
                if not sj or not rk:
                    continue
                w = alpha * j - (k - j)
                if w == 0:
                    continue
                for k1, c1 in sj.items():
                    c1w = c1 * w
                    for k2, c2 in rk.items():
                        kk = k1 + k2
                        acc[kk] = acc.get(kk, 0) + c1w * c2
            scale = inv_s0 / k
            r.append(_trim({kk: c * scale for kk, c in acc.items()}, f.is_zero))
        return Series(self.p, q, r, f)

    def nth_root_unit(self, n: int, *, allow_approx: bool = True) -> "Series":
        """An n-th root of a unit series.

        Exact mode picks the first root of the constant term that lies in Q(i)
        (principal first, then counter-clockwise); if none exists the
        computation moves to approximate mode when ``allow_approx`` is set,
        else :class:`RootNotInField` is raised.  Approximate mode uses the
        principal root.
        """
        c0 = self.constant()
        if self.field.is_zero(c0):
            raise ConstantTermZero("n-th root of a series without constant term")
        if n == 1:
            return self
        if self.field.exact:
            roots = exact_root(c0, n)
            if roots:
                return self.unit_power_frac(1, n, roots[0])
            if not allow_approx:
                raise RootNotInField(f"no {n}-th root of {format_coeff(c0)} in Q(i)")
            return self.to_field(approx_field()).nth_root_unit(n)
        return self.unit_power_frac(1, n, _principal_root_complex(complex(c0), n))

    def split_valuation_monomial(self):
        """For p = 1: write ``s = X^v * u`` with ``u`` a unit; returns ``(v, u)``."""
        if self.p != 1:
            raise ValueError("monomial splitting needs a single variable")
        v = self.valuation()
        parts = [{(k >> 0) - v: c for k, c in self.parts[d].items()} for d in range(v, self.order + 1)]
        return v, Series(1, self.order - v, parts, self.field)

    # composition -------------------------------------------------------
    def compose(self, inner: Sequence["Series"]) -> "Series":
        """``self(inner_1, ..., inner_m)`` for inner series without constant terms.

        Result order is ``min(self.order, min inner order)``.
        """
        if len(inner) != self.p:
            raise ValueError("composition arity mismatch")
        for g in inner:
            if not g.field.is_zero(g.constant()):
                raise ValueError("inner series with nonzero constant term and a truncated outer series")
        return _compose_poly_series(self.to_poly(), list(inner), cap=self.order)

    def evaluate_const(self):
        return self.constant()

    # variable management ----------------------------------------------
    def embed(self, p_new: int, index_map: Sequence[int], order: int | None = None) -> "Series":
        """Re-index variables into a ring with ``p_new`` variables."""
        q = self.order if order is None else order
        parts = [{} for _ in range(q + 1)]
        for k in range(min(q, self.order) + 1):
            for key, c in self.parts[k].items():
                e = unpack(key, self.p)
                ne = [0] * p_new
                for i, x in enumerate(e):
                    ne[index_map[i]] += x
                parts[k][pack(ne)] = c
        return Series(p_new, q, parts, self.field)

    def coefficient_in(self, var: int, power: int, keep: Sequence[int]) -> "Series":
        """Coefficient of ``X_var^power`` as a series in the remaining variables ``keep``.

        Result order is ``self.order - power``.
        """
        q = self.order - power
        parts = [{} for _ in range(max(q + 1, 0))]
        for k in range(power, self.order + 1):
            for key, c in self.parts[k].items():
                e = unpack(key, self.p)
                if e[var] != power:
                    continue
                parts[k - power][pack([e[i] for i in keep])] = c
        return Series(len(keep), q, parts, self.field)

    def map_coeffs(self, fn) -> "Series":
        return Series(self.p, self.order, [{k: fn(c) for k, c in part.items()} for part in self.parts], self.field)

    def conjugate_coeffs(self) -> "Series":
        if self.field.exact:
            return self.map_coeffs(lambda c: c.conjugate() if isinstance(c, GaussQ) else c)
        return self.map_coeffs(lambda c: c.conjugate())

    def is_real(self) -> bool:
        if self.field.exact:
            return not any(isinstance(c, GaussQ) for part in self.parts for c in part.values())
        return all(abs(c.imag) <= self.field.eps for part in self.parts for c in part.values())

    # text --------------------------------------------------------------
    def sorted_terms(self) -> list:
        out = []
        for part in self.parts:
            items = [(unpack(k, self.p), c) for k, c in part.items()]
            items.sort(key=lambda t: _grevlex_sort_key(t[0]), reverse=True)
            out.extend(items)
        return out

    def to_string(self, names: Sequence[str] | None = None, prefix: str = "X", *, tail: bool = True) -> str:
        names = names or _default_names(prefix, self.p)
        body = _terms_text(self.sorted_terms(), names, self.field)
        if tail:
            return f"{body} + O({self.order + 1})" if body != "0" else f"O({self.order + 1})"
        return body

    def __repr__(self):
        return f"Series({self.to_string()})"


def _graded_mul(a: list, b: list, q: int, is_zero) -> list:
    out = []
    for k in range(q + 1):
        acc: dict = {}
        get = acc.get
        for i in range(k + 1):
            ai = a[i]
            if not ai:
                continue
            bj = b[k - i]
            if not bj:
                continue
            for k1, c1 in ai.items():
                for k2, c2 in bj.items():
                    kk = k1 + k2
                    acc[kk] = get(kk, 0) + c1 * c2
        out.append({kk: c for kk, c in acc.items() if not is_zero(c)})
    return out


def _compose_poly_series(poly: Poly, inner: list, cap: int | None = None) -> Series:
    p = inner[0].p
    q = min(g.order for g in inner)
    if cap is not None:
        q = min(q, cap)
    fld = poly.field
    for g in inner:
        fld = join_fields(fld, g.field)
    inner = [g.to_field(fld).truncate(q) if g.order > q else g.to_field(fld) for g in inner]
    one = Series.const(p, q, 1, fld)
    powers = [[one] for _ in inner]
    acc = [{} for _ in range(q + 1)]
    # group terms by their exponent tuple and build monomials incrementally
    for k, c in poly.terms.items():
        e = unpack(k, poly.nvars)
        term = None
        for i, x in enumerate(e):
            if not x:
                continue
            while len(powers[i]) <= x:
                powers[i].append(powers[i][-1] * inner[i])
            term = powers[i][x] if term is None else term * powers[i][x]
        c = fld.coerce(c) if not fld.exact else c
        if term is None:
            if not fld.is_zero(c):
                acc[0][0] = acc[0].get(0, 0) + c
            continue
        for d in range(q + 1):
            for kk, v in term.parts[d].items():
                acc[d][kk] = acc[d].get(kk, 0) + c * v
    return Series(p, q, [_trim(d, fld.is_zero) for d in acc], fld)


# --------------------------------------------------------------------------
# roots of series with positive valuation

def _poly_root_exact_or_none(H: Poly, n: int, k: int):
    """Polynomial G of degree <= k with G^n = H, H(0) != 0, or None."""
    c0 = H.constant()
    fld = H.field
    if fld.exact:
        roots = exact_root(c0, n)
        if not roots:
            raise RootNotInField(f"no {n}-th root of {format_coeff(c0)} in Q(i)")
        r0 = roots[0]
    else:
        r0 = _principal_root_complex(complex(c0), n)
    G = Series.from_poly(H, k).unit_power_frac(1, n, r0).to_poly()
    if fld.exact:
        ok = (G ** n - H).is_zero()
    else:
        diff = G ** n - H
        scale = max([1.0] + [abs(c) for c in H.terms.values()])
        ok = all(abs(c) <= fld.eps * scale for c in diff.terms.values())
    return G if ok else None


def homogeneous_root(h: dict, p: int, n: int, field: Field):
    """Homogeneous g with g^n = h for a homogeneous form h (packed dict), or None.

    Dehomogenises with respect to the first variable after a linear shear
    that makes the pure power of that variable appear, takes the unit root
    of the dehomogenised polynomial, then undoes both steps.
    """
    if not h:
        return {}
    v = key_degree(next(iter(h)))
    if v % n:
        return None
    k = v // n
    hp = Poly(p, h, field)
    if p == 1:
        (key, c), = h.items()
        g = _poly_root_exact_or_none(Poly.const(1, c, field), n, 0)
        if g is None:
            return None
        return {unit_key(0) * k: g.constant()} if k else {0: g.constant()}
    # shear X_b -> X_b + lam_b X_1 until the X_1^v coefficient is nonzero
    lam = None
    for cand in itertools.product(range(0, v + 2), repeat=p - 1):
        val = hp.evaluate([1] + list(cand))
        if not field.is_zero(val):
            lam = cand
            break
    shear = [Poly.var(p, 0, field)] + [Poly.var(p, b, field) + Poly.var(p, 0, field) * lam[b - 1] for b in range(1, p)]
    unshear = [Poly.var(p, 0, field)] + [Poly.var(p, b, field) - Poly.var(p, 0, field) * lam[b - 1] for b in range(1, p)]
    hs = hp.compose(shear)
    # dehomogenise: X_1 -> 1, remaining variables become Y_1..Y_{p-1}
    deh = {}
    for key, c in hs.terms.items():
        e = unpack(key, p)
        deh[pack(e[1:])] = deh.get(pack(e[1:]), 0) + c
    H = Poly(p - 1, deh, field)
    G = _poly_root_exact_or_none(H, n, k)
    if G is None:
        return None
    gs = {}
    for key, c in G.terms.items():
        e = unpack(key, p - 1)
        gs[pack((k - sum(e),) + e)] = c
    g = Poly(p, gs, G.field).compose(unshear)
    return dict(g.terms)


def series_root(f: "Series", n: int, *, allow_approx: bool = True) -> "Series":
    """An n-th root of a series of any valuation.

    The lowest form h (degree v = n k) must be the n-th power of a form g.
    Higher components follow from the Euler-operator identity
    ``G E(f) = n f E(G)``, which at degree ``(n+1)k + d`` reads
    ``n d h G_{k+d} = sum_{i<k+d} (j - n i) G_i f_j``.  Each step is an
    exact division by ``h``; a failing division means f has no n-th root.
    Result order is ``q - (n-1) k``.
    """
    fld = f.field
    if n == 1:
        return f
    v = f.valuation()
    if v > f.order:
        raise OrderExhausted("series vanishes to its reliable order")
    if v % n:
        raise NotDivisible(-1, None, f"valuation {v} is not divisible by {n}")
    k = v // n
    h = f.parts[v]
    try:
        g = homogeneous_root(h, f.p, n, fld)
    except RootNotInField:
        if not allow_approx or not fld.exact:
            raise
        return series_root(f.to_field(approx_field()), n)
    if g is None:
        raise NotDivisible(0, Series(f.p, v, [{} for _ in range(v)] + [dict(h)], fld),
                           f"lowest form is not an {n}-th power")
    gfield = fld
    if g and any(isinstance(c, complex) for c in g.values()) and fld.exact:
        gfield = approx_field()
        f = f.to_field(gfield)
        fld = gfield
    q_out = f.order - (n - 1) * k
    G: list = [{} for _ in range(k)] + [g]
    hkeys = list(h.items())
    mono = len(hkeys) == 1
    if mono:
        hk, hc = hkeys[0]
        he = unpack(hk, f.p)
    for d in range(1, q_out - k + 1):
        acc: dict = {}
        for i in range(k, k + d):
            j = n * k + k + d - i
            Gi = G[i]
            fj = f.parts[j] if j <= f.order else {}
            if not Gi or not fj:
                continue
            w = j - n * i
            for k1, c1 in Gi.items():
                c1w = c1 * w
                for k2, c2 in fj.items():
                    kk = k1 + k2
                    acc[kk] = acc.get(kk, 0) + c1w * c2
        acc = _trim(acc, fld.is_zero)
        scale = fld.one / (n * d) if fld.exact else 1.0 / (n * d)
        if mono:
            quot = {}
            inv = fld.one / hc
            for kk, c in acc.items():
                e = unpack(kk, f.p)
                if any(x < y for x, y in zip(e, he)):
                    res = Series(f.p, k + d + v, [{} for _ in range(k + d + v)] + [acc], fld)
                    raise NotDivisible(k + d, res, "root recurrence obstructed")
                quot[kk - hk] = c * inv * scale
        else:
            quot, rem = _poly_divmod(acc, h, f.p, fld)
            if rem:
                res = Series(f.p, k + d + v, [{} for _ in range(k + d + v)] + [acc], fld)
                raise NotDivisible(k + d, res, "root recurrence obstructed")
            quot = {kk: c * scale for kk, c in quot.items()}
        G.append(_trim(quot, fld.is_zero))
    return Series(f.p, q_out, G, fld)


# --------------------------------------------------------------------------
# parsing

_ALLOWED_CHARS = re.compile(r"^[\sA-Za-z0-9_+\-*/^().]*$")


def _strip_tail(src: str) -> str:
    s = src.rstrip()
    s = re.sub(r"\+\s*(\.\.\.|…)\s*$", "", s)
    s = re.sub(r"\+\s*O\(\s*\d+\s*\)\s*$", "", s)
    s = re.sub(r"^\s*O\(\s*\d+\s*\)\s*$", "0", s)
    return s


def parse_poly(src: str, names: Sequence[str], field: Field = EXACT, *, line: int = 1) -> Poly:
    """Parse the series/polynomial grammar into an exact Poly over ``names``.

    Grammar: rationals ``a/b``, decimals, ``i``, the given variable names,
    ``+ - * ^`` and parentheses.  A trailing ``+ ...`` or ``+ O(k)`` marks
    truncation and is ignored here.
    """
    text = _strip_tail(src)
    if not _ALLOWED_CHARS.match(text):
        bad = next(ch for ch in text if not _ALLOWED_CHARS.match(ch))
        raise ParseError(f"unexpected character {bad!r}", line, text.index(bad) + 1)
    if "**" in text:
        raise ParseError("use '^' for powers", line, text.index("**") + 1)
    py = text.replace("^", "**")
    try:
        tree = ast.parse(py.strip() or "0", mode="eval")
    except SyntaxError as e:
        raise ParseError(f"syntax error: {e.msg}", line, e.offset or 0) from None
    nv = len(names)
    index = {nm: i for i, nm in enumerate(names)}

    def const(c):
        return Poly.const(nv, c, field)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ParseError("unsupported literal", line, node.col_offset + 1)
            if isinstance(node.value, float):
                seg = ast.get_source_segment(py, node) or repr(node.value)
                return const(mpq(Fraction(seg)))
            return const(node.value)
        if isinstance(node, ast.Name):
            if node.id in index:
                return Poly.var(nv, index[node.id], field)
            if node.id == "i":
                return const(GaussQ(_ZERO, _ONE)) if field.exact else const(1j)
            raise ParseError(f"unknown variable {node.id!r}", line, node.col_offset + 1)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            l, r = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return l + r
            if isinstance(node.op, ast.Sub):
                return l - r
            if isinstance(node.op, ast.Mult):
                return l * r
            if isinstance(node.op, ast.Div):
                if r.degree() > 0 or r.is_zero():
                    raise ParseError("division only by nonzero constants", line, node.col_offset + 1)
                return l * (field.one / r.constant())
            if isinstance(node.op, ast.Pow):
                if r.degree() > 0:
                    raise ParseError("exponent must be a constant", line, node.col_offset + 1)
                e = r.constant()
                if isinstance(e, GaussQ) or (field.exact and (e.denominator != 1 or e < 0)):
                    raise ParseError("exponent must be a non-negative integer", line, node.col_offset + 1)
                if not field.exact:
                    if e.imag != 0 or e.real != int(e.real) or e.real < 0:
                        raise ParseError("exponent must be a non-negative integer", line, node.col_offset + 1)
                    e = int(e.real)
                return l ** int(e)
        raise ParseError("unsupported expression", line, getattr(node, "col_offset", 0) + 1)

    return ev(tree)


def parse_series(src: str, p: int, order: int, field: Field = EXACT, *, prefix: str = "X",
                 names: Sequence[str] | None = None, line: int = 1) -> Series:
    names = list(names) if names else _default_names(prefix, p)
    return Series.from_poly(parse_poly(src, names, field, line=line), order)
