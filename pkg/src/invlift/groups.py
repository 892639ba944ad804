"""Finite group representations and their invariant systems.

An :class:`InvariantSystem` bundles the basic generators σ₁..σ_m of the
invariant ring (as exact polynomials in ``u1..un``), the chosen invariant
coordinates, the Jacobian ``J`` and the discriminant ``Δ̃`` written in
``W1..Wm``.  Catalog constructors cover cyclic groups acting on C, dihedral
groups acting on C² in real coordinates (x, y), block products and a trivial
one-dimensional system used for stratum quotients.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from gmpy2 import mpq

from .series import (
    EXACT, Field, GaussQ, Poly, Series, approx_field, exact_root, pack,
    re_im, unpack,
)

__all__ = [
    "GroupRep", "InvariantSystem", "StratumInfo", "make_cyclic", "make_dihedral",
    "make_product", "make_trivial", "make_custom", "choose_invariant_coordinates",
    "rewrite_invariant", "point_preimage", "orbit_match", "apply_element",
    "canonical_representative", "OnDiscriminant", "CustomUnsupported", "NoChoiceFound",
    "NotInvariant", "NotExpressible", "parse_group_spec", "determinant", "cofactor_matrix",
]


class OnDiscriminant(ValueError):
    pass


class CustomUnsupported(NotImplementedError):
    pass


class NoChoiceFound(ValueError):
    pass


class NotInvariant(ValueError):
    pass


class NotExpressible(ValueError):
    pass


# --------------------------------------------------------------------------
# matrices

Matrix = tuple  # tuple of row tuples


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(n)), 0 * a[0][0]) for j in range(n)) for i in range(n))


def _identity(n: int, field: Field = EXACT) -> Matrix:
    return tuple(tuple(field.one if i == j else field.zero for j in range(n)) for i in range(n))


def _mat_eq(a: Matrix, b: Matrix, field: Field) -> bool:
    return all(field.eq(x, y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _block_diag(blocks: Sequence[Matrix], zero) -> Matrix:
    n = sum(len(b) for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        k = len(b)
        for r in b:
            rows.append(tuple([zero] * off + list(r) + [zero] * (n - off - k)))
        off += k
    return tuple(rows)


@dataclass(frozen=True)
class GroupRep:
    """Finite matrix group; construction checks closure and the presence of the identity."""

    n: int
    elements: tuple
    field: Field = EXACT

    def __post_init__(self):
        ident = _identity(self.n, self.field)
        if not any(_mat_eq(g, ident, self.field) for g in self.elements):
            raise ValueError("group element list lacks the identity")
        for g in self.elements:
            for h in self.elements:
                gh = _mat_mul(g, h)
                if not any(_mat_eq(gh, k, self.field) for k in self.elements):
                    raise ValueError("group element list is not closed under multiplication")

    @property
    def identity_index(self) -> int:
        ident = _identity(self.n, self.field)
        return next(i for i, g in enumerate(self.elements) if _mat_eq(g, ident, self.field))

    def __len__(self):
        return len(self.elements)


# --------------------------------------------------------------------------
# determinants over polynomials

def determinant(m: Sequence[Sequence[Poly]]) -> Poly:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [[m[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = m[0][j] * determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else m[0][0] * 0


def cofactor_matrix(m: Sequence[Sequence[Poly]]) -> list:
    """``C[i][a]`` = cofactor of entry (i, a); then ``inverse[a][i] = C[i][a] / det``."""
    n = len(m)
    if n == 1:
        return [[Poly.const(m[0][0].nvars, 1, m[0][0].field)]]
    out = []
    for i in range(n):
        row = []
        for a in range(n):
            minor = [[m[r][c] for c in range(n) if c != a] for r in range(n) if r != i]
            d = determinant(minor)
            row.append(-d if (i + a) % 2 else d)
        out.append(row)
    return out


# --------------------------------------------------------------------------
# invariant systems

@dataclass
class StratumInfo:
    """A proper stratum: subgroup generators, a basis of its fixed space and the quotient system."""

    subgroup_generators: list
    fixed_space_basis: list
    quotient: "InvariantSystem | None"
    kappa: list = dc_field(default_factory=list)  # σ restricted to the fixed space, as Polys in the quotient's variables
    note: str = ""


@dataclass(eq=False)
class InvariantSystem:
    tag: tuple
    n: int
    sigma: list                      # m Polys in n variables
    degrees: list
    delta: Poly                      # Δ̃ in m variables
    exact_group: GroupRep | None     # elements representable over Q(i)
    float_elements: list             # every element as complex matrices
    coord_choice: tuple = ()
    relations: list = dc_field(default_factory=list)
    parts: list = dc_field(default_factory=list)   # product components
    _J: Poly | None = None
    _cof: list | None = None

    def __post_init__(self):
        if not self.coord_choice:
            self.coord_choice = tuple(range(self.n))

    # basic data --------------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.sigma)

    @property
    def kind(self) -> str:
        return self.tag[0]

    @property
    def order(self) -> int:
        return len(self.float_elements)

    @property
    def is_reflection_catalog(self) -> bool:
        return self.kind in ("cyclic", "dihedral", "product", "trivial")

    def name(self) -> str:
        if self.kind == "cyclic":
            return f"cyclic:{self.tag[1]}"
        if self.kind == "dihedral":
            return f"dihedral:{self.tag[1]}"
        if self.kind == "trivial":
            return "trivial"
        if self.kind == "product":
            return "*".join(p.name() for p in self.parts)
        return "custom"

    def jacobian_matrix(self, choice: Sequence[int] | None = None) -> list:
        choice = self.coord_choice if choice is None else choice
        return [[self.sigma[j].derive(a) for a in range(self.n)] for j in choice]

    @property
    def J(self) -> Poly:
        if self._J is None:
            self._J = determinant(self.jacobian_matrix())
        return self._J

    @property
    def cofactors(self) -> list:
        if self._cof is None:
            self._cof = cofactor_matrix(self.jacobian_matrix())
        return self._cof

    def delta_upstairs(self) -> Poly:
        """Δ = Δ̃∘σ as a polynomial on V."""
        return self.delta.compose(self.sigma)

    def with_choice(self, choice: Sequence[int]) -> "InvariantSystem":
        if tuple(choice) == tuple(self.coord_choice):
            return self
        return InvariantSystem(self.tag, self.n, self.sigma, self.degrees, self.delta, self.exact_group,
                               self.float_elements, tuple(choice), self.relations, self.parts)

    # morphism helpers --------------------------------------------------
    def sigma_of(self, F: Sequence[Series]) -> list:
        return [s.compose(list(F)) for s in self.sigma]

    def delta_of(self, f: Sequence[Series]) -> Series:
        return self.delta.compose(list(f))

    def elements(self, exact: bool = True) -> list:
        if exact and self.exact_group is not None:
            return list(self.exact_group.elements)
        return list(self.float_elements)

    # verification ------------------------------------------------------
    def verify(self) -> None:
        """Exact checks: σ invariant, J ≢ 0, J | Δ and Δ invariant."""
        for s in self.sigma:
            if not _is_invariant(self, s):
                raise NotInvariant(f"generator {s.to_string()} is not invariant")
        if self.J.is_zero():
            raise ValueError("Jacobian of the selected invariant coordinates vanishes identically")
        D = self.delta_upstairs()
        if D.is_zero():
            raise ValueError("discriminant vanishes identically")
        if not self.J.divides(D):
            raise ValueError("Jacobian does not divide the discriminant")
        if not _is_invariant(self, D):
            raise NotInvariant("discriminant is not invariant")


def _is_invariant(sys: InvariantSystem, P: Poly) -> bool:
    kind = sys.kind
    if kind == "trivial":
        return True
    if kind == "cyclic":
        n = sys.tag[1]
        return all(unpack(k, 1)[0] % n == 0 for k in P.terms)
    if kind == "dihedral":
        return _dihedral_invariant(P, sys.tag[1])
    if kind == "product":
        return _product_invariant(sys, P)
    return _matrix_invariant(P, sys.exact_group.elements if sys.exact_group else [], EXACT)


def _matrix_invariant(P: Poly, elements, field: Field) -> bool:
    for g in elements:
        if not (P.linear_substitute(g) - P).is_zero():
            return False
    return True


def _to_z_coordinates(P: Poly) -> Poly:
    """Rewrite P(x, y) in z = x + iy, ẑ = x − iy (variables 0 and 1)."""
    half = mpq(1, 2)
    x = Poly(2, {pack((1, 0)): half, pack((0, 1)): half})
    y = Poly(2, {pack((1, 0)): GaussQ(mpq(0), -half), pack((0, 1)): GaussQ(mpq(0), half)})
    return P.compose([x, y])


def _dihedral_invariant(P: Poly, l: int) -> bool:
    Z = _to_z_coordinates(P)
    for k, c in Z.terms.items():
        a, b = unpack(k, 2)
        if (a - b) % l:
            return False
        if Z.terms.get(pack((b, a)), 0) != c:
            return False
    return True


def _product_offsets(parts) -> list:
    out, vo, wo = [], 0, 0
    for p in parts:
        out.append((vo, wo))
        vo += p.n
        wo += p.m
    return out


def _product_invariant(sys: InvariantSystem, P: Poly) -> bool:
    # the group is the product of the parts: invariance factor by factor
    offs = _product_offsets(sys.parts)
    for part, (vo, _) in zip(sys.parts, offs):
        others = [j for j in range(sys.n) if not vo <= j < vo + part.n]
        # view P as a polynomial in the part's variables with coefficients in the rest
        groups: dict = {}
        for k, c in P.terms.items():
            e = unpack(k, sys.n)
            rest = tuple(e[j] for j in others)
            mine = tuple(e[vo:vo + part.n])
            groups.setdefault(rest, {})[mine] = c
        for sub in groups.values():
            if not _is_invariant(part, Poly.from_dict(part.n, sub)):
                return False
    return True


# --------------------------------------------------------------------------
# catalog

def _cyclic_elements(n: int):
    exact = []
    for k in range(n):
        if (4 * k) % n == 0:
            q = (4 * k) // n  # exp(2πik/n) = i^q
            val = [mpq(1), GaussQ(mpq(0), mpq(1)), mpq(-1), GaussQ(mpq(0), mpq(-1))][q % 4]
            exact.append(((val,),))
    floats = [((cmath.exp(2j * math.pi * k / n),),) for k in range(n)]
    return exact, floats


def make_cyclic(n: int) -> InvariantSystem:
    """C_n acting on C by multiplication with n-th roots of unity: σ = u^n, Δ̃ = W1."""
    if n < 2:
        raise ValueError("cyclic groups need n >= 2")
    exact, floats = _cyclic_elements(n)
    sigma = [Poly.from_dict(1, {(n,): 1})]
    delta = Poly.var(1, 0)
    sys = InvariantSystem(("cyclic", n), 1, sigma, [n], delta, GroupRep(1, tuple(exact)), floats)
    sys.verify()
    return sys


def make_trivial() -> InvariantSystem:
    """The trivial group on C with σ = u; used as the quotient on mirrors of odd dihedral groups."""
    sigma = [Poly.var(1, 0)]
    delta = Poly.const(1, 1)
    one = ((mpq(1),),)
    sys = InvariantSystem(("trivial",), 1, sigma, [1], delta, GroupRep(1, (one,)), [((1 + 0j,),)])
    return sys


def _rot(theta: float):
    c, s = math.cos(theta), math.sin(theta)
    return ((complex(c), complex(-s)), (complex(s), complex(c)))


def _refl(phi: float):
    c, s = math.cos(2 * phi), math.sin(2 * phi)
    return ((complex(c), complex(s)), (complex(s), complex(-c)))


def _exact_trig(k4: int):
    """cos and sin of k4·π/2."""
    return [(1, 0), (0, 1), (-1, 0), (0, -1)][k4 % 4]


def _dihedral_elements(l: int):
    floats, exact = [], []
    for k in range(l):
        floats.append(_rot(2 * math.pi * k / l))
    for k in range(l):
        floats.append(_refl(math.pi * k / l))
    for k in range(l):
        if (4 * k) % l == 0:
            c, s = _exact_trig((4 * k) // l)
            exact.append(((mpq(c), mpq(-s)), (mpq(s), mpq(c))))
    for k in range(l):
        # reflection across the line at angle πk/l: uses cos, sin of 2πk/l
        if (4 * k) % l == 0:
            c, s = _exact_trig((4 * k) // l)
            exact.append(((mpq(c), mpq(s)), (mpq(s), mpq(-c))))
    return exact, floats


def dihedral_sigma2(l: int) -> Poly:
    """σ₂ = (1/l)·Re (x+iy)^l expanded by the binomial theorem."""
    terms = {}
    for k in range(0, l + 1, 2):
        c = math.comb(l, k) * (-1) ** (k // 2)
        terms[(l - k, k)] = mpq(c, l)
    return Poly.from_dict(2, terms)


def make_dihedral(l: int) -> InvariantSystem:
    """D_l acting on C² in real coordinates; σ₁ = (x²+y²)/2, σ₂ = Re(z^l)/l, Δ̃ = 2^l W₁^l − l² W₂²."""
    if l < 3:
        raise ValueError("dihedral groups need l >= 3")
    exact, floats = _dihedral_elements(l)
    s1 = Poly.from_dict(2, {(2, 0): mpq(1, 2), (0, 2): mpq(1, 2)})
    s2 = dihedral_sigma2(l)
    delta = Poly.from_dict(2, {(l, 0): 2 ** l, (0, 2): -(l * l)})
    sys = InvariantSystem(("dihedral", l), 2, [s1, s2], [2, l], delta, GroupRep(2, tuple(exact)), floats)
    sys.verify()
    return sys


def make_product(parts: Sequence[InvariantSystem]) -> InvariantSystem:
    """Block-diagonal direct product with disjoint variables; Δ̃ is the product of the parts' Δ̃."""
    parts = list(parts)
    if not parts:
        raise ValueError("a product needs at least one part")
    if len(parts) == 1:
        return parts[0]
    flat = []
    for p in parts:
        flat.extend(p.parts if p.kind == "product" else [p])
    parts = flat
    n = sum(p.n for p in parts)
    m = sum(p.m for p in parts)
    offs = _product_offsets(parts)
    sigma, degrees, delta = [], [], Poly.const(m, 1)
    choice = []
    for p, (vo, wo) in zip(parts, offs):
        vmap = [vo + i for i in range(p.n)]
        wmap = [wo + j for j in range(p.m)]
        sigma.extend(s.rename(n, vmap) for s in p.sigma)
        degrees.extend(p.degrees)
        delta = delta * p.delta.rename(m, wmap)
        choice.extend(wo + c for c in p.coord_choice)
    exact_lists = [p.exact_group.elements for p in parts]
    exact = tuple(_block_diag(combo, mpq(0)) for combo in itertools.product(*exact_lists))
    floats = [_block_diag(combo, 0j) for combo in itertools.product(*[p.float_elements for p in parts])]
    sys = InvariantSystem(("product", tuple(p.tag for p in parts)), n, sigma, degrees, delta,
                          GroupRep(n, exact), floats, tuple(choice), [], parts)
    sys.verify()
    return sys


def make_custom(matrices: Sequence, sigma: Sequence[Poly], delta: Poly, relations: Sequence[Poly] = (),
                choice: Sequence[int] | None = None) -> InvariantSystem:
    """User-supplied exact group with generators and a discriminant certificate."""
    n = len(matrices[0])
    mats = tuple(tuple(tuple(EXACT.coerce(x) for x in row) for row in g) for g in matrices)
    grp = GroupRep(n, mats)
    floats = [tuple(tuple(complex(x) for x in row) for row in g) for g in mats]
    degrees = []
    for s in sigma:
        if not s.is_homogeneous() or s.is_zero():
            raise ValueError("generators must be nonzero homogeneous polynomials")
        degrees.append(s.degree())
    m = len(sigma)
    sys = InvariantSystem(("custom",), n, list(sigma), degrees, delta, grp, floats,
                          tuple(choice) if choice else tuple(range(n)), list(relations))
    if m < n:
        raise ValueError("need at least n generators")
    for s in sigma:
        if not _matrix_invariant(s, mats, EXACT):
            raise NotInvariant(f"generator {s.to_string()} is not invariant")
    for rel in relations:
        if not rel.compose(list(sigma)).is_zero():
            raise ValueError("supplied relation does not vanish on the generators")
    if choice is None:
        for c in itertools.combinations(range(m), n):
            trial = sys.with_choice(c)
            if not trial.J.is_zero():
                sys = trial
                break
        else:
            raise NoChoiceFound("no subset of generators has a nonvanishing Jacobian")
    sys.verify()
    return sys


def parse_group_spec(spec: str) -> InvariantSystem:
    """``cyclic:3``, ``dihedral:4``, ``C2``, ``D3`` or products joined with ``*``/``x``."""
    s = spec.strip().replace(" ", "")
    for sep in ("*", "×"):
        if sep in s:
            return make_product([parse_group_spec(t) for t in s.split(sep)])
    low = s.lower()
    if ":" in low:
        kind, arg = low.split(":", 1)
    elif low[:1] in ("c", "d") and low[1:].isdigit():
        kind, arg = ("cyclic" if low[0] == "c" else "dihedral"), low[1:]
    else:
        raise ValueError(f"unrecognised group spec {spec!r}")
    if kind in ("cyclic", "c"):
        return make_cyclic(int(arg))
    if kind in ("dihedral", "d"):
        return make_dihedral(int(arg))
    raise ValueError(f"unrecognised group kind {kind!r}")


# --------------------------------------------------------------------------
# coordinate choice

def choose_invariant_coordinates(sys: InvariantSystem, f: Sequence[Series], qmax: int | None = None):
    """First n-subset (lexicographic) with J ≢ 0 and Δ̃(f) nonzero within order.

    Returns ``(system_with_choice, q)`` with q the valuation of Δ̃(f).
    """
    subsets = [tuple(sys.coord_choice)] if sys.is_reflection_catalog else list(itertools.combinations(range(sys.m), sys.n))
    for c in subsets:
        trial = sys.with_choice(c)
        if trial.J.is_zero():
            continue
        try:
            if sys.kind == "custom" and not trial.J.divides(trial.delta_upstairs()):
                continue
        except ZeroDivisionError:
            continue
        d = trial.delta_of(f)
        if qmax is not None and d.order > qmax:
            d = d.truncate(qmax)
        v = d.valuation()
        if v <= d.order:
            return trial, v
    raise NoChoiceFound("discriminant of the input vanishes to its reliable order")


# --------------------------------------------------------------------------
# rewriting invariants through the generators

def _weighted_monomials(degrees: Sequence[int], target: int) -> list:
    out = []

    def rec(j, rem, acc):
        if j == len(degrees):
            if rem == 0:
                out.append(tuple(acc))
            return
        for e in range(rem // degrees[j] + 1):
            rec(j + 1, rem - e * degrees[j], acc + [e])

    rec(0, target, [])
    return out


def solve_linear(rows: list, rhs: list, field: Field = EXACT):
    """Solve ``rows · x = rhs`` by Gauss–Jordan with first-pivot choice.

    Returns a solution (free variables set to zero) or ``None`` if
    inconsistent.
    """
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if not field.is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = field.one / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(nr):
            if i != r and not field.is_zero(A[i][c]):
                fac = A[i][c]
                A[i] = [x - fac * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
        if r == nr:
            break
    for i in range(r, nr):
        if not field.is_zero(A[i][nc]):
            return None
    x = [field.zero] * nc
    for i, c in enumerate(piv_cols):
        x[c] = A[i][nc]
    return x


class _SigmaPowers:
    """Cache of products σ^e used by :func:`rewrite_invariant`."""

    def __init__(self, sys: InvariantSystem):
        self.sys = sys
        self.cache = {tuple([0] * sys.m): Poly.const(sys.n, 1)}

    def get(self, e: tuple) -> Poly:
        if e in self.cache:
            return self.cache[e]
        j = next(i for i, x in enumerate(e) if x)
        prev = list(e)
        prev[j] -= 1
        val = self.get(tuple(prev)) * self.sys.sigma[j]
        self.cache[e] = val
        return val


_POWER_CACHES: dict = {}


def rewrite_invariant(sys: InvariantSystem, P: Poly, *, check: bool = True) -> Poly:
    """The polynomial q(W) with q∘σ = P, computed degree by degree."""
    if check and not _is_invariant(sys, P):
        raise NotInvariant("polynomial is not invariant")
    cache = _POWER_CACHES.setdefault(id(sys), _SigmaPowers(sys))
    if cache.sys is not sys:
        cache = _POWER_CACHES[id(sys)] = _SigmaPowers(sys)
    out = Poly(sys.m, {}, P.field)
    for deg, part in sorted(P.homogeneous_parts().items()):
        monos = _weighted_monomials(sys.degrees, deg)
        if not monos:
            raise NotExpressible(f"no generator monomial of degree {deg}")
        images = [cache.get(e) for e in monos]
        keys = sorted(set(part.terms) | {k for im in images for k in im.terms})
        rows = [[im.terms.get(k, 0) for im in images] for k in keys]
        rhs = [part.terms.get(k, 0) for k in keys]
        fld = P.field
        rows = [[fld.coerce(x) for x in r] for r in rows]
        rhs = [fld.coerce(x) for x in rhs]
        sol = solve_linear(rows, rhs, fld)
        if sol is None:
            raise NotExpressible(f"degree-{deg} part is not a polynomial in the generators")
        out = out + Poly(sys.m, {pack(e): c for e, c in zip(monos, sol)}, fld)
    return out


# --------------------------------------------------------------------------
# preimages and orbits

def _coerce_point(z, field: Field):
    return [field.coerce(x) for x in z]


def point_preimage(sys: InvariantSystem, z: Sequence, *, exact: bool = True):
    """Some v with σ(v) = z for z off the discriminant.

    Returns ``(v, field)``; the field is exact when every root taken along
    the way lies in Q(i), approximate otherwise.
    """
    fld = EXACT if exact and all(not isinstance(x, complex) for x in z) else approx_field()
    z = _coerce_point(z, fld)
    kind = sys.kind
    # the closed-form solvers also handle mirror points; only a degenerate solve is refused
    if kind not in ("dihedral", "product") and fld.is_zero(sys.delta.evaluate(z)):
        raise OnDiscriminant("point lies on the discriminant")
    if kind == "trivial":
        return list(z), fld
    if kind == "cyclic":
        n = sys.tag[1]
        if fld.exact:
            roots = exact_root(z[0], n)
            if roots:
                return [roots[0]], EXACT
            fld = approx_field()
        return [cmath.exp(cmath.log(complex(z[0])) / n)], fld
    if kind == "dihedral":
        return _dihedral_preimage(sys.tag[1], z, fld)
    if kind == "product":
        out, fields = [], []
        offs = _product_offsets(sys.parts)
        for part, (vo, wo) in zip(sys.parts, offs):
            v, f = point_preimage(part, z[wo:wo + part.m], exact=fld.exact)
            out.append(v)
            fields.append(f)
        if all(f.exact for f in fields):
            return [x for v in out for x in v], EXACT
        af = approx_field()
        return [af.coerce(x) for v in out for x in v], af
    raise CustomUnsupported("point preimages for custom groups are not supported")


def _dihedral_preimage(l: int, z, fld: Field):
    z1, z2 = z
    if fld.is_zero(z1) and fld.is_zero(z2):
        raise OnDiscriminant("the origin has no regular preimage")
    D = mpq(2) ** l * z1 ** l - l * l * z2 * z2 if fld.exact else 2 ** l * z1 ** l - l * l * z2 * z2
    if fld.exact:
        s = exact_root(-D, 2)
        if s:
            for sg in (1, -1):
                w = l * z2 + sg * s[0]
                if w == 0:
                    continue
                r = exact_root(w, l)
                if r:
                    Z1 = r[0]
                    Z2 = 2 * z1 / Z1
                    i = GaussQ(mpq(0), mpq(1))
                    x = (Z1 + Z2) * mpq(1, 2)
                    y = (Z1 - Z2) / (2 * i)
                    return [x, y], EXACT
        fld = approx_field()
    z1c, z2c = complex(z1), complex(z2)
    Dc = 2 ** l * z1c ** l - l * l * z2c * z2c
    w = l * z2c + cmath.sqrt(-Dc)
    if abs(w) < 1e-300:
        w = l * z2c - cmath.sqrt(-Dc)
    Z1 = cmath.exp(cmath.log(w) / l)
    Z2 = 2 * z1c / Z1
    return [(Z1 + Z2) / 2, (Z1 - Z2) / 2j], fld


def apply_element(g: Matrix, F: Sequence[Series]) -> list:
    """(g∘F)_i = Σ_j g_ij F_j."""
    out = []
    for row in g:
        acc = None
        for c, Fj in zip(row, F):
            if c == 0:
                continue
            t = Fj * c
            acc = t if acc is None else acc + t
        if acc is None:
            acc = F[0] * 0
        out.append(acc)
    return out


def _agree_all(A: Sequence[Series], B: Sequence[Series], order: int | None = None) -> bool:
    return all(a.agrees(b, order) for a, b in zip(A, B))


def orbit_match(sys: InvariantSystem, F1: Sequence[Series], F2: Sequence[Series], order: int | None = None):
    """Some g with F2 = g∘F1 to reliable order, or None.

    Exact inputs are compared exactly against the representable elements;
    otherwise all elements are tried within the approximate tolerance.
    """
    exact = all(s.field.exact for s in list(F1) + list(F2))
    if order is None:
        order = min(s.order for s in list(F1) + list(F2))
    if exact:
        for g in sys.elements(exact=True):
            if _agree_all(apply_element(g, F1), F2, order):
                return g
        return None
    af = next((s.field for s in list(F1) + list(F2) if not s.field.exact), approx_field())
    A = [s.to_field(af) for s in F1]
    B = [s.to_field(af) for s in F2]
    for g in sys.float_elements:
        if _agree_all(apply_element(g, A), B, order):
            return g
    return None


def _canon_key_exact(F: Sequence[Series]):
    key = []
    for comp in F:
        for _, c in comp.sorted_terms():
            re_, im_ = re_im(c)
            key.append((re_, im_))
    return tuple(key)


def _canon_key_approx(F: Sequence[Series], eps: float):
    key = []
    for comp in F:
        for _, c in comp.sorted_terms():
            c = complex(c)
            if abs(c) <= eps:
                continue
            arg = cmath.phase(c) % (2 * math.pi)
            if 2 * math.pi - arg <= eps:
                arg = 0.0
            key.append((round(arg / max(eps, 1e-15)) * max(eps, 1e-15), round(abs(c), 9)))
    return tuple(key)


def canonical_representative(sys: InvariantSystem, F: Sequence[Series]) -> list:
    """Deterministic representative of the orbit {g∘F}.

    Exact mode: the lexicographically smallest (re, im) coefficient sequence
    among representable elements.  Approximate mode: smallest argument of
    the first nonzero coefficient (ties broken by later coefficients).
    """
    exact = all(s.field.exact for s in F)
    if exact:
        cands = [apply_element(g, F) for g in sys.elements(exact=True)]
        return min(cands, key=_canon_key_exact)
    af = next(s.field for s in F if not s.field.exact)
    A = [s.to_field(af) for s in F]
    cands = [apply_element(g, A) for g in sys.float_elements]
    return min(cands, key=lambda c: _canon_key_approx(c, af.eps))
