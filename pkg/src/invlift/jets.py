"""Polarizations and jet functions on the orbit space.

The descended functions are never stored as rational functions.  Each
entry of a :class:`JetTable` is a pair ``(q, k)``: a polynomial ``q`` in the
orbit-space variables ``W`` and one exponent per discriminant factor, so that

    T̃(I_1, ..., I_d) = q(W) / prod_f Δ̃_f(W)^{k_f}.

Values on a concrete formal morphism are obtained by composing ``q`` and the
factors with the morphism and performing one exact division.

Multi-indices are 1-based and unordered (:class:`MultiIndex`).  A profile is
a multiset of ``d`` multi-indices, stored sorted by ``(order, entries)`` so
that empty indices come first.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .groups import InvariantSystem, NotInvariant, rewrite_invariant
from .series import (
    MultiIndex, NotDivisible, OrderExhausted, Poly, Series, multi_indices, unpack,
)

__all__ = [
    "InvariancePostconditionFailed", "DeltaFactor", "delta_factors", "polarize", "JetTable",
    "jet_table", "regularized_inverse_derivatives", "build_jet_table", "faa_di_bruno",
    "JetEvaluator", "evaluate_frakT", "first_order_tensor", "canonical_profile",
    "format_profile", "dihedral_closed_form", "dihedral_first_order_pullback",
    "profile_multiplicity", "exponent_bounds",
]


class InvariancePostconditionFailed(AssertionError):
    """A construction-time identity failed; this is a bug, never a user error."""


# --------------------------------------------------------------------------
# discriminant factors

@dataclass(frozen=True)
class DeltaFactor:
    """One factor Δ̃_f of the discriminant.

    ``mirror_order`` is the order e of the reflections whose mirrors the
    factor cuts out (catalog groups), or None for custom groups.
    """

    tilde: Poly        # in W
    upstairs: Poly     # Δ_f = Δ̃_f ∘ σ
    jac: Poly          # J_f, dividing Δ_f
    ratio: Poly        # Δ_f / J_f
    mirror_order: int | None


def _factors_uncached(sys: InvariantSystem) -> list:
    kind = sys.kind
    if kind == "trivial":
        return []
    if kind == "product":
        out = []
        n_off = w_off = 0
        for part in sys.parts:
            vmap = [n_off + i for i in range(part.n)]
            wmap = [w_off + j for j in range(part.m)]
            for fac in delta_factors(part):
                out.append(DeltaFactor(fac.tilde.rename(sys.m, wmap), fac.upstairs.rename(sys.n, vmap),
                                       fac.jac.rename(sys.n, vmap), fac.ratio.rename(sys.n, vmap),
                                       fac.mirror_order))
            n_off += part.n
            w_off += part.m
        return out
    up = sys.delta_upstairs()
    J = sys.J
    e = sys.tag[1] if kind == "cyclic" else 2 if kind == "dihedral" else None
    return [DeltaFactor(sys.delta, up, J, up.divide_exact(J), e)]


_FACTOR_CACHE: dict = {}


def delta_factors(sys: InvariantSystem) -> list:
    key = id(sys)
    hit = _FACTOR_CACHE.get(key)
    if hit is not None and hit[0] is sys:
        return hit[1]
    facs = _factors_uncached(sys)
    prod = Poly.const(sys.n, 1)
    for f in facs:
        prod = prod * f.jac
    if prod != sys.J:
        raise InvariancePostconditionFailed("product of factor Jacobians differs from J")
    _FACTOR_CACHE[key] = (sys, facs)
    return facs


def exponent_bounds(M: int, e: int | None) -> tuple:
    """(general, reflection) exponents of one discriminant factor for budget M.

    General: ⌈(e−1)M/e⌉.  Reflection sharpening: M − μ with μ = ⌈M/e⌉ the
    least integer with μe − M in [0, e), i.e. ⌊(e−1)M/e⌋.  Custom factors
    (unknown e) fall back to M for both.
    """
    if e is None:
        return M, M
    return -((-(e - 1) * M) // e), ((e - 1) * M) // e


# --------------------------------------------------------------------------
# polarization

def _product(items):
    acc = None
    for x in items:
        acc = x if acc is None else acc * x
    return acc


def polarize(tau: Poly, vectors: Sequence[Sequence]):
    """The symmetric multilinear form τ^s evaluated on ``d`` vectors.

    Vector entries may be Polys or Series.  For each monomial ``c·u^e`` the
    contribution is ``c·(e!/d!)`` times the sum over the distinct
    arrangements ``w`` of its variable list of ``prod_k vectors[k][w_k]``.
    """
    d = len(vectors)
    if tau.is_zero():
        raise ValueError("cannot polarize the zero polynomial")
    if not tau.is_homogeneous() or tau.degree() != d:
        raise ValueError(f"polarization needs a homogeneous polynomial of degree {d}")
    n = tau.nvars
    total = None
    for key, c in tau.terms.items():
        e = unpack(key, n)
        idx = [i for i in range(n) for _ in range(e[i])]
        weight = mpq(math.prod(math.factorial(x) for x in e), math.factorial(d))
        acc = None
        for w in set(itertools.permutations(idx)):
            factors = [vectors[k][w[k]] for k in range(d)]
            if any(_is_zero(x) for x in factors):
                continue
            term = _product(factors)
            acc = term if acc is None else acc + term
        if acc is None:
            continue
        contrib = _scale(acc, c * weight)
        total = contrib if total is None else total + contrib
    if total is None:
        return _zero_like(vectors[0][0])
    return total


def _is_zero(x) -> bool:
    return x.is_zero()


def _scale(x, c):
    if isinstance(x, Series):
        return x.scale(c)
    return x * c


def _zero_like(x):
    return x * 0


# --------------------------------------------------------------------------
# profiles

def canonical_profile(indexes: Sequence) -> tuple:
    return tuple(sorted((MultiIndex(I) for I in indexes), key=lambda I: (len(I), tuple(I))))


def format_profile(profile: Sequence) -> str:
    return "{" + ",".join(repr(MultiIndex(I)) for I in profile) + "}"


def profile_multiplicity(profile: Sequence) -> int:
    """Number of ordered tuples giving the multiset."""
    cnt = Counter(tuple(I) for I in profile)
    r = math.factorial(len(profile))
    for c in cnt.values():
        r //= math.factorial(c)
    return r


# --------------------------------------------------------------------------
# the table

@dataclass(frozen=True)
class JetEntry:
    """``T̃(profile) = q / prod_f Δ̃_f^{k_f}`` with the bookkeeping of its budget."""

    q: Poly
    k: tuple           # minimal exponent per factor
    M: int             # Σ (2|I| − 1) over nonempty I
    general: tuple     # per-factor general bound
    reflection: tuple  # per-factor reflection-group bound


class JetTable:
    """Regularized inverse derivatives and rewritten T̃ entries for one system.

    Entries are computed lazily and cached; ``ensure_order`` extends the
    regularized derivatives.  Every regularized derivative is checked for
    path independence (the recurrence may remove any index last), and the
    first-order ones against ``Jac · R_(i) = J e_i``.
    """

    def __init__(self, sys: InvariantSystem):
        self.sys = sys
        self.factors = delta_factors(sys)
        n = sys.n
        self.J = sys.J
        self.cof = sys.cofactors
        self.dJ = [self.J.derive(a) for a in range(n)]
        self.identity = [Poly.var(n, a) for a in range(n)]
        self.reg: dict = {MultiIndex(): list(self.identity)}
        self.max_order = 0
        self.entries: dict = {}
        self.checks = 0

    # Lemma-type recurrence -------------------------------------------
    def _base(self, i: int) -> list:
        n = self.sys.n
        R = [self.cof[i - 1][a] for a in range(n)]
        jac = self.sys.jacobian_matrix()
        for r in range(n):
            acc = Poly(n, {})
            for a in range(n):
                acc = acc + jac[r][a] * R[a]
            want = self.J if r == i - 1 else Poly(n, {})
            if acc != want:
                raise InvariancePostconditionFailed(f"Jacobian times adjugate column {i} is not J e_{i}")
        self.checks += 1
        return R

    def _step(self, R: list, s: int, i: int) -> list:
        n = self.sys.n
        out = []
        for b in range(n):
            acc = Poly(n, {})
            for a in range(n):
                c = self.cof[i - 1][a]
                if c.is_zero():
                    continue
                inner = self.J * R[b].derive(a) - self.dJ[a] * R[b] * (2 * s - 1)
                acc = acc + c * inner
            out.append(acc)
        return out

    def ensure_order(self, smax: int) -> None:
        n = self.sys.n
        while self.max_order < smax:
            k = self.max_order + 1
            for I in multi_indices(n, k, include_empty=False):
                if len(I) != k:
                    continue
                if k == 1:
                    self.reg[I] = self._base(I[0])
                    continue
                value = None
                for i in sorted(set(I)):
                    rest = list(I)
                    rest.remove(i)
                    cand = self._step(self.reg[MultiIndex(rest)], k - 1, i)
                    if value is None:
                        value = cand
                    elif any(x != y for x, y in zip(value, cand)):
                        raise InvariancePostconditionFailed(f"regularized derivative {I!r} depends on the recursion order")
                    self.checks += 1
                self.reg[I] = value
            self.max_order = k

    def reg_deriv(self, I) -> list:
        I = MultiIndex(I)
        if len(I) > self.max_order:
            self.ensure_order(len(I))
        return self.reg[I]

    # entries ------------------------------------------------------------
    def entry(self, tau: Poly, profile: Sequence) -> JetEntry:
        profile = canonical_profile(profile)
        key = (tau, profile)
        hit = self.entries.get(key)
        if hit is not None:
            return hit
        d = len(profile)
        if tau.degree() != d:
            raise ValueError(f"profile has {d} slots but the invariant has degree {tau.degree()}")
        vecs = [self.reg_deriv(I) for I in profile]
        N = polarize(tau, vecs)
        E = sum(2 * len(I) - 1 for I in profile if I)
        P = N
        for fac in self.factors:
            P = P * fac.ratio ** E if E else P
        ks = []
        for fac in self.factors:
            k = E
            while k > 0 and not P.is_zero():
                try:
                    P2 = P.divide_exact(fac.upstairs)
                except NotDivisible:
                    break
                P = P2
                k -= 1
            if P.is_zero():
                k = 0
            ks.append(k)
        try:
            q = rewrite_invariant(self.sys, P, check=True)
        except NotInvariant as exc:
            raise InvariancePostconditionFailed(f"entry {format_profile(profile)} is not invariant") from exc
        self.checks += 1
        gens, refls = [], []
        for fac in self.factors:
            g, r = exponent_bounds(E, fac.mirror_order)
            gens.append(g)
            refls.append(r)
        ent = JetEntry(q, tuple(ks), E, tuple(gens), tuple(refls))
        for k, r, g in zip(ent.k, ent.reflection, ent.general):
            if not k <= r <= g:
                raise InvariancePostconditionFailed(
                    f"entry {format_profile(profile)}: exponent {k} exceeds the reflection bound {r}")
        self.entries[key] = ent
        return ent

    def sigma_entry(self, j: int, profile: Sequence) -> JetEntry:
        """Entry for the generator σ_j (1-based)."""
        return self.entry(self.sys.sigma[j - 1], profile)

    def profiles(self, d: int, kmax: int) -> list:
        """All profiles of d indexes over 1..n with orders ≤ kmax."""
        Is = multi_indices(self.sys.n, kmax, include_empty=True)
        return [canonical_profile(c) for c in itertools.combinations_with_replacement(Is, d)]

    def dump(self, kmax: int) -> list:
        """Stable text lines ``j; {profile}; exponents; q``."""
        names = [f"W{j + 1}" for j in range(self.sys.m)]
        lines = []
        for j in range(1, self.sys.m + 1):
            d = self.sys.degrees[j - 1]
            for prof in sorted(self.profiles(d, kmax), key=lambda pr: [(len(I), tuple(I)) for I in pr]):
                ent = self.sigma_entry(j, prof)
                lines.append(f"{j}; {format_profile(prof)}; {_fmt_exps(ent)}; {ent.q.to_string(names)}")
        return lines


def _fmt_exps(ent: JetEntry) -> str:
    def one(t):
        if len(t) == 1:
            return str(t[0])
        return "(" + ",".join(str(x) for x in t) + ")"
    return f"M={ent.M} gen={one(ent.general)} refl={one(ent.reflection)} min={one(ent.k)}"


_TABLES: dict = {}


def jet_table(sys: InvariantSystem) -> JetTable:
    """The shared table of a system (built lazily, cached per system object)."""
    hit = _TABLES.get(id(sys))
    if hit is not None and hit.sys is sys:
        return hit
    tab = JetTable(sys)
    _TABLES[id(sys)] = tab
    return tab


def regularized_inverse_derivatives(sys: InvariantSystem, smax: int) -> dict:
    """``I ↦ J^{2|I|−1} ∂_I v`` for ``1 ≤ |I| ≤ smax``, as lists of Polys."""
    if smax < 1:
        raise ValueError("order must be at least 1")
    tab = jet_table(sys)
    tab.ensure_order(smax)
    return {I: R for I, R in tab.reg.items() if 1 <= len(I) <= smax}


def build_jet_table(sys: InvariantSystem, j: int, profiles: Sequence) -> dict:
    """Entries of σ_j for the given profiles."""
    tab = jet_table(sys)
    return {canonical_profile(p): tab.sigma_entry(j, p) for p in profiles}


# --------------------------------------------------------------------------
# Faà di Bruno coefficients

def faa_di_bruno(z: Sequence, A, cache: dict | None = None) -> dict:
    """Coefficients ``c_{A,I}`` with ``∂_A (v∘z) = Σ_I c_{A,I} (∂_I v)∘z``.

    ``z`` are the n chosen coordinate components (Series or Polys).  Built by
    ``c_{A+(a),I'} = ∂_a c_{A,I'} + Σ_{i∈I'} c_{A,I'−(i)} ∂_a z_i`` seeded with
    ``c_{(a),(i)} = ∂_a z_i``; ``A`` is split off its largest entry so the
    cache is keyed by sorted multi-indices.
    """
    A = MultiIndex(A)
    if not A:
        raise ValueError("Faà di Bruno coefficients need |A| >= 1")
    if cache is None:
        cache = {}
    if A in cache:
        return cache[A]
    n = len(z)
    a = A[-1]
    dz = [zi.derive(a - 1) for zi in z]
    if len(A) == 1:
        out = {MultiIndex((i + 1,)): dz[i] for i in range(n) if not dz[i].is_zero()}
        cache[A] = out
        return out
    prev = faa_di_bruno(z, A[:-1], cache)
    out: dict = {}
    for I, c in prev.items():
        dc = c.derive(a - 1)
        if not dc.is_zero():
            out[I] = out[I] + dc if I in out else dc
        for i in range(n):
            if dz[i].is_zero():
                continue
            J = I.add(i + 1)
            t = c * dz[i]
            out[J] = out[J] + t if J in out else t
    out = {I: c for I, c in out.items() if not c.is_zero()}
    cache[A] = out
    return out


# --------------------------------------------------------------------------
# evaluation on a concrete morphism

class JetEvaluator:
    """Evaluates 𝔗̃ values on one morphism ``f`` with shared caches.

    ``f`` is a list of m Series (truncated or exact) or of m Polys; with
    Polys every value is an exact polynomial and non-divisibility means the
    quotient is not a polynomial.
    """

    def __init__(self, sys: InvariantSystem, f: Sequence, table: JetTable | None = None):
        if len(f) != sys.m:
            raise ValueError(f"expected {sys.m} components, got {len(f)}")
        self.sys = sys
        self.table = table or jet_table(sys)
        self.f = list(f)
        self.z = [self.f[c] for c in sys.coord_choice]
        self.series = isinstance(self.f[0], Series)
        self._fdb: dict = {}
        self._qval: dict = {}
        self._dval = [fac.tilde.compose(self.f) for fac in self.table.factors]
        self._dpow: dict = {}

    def _dpower(self, i: int, k: int):
        key = (i, k)
        if key not in self._dpow:
            self._dpow[key] = self._dval[i] ** k
        return self._dpow[key]

    def delta_value(self):
        return self.sys.delta.compose(self.f)

    def _q_of(self, tau: Poly, profile: tuple):
        key = (tau, profile)
        if key not in self._qval:
            ent = self.table.entry(tau, profile)
            self._qval[key] = (ent.q.compose(self.f), ent.k)
        return self._qval[key]

    def numerator(self, tau: Poly, As: Sequence):
        """(numerator, exponents) with 𝔗̃(As) = numerator / prod Δ̃_f(f)^{exponents}."""
        d = tau.degree()
        As = [MultiIndex(A) for A in As]
        if len(As) > d:
            raise ValueError(f"{len(As)} indexes for an invariant of degree {d}")
        nonempty = [A for A in As if A]
        n_empty = d - len(nonempty)
        if not nonempty:
            prof = canonical_profile([MultiIndex()] * d)
            qv, ks = self._q_of(tau, prof)
            return qv, ks
        expansions = [faa_di_bruno(self.z, A, self._fdb) for A in nonempty]
        # slot by slot, merging partial products whose index multisets agree
        partial: dict = {(): None}
        for exp in expansions:
            nxt: dict = {}
            for key, c in partial.items():
                for I, cI in exp.items():
                    k2 = tuple(sorted(key + (I,), key=lambda J: (len(J), tuple(J))))
                    t = cI if c is None else c * cI
                    nxt[k2] = nxt[k2] + t if k2 in nxt else t
            partial = nxt
        acc: dict = {}
        for key, term in partial.items():
            prof = canonical_profile(list(key) + [MultiIndex()] * n_empty)
            acc[prof] = acc[prof] + term if prof in acc else term
        K = [0] * len(self.table.factors)
        vals = []
        for prof, coef in acc.items():
            qv, ks = self._q_of(tau, prof)
            if qv.is_zero():
                continue
            vals.append((coef, qv, ks))
            K = [max(a, b) for a, b in zip(K, ks)]
        total = None
        for coef, qv, ks in vals:
            t = coef * qv
            for i, (k, kk) in enumerate(zip(ks, K)):
                if kk > k:
                    t = t * self._dpower(i, kk - k)
            total = t if total is None else total + t
        if total is None:
            total = _zero_like(self.z[0])
        return total, tuple(K)

    def frakT(self, tau: Poly, As: Sequence):
        """𝔗̃_τ(As)(f), raising NotDivisible or OrderExhausted."""
        num, K = self.numerator(tau, As)
        den = None
        for i, k in enumerate(K):
            if k:
                p = self._dpower(i, k)
                den = p if den is None else den * p
        if den is None:
            return num
        if self.series:
            dv = den.valuation()
            if dv > den.order:
                raise OrderExhausted("discriminant power vanishes to its reliable order")
            # a reliable low-degree term refutes; otherwise too little order is left to decide
            if num.valuation() >= dv and min(num.order, den.order) - dv < 0:
                raise OrderExhausted("reliable order fell below zero before the division")
        return num.divide_exact(den)

    def S(self, j: int, As: Sequence):
        """𝔖̃_j(As)(f) for the generator σ_j (1-based)."""
        return self.frakT(self.sys.sigma[j - 1], As)


def evaluate_frakT(sys: InvariantSystem, f: Sequence, j, As: Sequence, table: JetTable | None = None):
    """𝔗̃(As)(f) for σ_j (``j`` an int, 1-based) or an invariant polynomial ``j``."""
    ev = JetEvaluator(sys, f, table)
    tau = sys.sigma[j - 1] if isinstance(j, int) else j
    return ev.frakT(tau, As)


def first_order_tensor(sys: InvariantSystem, f: Sequence, j: int, s: int, evaluator: JetEvaluator | None = None) -> dict:
    """``(a_1 ≤ … ≤ a_s) ↦ T̃((a_1),…,(a_s),∅,…)∘j¹f`` over all sorted index tuples."""
    d = sys.degrees[j - 1]
    if not 1 <= s <= d:
        raise ValueError(f"s must lie in 1..{d}")
    ev = evaluator or JetEvaluator(sys, f)
    p = f[0].p if isinstance(f[0], Series) else f[0].nvars
    out = {}
    for combo in itertools.combinations_with_replacement(range(1, p + 1), s):
        out[combo] = ev.S(j, [MultiIndex((a,)) for a in combo])
    return out


# --------------------------------------------------------------------------
# closed forms for dihedral groups

def _wpoly(terms: dict) -> Poly:
    return Poly.from_dict(2, {k: mpq(v) for k, v in terms.items() if v != 0})


def dihedral_closed_form(l: int, j: int, s: int, *, printed: bool = True) -> dict:
    """Closed-form ``f*σ_{j,s}`` coefficients for 𝔇_l.

    Returns ``t ↦ (numerator in W, Δ̃ exponent)`` for the coefficient of
    ``dy₁^t dy₂^{s−t}``.  ``printed=False`` halves the first-generator form,
    which is how it relates to the normalization σ₁ = (x²+y²)/2.
    """
    D = Poly.from_dict(2, {(l, 0): 2 ** l, (0, 2): -(l * l)})
    W1, W2 = Poly.var(2, 0), Poly.var(2, 1)
    if j == 1:
        if s == 1:
            return {1: (Poly.const(2, mpq(1, 2)), 0), 0: (Poly(2, {}), 0)}
        if s != 2:
            raise ValueError("the first generator has degree 2")
        half = mpq(1) if printed else mpq(1, 2)
        return {2: (W1 ** (l - 1) * (2 ** (l - 1) * half), 1),
                1: (W2 * (-2 * l * half), 1),
                0: (W1 * (2 * half), 1)}
    if j != 2 or not 1 <= s <= l:
        raise ValueError(f"no closed form for j={j}, s={s}")
    out = {}
    r = s // 2
    sign_r = (-1) ** r
    if s % 2 == 0:
        for t in range(s + 1):
            if t == 0:
                out[t] = (W2 * sign_r, r)
                continue
            acc = Poly(2, {})
            for u in range((t - 1) // 2 + 1):
                acc = acc + D ** u * W2 ** (t - 2 * u - 1) * (mpq(l) ** (t - 2 * u - 2) * (-1) ** u * math.comb(t - 1, 2 * u))
            coef = mpq(sign_r * (-1) ** t * 2 ** (l - t) * math.comb(s, t))
            out[t] = (acc * W1 ** (l - t) * coef, r)
    else:
        for t in range(s + 1):
            if t == 0:
                out[t] = (Poly.const(2, mpq(sign_r, l)), r)
                continue
            if t == 1:
                out[t] = (Poly(2, {}), r)
                continue
            acc = Poly(2, {})
            for u in range(1, t // 2 + 1):
                acc = acc + D ** (u - 1) * W2 ** (t - 2 * u) * (mpq(l) ** (t - 2 * u) * (-1) ** u * math.comb(t - 1, 2 * u - 1))
            coef = mpq(sign_r * (-1) ** t * 2 ** (l - t) * math.comb(s, t), l)
            out[t] = (acc * W1 ** (l - t) * coef, r)
    return out


def dihedral_first_order_pullback(l: int, f: Sequence, j: int, s: int, *, printed: bool = True) -> dict:
    """Closed-form pullback as ``dx``-exponent tuple ↦ coefficient.

    The coefficient of the monomial ``dx^e`` equals ``(s!/e!)`` times the
    general pipeline's value at the sorted index tuple.
    """
    form = dihedral_closed_form(l, j, s, printed=printed)
    p = f[0].p if isinstance(f[0], Series) else f[0].nvars
    df = [[fi.derive(a) for a in range(p)] for fi in f]
    K = max(k for _, k in form.values())
    Dv = Poly.from_dict(2, {(l, 0): 2 ** l, (0, 2): -(l * l)}).compose(list(f))
    acc: dict = {}
    for t, (num, k) in form.items():
        if num.is_zero():
            continue
        cval = num.compose(list(f))
        if K > k:
            cval = cval * Dv ** (K - k)
        # expand (Σ ∂_a f1 dx_a)^t (Σ ∂_a f2 dx_a)^{s−t}
        for combo in itertools.product(range(p), repeat=s):
            factors = [df[0][a] if idx < t else df[1][a] for idx, a in enumerate(combo)]
            e = tuple(combo.count(a) for a in range(p))
            term = cval * _product(factors)
            acc[e] = acc[e] + term if e in acc else term
    out = {}
    den = Dv ** K if K else None
    for e, val in acc.items():
        out[e] = val.divide_exact(den) if den is not None else val
    return out


def compare_dihedral(l: int, *, printed: bool = True) -> list:
    """Check the closed forms for 𝔇_l against the table, coefficient by coefficient.

    The coefficient of ``dy₁^t dy₂^{s−t}`` corresponds to ``C(s,t)·T̃`` at the
    profile ``((1)^t, (2)^{s−t}, ∅, …)``.  Returns ``(j, s, t, ok)`` rows.
    """
    from .groups import make_dihedral

    sys = make_dihedral(l)
    table = jet_table(sys)
    D = sys.delta
    rows = []
    for j, svals in ((1, (1, 2)), (2, tuple(range(1, l + 1)))):
        d = sys.degrees[j - 1]
        for s in svals:
            form = dihedral_closed_form(l, j, s, printed=printed)
            for t in range(s + 1):
                prof = [MultiIndex((1,))] * t + [MultiIndex((2,))] * (s - t) + [MultiIndex()] * (d - s)
                ent = table.sigma_entry(j, prof)
                k = sum(ent.k)
                num, e = form[t]
                lhs = ent.q * math.comb(s, t) * D ** e
                rhs = num * D ** k
                rows.append((j, s, t, lhs == rhs))
    return rows
