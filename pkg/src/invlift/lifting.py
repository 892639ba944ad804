"""Liftability decisions and lift constructions.

Three construction paths are available:

``general``
    The criterion with the 𝔖̃ functions followed by the auxiliary-parameter
    construction: build ``f^q(X, t)`` from the 𝔖̃ values, Newton-lift it at
    ``t(x0)`` and evaluate the (affine in t) lift at ``t_∅ = 1``.  Exact but
    expensive; practical for small ``p`` and ``q``.
``closed-form``
    Catalog solvers: the index-system formula for cyclic groups, the
    ``z^l`` reduction for dihedral groups, componentwise for products.
``auto``
    The general path for tiny instances (so refutations carry the profile
    witness), otherwise fast catalog solvers built on valuation-aware roots.

Exact polynomial inputs may be re-expanded to any order, so constructions
raise their working order until the requested order is reliable.
Truncated inputs are used as given and yield ``Undetermined`` when the
precision runs out.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

from gmpy2 import mpq

from .groups import (
    InvariantSystem, NoChoiceFound, OnDiscriminant, StratumInfo, canonical_representative, choose_invariant_coordinates,
    make_cyclic, make_trivial, point_preimage,
)
from .jets import JetEvaluator, canonical_profile, format_profile, profile_multiplicity
from .series import (
    EXACT, GaussQ, MultiIndex, NotDivisible, OrderExhausted, Poly, Series, approx_field, join_fields,
    multi_indices, multi_to_exp, series_root,
)

__all__ = [
    "LIFTED", "NOT_LIFTABLE", "NOT_QUASIREGULAR", "UNDETERMINED", "FormalMorphism", "LiftReport",
    "AuxLiftState", "detect_quasiregular", "check_liftable", "lift", "lift_regular_point",
    "lift_quasiregular", "lift_cyclic_closed_form", "lift_dihedral_closed_form", "lift_global_polynomial",
    "reduce_to_stratum", "assemble_Pq", "remark_prefilter", "general_is_cheap",
]

LIFTED = "Lifted"
NOT_LIFTABLE = "NotLiftable"
NOT_QUASIREGULAR = "NotQuasiregular"
UNDETERMINED = "Undetermined"

_MAX_RAISES = 6
_DEFAULT_NOTE = "unique up to the group action"


# --------------------------------------------------------------------------
# data types

class FormalMorphism:
    """m components ``f_j = W_j ∘ f`` as series in p variables.

    ``exact=True`` means the components are the given polynomials (no
    truncation); ``order`` is then the order requested for outputs.
    """

    def __init__(self, system: InvariantSystem, f: Sequence, *, exact: bool = False, order: int | None = None):
        if len(f) != system.m:
            raise ValueError(f"the group has {system.m} generators but {len(f)} components were given")
        self.system = system
        self.exact = exact
        if exact:
            polys = [x.to_poly() if isinstance(x, Series) else x for x in f]
            if order is None:
                raise ValueError("exact morphisms need an output order")
            self.polys = polys
            self.p = polys[0].nvars
            self._order = order
        else:
            if not all(isinstance(x, Series) for x in f):
                raise TypeError("truncated morphisms need Series components")
            self.polys = None
            self.p = f[0].p
            self._order = min(x.order for x in f) if order is None else order
            self._series = [x.truncate(self._order) if x.order > self._order else x for x in f]
        if any((x.nvars if exact else x.p) != self.p for x in (self.polys if exact else self._series)):
            raise ValueError("components have different numbers of variables")
        for rel in system.relations:
            chk = rel.compose(self.at_order(self._order))
            if not chk.is_zero():
                raise ValueError("the components violate a relation among the generators")

    @classmethod
    def from_polys(cls, system: InvariantSystem, polys: Sequence[Poly], order: int) -> "FormalMorphism":
        return cls(system, list(polys), exact=True, order=order)

    @classmethod
    def from_series(cls, system: InvariantSystem, series: Sequence[Series]) -> "FormalMorphism":
        return cls(system, list(series))

    @property
    def order(self) -> int:
        return self._order

    @property
    def m(self) -> int:
        return self.system.m

    def at_order(self, Q: int) -> list:
        if self.exact:
            return [Series.from_poly(P, Q) for P in self.polys]
        if Q > self._order:
            raise OrderExhausted(f"order {Q} requested from input truncated at {self._order}")
        return [x.truncate(Q) for x in self._series]

    def series(self) -> list:
        return self.at_order(self._order)

    def part(self, sub: InvariantSystem, w_offset: int) -> "FormalMorphism":
        idx = range(w_offset, w_offset + sub.m)
        if self.exact:
            return FormalMorphism(sub, [self.polys[i] for i in idx], exact=True, order=self._order)
        return FormalMorphism(sub, [self._series[i] for i in idx])


@dataclass
class LiftReport:
    verdict: str
    lift: list | None = None
    q_used: int | None = None
    witness: dict | None = None
    stratum: StratumInfo | None = None
    note: str = _DEFAULT_NOTE
    path: str = ""
    order: int | None = None
    prefilter: str | None = None
    extra: dict = dc_field(default_factory=dict)

    def kv_lines(self, names: Sequence[str] | None = None) -> list:
        out = [f"verdict={self.verdict}", f"path={self.path}"]
        if self.q_used is not None:
            out.append(f"q_used={self.q_used}")
        if self.order is not None:
            out.append(f"order={self.order}")
        if self.prefilter is not None:
            out.append(f"prefilter={self.prefilter}")
        for k, v in (self.witness or {}).items():
            out.append(f"witness.{k}={v}")
        if self.stratum is not None:
            out.append(f"stratum={self.stratum.note}")
        for k, v in self.extra.items():
            out.append(f"{k}={v}")
        if self.lift is not None or self.note != _DEFAULT_NOTE:
            out.append(f"note={self.note}")
        if self.lift is not None:
            for i, F in enumerate(self.lift):
                out.append(f"F{i + 1}={F.to_string(names)}")
        return out

    def text_lines(self, names: Sequence[str] | None = None) -> list:
        out = [f"verdict: {self.verdict}"]
        if self.path:
            out.append(f"path: {self.path}")
        if self.q_used is not None:
            out.append(f"q = {self.q_used}")
        if self.prefilter is not None:
            out.append(f"pre-filter: {self.prefilter}")
        if self.witness:
            out.append("witness: " + ", ".join(f"{k}={v}" for k, v in self.witness.items()))
        if self.stratum is not None:
            out.append(f"stratum: {self.stratum.note}")
        for k, v in self.extra.items():
            out.append(f"{k}: {v}")
        if self.lift is not None:
            for i, F in enumerate(self.lift):
                out.append(f"F{i + 1} = {F.to_string(names)}")
            out.append(f"({self.note})")
        elif self.note and self.note != _DEFAULT_NOTE:
            out.append(f"note: {self.note}")
        return out


@dataclass
class AuxLiftState:
    """State of the auxiliary-parameter construction.

    ``Pq[j]`` maps a sorted multiset of multi-indices to its coefficient
    (multiplicity already included) in ``f^q_j(t)``.
    """

    q: int
    Pq: list
    x0: tuple | None = None
    t0: dict | None = None
    G0: list | None = None
    G1: list | None = None


# --------------------------------------------------------------------------
# helpers

def _min_order(F: Sequence[Series]) -> int:
    return min(x.order for x in F)


def _verify(fm: FormalMorphism, F: Sequence[Series]) -> bool:
    """σ(F) = f to the reliable order of F."""
    R = _min_order(F)
    if R < 0:
        return False
    sig = fm.system.sigma_of(list(F))
    ref = fm.at_order(min(R, fm.order) if not fm.exact else R)
    return all(a.agrees(b, min(a.order, b.order)) for a, b in zip(sig, ref))


def _finish(fm: FormalMorphism, F: Sequence[Series], path: str, q: int | None, **kw) -> LiftReport:
    F = list(F)
    if fm.exact:
        F = [x.truncate(fm.order) for x in F]
    R = _min_order(F)
    if R < 0:
        return LiftReport(UNDETERMINED, q_used=q, path=path, note="reliable order of the lift fell below zero")
    if not _verify(fm, F):
        raise AssertionError("constructed lift does not reproduce the input")
    return LiftReport(LIFTED, lift=F, q_used=q, path=path, order=R, **kw)


def _with_adaptive_order(fm: FormalMorphism, build: Callable[[list], list], margin: int) -> list:
    """Run ``build`` on the input at a working order; for exact inputs raise
    the order until the output reaches ``fm.order``."""
    if not fm.exact:
        return build(fm.series())
    Q = fm.order + max(margin, 0)
    for _ in range(_MAX_RAISES):
        F = build(fm.at_order(Q))
        got = _min_order(F)
        if got >= fm.order:
            return F
        Q += fm.order - got + 1
    raise OrderExhausted("could not reach the requested order")


def _nd_witness(exc: NotDivisible, **kw) -> dict:
    w = dict(kw)
    w["degree"] = exc.degree
    if exc.residual is not None:
        w["residual"] = exc.residual.to_string(tail=False)
    if exc.note:
        w["reason"] = exc.note
    return w


# --------------------------------------------------------------------------
# quasiregularity

def _stratum_for(sys: InvariantSystem) -> StratumInfo:
    kind = sys.kind
    if kind == "cyclic":
        n = sys.tag[1]
        return StratumInfo(list(sys.float_elements), [], None, [], f"origin of C{n}")
    if kind == "dihedral":
        l = sys.tag[1]
        quotient = make_trivial() if l % 2 else make_cyclic(2)
        refl = ((mpq(1), mpq(0)), (mpq(0), mpq(-1)))
        return StratumInfo([refl], [(mpq(1), mpq(0))], quotient,
                           [Poly.from_dict(1, {(2,): mpq(1, 2)}), Poly.from_dict(1, {(l,): mpq(1, l)})],
                           f"mirror of D{l}")
    if kind == "product":
        return StratumInfo([], [], None, [], "componentwise: " + ", ".join(p.name() for p in sys.parts))
    return StratumInfo([], [], None, [], "stratum of a custom group")


def detect_quasiregular(fm: FormalMorphism) -> dict:
    """``{'status': 'quasiregular', 'system', 'q'}`` or a NotQuasiregular / Undetermined status."""
    sys = fm.system
    if fm.exact:
        D = sys.delta.compose(fm.polys)
        if D.is_zero():
            return {"status": NOT_QUASIREGULAR, "stratum": _stratum_for(sys)}
        v = D.low_degree()
        Q = max(fm.order, v)
        try:
            chosen, q = choose_invariant_coordinates(sys, fm.at_order(Q))
        except NoChoiceFound:
            return {"status": UNDETERMINED, "reason": "no coordinate choice has a nonvanishing Jacobian"}
        return {"status": "quasiregular", "system": chosen, "q": q}
    try:
        chosen, q = choose_invariant_coordinates(sys, fm.series(), fm.order)
    except NoChoiceFound:
        return {"status": UNDETERMINED, "reason": f"discriminant of f vanishes through order {fm.order}"}
    return {"status": "quasiregular", "system": chosen, "q": q}


# --------------------------------------------------------------------------
# Newton lifting at regular points

def lift_regular_point(sys: InvariantSystem, f: Sequence[Series], v0: Sequence, v0_field=None) -> list:
    """Newton iteration ``F ← F − Dσ(F)^{-1}(σ(F) − f)`` from the constant ``v0``.

    Only the chosen coordinates enter the iteration; the result order is the
    minimum input order.
    """
    f = list(f)
    Q = _min_order(f)
    fld = v0_field or (approx_field() if any(isinstance(x, complex) for x in v0) else EXACT)
    for x in f:
        fld = join_fields(fld, x.field)
    f = [x.to_field(fld) for x in f]
    p = f[0].p
    z = [f[c] for c in sys.coord_choice]
    sig = [sys.sigma[c] for c in sys.coord_choice]
    F = [Series.const(p, Q, fld.coerce(c), fld) for c in v0]
    J, cof = sys.J, sys.cofactors
    if fld.is_zero(J.to_field(fld).evaluate([fld.coerce(c) for c in v0])):
        raise OnDiscriminant("Newton start point is not regular")
    steps = max(1, math.ceil(math.log2(Q + 2))) + 2
    for _ in range(steps):
        res = [s.compose(F) - zi for s, zi in zip(sig, z)]
        if all(r.valuation() > r.order for r in res):
            break
        Jinv = J.compose(F).inverse()
        cofF = [[c.compose(F) for c in row] for row in cof]
        newF = []
        for a in range(sys.n):
            acc = None
            for i in range(sys.n):
                if cof[i][a].is_zero() or res[i].is_zero():
                    continue
                t = cofF[i][a] * res[i]
                acc = t if acc is None else acc + t
            newF.append(F[a] - acc * Jinv if acc is not None else F[a])
        F = newF
    res = [s.compose(F) - zi for s, zi in zip(sig, z)]
    if not all(r.valuation() > r.order for r in res):
        raise AssertionError("Newton iteration did not converge")
    return F


def _newton_solve_linear(sys: InvariantSystem, G0: Sequence[Series], g1: Sequence[Series]) -> list:
    """``Dσ(G0)^{-1} g1`` over the chosen coordinates."""
    J = sys.J.compose(list(G0)).inverse()
    g = [g1[c] for c in sys.coord_choice]
    out = []
    for a in range(sys.n):
        acc = None
        for i in range(sys.n):
            c = sys.cofactors[i][a]
            if c.is_zero() or g[i].is_zero():
                continue
            t = c.compose(list(G0)) * g[i]
            acc = t if acc is None else acc + t
        out.append(acc * J if acc is not None else Series.zero(J.p, J.order, J.field))
    return out


# --------------------------------------------------------------------------
# the criterion and the auxiliary-parameter construction

def _t_value(A: MultiIndex, x: Sequence, p: int):
    e = multi_to_exp(A, p) if A else (0,) * p
    num = mpq(1)
    for xi, ei in zip(x, e):
        num *= mpq(xi) ** ei
    return num / math.prod(math.factorial(k) for k in e)


def _a_multisets(p: int, q: int, d: int) -> list:
    As = multi_indices(p, q, include_empty=True)
    return [canonical_profile(c) for c in itertools.combinations_with_replacement(As, d)]


def general_is_cheap(sys: InvariantSystem, p: int, q: int) -> bool:
    """Whether the auto path runs the full criterion (tiny instances only)."""
    if p != 1 or q > 3 or sys.kind == "custom":
        return False
    count = sum(math.comb(q + 1 + d - 1, d) for d in sys.degrees)
    return count <= 40


def _criterion_values(sys: InvariantSystem, fs: list, q: int, p: int):
    """All 𝔖̃ values at level q, as ``Pq[j]`` dicts; raises NotDivisible with context."""
    ev = JetEvaluator(sys, fs)
    Pq = []
    for j in range(1, sys.m + 1):
        d = sys.degrees[j - 1]
        coeffs = {}
        for prof in _a_multisets(p, q, d):
            try:
                val = ev.S(j, prof)
            except NotDivisible as exc:
                exc.context = {"j": j, "profile": format_profile(prof)}
                raise
            coeffs[prof] = val.scale(profile_multiplicity(prof)) if profile_multiplicity(prof) != 1 else val
        Pq.append(coeffs)
    return Pq


def _taylor_check(fm: FormalMorphism, Pq: list, q: int, p: int):
    """The j for which ``Tay^q f_j ≠ P̃_q(σ_j)(f)_0(t(X))``, or None."""
    fs = fm.at_order(q) if fm.exact or fm.order >= q else fm.series()
    for j, coeffs in enumerate(Pq, start=1):
        acc: dict = {}
        for prof, val in coeffs.items():
            c0 = val.constant()
            if val.field.is_zero(c0):
                continue
            deg = sum(len(A) for A in prof)
            if deg > q:
                continue
            e = [0] * p
            den = 1
            for A in prof:
                if A:
                    for a, k in enumerate(multi_to_exp(A, p)):
                        e[a] += k
                    den *= math.prod(math.factorial(k) for k in multi_to_exp(A, p))
            acc[tuple(e)] = acc.get(tuple(e), 0) + c0 / den
        target = fs[j - 1]
        lhs = Series.from_dict(p, min(q, target.order), acc, target.field)
        if not lhs.agrees(target, min(q, target.order)):
            return j
    return None


def remark_prefilter(fm: FormalMorphism, chosen: InvariantSystem, q: int) -> tuple:
    """The sufficient refined condition at ``q' = ⌈q/r⌉`` with r the degree of Δ.

    Every 𝔖̃ value at level q' must be a power series.  Returns
    ``(status, q')`` with status "pass", "fail" or "undetermined".
    """
    r = chosen.delta_upstairs().degree()
    qp = max(1, -(-q // r))
    try:
        if fm.exact:
            _with_adaptive_values(fm, chosen, qp)
        else:
            _criterion_values(chosen, fm.series(), qp, fm.p)
    except NotDivisible:
        return "fail", qp
    except OrderExhausted:
        return "undetermined", qp
    return "pass", qp


def _with_adaptive_values(fm: FormalMorphism, chosen: InvariantSystem, q: int, target: int | None = None):
    """Criterion values for exact inputs, re-expanded until every value is
    reliable to ``target`` (default: the requested order)."""
    target = fm.order if target is None else target
    Q = target + q + 2
    for _ in range(_MAX_RAISES):
        try:
            Pq = _criterion_values(chosen, fm.at_order(Q), q, fm.p)
        except OrderExhausted:
            Q = 2 * Q
            continue
        got = min(v.order for c in Pq for v in c.values())
        if got >= target:
            return Pq, Q
        Q += target - got + 1
    raise OrderExhausted("could not reach the requested order for the criterion values")


def _general_check(fm: FormalMorphism, chosen: InvariantSystem, q: int, target: int | None = None):
    """Run the full criterion; returns (report-or-None, Pq)."""
    p = fm.p
    try:
        if fm.exact:
            Pq, _ = _with_adaptive_values(fm, chosen, q, target)
        else:
            Pq = _criterion_values(chosen, fm.series(), q, p)
    except NotDivisible as exc:
        ctx = getattr(exc, "context", {})
        return LiftReport(NOT_LIFTABLE, q_used=q, witness=_nd_witness(exc, **ctx), path="general"), None
    except OrderExhausted as exc:
        return LiftReport(UNDETERMINED, q_used=q, path="general", note=str(exc)), None
    bad = _taylor_check(fm, Pq, q, p)
    if bad is not None:
        return LiftReport(NOT_LIFTABLE, q_used=q, witness={"j": bad, "failed": "Taylor identity"}, path="general"), None
    return None, Pq


def assemble_Pq(fm: FormalMorphism, j, q: int, *, system: InvariantSystem | None = None) -> dict:
    """``P̃_q(τ)(f)`` as ``multiset of A ↦ coefficient`` (multiplicity included).

    ``j`` is a 1-based generator index or a homogeneous invariant polynomial τ.
    """
    chosen = system or detect_quasiregular(fm).get("system") or fm.system
    ev = JetEvaluator(chosen, fm.series())
    tau = chosen.sigma[j - 1] if isinstance(j, int) else j
    out = {}
    for prof in _a_multisets(fm.p, q, tau.degree()):
        v = ev.frakT(tau, prof)
        mult = profile_multiplicity(prof)
        out[prof] = v.scale(mult) if mult != 1 else v
    return out


def _find_x0(chosen: InvariantSystem, Pq: list, q: int, p: int):
    """First grid point (lexicographic, radius q+1 and growing) with ``f^q(0, t(x0))`` regular."""
    fld = EXACT
    for coeffs in Pq:
        for val in coeffs.values():
            fld = join_fields(fld, val.field)
    consts = [[(prof, fld.coerce(val.constant())) for prof, val in coeffs.items()] for coeffs in Pq]
    consts = [[(prof, c) for prof, c in row if not fld.is_zero(c)] for row in consts]
    for R in (q + 1, 2 * q + 2, 4 * q + 4):
        for x in itertools.product(range(-R, R + 1), repeat=p):
            tvals = {}
            z = []
            for row in consts:
                acc = fld.zero
                for prof, c0 in row:
                    term = c0
                    for A in prof:
                        if A not in tvals:
                            tvals[A] = _t_value(A, x, p)
                        term = term * fld.coerce(tvals[A])
                    acc = acc + term
                z.append(acc)
            if not fld.is_zero(chosen.delta.to_field(fld).evaluate(z)):
                return x, tvals, (z, fld)
    return None, None, None


def _construct_general(fm: FormalMorphism, chosen: InvariantSystem, q: int, Pq: list) -> AuxLiftState:
    p = fm.p
    x0, tvals, z0 = _find_x0(chosen, Pq, q, p)
    if x0 is None:
        raise OrderExhausted("no regular base point on the search grid")
    g0, g1 = [], []
    for coeffs in Pq:
        s0 = s1 = None
        for prof, val in coeffs.items():
            t = mpq(1)
            for A in prof:
                t = t * tvals.setdefault(A, _t_value(A, x0, p))
            nonempty = sum(1 for A in prof if A)
            if t == 0:
                continue
            a = val.scale(t)
            s0 = a if s0 is None else s0 + a
            if nonempty:
                b = val.scale(-nonempty * t)
                s1 = b if s1 is None else s1 + b
        zero = next(iter(coeffs.values())) * 0
        g0.append(s0 if s0 is not None else zero)
        g1.append(s1 if s1 is not None else zero)
    base, fld = z0
    v0, vfld = point_preimage(chosen, base, exact=fld.exact)
    G0 = lift_regular_point(chosen, g0, v0, vfld)
    G1 = _newton_solve_linear(chosen, G0, g1)
    return AuxLiftState(q, Pq, tuple(x0), tvals, G0, G1)


def lift_quasiregular(fm: FormalMorphism, det: dict | None = None) -> LiftReport:
    """The criterion followed by the auxiliary-parameter construction."""
    det = det or detect_quasiregular(fm)
    if det["status"] != "quasiregular":
        return LiftReport(det["status"], stratum=det.get("stratum"), path="general", note=det.get("reason", ""))
    chosen, q = det["system"], det["q"]
    pre, _ = remark_prefilter(fm, chosen, q)
    rep, Pq = _general_check(fm, chosen, q)
    if rep is not None:
        rep.prefilter = pre
        return rep
    if chosen.kind == "custom":
        return LiftReport(UNDETERMINED, q_used=q, path="general", prefilter=pre,
                          note="criterion satisfied; lifts for custom groups need a point solver, which is not available")

    try:
        if fm.exact:
            T, values = fm.order, Pq
            for _ in range(_MAX_RAISES):
                state = _construct_general(fm, chosen, q, values)
                F = [a + b for a, b in zip(state.G0, state.G1)]
                got = _min_order(F)
                if got >= fm.order:
                    break
                T += fm.order - got + 1
                values, _ = _with_adaptive_values(fm, chosen, q, T)
        else:
            state = _construct_general(fm, chosen, q, Pq)
            F = [a + b for a, b in zip(state.G0, state.G1)]
    except OrderExhausted as exc:
        return LiftReport(UNDETERMINED, q_used=q, path="general", prefilter=pre, note=str(exc))
    return _finish(fm, F, "general", q, prefilter=pre)


# --------------------------------------------------------------------------
# cyclic groups

def _cyclic_f1(f: Series, n: int, A: MultiIndex, cache: dict) -> Series:
    """``f^1_A`` via ``f^1_{A+(a)} = ∂_a f^1_A − (n−1) f^1_a f^1_A / f``."""
    if A in cache:
        return cache[A]
    if not A:
        val = f
    elif len(A) == 1:
        val = f.derive(A[0] - 1).scale(mpq(1, n))
    else:
        a = A[-1]
        prev = _cyclic_f1(f, n, MultiIndex(A[:-1]), cache)
        fa = _cyclic_f1(f, n, MultiIndex((a,)), cache)
        val = prev.derive(a - 1) - (fa * prev).divide_exact(f).scale(n - 1)
    cache[A] = val
    return val


def lift_cyclic_closed_form(fm: FormalMorphism) -> LiftReport:
    """Index-system criterion and root formula for cyclic groups.

    Searches A by increasing order for holomorphic ``f^1_A`` and
    ``f^n_{A..A} = (f^1_A)^n / f^{n−1}`` with a nonzero constant term, then
    ``F = f · (f^n)^{1/n} / f^1_A`` (``F = f^1_A / (f^2)^{1/2}`` for n = 2).
    """
    sys = fm.system
    if sys.kind != "cyclic":
        raise ValueError("closed form requires a cyclic group")
    n = sys.tag[1]
    p = fm.p
    if fm.exact and fm.polys[0].is_zero():
        return _zero_lift(fm, "closed-form")
    v = _input_valuation(fm, fm.polys[0] if fm.exact else fm.series()[0])
    if v is None:
        return LiftReport(UNDETERMINED, path="closed-form", note="input vanishes to its reliable order")
    kmax = v // n
    found: dict = {}

    def build(fs):
        f = fs[0]
        cache: dict = {}
        for k in range(0, kmax + 1):
            for A in multi_indices(p, k, include_empty=True):
                if len(A) != k:
                    continue
                try:
                    f1 = _cyclic_f1(f, n, A, cache)
                    fn = (f1 ** n).divide_exact(f ** (n - 1)) if n > 1 else f1
                except NotDivisible:
                    continue
                if fn.field.is_zero(fn.constant()):
                    continue
                root = fn.nth_root_unit(n)
                if n == 2:
                    F = f1 * root.inverse()
                else:
                    F = (f * root).divide_exact(f1)
                found["A"] = A
                return [F]
        raise NotDivisible(-1, None, f"no index system of order ≤ {kmax} with holomorphic f^1 and unit f^{n}")

    try:
        F = _with_adaptive_order(fm, build, v * (n + 1) + 2)
    except NotDivisible as exc:
        return LiftReport(NOT_LIFTABLE, q_used=v, witness=_nd_witness(exc), path="closed-form")
    except OrderExhausted as exc:
        return LiftReport(UNDETERMINED, q_used=v, path="closed-form", note=str(exc))
    rep = _finish(fm, F, "closed-form", v)
    rep.witness = {"index_system": repr(found.get("A"))}
    return rep


def _lift_cyclic_root(fm: FormalMorphism) -> LiftReport:
    """Fast cyclic lift: the valuation-aware n-th root of f."""
    n = fm.system.tag[1]
    if fm.exact and fm.polys[0].is_zero():
        return _zero_lift(fm, "auto")
    v = _input_valuation(fm, fm.polys[0] if fm.exact else fm.series()[0])
    if v is None:
        return LiftReport(UNDETERMINED, path="auto", note="input vanishes to its reliable order")
    try:
        F = _with_adaptive_order(fm, lambda fs: [series_root(fs[0], n)], (n - 1) * (v // n) + 1)
    except NotDivisible as exc:
        return LiftReport(NOT_LIFTABLE, q_used=v, witness=_nd_witness(exc), path="auto")
    except OrderExhausted as exc:
        return LiftReport(UNDETERMINED, q_used=v, path="auto", note=str(exc))
    return _finish(fm, F, "auto", v)


def _input_valuation(fm: FormalMorphism, x):
    """Valuation of a Poly (exact input) or Series; None when it vanishes to its reliable order."""
    if isinstance(x, Poly):
        return None if x.is_zero() else x.low_degree()
    v = x.valuation()
    return None if v > x.order else v


def _zero_lift(fm: FormalMorphism, path: str) -> LiftReport:
    F = [Series.zero(fm.p, fm.order) for _ in range(fm.system.n)]
    return _finish(fm, F, path, None, stratum=_stratum_for(fm.system), note="lift through the origin stratum")


# --------------------------------------------------------------------------
# dihedral groups

_I = GaussQ(mpq(0), mpq(1))


def _dihedral_from_series(l: int, f1: Series, f2: Series) -> list:
    """Lift via ``z^l = l f₂ + i√Δ̃(f)``, an l-th root and ``ẑ = 2 f₁ / z``."""
    D = f1 ** l * (2 ** l) - (f2 * f2).scale(l * l)
    s = series_root(D, 2)
    last: Exception | None = None
    for sign in (1, -1):
        iu = _I if s.field.exact else 1j
        w1 = f2.scale(l) + s.scale(iu * sign)
        try:
            Z1 = series_root(w1, l)
            Z2 = f1.scale(2).to_field(Z1.field).divide_exact(Z1)
        except NotDivisible as exc:
            last = exc
            continue
        half = mpq(1, 2) if Z1.field.exact else 0.5
        x = (Z1 + Z2).scale(half)
        y = (Z1 - Z2).scale((-_I * mpq(1, 2)) if Z1.field.exact else -0.5j)
        return [x, y]
    raise last if last is not None else NotDivisible(-1, None, "no l-th root")


def lift_dihedral_closed_form(fm: FormalMorphism, path: str = "closed-form") -> LiftReport:
    l = fm.system.tag[1]
    v = _input_valuation(fm, fm.system.delta.compose(fm.polys if fm.exact else fm.series()))
    if v is None:
        return LiftReport(UNDETERMINED, path=path, note="discriminant vanishes to the reliable order")
    margin = v + 2 * l
    try:
        F = _with_adaptive_order(fm, lambda fs: _dihedral_from_series(l, fs[0], fs[1]), margin)
    except NotDivisible as exc:
        return LiftReport(NOT_LIFTABLE, q_used=v, witness=_nd_witness(exc), path=path)
    except OrderExhausted as exc:
        return LiftReport(UNDETERMINED, q_used=v, path=path, note=str(exc))
    return _finish(fm, F, path, v)


# --------------------------------------------------------------------------
# strata

def _mirror_directions(l: int):
    """(direction, a, b) with σ(t·e) = (a t², b t^l) for each mirror class."""
    out = [((mpq(1), mpq(0)), mpq(1, 2), mpq(1, l))]
    if l % 2 == 0:
        if l == 4:
            out.append(((mpq(1), mpq(1)), mpq(1), mpq(-1)))
        else:
            c, s = math.cos(math.pi / l), math.sin(math.pi / l)
            out.append(((complex(c), complex(s)), 0.5 + 0j, complex(-1.0 / l)))
    return out


def reduce_to_stratum(fm: FormalMorphism) -> LiftReport:
    """Lift a non-quasiregular exact morphism through a lower stratum."""
    sys = fm.system
    kind = sys.kind
    if not fm.exact:
        return LiftReport(UNDETERMINED, path="stratum", note="truncated input cannot certify a lower stratum")
    info = _stratum_for(sys)
    if all(P.is_zero() for P in fm.polys):
        rep = _zero_lift(fm, "stratum")
        rep.note = "lift through the origin (the closed stratum of the fixed point)"
        return rep
    if kind == "cyclic":
        raise AssertionError("a nonzero cyclic morphism is quasiregular")
    if kind == "dihedral":
        l = sys.tag[1]
        f1, f2 = fm.polys
        note = f"{info.note}; f(0) is the origin, outside the open mirror stratum" \
            if f1.constant() == 0 and f2.constant() == 0 else info.note
        last = "no mirror class matches"
        for e, a, b in _mirror_directions(l):
            def build(fs, e=e, a=a, b=b):
                g1, g2 = fs
                w = g1.scale(1 / a)
                if l % 2:
                    t = g2.scale(1 / b).divide_exact(w ** ((l - 1) // 2))
                    return [t]
                if not (w ** (l // 2)).scale(b).agrees(g2, g2.order):
                    raise NotDivisible(-1, None, "second component does not match this mirror class")
                return [series_root(w, 2)]
            try:
                T = _with_adaptive_order(fm, build, l + 2)
            except NotDivisible as exc:
                last = exc.note or str(exc)
                continue
            t = T[0]
            F = [t.scale(e[0]), t.scale(e[1])]
            info.quotient = make_trivial() if l % 2 else make_cyclic(2)
            info.fixed_space_basis = [e]
            rep = _finish(fm, F, "stratum", None, stratum=info)
            rep.note = note
            return rep
        return LiftReport(NOT_LIFTABLE, path="stratum", stratum=info, witness={"reason": last})
    if kind == "product":
        return _lift_product(fm, "auto")
    return LiftReport(UNDETERMINED, path="stratum", stratum=info, note="strata of custom groups are not supported")


# --------------------------------------------------------------------------
# products

def _lift_product(fm: FormalMorphism, path: str) -> LiftReport:
    sys = fm.system
    pieces, reps = [], []
    w_off = 0
    for part in sys.parts:
        sub = fm.part(part, w_off)
        w_off += part.m
        rep = lift(sub, path=path)
        reps.append(rep)
        pieces.append(rep.lift)
    for verdict in (NOT_LIFTABLE, UNDETERMINED):
        for i, rep in enumerate(reps):
            if rep.verdict == verdict:
                w = {"part": i + 1}
                w.update(rep.witness or {})
                return LiftReport(verdict, path=path, witness=w, note=rep.note)
    F = [x for piece in pieces for x in piece]
    qs = [r.q_used for r in reps]
    q = sum(qs) if all(x is not None for x in qs) else None
    strata = [r.stratum.note for r in reps if r.stratum is not None]
    out = _finish(fm, F, path, q)
    if strata:
        out.stratum = StratumInfo([], [], None, [], "; ".join(strata))
    return out


# --------------------------------------------------------------------------
# entry points

def _closed_form(fm: FormalMorphism, det: dict, path: str) -> LiftReport:
    sys = fm.system
    kind = sys.kind
    if kind == "trivial":
        return _finish(fm, fm.at_order(fm.order), path, det.get("q"))
    if kind == "cyclic":
        if path == "closed-form":
            return lift_cyclic_closed_form(fm)
        return _lift_cyclic_root(fm)
    if kind == "dihedral":
        return lift_dihedral_closed_form(fm, path)
    return lift_quasiregular(fm, det)


def lift(fm: FormalMorphism, path: str = "auto", *, canonical: bool = False) -> LiftReport:
    """Decide liftability and construct a lift along the requested path."""
    if path not in ("auto", "general", "closed-form"):
        raise ValueError(f"unknown path {path!r}")
    sys = fm.system
    if sys.kind == "product" and path != "general":
        rep = _lift_product(fm, path)
    else:
        det = detect_quasiregular(fm)
        if det["status"] == NOT_QUASIREGULAR:
            rep = reduce_to_stratum(fm)
            if rep.verdict == UNDETERMINED and rep.stratum is None:
                rep.stratum = det["stratum"]
        elif det["status"] == UNDETERMINED:
            rep = LiftReport(UNDETERMINED, path=path, note=det.get("reason", ""))
        elif path == "general" or (path == "auto" and general_is_cheap(det["system"], fm.p, det["q"])):
            rep = lift_quasiregular(fm, det)
        else:
            rep = _closed_form(fm, det, path)
    if canonical and rep.lift is not None:
        rep.lift = canonical_representative(sys, rep.lift)
    return rep


def check_liftable(fm: FormalMorphism, path: str = "auto") -> LiftReport:
    """Decide liftability.

    On the general path this evaluates the criterion (with the refined
    pre-filter recorded alongside) and does not build a lift; the catalog
    paths decide by attempting their construction.
    """
    det = detect_quasiregular(fm)
    if det["status"] == NOT_QUASIREGULAR and fm.system.kind != "product":
        rep = LiftReport(NOT_QUASIREGULAR, stratum=det["stratum"], path=path,
                         note="the morphism factors through a lower stratum")
        return rep
    if det["status"] == UNDETERMINED and fm.system.kind != "product":
        return LiftReport(UNDETERMINED, path=path, note=det.get("reason", ""))
    use_general = path == "general" or fm.system.kind == "custom" or (
        path == "auto" and det["status"] == "quasiregular" and general_is_cheap(det["system"], fm.p, det["q"]))
    if use_general and det["status"] == "quasiregular":
        chosen, q = det["system"], det["q"]
        pre, _ = remark_prefilter(fm, chosen, q)
        rep, _ = _general_check(fm, chosen, q)
        if rep is None:
            rep = LiftReport(LIFTED, q_used=q, path="general", note="criterion satisfied (no lift constructed)")
        rep.prefilter = pre
        return rep
    rep = lift(fm, path=path)
    if det["status"] == NOT_QUASIREGULAR and rep.verdict == LIFTED:
        rep = LiftReport(NOT_QUASIREGULAR, stratum=rep.stratum or det["stratum"], path=path,
                         note="factors through a lower stratum; a lift exists through the stratum")
    rep.lift = None
    return rep


# --------------------------------------------------------------------------
# global polynomial lifts

def _poly_degree_bound(fm: FormalMorphism):
    degs = []
    for P, d in zip(fm.polys, fm.system.degrees):
        if P.is_zero():
            continue
        degs.append(-(-P.degree() // d))
    return max(degs) if degs else 0


def lift_global_polynomial(fm: FormalMorphism, q_cap: int | None = None) -> LiftReport:
    """Polynomial lift via the constancy certificate.

    For q = 1, 2, … every ``𝔖̃_j(A,…,A)(f)`` with ``|A| = q`` is tested for
    constancy; when all pass, a lift is built and truncated to degree q, and
    ``σ∘F = f`` is checked as a polynomial identity.  Only that identity
    certifies the result.  The constancy test runs in exact rational series
    arithmetic at a generic regular point, where a nonconstant polynomial has
    a nonzero gradient.  Constant inputs lift at q = 0, and homogeneous inputs
    of degree ``r·d_j`` take the shortcut of lifting at 0 directly.
    """
    if not fm.exact:
        raise ValueError("global polynomial lifts need exact polynomial input")
    sys = fm.system
    det = detect_quasiregular(fm)
    if det["status"] != "quasiregular":
        return LiftReport(det["status"], stratum=det.get("stratum"), path="global",
                          note="the input must meet the principal stratum")
    chosen = det["system"]
    bound = _poly_degree_bound(fm)
    q_cap = bound if q_cap is None else q_cap

    def build_poly(q: int):
        sub = FormalMorphism(sys, fm.polys, exact=True, order=q + 1)
        rep = lift(sub, path="auto")
        if rep.verdict != LIFTED:
            return None, rep
        F = [x.truncate(q).to_poly() for x in rep.lift]
        if all(a == b for a, b in zip([s.compose(F) for s in sys.sigma], fm.polys)):
            return F, rep
        return None, rep

    hom_r = None
    if all(P.is_homogeneous() for P in fm.polys if not P.is_zero()):
        rs = {P.degree() // d for P, d in zip(fm.polys, sys.degrees) if not P.is_zero() and P.degree() % d == 0}
        if len(rs) == 1 and all(P.is_zero() or P.degree() % d == 0 for P, d in zip(fm.polys, sys.degrees)):
            hom_r = rs.pop()
    if hom_r:
        F, rep = build_poly(hom_r)
        if F is not None:
            return _poly_report(fm, F, hom_r, "homogeneous shortcut")
    if all(P.degree() <= 0 for P in fm.polys):
        F, rep = build_poly(0)
        if F is not None:
            return _poly_report(fm, F, 0, "constant input")
    screen = _GenericPoint(chosen, fm.polys)
    for q in range(1, q_cap + 1):
        if screen.constant_at(q):
            F, rep = build_poly(q)
            if F is not None:
                return _poly_report(fm, F, q, "constancy certificate")
    return LiftReport(UNDETERMINED, path="global", witness={"largest_q": q_cap},
                      note="no constancy certificate up to the cap; no polynomial lift was found")


class _GenericPoint:
    """Constancy screen for ``𝔖̃_j(A,…,A)(f)`` at a pseudo-random regular point."""

    def __init__(self, chosen, polys, seed: int = 0):
        self.chosen = chosen
        self.polys = list(polys)
        self.p = self.polys[0].nvars
        rng = random.Random(seed)
        for _ in range(200):
            pt = [mpq(rng.randint(-29, 29), rng.randint(1, 7)) for _ in range(self.p)]
            if chosen.delta.evaluate([P.evaluate(pt) for P in self.polys]) != 0:
                break
        else:
            pt = None
        self.shifted = None
        if pt is not None:
            shift = [Poly.var(self.p, i) + c for i, c in enumerate(pt)]
            self.shifted = [P.compose(shift) for P in self.polys]

    def constant_at(self, q: int) -> bool:
        if self.shifted is None:
            return self._exact(q)
        order = q + 2
        ev = JetEvaluator(self.chosen, [Series.from_poly(P, order) for P in self.shifted])
        for j, d in enumerate(self.chosen.degrees, start=1):
            for A in multi_indices(self.p, q, include_empty=False):
                if len(A) != q:
                    continue
                val = ev.S(j, [A] * d)
                if val.order < 2:
                    return self._exact(q)
                if any(val.coeff(e) != 0 for e in _unit_exponents(self.p)):
                    return False
        return True

    def _exact(self, q: int) -> bool:
        ev = JetEvaluator(self.chosen, self.polys)
        for j, d in enumerate(self.chosen.degrees, start=1):
            for A in multi_indices(self.p, q, include_empty=False):
                if len(A) != q:
                    continue
                try:
                    if ev.S(j, [A] * d).degree() > 0:
                        return False
                except NotDivisible:
                    return False
        return True


def _unit_exponents(p: int) -> list:
    return [tuple(int(i == k) for i in range(p)) for k in range(p)]


def _poly_report(fm: FormalMorphism, F: list, q: int, how: str) -> LiftReport:
    series = [Series.from_poly(P, max(fm.order, q)) for P in F]
    rep = LiftReport(LIFTED, lift=series, q_used=q, path="global", order=max(fm.order, q),
                     witness={"certificate_q": q, "method": how}, note="polynomial lift; unique up to the group action")
    rep.extra["polynomial"] = "yes"
    return rep
