"""Acceptance criteria, one pass/fail line each (visible with ``pytest -v``)."""

import itertools
import random
import time

import pytest
from gmpy2 import mpq

from invlift.groups import make_cyclic, make_dihedral, orbit_match, parse_group_spec
from invlift.harness import random_poly_map, roundtrip
from invlift.jets import (
    InvariancePostconditionFailed, JetEvaluator, canonical_profile, compare_dihedral, jet_table, polarize,
)
from invlift.lifting import LIFTED, NOT_LIFTABLE, FormalMorphism, check_liftable, lift, lift_global_polynomial
from invlift.series import Poly, Series, multi_indices

from conftest import cyclic_power_solvable

SEED = 20261015


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}: {detail}")


def derive_poly(F, A):
    for a in A:
        F = F.derive(a - 1)
    return F


# 1 ------------------------------------------------------------------------

def test_criterion_1_dihedral_closed_forms(capsys):
    t0 = time.perf_counter()
    printed = {l: compare_dihedral(l, printed=True) for l in (3, 4, 5)}
    halved = {l: compare_dihedral(l, printed=False) for l in (3, 4, 5)}
    elapsed = time.perf_counter() - t0
    rows = [r for l in printed for r in printed[l]]
    s2 = [ok for j, s, t, ok in rows if j == 2]
    s12 = [ok for j, s, t, ok in rows if (j, s) == (1, 2)]
    s12_halved = [ok for l in halved for j, s, t, ok in halved[l] if (j, s) == (1, 2)]
    literal = all(ok for *_, ok in rows)
    report(capsys, 1, literal,
           f"second-generator displays {sum(s2)}/{len(s2)} coefficients match; first-generator s=2 display "
           f"{sum(s12)}/{len(s12)} as printed, {sum(s12_halved)}/{len(s12_halved)} after halving; {elapsed:.1f}s")
    assert all(s2) and all(s12_halved) and all(ok for l in halved for *_, ok in halved[l])
    assert elapsed < 10
    if not literal:
        pytest.xfail("the printed first-generator s=2 display is twice the value for σ₁ = (x²+y²)/2; "
                     "see the decisions ledger")


# 2 ------------------------------------------------------------------------

def test_criterion_2_roundtrip(capsys):
    t0 = time.perf_counter()
    results = {}
    for k, spec in enumerate(["C2", "C3", "C4", "D3", "D4", "C2*C2"]):
        results[spec] = roundtrip(parse_group_spec(spec), 200, SEED + k, 12, ps=(1, 2))
    elapsed = time.perf_counter() - t0
    ok = all(r.ok for r in results.values()) and elapsed < 60
    detail = ", ".join(f"{s} {r.passed}/{r.trials}" for s, r in results.items())
    report(capsys, 2, ok, f"{detail}; {elapsed:.1f}s")
    assert ok, {s: r.failure for s, r in results.items() if not r.ok}


# 3 ------------------------------------------------------------------------

def _random_f(rng, p, n):
    v = rng.choice([k for k in range(1, 7) if k % n])
    monos = [e for e in itertools.product(range(v + 3), repeat=p) if v <= sum(e) <= v + 2]
    lead = [e for e in monos if sum(e) == v]
    terms = {rng.choice(lead): mpq(rng.choice((-3, -2, -1, 1, 2, 3)), rng.choice((1, 2)))}
    for e in monos:
        if e not in terms and rng.random() < 0.5:
            terms[e] = mpq(rng.randint(-3, 3), rng.choice((1, 2)))
    return Poly.from_dict(p, terms)


def test_criterion_3_refutation(capsys):
    rng = random.Random(SEED + 3)
    t0 = time.perf_counter()
    agree = total = 0
    for n in (2, 3):
        sys = make_cyclic(n)
        for k in range(100):
            f = _random_f(rng, 1 + k % 2, n)
            oracle = f.low_degree() % n != 0
            rep = check_liftable(FormalMorphism.from_polys(sys, [f], 12))
            agree += (rep.verdict == NOT_LIFTABLE) == oracle
            total += 1
    brute = 0
    for k in range(20):
        n = 2 + k % 2
        f = _random_f(rng, 1, n)
        rep = lift(FormalMorphism.from_polys(make_cyclic(n), [f], 8))
        coeffs = [f.to_dict().get((d,), 0) for d in range(f.degree() + 1)]
        brute += rep.verdict == NOT_LIFTABLE and not cyclic_power_solvable(n, coeffs, 8)
    elapsed = time.perf_counter() - t0
    ok = agree == total and brute == 20 and elapsed < 30
    report(capsys, 3, ok, f"valuation oracle {agree}/{total}; brute force to order 8 {brute}/20; {elapsed:.1f}s")
    assert ok


# 4 ------------------------------------------------------------------------

def test_criterion_4_master_consistency(capsys):
    # p = 1 germs are evaluated as exact polynomials (any base point); p = 2 germs as
    # series at a regular base point, compared to the reliable order of the value
    d3 = make_dihedral(3)
    rng = random.Random(SEED + 4)
    t0 = time.perf_counter()
    checked = good = trials = 0
    while trials < 500:
        p = 1 + trials % 2
        F = random_poly_map(rng, 2, p, max_degree=3, min_degree=0)
        f = [s.compose(F) for s in d3.sigma]
        D = d3.delta.compose(f)
        if D.is_zero() or (p == 2 and D.constant() == 0):
            continue
        trials += 1
        if p == 2:
            F = [Series.from_poly(x, 6) for x in F]
            f = [Series.from_poly(x, 6) for x in f]
        ev = JetEvaluator(d3, f)
        As = multi_indices(p, 2, include_empty=True)
        for j in (1, 2):
            d = d3.degrees[j - 1]
            for _ in range(2):
                prof = [rng.choice(As) for _ in range(d)]
                got = ev.S(j, prof)
                want = polarize(d3.sigma[j - 1], [[derive_poly(Fi, A) for Fi in F] for A in prof])
                checked += 1
                good += got == want if p == 1 else got.agrees(want)
    elapsed = time.perf_counter() - t0
    ok = good == checked and elapsed < 60
    report(capsys, 4, ok, f"{good}/{checked} profiles over {trials} random germs agree exactly; {elapsed:.1f}s")
    assert ok


# 5 ------------------------------------------------------------------------

def _ptilde(ev, tau, p, q):
    As = multi_indices(p, q, include_empty=True)
    out = {}
    for combo in itertools.combinations_with_replacement(As, tau.degree()):
        prof = canonical_profile(combo)
        mult = _multiplicity(prof)
        out[prof] = ev.frakT(tau, prof) * mult
    return out


def _multiplicity(prof):
    from invlift.jets import profile_multiplicity
    return profile_multiplicity(prof)


def _padd(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + v if k in out else v
    return out


def _pmul(a, b):
    out = {}
    for (ka, va), (kb, vb) in itertools.product(a.items(), b.items()):
        key = canonical_profile(list(ka) + list(kb))
        out[key] = out[key] + va * vb if key in out else va * vb
    return out


def _psame(a, b):
    # missing keys count as zero; series values compare to their reliable order
    for k in set(a) | set(b):
        x, y = a.get(k), b.get(k)
        if x is None or y is None:
            if not (x if y is None else y).is_zero():
                return False
        elif not (x == y if isinstance(x, Poly) else x.agrees(y)):
            return False
    return True


def test_criterion_5_ptilde_algebra(capsys):
    # (p, q) = (1, 1) runs on exact polynomials; the other cases on exact series at a
    # regular base point, which keeps the two-variable and q = 2 jets cheap
    d3 = make_dihedral(3)
    s1, s2 = d3.sigma
    rng = random.Random(SEED + 5)
    t0 = time.perf_counter()
    add_ok = mul_ok = count = 0
    while count < 50:
        p, q = ((1, 1), (2, 1), (1, 2))[count % 3]
        F = random_poly_map(rng, 2, p, max_degree=2, min_degree=0)
        f = [s.compose(F) for s in d3.sigma]
        D = d3.delta.compose(f)
        if D.is_zero() or ((p, q) != (1, 1) and D.constant() == 0):
            continue
        count += 1
        if (p, q) != (1, 1):
            f = [Series.from_poly(x, 4) for x in f]
        ev = JetEvaluator(d3, f)
        P1, P2 = _ptilde(ev, s1, p, q), _ptilde(ev, s2, p, q)
        c = mpq(rng.choice((-3, -1, 2)), 2)
        lhs = _ptilde(ev, s1 ** 3 + s2 ** 2 * c, p, q)
        rhs = _padd(_ptilde(ev, s1 ** 3, p, q), {k: v * c for k, v in _ptilde(ev, s2 ** 2, p, q).items()})
        add_ok += _psame(lhs, rhs)
        mul_ok += _psame(_ptilde(ev, s1 * s2, p, q), _pmul(P1, P2))
    elapsed = time.perf_counter() - t0
    ok = add_ok == mul_ok == 50
    report(capsys, 5, ok, f"additivity {add_ok}/50, multiplicativity {mul_ok}/50 (exact rational); {elapsed:.1f}s")
    assert ok


# 6 ------------------------------------------------------------------------

def test_criterion_6_regularity(capsys):
    specs = ["C2", "C3", "C4", "D3", "D4", "D5", "C2*C2", "C2*D3"]
    failures = []
    entries = 0
    checks = 0
    for spec in specs:
        tab = jet_table(parse_group_spec(spec))
        try:
            tab.ensure_order(3)
        except InvariancePostconditionFailed as exc:
            failures.append(f"{spec}: {exc}")
            continue
        for I, R in tab.reg.items():
            if 1 <= len(I) <= 3:
                entries += 1
                if not all(isinstance(x, Poly) for x in R):
                    failures.append(f"{spec} {I!r}")
        checks += tab.checks
    ok = not failures
    report(capsys, 6, ok, f"{entries} regularized derivatives over {len(specs)} groups are polynomials; "
                          f"{checks} construction checks, {len(failures)} failures")
    assert ok, failures


# 7 ------------------------------------------------------------------------

def test_criterion_7_global_polynomial(capsys):
    rng = random.Random(SEED + 7)
    t0 = time.perf_counter()
    good = {}
    for spec in ("C2", "D3"):
        sys = parse_group_spec(spec)
        hits = count = 0
        while count < 50:
            p = 1 + count % 2
            F = random_poly_map(rng, sys.n, p, max_degree=rng.randint(1, 3), min_degree=0)
            f = [s.compose(F) for s in sys.sigma]
            if sys.delta.compose(f).is_zero():
                continue
            count += 1
            rep = lift_global_polynomial(FormalMorphism.from_polys(sys, f, 3))
            if rep.verdict != LIFTED:
                continue
            G = [x.to_poly() for x in rep.lift]
            exact = [s.compose(G) for s in sys.sigma] == f
            hits += exact and rep.q_used == max(P.degree() for P in F)
        good[spec] = hits
    elapsed = time.perf_counter() - t0
    ok = all(v == 50 for v in good.values())
    report(capsys, 7, ok, ", ".join(f"{s} {v}/50" for s, v in good.items())
           + f" exact polynomial lifts with certificate q = deg F; {elapsed:.1f}s")
    assert ok


# 8 ------------------------------------------------------------------------

def test_criterion_8_dual_path(capsys):
    rng = random.Random(SEED + 8)
    t0 = time.perf_counter()
    verdicts = lifts = both = 0
    for k in range(100):
        n = 2 if k % 2 == 0 else 3
        sys = make_cyclic(n)
        p = 2 if n == 2 and k % 4 == 0 else 1
        kind = k % 5
        if kind < 3:
            F = random_poly_map(rng, 1, p, max_degree=3, min_degree=0 if kind == 0 else 1)
            f = [s.compose(F) for s in sys.sigma]
        else:
            f = [_random_f(rng, p, n) if kind == 3 else random_poly_map(rng, 1, p, max_degree=3)[0]]
        fm = FormalMorphism.from_polys(sys, f, 8)
        a, b = lift(fm, path="closed-form"), lift(fm, path="general")
        verdicts += a.verdict == b.verdict
        if a.verdict == b.verdict == LIFTED:
            both += 1
            lifts += orbit_match(sys, a.lift, b.lift, 8) is not None
    elapsed = time.perf_counter() - t0
    ok = verdicts == 100 and lifts == both
    report(capsys, 8, ok, f"verdicts agree {verdicts}/100; lifts agree up to the group {lifts}/{both}; "
                          f"{elapsed:.1f}s")
    assert ok
