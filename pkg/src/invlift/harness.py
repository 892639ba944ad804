"""Seeded random inputs and the round-trip property."""

from __future__ import annotations

import random
from dataclasses import dataclass

from gmpy2 import mpq

from .groups import InvariantSystem, orbit_match
from .lifting import LIFTED, FormalMorphism, LiftReport, lift
from .series import Poly, Series

__all__ = ["random_coefficient", "random_poly_map", "RoundTripResult", "roundtrip_once", "roundtrip"]


def random_coefficient(rng: random.Random) -> mpq:
    """Uniform over {−3..3}/{1,2}."""
    return mpq(rng.randint(-3, 3), rng.choice((1, 2)))


def random_poly_map(rng: random.Random, n: int, p: int, *, max_degree: int = 3, min_degree: int = 1,
                    density: float = 0.7) -> list:
    """n random polynomials in p variables with monomials of degree ``min_degree..max_degree``.

    Components are forced nonzero so that every map has valuation ≥ ``min_degree``.
    """
    monos = []
    for total in range(min_degree, max_degree + 1):
        monos.extend(_exponents(p, total))
    out = []
    for _ in range(n):
        terms = {}
        for e in monos:
            if rng.random() < density:
                c = random_coefficient(rng)
                if c:
                    terms[e] = c
        if not terms:
            terms[monos[rng.randrange(len(monos))]] = mpq(rng.choice((-3, -2, -1, 1, 2, 3)), rng.choice((1, 2)))
        out.append(Poly.from_dict(p, terms))
    return out


def _exponents(p: int, total: int):
    if p == 1:
        return [(total,)]
    return [(k,) + rest for k in range(total, -1, -1) for rest in _exponents(p - 1, total - k)]


@dataclass
class RoundTripResult:
    passed: int
    trials: int
    failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.passed == self.trials


def roundtrip_once(sys: InvariantSystem, F: list, order: int, path: str = "auto") -> tuple:
    """Lift ``σ∘F`` and match the result against F; returns ``(ok, report, g)``."""
    f = [s.compose(F) for s in sys.sigma]
    rep: LiftReport = lift(FormalMorphism.from_polys(sys, f, order), path=path)
    if rep.verdict != LIFTED:
        return False, rep, None
    target = [Series.from_poly(P, order) for P in F]
    g = orbit_match(sys, rep.lift, target, order)
    return g is not None, rep, g


def roundtrip(sys: InvariantSystem, trials: int, seed: int, order: int, *, ps=(1, 2), max_degree: int = 3,
              path: str = "auto") -> RoundTripResult:
    rng = random.Random(seed)
    passed = 0
    failure = None
    for k in range(trials):
        p = ps[k % len(ps)]
        F = random_poly_map(rng, sys.n, p, max_degree=max_degree)
        ok, rep, _ = roundtrip_once(sys, F, order, path)
        if ok:
            passed += 1
        elif failure is None:
            failure = {"trial": k, "p": p, "F": [P.to_string(prefix="X") for P in F], "verdict": rep.verdict}
    return RoundTripResult(passed, trials, failure)
