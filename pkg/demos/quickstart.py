"""
==========
Quickstart
==========

A map ``f`` into the orbit space of a finite group ``G`` is a tuple of power
series, one per basic invariant ``σ_j``.  A *lift* is a germ ``F`` with
``σ∘F = f``.  This script decides and builds lifts for the cyclic group of
order two, whose single invariant is ``σ₁ = x²``.
"""

# %%
# Square roots as lifts
# ---------------------
#
# For ``C2`` a lift of ``f`` is a square root.  ``X1^2*(1+X1)`` has one:
# ``X1·(1+X1)^{1/2}``, whose coefficients are binomial.

from invlift import LIFTED, FormalMorphism, check_liftable, lift, make_cyclic, parse_poly

c2 = make_cyclic(2)
f = parse_poly("X1^2*(1+X1)", ["X1"])
rep = lift(FormalMorphism.from_polys(c2, [f], 6))
print(rep.verdict)
print("F1 =", rep.lift[0].to_string(["X1"]))

# %%
# The answer is only fixed up to the group: ``-F`` lifts ``f`` too.
# ``canonical=True`` picks the representative whose first nonzero
# coefficient is smallest.

rep = lift(FormalMorphism.from_polys(c2, [f], 6), canonical=True)
print("canonical F1 =", rep.lift[0].to_string(["X1"]))

# %%
# A refutation
# ------------
#
# ``f = X1`` vanishes to odd order, so no square root exists.  The general
# criterion reports where it breaks down: a jet entry that should be a
# polynomial in the derivatives of ``f`` has a pole instead.

rep = check_liftable(FormalMorphism.from_polys(c2, [parse_poly("X1", ["X1"])], 6), path="general")
print(rep.verdict, rep.witness)

# %%
# Two source variables
# --------------------
#
# Nothing changes when the source has more variables.  Here ``f`` is the
# square of a polynomial, so the lift is exact to every order.

f2 = parse_poly("(X1 + X2^2)^2 + (X1 + X2^2)^3", ["X1", "X2"])
rep = lift(FormalMorphism.from_polys(c2, [f2], 5))
assert rep.verdict == LIFTED
print("F1 =", rep.lift[0].to_string(["X1", "X2"]))
