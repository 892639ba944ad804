"""
=============================
Jets over the dihedral groups
=============================

The dihedral group of order six acts on the plane with invariants
``σ₁ = (x²+y²)/2`` and ``σ₂ = (x³ − 3xy²)/3``.  Its orbit space has a
discriminant ``Δ`` that vanishes on the images of the mirrors.  Lifting
is decided by a family of universal expressions in the jets of ``f``.
Each is a polynomial divided by a power of ``Δ``.  This script looks at the
table behind those expressions.
"""

# %%
# The table
# ---------
#
# Entries are built lazily and cached per group.  Every regularized entry is
# checked to be a polynomial in the orbit-space coordinates ``W``.

from invlift import FormalMorphism, compare_dihedral, first_order_tensor, jet_table, lift, make_dihedral, parse_poly

d3 = make_dihedral(3)
tab = jet_table(d3)
tab.ensure_order(1)
print(len(tab.reg), "regularized entries up to order 1")

# %%
# The classical closed forms
# --------------------------
#
# The first-order entries have well-known closed forms for every ``l``.
# ``compare_dihedral`` checks them coefficient by coefficient against the
# table.  With ``printed=False`` the ``σ₁`` quadratic form is halved, which is
# the normalization that matches ``σ₁ = (x²+y²)/2``.

for l in (3, 4, 5):
    rows = compare_dihedral(l, printed=False)
    print(f"l = {l}: {sum(ok for *_, ok in rows)}/{len(rows)} coefficients agree")

# %%
# First-order conditions
# ----------------------
#
# The tensors of order one give cheap necessary conditions.  A condition
# fails when an entry that must be a polynomial leaves a remainder.  For
# ``f = (X, X)`` the quadratic condition on ``σ₁`` already fails.

from invlift.series import NotDivisible

f = [parse_poly("X1", ["X1"]), parse_poly("X1", ["X1"])]
for j, s in ((1, 1), (1, 2), (2, 1)):
    try:
        first_order_tensor(d3, f, j, s)
        print(f"j={j} s={s} pass")
    except NotDivisible:
        print(f"j={j} s={s} fail")


# %%
# A germ through a regular point
# ------------------------------
#
# Away from the mirrors the orbit map is a local diffeomorphism.  Lifting is
# then always possible and the construction loses no order.

f = [parse_poly("(1+X1)^2/2 + X2^2/2", ["X1", "X2"]), parse_poly("(1+X1)^3/3 - (1+X1)*X2^2", ["X1", "X2"])]
rep = lift(FormalMorphism.from_polys(d3, f, 4), canonical=True)
print(rep.verdict)
for k, F in enumerate(rep.lift, start=1):
    print(f"F{k} =", F.to_string(["X1", "X2"]))
