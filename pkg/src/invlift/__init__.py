"""Lifting formal and polynomial maps through orbit spaces of finite groups."""

from .groups import make_custom, make_cyclic, make_dihedral, make_product, make_trivial, orbit_match, parse_group_spec
from .jets import JetEvaluator, compare_dihedral, first_order_tensor, jet_table
from .lifting import (
    LIFTED, NOT_LIFTABLE, NOT_QUASIREGULAR, UNDETERMINED, FormalMorphism, LiftReport, check_liftable,
    detect_quasiregular, lift, lift_global_polynomial,
)
from .series import Poly, Series, parse_poly, parse_series

__version__ = "0.1.0"
