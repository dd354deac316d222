"""Exact Futaki invariants, slice identities and slope invariants of Bott manifolds."""

from .bott import (
    BottFan,
    BottMatrix,
    canonical_kahler_class,
    fan_from_matrix,
    is_kahler_class,
    is_product_of_lines,
    moment_polytope,
    presentation_twist,
)
from .futaki import (
    futaki_component,
    futaki_pillar,
    futaki_vector,
    pillar_profile,
    product_split,
    scan_nonvanishing,
    slice_congruence,
)
from .polytope import (
    HalfSpace,
    HPolytope,
    axis_profiles,
    boundary_moment_first,
    boundary_volume,
    facet_measure,
    moment_first,
    slice_at,
    vertex_enumerate,
    volume,
)
from .poly import PiecewisePolynomial
from .slope import intersection_number, is_nef, mu_L, seshadri_constant, stability_report, xi_invariant

__version__ = "0.1.0"
