"""Exact cellular resolutions of monomial ideals from diced, sharp polytopes."""
from .diced_sharp import (
    is_diced,
    is_sharp_bruteforce,
    is_totally_sharp,
    is_totally_unimodular,
    polytope_label,
    sharp_cell,
    tu_polytope,
)
from .exact_geometry import (
    Halfspace,
    Polytope,
    convex_hull_vertices,
    facet_description,
    intersect,
    lattice_points,
    normalized_volume,
    polytope_from_inequalities,
)
from .minkowski import (
    MixedCellSpec,
    MixedSubdivision,
    SimplexSpec,
    builtin_fixtures,
    minkowski_sum,
    mixed_cell_polytope,
    resolve_mixed_subdivision,
    validate_mixed_subdivision,
    verify_corollary_hypotheses,
)
from .morse import (
    Matching,
    gradient_paths,
    is_acyclic_matching,
    lemma_main_matching,
    morse_complex,
    subdivision_matching,
)
from .polyhedral_complex import (
    FacePoset,
    Monomial,
    PolyComplex,
    build_XP,
    half_open_cube,
    interior_poset,
    restrict_complex,
)
from .resolution import (
    BettiTable,
    Field,
    MonomialIdeal,
    SimplicialComplex,
    betti_table,
    ideal_of_polytope,
    is_minimal,
    koszul_betti_oracle,
    order_complex,
    reduced_homology,
    verify_cellular_resolution,
)

__version__ = "0.1.0"
