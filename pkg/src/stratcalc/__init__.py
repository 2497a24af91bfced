"""Stratification calculus on finite desk-scale spaces.

Finite topological spaces are stratified by open covers, refined toward
a cover-independent limit poset, mapped through commutative squares,
extended over cones where derivatives are decided numerically by a
rescaling conjugation, and fed into an exact-rational cochain complex
for presented Lie algebras of vector fields.
"""

__version__ = "0.1.0"

from .cones import CONE_APEX, ConeCoordinate, ConicalPoint, cone_coord, cone_map, cone_poset, gamma, gamma_inv
from .derive import (
    ConicalMapSpec,
    DerivativeReport,
    Piece,
    PiecewiseConeAction,
    closed_form_parametric,
    conjugate,
    constant_action,
    d_at_point,
    derive,
    identity_spec,
    nth_derivative,
    obvious_spec,
    parametric_spec,
    wrap_discrete,
)
from .errors import (
    InputError,
    InternalInvariantError,
    NumericError,
    StratcalcError,
    StructuralError,
    UnsupportedPrecisionError,
    ValidationError,
)
from .exprfn import ExprFunction
from .forms import (
    ComplexReport,
    KForm,
    LieAlgebraPresentation,
    abelian,
    bracket,
    ce_oracle,
    d_one_form,
    de_rham_complex,
    exterior_derivative,
    heisenberg,
    interior_product,
    lie_derivative,
    sl2,
    validate_lie,
    wedge,
)
from .refine import (
    ClassMap,
    RefinementPair,
    coarsening_from_refined,
    coarsening_surjection,
    is_refinement,
    maximal_cover,
    refined_poset,
    representative_section,
)
from .spaces import (
    FiniteSpace,
    PointMap,
    Poset,
    alexandroff_from_poset,
    check_continuity,
    discrete_space,
    generate_topology,
    identity_map,
    indiscrete_space,
    spec_zmod,
    specialization_preorder,
)
from .squares import (
    InducedSquare,
    RepresentativeSubspace,
    StratifiedMapSquare,
    alt_induce_g,
    check_square,
    choose_representatives,
    induce_g,
)
from .stratify import (
    Cover,
    HSignature,
    QuotientPoset,
    Stratification,
    h_map,
    identity_stratification,
    preorder_from_stratification,
    preorder_leq,
    preorder_to_partial_order,
    quotient_poset,
    standard_stratification,
    stratum_preimage_formula,
)
