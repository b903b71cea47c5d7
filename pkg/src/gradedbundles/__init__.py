"""Exact symbolic engine for graded bundles and weighted algebroids.

Everything is computed over the rationals; every structural claim (weight
homogeneity, functor laws, squares of structure fields, bracket degree laws,
reduction formulas) is decided as an exact polynomial identity.
"""

from .superalg import (
    Derivation,
    ParityMismatch,
    SuperPolynomial,
    Variable,
    apply,
    commutator,
    multiply,
    partial,
    partial_right,
    remap,
    render,
    substitute,
    weight_of,
)
from .bundle import (
    CoordinateSystem,
    GradedBundle,
    IllDefinedProjection,
    NTupleBundle,
    TransitionMap,
    ValidationReport,
    core_submanifold,
    project_leq,
    project_tower,
    single_chart_bundle,
    tangent_bundle,
    two_chart_bundle,
    validate,
    vertical_bundle,
    weight_vector_field,
)
from .linfun import (
    GLBundle,
    GradedMorphism,
    NonlinearFiber,
    NotSymmetric,
    WeightViolation,
    bundles_structurally_equal,
    compose_morphisms,
    embedding_compatibility,
    holonomic_embedding,
    identity_morphism,
    is_symmetric,
    linear_dual,
    linearise,
    linearise_morphism,
    mironian,
    mironian_report,
    pairing,
    parity_reverse,
    reconstruct,
    symmetry_report,
)
from .algebroid import (
    AlgebroidHamiltonian,
    AlgebroidSection,
    CoordinateMismatch,
    DegreeUnderflow,
    HomologicalField,
    MalformedQ,
    NotALinearisation,
    OddPhaseSpace,
    OddPoissonSpace,
    ProjectionObstruction,
    WeightedAlgebroid,
    algebroid_from_coefficients,
    anchor,
    check_weighted_algebroid,
    derived_bracket,
    epsilon_components,
    extract_coefficients,
    leibniz_check,
    p_from_q,
    q_from_p,
    restrict_to_A1,
    schouten,
    weighted_lie_algebra_check,
)
from .constructions import (
    AlgebroidData,
    PolynomialDiffeo,
    StructureConstants,
    TowerSection,
    abelian,
    complete_lift,
    cotangent_algebroid,
    cotangent_bundle,
    heisenberg3,
    higher_tangent,
    lie_tower,
    linear_poisson,
    point_algebroid,
    prolongation_algebroid,
    reduced_bracket,
    sl2,
    so3,
    tangent_algebroid,
    tm_algebroid,
    tower_section_from_polynomial,
    tower_section_polynomial,
)

__version__ = "0.1.0"
