"""Flat transition data on finite region covers and its charged sectors.

Layers, bottom up: group values and path-ordered exponentials
(``groups``), covers / nerves / loop classes (``covers``), transition
cocycles, trivialization and potential lifts (``cocycles``), a small
fermionic net (``fock``), charged-sector transport on the Fock window
(``sectors``), and declarative scenario runs (``scenario``, ``cli``).
"""

from .groups import (
    ANTIHERM_TOL,
    GROUP_EQ_TOL,
    UNITARY_TOL,
    AntiHermitianUn,
    CyclicZn,
    FreeWord,
    GroupValue,
    LieValue,
    MatrixUn,
    PhaseU1,
    ScalarU1,
    VariantMismatch,
    compose,
    distance,
    identity_like,
    inverse,
    is_identity,
    isclose,
    path_ordered_exp,
    path_ordered_exp_subdivided,
    power,
    wrap_angle,
)
from .covers import (
    Cover,
    Edge,
    InvalidCover,
    InvalidPath,
    NerveGraph,
    Pi1Presentation,
    PosetPath,
    Step,
    Triple,
    abelianization_rank,
    annulus_cover,
    approximate_curve,
    build_nerve,
    builtin_cover,
    circle_cover,
    closed_triangle_cycles,
    disk_cover,
    empty_path,
    figure_eight_cover,
    free_h1_coordinates,
    generator_loop,
    loop_class,
    path_compose,
    path_reverse,
    pi1_presentation,
    relation_matrix,
    torus_cover,
)
from .cocycles import (
    COCYCLE_TOL,
    TRIANGLE_INT_TOL,
    CocycleCheck,
    CocycleInconsistent,
    FlatPotentialU1,
    InvalidPotential,
    MissingGenerator,
    SigmaMorphism,
    TransitionCocycle,
    TrivializationResult,
    WitnessLoop,
    check_cocycle,
    dress_cocycle,
    holonomy,
    identity_cocycle,
    lift_potential,
    lift_sum,
    transition_cocycle,
    trivialize,
    validate_sigma,
)
from .fock import (
    CAPACITY_MODES,
    CAR_TOL,
    CapacityError,
    FieldOp,
    FockSpace,
    GlueResult,
    MixedGrade,
    OneParticleSpace,
    SupportError,
    allocate_modes,
    anticommutator,
    commutator,
    field,
    gauge_action,
    glue_psi_A,
    grading,
    identity_op,
    nested_pair_residual,
    normal_commutation_check,
    smeared_field,
    twisted_local_field,
    twisted_product,
    zero_op,
)
from .sectors import (
    SECTOR_TOL,
    Classification,
    Implementer,
    MissingEntry,
    NotGaugeInvariant,
    SectorTransporter,
    TopologicalComponent,
    TransportEntry,
    WindowSubspace,
    charge_morphism,
    classify,
    coefficient_cocycle,
    coefficient_ratio_cocycle,
    dress_transporter,
    implementer,
    intertwining_residual,
    localization_residual,
    make_window,
    plain_transporter,
    rho_holonomy,
    rho_layer_transporter,
    telescope_residual,
    topological_component,
    transition_amplitude,
    triple_law_residual,
    twisted_transporter,
    z1,
    z_path,
)
from .scenario import (
    ScenarioConfig,
    ScenarioError,
    emit_report,
    load_scenario,
    parse_angle,
    parse_report,
    parse_scenario,
    run_scenario,
)

__version__ = "0.1.0"
