"""Exact computation of interval-relative Betti numbers of persistence
modules on finite posets, by two independent routes (minimal interval
resolutions and Koszul-type complexes), with interval-decomposability
testing and interval replacement on commutative ladders."""

from intres.exactla import QQ, Field, Mat
from intres.poset import (
    BoundQuiver,
    Interval,
    Poset,
    cl_describe,
    cl_interval,
    cl_intervals,
    commutative_ladder,
    containment_poset,
    enumerate_intervals,
    interval_join,
    ladder_length,
)
from intres.repmod import (
    CommutativityError,
    DirectSum,
    ModMorphism,
    PersModule,
    cokernel,
    component_morphism,
    direct_sum,
    epi_exists_interval,
    epi_spanning_set,
    good_components,
    hom_basis,
    hom_dim,
    identity_morphism,
    image,
    interval_hom_basis,
    interval_module,
    kernel,
    mono_exists_interval,
    mono_spanning_set,
    morphism_from_columns,
    morphism_from_rows,
    zero_module,
    zero_morphism,
)
from intres.approx import (
    ApproxContext,
    compute_fint,
    compute_sint,
    index_sets,
    is_left_interval_approximation,
    is_right_interval_approximation,
    left_interval_approximation,
    minimal_left_approximation,
    minimal_right_approximation,
    minimize_left,
    minimize_right,
    refine_max_fint,
    refine_max_sint,
    right_interval_approximation,
)
from intres.resolve import (
    BettiTable,
    IntervalCoresolution,
    IntervalResolution,
    MaxLengthExceeded,
    betti,
    cobetti,
    minimal_interval_coresolution,
    minimal_interval_resolution,
)
from intres.koszul import (
    EndCategory,
    FunctorModule,
    IntervalCochain,
    LatticeModule,
    VecChain,
    betti_table_via_koszul,
    betti_via_koszul,
    build_end_category,
    build_lattice_gauge,
    formal_koszul_coresolution,
    koszul_complex,
    koszul_coresolution,
    lambda_module_of,
    lattice_module_from_persistence,
    min_proj_resolution,
    semilattice_koszul_complex,
    simple_module,
    validate_koszul_coresolution,
    with_cancelling_pair,
)
from intres.tda import (
    DecompositionResult,
    ReplacementVector,
    RouteMismatchError,
    beta0,
    compressed_multiplicity,
    interval_replacement,
    is_interval_decomposable,
    replacement_at,
    xi_assignment,
    xi_restriction,
    zigzag_interval_multiplicities,
    zigzag_quiver,
)
from intres.modfile import (
    ModuleFileError,
    interval_dim_rendering,
    interval_name,
    parse_field_token,
    parse_interval_spec,
    parse_module_file,
    parse_module_text,
    render_dim_vector,
    render_ladder_vector,
    serialize_module,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
