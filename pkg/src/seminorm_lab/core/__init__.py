"""Finite-dimensional seminorm machinery: pairs, K/J functionals, interpolation."""
from .decompositions import (
    FundamentalDecomposition,
    SumWitness,
    WitnessError,
    fundamental_bound_ratios,
    fundamental_decomposition,
    interpolated_l1_weights,
    j_method_upper_bound,
    log_damping,
    reiteration_spot_check,
    sum_characterization_witness,
)
from .functionals import (
    Decomposition,
    JSeminorm,
    KEnvelope,
    KResult,
    KSeminorm,
    j_functional,
    k_envelope,
    k_functional,
    k_functional_bruteforce,
    k_profile,
)
from .hardy import HardyResult, hardy_verify, random_step_function
from .interpolation import (
    InterpolationParams,
    InterpolationSeminorm,
    QuadratureToleranceError,
    SeminormEstimate,
    interpolation_seminorm,
    k_method_exact,
    k_method_nodes,
)
from .lorentz import integrated_rearrangement, rearrangement, rearrangement_and_lorentz
from .operators import (
    OperatorCheckReport,
    UnboundedOperatorError,
    operator_interpolation_check,
    operator_seminorm_bound,
)
from .quadrature import QuadratureGrid, gauss_legendre_log
from .seminorms import (
    FiniteSeminorm,
    GridSeminorm,
    MaxSeminorm,
    ScaledSeminorm,
    WeightedNorm,
    WeightedSpacePair,
    l1,
    linf,
    sum_and_intersection_seminorms,
)
from .tables import pair_from_table, read_table, write_table
