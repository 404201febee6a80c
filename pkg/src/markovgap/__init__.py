"""Numerics for the gap between conditional mutual information and Renyi
divergence distances to quantum Markov states."""

from .formulas import (
    LN2,
    LOG_SQRT_4_3,
    antisym_cmi_binomial,
    antisym_cmi_exact,
    crossover_scan,
    decay_bound_check,
    half_point,
)
from .linalg import (
    SpectralDecomposition,
    SubsystemLayout,
    apply_spectral_function,
    compose_permutations,
    partial_trace,
    permutation_operator,
    permutation_sign,
    permute_subsystems,
    spectral_decompose,
    support_projector,
    tensor,
    tensor_many,
    trace_norm,
)
from .measures import (
    DivergenceValue,
    NaiveCmiWitness,
    cmi,
    conditional_entropy,
    fidelity,
    find_naive_cmi_witness,
    load_witness,
    min_relative_entropy,
    mutual_information,
    naive_renyi_cmi,
    purified_distance,
    relative_entropy,
    renyi_divergence,
    renyi_entropy,
    replay_witness,
    sandwiched_renyi_divergence,
    save_witness,
    sqrt_overlap_norm,
    von_neumann_entropy,
    zero_relative_entropy,
)
from .operators import CapExceededError, DensityOperator, PureStateVector, dim_cap
from .optimize import (
    DualityCheckRecord,
    OptimizationReport,
    SearchConfig,
    SeparationRecord,
    antisym_d0_lower,
    fidelity_markov_gap_upper,
    minimize_d0_over_werner,
    purified_duality_check,
    relent_markov_gap_upper,
    renyi_markov_gap_upper,
    separation_check,
    smoothed_d0_lower,
    support_twirl_certificate,
    tensor_power_d0_bounds,
    tensor_power_spec,
    uhlmann_fidelity,
)
from .report import (
    PropertyResult,
    RunConfig,
    TableRow,
    run_property_suite,
    run_table,
    suite_report,
    table_rows,
)
from .rng import SplitMix64, derive, haar_unitary, mix64
from .states import (
    MarkovBlock,
    MarkovSpec,
    QuantumChannel,
    WernerParameter,
    antisym_projector,
    antisym_state,
    build_markov_state,
    ghz_state,
    is_markov_state,
    maximally_entangled_state,
    purify,
    random_cptp,
    random_density,
    random_pure_state,
    random_unitary,
    swap_operator,
    uniform_antisym_state,
    uu_twirl,
    werner_state,
)

__version__ = "0.1.0"
