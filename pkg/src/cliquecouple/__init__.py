"""Coupling G(n,p) with random clique and F-copy hypergraphs, with exact oracles."""

from .conditional import (
    ConditionalQuery,
    HistoryConstraint,
    brute_force_conditional,
    conditional_probability,
    pi_lower_bound,
    q_statistic,
)
from .coupling import (
    CouplingConfig,
    CouplingResult,
    StepRecord,
    classify_step,
    derive_pi,
    diagnose_failure,
    is_sound,
    run_coupling,
    run_coupling_lazy_equivalence,
)
from .errors import (
    BudgetError,
    CapExceeded,
    CliqueCoupleError,
    ComponentTooLarge,
    ConfigError,
    ContractViolation,
    DivisibilityError,
    InvalidConstants,
    InvalidPattern,
    OutOfRange,
    ZeroProbabilityCondition,
)
from .graphs import (
    FCopy,
    PatternGraph,
    SimpleGraph,
    automorphism_count,
    classify_balance,
    complete_graph,
    cycle_graph,
    enumerate_copies,
    find_factor_direct,
    is_nice,
    load_pattern,
    one_density,
    sample_gnp,
    vertex_connectivity,
)
from .harness import ExperimentConfig, TrialRecord, run_experiment, schedule_parameters, threshold_scan
from .hypergraph import (
    FGraph,
    Hypergraph,
    classify_component,
    find_avoidable_configuration,
    find_clean_cycles,
    nullity,
    structure_report,
    underlying_graph,
)
from .matching import FactorCertificate, Matching, factor_via_coupling, perfect_matching, verify_certificate
from .oracles import (
    EnumerationSpec,
    LemmaReport,
    bound_MF,
    verify_bd_inequality,
    verify_lemma2,
    verify_lemma8,
    verify_mbd,
    verify_r3_exception,
)
from .rng import RandomStream, trial_stream

__version__ = "0.1.0"
