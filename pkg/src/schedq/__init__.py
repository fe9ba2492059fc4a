"""schedq: a laboratory for single-server queues fed by scheduled arrivals.

Customer ``n`` is scheduled at time ``n`` but arrives at ``n + xi_n``; this
package simulates such streams, computes the exact and asymptotic tails of
the Bernoulli-sum counts they generate, and measures the slow workload
growth laws of the critically loaded and heavily loaded queue.
"""
from .perturbation import (
    Degenerate,
    PerturbationModel,
    TailParams,
    TwoSidedExp,
    TwoSidedPareto,
    model_from_config,
    model_to_config,
)
from .bernoulli_tail import (
    ParamSeq,
    PowerLawDescriptor,
    TailConstants,
    TailEstimate,
    TailProfile,
    TruncationError,
    asymp_tail_general,
    asymp_tail_power,
    chernoff_bound,
    eta_star,
    exact_tail,
    exact_tail_profile,
    gamma_const,
    log_tail_slope,
    power_law_constants,
    psi_and_derivatives,
    solve_r_star,
)
from .traffic import (
    ArrivalPath,
    MarginError,
    conditional_cov,
    count,
    decomposition_residual,
    early_late,
    generate_path,
    sample_limit_rv,
    scan_pad,
)
from .workload import (
    ServiceSpec,
    WorkloadTrace,
    steady_workload_sample,
    sup_centered_diff,
    workload,
)
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    ExperimentResult,
    run,
    summarize,
)

__version__ = "0.1.0"
