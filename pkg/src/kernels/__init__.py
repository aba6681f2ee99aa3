from .targets import TargetDensity, gaussian_target, check_gradient
from .mcmc import (
    KernelKind,
    InitKind,
    ChainInit,
    MarkovKernelSpec,
    Trajectory,
    ChainBatch,
    default_proposal_scale,
    default_mala_step,
    rwmh_log_acceptance,
    mala_log_acceptance,
    rwmh_step,
    mala_step,
    simulate_chain,
    simulate_chains,
)
from .oracle import grid_distribution, transition_matrix_oracle, stationary_distribution, tv_decay

__all__ = [
    "TargetDensity", "gaussian_target", "check_gradient",
    "KernelKind", "InitKind", "ChainInit", "MarkovKernelSpec", "Trajectory", "ChainBatch",
    "default_proposal_scale", "default_mala_step", "rwmh_log_acceptance", "mala_log_acceptance",
    "rwmh_step", "mala_step", "simulate_chain", "simulate_chains",
    "grid_distribution", "transition_matrix_oracle", "stationary_distribution", "tv_decay",
]
