from .models import (
    LatentModelSpec,
    linear_gaussian_model,
    posterior_model,
    exact_marginal_grad_linear_gaussian,
    log_marginal_linear_gaussian,
)
from .estimators import (
    WeightedParticleSet,
    normalize_log_weights,
    snis_gradient,
    sir_step,
    mlmc_iwae_at_level,
    mlmc_iwae_gradient,
    plain_iwae_gradient,
    iwae_bound,
    iwae_bound_batch,
    plain_iwae_gradient_batch,
    sir_chains,
    mlmc_iwae_gradient_batch,
)

__all__ = [
    "LatentModelSpec", "linear_gaussian_model", "posterior_model", "exact_marginal_grad_linear_gaussian",
    "log_marginal_linear_gaussian",
    "WeightedParticleSet", "normalize_log_weights", "snis_gradient", "sir_step", "mlmc_iwae_at_level",
    "mlmc_iwae_gradient", "plain_iwae_gradient", "iwae_bound", "iwae_bound_batch", "plain_iwae_gradient_batch",
    "sir_chains", "mlmc_iwae_gradient_batch",
]
