from .moments import (
    Sampler,
    MomentReport,
    replicate_sampler,
    mlmc_sampler,
    conditional_sampler,
    estimate_bias,
    estimate_moment,
    moment_study,
)
from .fitting import SlopeFit, fit_loglog, fit_affine, psi, phi, rate_reference, rate_envelope
from .bounds import AmsgradConstants, amsgrad_constants, amsgrad_rate_bound

__all__ = [
    "Sampler", "MomentReport", "replicate_sampler", "mlmc_sampler", "conditional_sampler", "estimate_bias",
    "estimate_moment", "moment_study",
    "SlopeFit", "fit_loglog", "fit_affine", "psi", "phi", "rate_reference", "rate_envelope",
    "AmsgradConstants", "amsgrad_constants", "amsgrad_rate_bound",
]
