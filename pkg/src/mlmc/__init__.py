from .levels import (
    LevelDistribution,
    LevelDraw,
    tau,
    max_level,
    sample_level,
    sample_levels,
    draw_level,
    level_draw,
    used_length,
    expected_cost,
)
from .estimator import GradFn, partial_mean, mlmc_combine, mlmc_estimate, mixture_mean, mixture_mean_closed_form
from .batch import level_groups, truncated_mean_batch, mlmc_estimates_batch

__all__ = [
    "LevelDistribution", "LevelDraw", "tau", "max_level", "sample_level", "sample_levels", "draw_level",
    "level_draw", "used_length", "expected_cost",
    "GradFn", "partial_mean", "mlmc_combine", "mlmc_estimate", "mixture_mean", "mixture_mean_closed_form",
    "level_groups", "truncated_mean_batch", "mlmc_estimates_batch",
]
