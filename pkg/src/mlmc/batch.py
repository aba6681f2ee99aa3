"""Replicate-batched versions of the estimator, for studies over 10^5 independent chains.

Chains in one batch share the same level, so all of them have the same length; callers group
replicates by their sampled level first (``level_groups``).
"""
import math

import numpy as np

from src.core.errors import LengthError
from src.ui.logging import Logger
from .levels import LevelDraw

MLMC_CODENAME = 'MLMC   '

logger = Logger()
mlmc_logger = logger.get_logger(f'[red][{MLMC_CODENAME}][/]', False)


def level_groups(levels: np.ndarray) -> dict[int, np.ndarray]:
    """Replicate indices per distinct level, in increasing level order."""
    levels = np.asarray(levels)
    groups = {int(k): np.flatnonzero(levels == k) for k in np.unique(levels)}
    mlmc_logger.debug(f"{levels.size} replicates over {len(groups)} levels, deepest {max(groups, default=0)}")
    return groups


def truncated_mean_batch(values: np.ndarray, r: float) -> np.ndarray:
    """Mean of the first floor(r) states of every chain.

    Args:
        values (np.ndarray): H-values, shape (n_chains, length, d)
        r (float): r >= 1

    Returns:
        np.ndarray: shape (n_chains, d)
    """
    m = math.floor(r)
    if values.shape[1] < m:
        raise LengthError(f"mean over {m} states requested, chains hold {values.shape[1]}")
    return values[:, :m, :].mean(axis=1)


def mlmc_estimates_batch(values: np.ndarray, draw: LevelDraw, T: float) -> np.ndarray:
    """MLMC estimates for a batch of chains drawn at the same level.

    Matches ``mlmc_combine`` chain by chain up to summation order.
    """
    base = values[:, 0, :]
    if draw.span > T:
        return base.copy()
    correction = truncated_mean_batch(values, draw.tau_k) - truncated_mean_batch(values, draw.tau_prev)
    return base + draw.tau_k * correction
