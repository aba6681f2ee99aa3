import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from src.core.errors import DomainError, LengthError
from src.core.records import ParamVector
from .levels import LevelDistribution, LevelDraw, level_draw, max_level, tau


@dataclass(frozen=True)
class GradFn:
    """
    The update function H_theta(x) together with its sup-norm bound G.

    Every evaluation is clipped entrywise to [-G, G]. With ``vectorized=True`` the wrapped
    function is called once on a whole array of states (leading axes are batch axes) and must
    return an array with a trailing axis of size d; otherwise it is called state by state.
    """
    fn: Callable[[ParamVector, Any], np.ndarray]
    bound: float
    vectorized: bool = False

    def __post_init__(self):
        if not self.bound > 0.0:
            raise DomainError(f"gradient bound G must be positive, got {self.bound}")

    def __call__(self, theta: ParamVector, x) -> np.ndarray:
        value = np.atleast_1d(np.asarray(self.fn(theta, x), dtype=float))
        return np.clip(value, -self.bound, self.bound)

    def values(self, theta: ParamVector, states) -> np.ndarray:
        """H_theta on every state of a chain, shape (len, d)."""
        states = np.asarray(states)
        if self.vectorized:
            out = np.asarray(self.fn(theta, states), dtype=float)
            out = out.reshape(states.shape[0], -1)
        else:
            out = np.stack([np.atleast_1d(np.asarray(self.fn(theta, x), dtype=float)) for x in states])
        return np.clip(out, -self.bound, self.bound)


def _as_value_matrix(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DomainError(f"values must be a sequence of vectors, got shape {arr.shape}")
    return arr


def partial_mean(values, r: float) -> np.ndarray:
    """Mean of the first floor(r) vectors.

    Args:
        values: sequence of d-vectors (or scalars), shape (n, d)
        r (float): r >= 1

    Raises:
        DomainError: r < 1
        LengthError: fewer than floor(r) values
    """
    if r < 1:
        raise DomainError(f"partial mean needs r >= 1, got {r}")
    arr = _as_value_matrix(values)
    m = math.floor(r)
    if arr.shape[0] < m:
        raise LengthError(f"partial mean over {m} values requested, only {arr.shape[0]} available")
    head = arr[:m]
    return np.array([math.fsum(column) for column in head.T]) / m


def mlmc_combine(values, draw: LevelDraw, T: float) -> np.ndarray:
    """MLMC combination on precomputed H-values of one chain.

    values[0] + tau(K) * (mean of first floor(tau(K)) - mean of first floor(tau(K-1))), the
    correction only when floor(tau(K)) <= T.
    """
    arr = _as_value_matrix(values)
    if arr.shape[0] < 1:
        raise LengthError("the estimator needs at least one chain state")
    base = arr[0].copy()
    if draw.span > T:
        return base
    if not draw.tau_prev < draw.tau_k:
        raise DomainError(f"level spans must increase, got tau(K-1)={draw.tau_prev} >= tau(K)={draw.tau_k}")
    correction = partial_mean(arr, draw.tau_k) - partial_mean(arr, draw.tau_prev)
    return base + draw.tau_k * correction


def mlmc_estimate(grad: GradFn, theta: ParamVector, chain, draw: LevelDraw, T: float) -> tuple[np.ndarray, int]:
    """The MLMC estimate of the mean field at theta from one chain prefix.

    Only the first ``used_len`` states are read: floor(tau(K)) when the level is not truncated,
    otherwise just the first state.

    Returns:
        (estimate, used_len)

    Raises:
        LengthError: the chain is shorter than used_len
    """
    needed = draw.span if draw.span <= T else 1
    chain = np.asarray(chain)
    if chain.shape[0] < needed:
        raise LengthError(f"level {draw.level} needs {needed} chain states, got {chain.shape[0]}")
    values = grad.values(theta, chain[:needed])
    return mlmc_combine(values, draw, T), needed


def mixture_mean(grad: GradFn, theta: ParamVector, chain, dist: LevelDistribution, T: float) -> np.ndarray:
    """Average of the MLMC estimate over K ~ mu with the chain held fixed.

    Computed literally as sum_k mu(k) * estimate_k over the untruncated levels plus the mass of the
    truncated tail times H(X_1). Telescoping makes it equal to the plain mean over floor(tau(kmax))
    states (plus H(X_1) - mean over floor(tau(0)) states for a general mu).

    Raises:
        LengthError: chain shorter than floor(tau(kmax))
    """
    top = max_level(dist, T)
    needed = math.floor(tau(dist, top))
    chain = np.asarray(chain)
    if chain.shape[0] < needed:
        raise LengthError(f"mixture over levels 1..{top} needs {needed} chain states, got {chain.shape[0]}")

    values = grad.values(theta, chain[:needed])
    terms = [dist.pmf(k) * mlmc_combine(values, level_draw(dist, k, T), T) for k in range(1, top + 1)]
    terms.append(dist.tail(top) * values[0])
    stacked = np.stack(terms)
    return np.array([math.fsum(column) for column in stacked.T])


def mixture_mean_closed_form(values, dist: LevelDistribution, T: float) -> np.ndarray:
    """H(X_1) + mean over floor(tau(kmax)) - mean over floor(tau(0)), the telescoped mixture."""
    top = max_level(dist, T)
    arr = _as_value_matrix(values)
    return arr[0] + partial_mean(arr, tau(dist, top)) - partial_mean(arr, tau(dist, 0))
