import math
from dataclasses import dataclass

import numpy as np

from src.core.errors import DomainError
from src.core.rng import RngStream
from .preconditioners import OptimizerConfig, OptimizerKind, adagrad_lower_eps, amsgrad_lower_eps
from .schedules import ScheduleSpec, schedule_eval


@dataclass(frozen=True, eq=False)
class IterateSelector:
    """
    Law of the randomized iterate R on {0..N}: P[R = n] = gamma_{n+1} lambda_{n+1} / varpi.

    Zero weights are allowed (the AMSGrad sequence starts at 0) as long as varpi > 0.
    """
    weights: np.ndarray
    varpi: float
    probabilities: np.ndarray

    @property
    def horizon(self) -> int:
        return self.weights.size - 1


def build_selector(gammas, lambdas) -> IterateSelector:
    """Selector from gamma_1..gamma_{N+1} and lambda_1..lambda_{N+1}.

    Raises:
        DomainError: mismatched lengths, negative weights or varpi = 0
    """
    gammas = np.asarray(gammas, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    if gammas.shape != lambdas.shape or gammas.ndim != 1 or gammas.size == 0:
        raise DomainError("gammas and lambdas must be 1-D sequences of the same positive length")
    weights = gammas * lambdas
    if np.any(weights < 0.0) or not np.all(np.isfinite(weights)):
        raise DomainError("selector weights must be finite and non-negative")
    varpi = math.fsum(weights)
    if not varpi > 0.0:
        raise DomainError("selector weights sum to zero")
    probabilities = weights / varpi
    probabilities = probabilities / probabilities.sum()
    return IterateSelector(weights, varpi, probabilities)


def selector_lambdas(optimizer: OptimizerConfig, schedule: ScheduleSpec, N: int) -> np.ndarray:
    """lambda_1..lambda_{N+1} for the optimizer's convergence bound.

    identity: lambda_n = n^-lam_lower. Adagrad and AMSGrad use the shifted lower sequence
    lambda_n = eps_lower_{n-1}, so the weight of iterate n is gamma_{n+1} * eps_lower_n.
    """
    n = np.arange(1, N + 2)
    if optimizer.kind is OptimizerKind.IDENTITY:
        return n.astype(float) ** (-optimizer.lam_lower_exp)

    lambdas = np.empty(N + 1)
    if optimizer.kind is OptimizerKind.ADAGRAD:
        sup_m_sq = 0.0
        for m in range(N + 1):
            # eps_lower_m needs sup_{i <= m-1} M_i^2, with M_i = C_M (i+1)^M
            if m >= 1:
                sup_m_sq = max(sup_m_sq, schedule_eval(schedule, m).M_prev ** 2)
            lambdas[m] = adagrad_lower_eps(m, schedule_eval(schedule, m + 1).eps, sup_m_sq)
        return lambdas

    for m in range(N + 1):
        eps_m = schedule_eval(schedule, m).eps if m >= 1 else 0.0
        lambdas[m] = amsgrad_lower_eps(m, optimizer.delta, eps_m, optimizer.rho2)
    return lambdas


def selector_for(optimizer: OptimizerConfig, schedule: ScheduleSpec, N: int) -> IterateSelector:
    """The selector of a run of N iterations."""
    gammas = np.array([schedule_eval(schedule, n).gamma for n in range(1, N + 2)])
    return build_selector(gammas, selector_lambdas(optimizer, schedule, N))


def select_random_iterate(sel: IterateSelector, stream: RngStream) -> int:
    """Draw R with P[R = n] = weights[n] / varpi."""
    return int(stream.choice(sel.probabilities.size, p=sel.probabilities))


def select_random_iterates(sel: IterateSelector, stream: RngStream, size: int) -> np.ndarray:
    """``size`` independent draws of R."""
    return np.asarray(stream.choice(sel.probabilities.size, p=sel.probabilities, size=size), dtype=np.int64)


def expected_at_random_iterate(sel: IterateSelector, values) -> float:
    """E[values[R]] = sum_n P[R = n] values[n]."""
    values = np.asarray(values, dtype=float)
    if values.shape != sel.probabilities.shape:
        raise DomainError(f"need one value per iterate ({sel.probabilities.size}), got {values.size}")
    return math.fsum(sel.probabilities * values)
