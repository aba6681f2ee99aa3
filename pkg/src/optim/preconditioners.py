import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.config.config import DEFAULT_DELTA, DEFAULT_RHO1, DEFAULT_RHO2
from src.core.errors import ConfigurationError, DomainError


class OptimizerKind(Enum):
    IDENTITY = "identity"
    ADAGRAD = "adagrad"
    AMSGRAD = "amsgrad"


@dataclass(frozen=True)
class OptimizerConfig:
    """
    Which preconditioner drives the loop.

    ``identity`` is the generic preconditioned loop with A_n = I; ``lam_lower_exp`` and
    ``lam_upper_exp`` describe the spectral bounds lambda_n ~ n^-lam_lower, n^lam_upper assumed for
    it. ``rho1``, ``rho2`` and ``delta`` only matter for AMSGrad.
    """
    kind: OptimizerKind = OptimizerKind.AMSGRAD
    rho1: float = DEFAULT_RHO1
    rho2: float = DEFAULT_RHO2
    delta: float = DEFAULT_DELTA
    lam_lower_exp: float = 0.0
    lam_upper_exp: float = 0.0

    def violations(self) -> list[tuple[str, str]]:
        """(condition, message) pairs for out-of-range optimizer constants."""
        found = []
        if self.kind is OptimizerKind.AMSGRAD:
            if not 0.0 <= self.rho1 < 1.0:
                found.append(("0 <= rho1 < 1", f"got rho1={self.rho1}"))
            if not 0.0 <= self.rho2 < 1.0:
                found.append(("0 <= rho2 < 1", f"got rho2={self.rho2}"))
            if not self.delta > 0.0:
                found.append(("delta > 0", f"got delta={self.delta}"))
        return found


@dataclass(frozen=True)
class AdagradState:
    """Running sum of clipped squared estimate entries and the number of estimates seen."""
    accum: np.ndarray
    count: int = 0

    @classmethod
    def initial(cls, dim: int) -> "AdagradState":
        return cls(np.zeros(dim), 0)


def adagrad_update(state: AdagradState, estimate, eps_np1: float, M_n: float) -> tuple[np.ndarray, AdagradState]:
    """Fold one estimate into the accumulator and return the new diagonal of A_n.

    accum' = accum + min(estimate^2, M_n^2);  A = (eps_{n+1}^-2 + accum' / (count + 1))^-1/2.
    """
    if not eps_np1 > 0.0 or not M_n > 0.0:
        raise DomainError(f"Adagrad needs eps > 0 and M > 0, got eps={eps_np1}, M={M_n}")
    estimate = np.asarray(estimate, dtype=float)
    accum = state.accum + np.minimum(estimate * estimate, M_n * M_n)
    count = state.count + 1
    A = (eps_np1 ** -2 + accum / count) ** -0.5
    return A, AdagradState(accum, count)


def adagrad_lower_eps(n: int, eps_np1: float, sup_M_sq: float) -> float:
    """Lower spectral sequence of MLMC-Adagrad: eps_1 at n = 0, (eps_{n+1}^-2 + sup M^2)^-1/2 after."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n == 0:
        return eps_np1
    return (eps_np1 ** -2 + sup_M_sq) ** -0.5


@dataclass(frozen=True)
class AmsgradState:
    """
    AMSGrad moments: first-moment EMA ``m``, clipped second-moment EMA ``W`` and its running
    entrywise max ``W_hat``. ``last_eps`` is the regularizer of the previous update; the sequence
    must not decrease.
    """
    m: np.ndarray
    W: np.ndarray
    W_hat: np.ndarray
    rho1: float = DEFAULT_RHO1
    rho2: float = DEFAULT_RHO2
    delta: float = DEFAULT_DELTA
    last_eps: float = 0.0

    @classmethod
    def initial(cls, dim: int, rho1: float = DEFAULT_RHO1, rho2: float = DEFAULT_RHO2, delta: float = DEFAULT_DELTA) -> "AmsgradState":
        if not (0.0 <= rho1 < 1.0 and 0.0 <= rho2 < 1.0 and delta > 0.0):
            raise DomainError(f"AMSGrad needs rho1, rho2 in [0, 1) and delta > 0, got {rho1}, {rho2}, {delta}")
        return cls(np.zeros(dim), np.zeros(dim), np.zeros(dim), rho1, rho2, delta)

    @property
    def diag(self) -> np.ndarray:
        return (self.delta + self.W_hat) ** -0.5


def amsgrad_update(state: AmsgradState, estimate, eps_np1: float) -> tuple[np.ndarray, np.ndarray, AmsgradState]:
    """One AMSGrad update.

    m' = rho1 m + (1 - rho1) H;  W' = rho2 W + (1 - rho2) min(eps_{n+1}, H^2);
    W_hat' = max(W_hat, W');  A = (delta + W_hat')^-1/2.  The iterate moves along A * m'.

    Returns:
        (A_diag, m', state')

    Raises:
        ConfigurationError: eps_np1 smaller than the previous regularizer
    """
    if eps_np1 < state.last_eps:
        raise ConfigurationError(f"eps must be non-decreasing, got {eps_np1} after {state.last_eps}")
    estimate = np.asarray(estimate, dtype=float)
    m = state.rho1 * state.m + (1.0 - state.rho1) * estimate
    W = state.rho2 * state.W + (1.0 - state.rho2) * np.minimum(eps_np1, estimate * estimate)
    W_hat = np.maximum(state.W_hat, W)
    new_state = AmsgradState(m, W, W_hat, state.rho1, state.rho2, state.delta, eps_np1)
    return new_state.diag, m, new_state


def amsgrad_lower_eps(n: int, delta: float, eps_n: float, rho2: float) -> float:
    """Lower spectral sequence of MLMC-AMSGrad: 0 at n = 0, 1/sqrt(delta + eps_n (1 - rho2^n)) after."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0.0
    return 1.0 / math.sqrt(delta + eps_n * (1.0 - rho2 ** n))
