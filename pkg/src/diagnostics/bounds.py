"""Closed-form constants of the MLMC-AMSGrad convergence bound, for plotting the bound next to runs.

Nothing at runtime depends on these numbers.
"""
import math
from dataclasses import dataclass

import numpy as np

from src.core.errors import DomainError
from src.optim.preconditioners import OptimizerConfig, OptimizerKind
from src.optim.schedules import ScheduleSpec, schedule_eval
from src.optim.selector import selector_for


@dataclass(frozen=True)
class AmsgradConstants:
    b0: float
    b1: float
    b2: float
    b3: float
    b4: float
    rho1: float


def amsgrad_constants(c1: float, c2: float, G: float, L: float, delta: float, rho1: float, d: int,
                      gamma1: float, T1: float, eps0: float = 0.0) -> AmsgradConstants:
    """The five constants of the AMSGrad bound.

    Args:
        c1, c2: bias and second-moment constants of the MLMC estimator
        G: bound on the update function
        L: Lipschitz constant of grad V
        delta: AMSGrad offset
        rho1: momentum coefficient, in [0, 1)
        d: dimension
        gamma1, T1: first step size and truncation bound
        eps0: lower regularizer bound at n = 0

    Raises:
        DomainError: rho1 = 1 (the constants blow up) or any input out of range
    """
    if rho1 == 1.0:
        raise DomainError("rho1 = 1 makes the AMSGrad constants infinite")
    if not 0.0 <= rho1 < 1.0:
        raise DomainError(f"rho1 must lie in [0, 1), got {rho1}")
    for name, value in (("c1", c1), ("c2", c2), ("G", G), ("delta", delta), ("d", d), ("gamma1", gamma1), ("T1", T1)):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")
    if L < 0 or eps0 < 0:
        raise DomainError("L and eps0 must be non-negative")

    log_T1 = math.log(T1)
    G2 = G * G
    b0_tilde = (
        d * G / (2 * delta * (1 - rho1))
        + gamma1 * math.sqrt(d / delta) * (1 + 2 * log_T1 / math.log(2)) * G2
        + c2 * (L / delta) * G2 * gamma1 ** 2 * log_T1
    )
    return AmsgradConstants(
        b0=b0_tilde + eps0 * gamma1 * G2,
        b1=c1 * G2 / math.sqrt(delta),
        b2=c2 / (2 * delta) * (1 + 2 * L + 2 * delta * G) * G2,
        b3=c2 * G2 / (2 * delta * (1 - rho1)) * (rho1 ** 2 * (L ** 2 + 2 * L) + rho1 * delta * (1 - rho1) * G),
        b4=d * rho1 * G / (2 * delta * (1 - rho1)),
        rho1=rho1,
    )


def amsgrad_rate_bound(constants: AmsgradConstants, schedule: ScheduleSpec, optimizer_cfg: OptimizerConfig, N: int,
                       initial_gap: float) -> float:
    """Right-hand side of the AMSGrad bound on E|grad V(theta_R)|^2 after N iterations.

        (1/varpi_N) * (gap + b0 + b1 sum gamma_{n+1} / T_{n+1} + b2 sum gamma_{n+1}^2 log T_{n+1}
                      + b3 sum (1 - rho1^n) gamma_n^2 log T_n + b4 sum (1 - gamma_{n+1}^2 / gamma_n^2))

    with every sum over n = 1..N and varpi_N the normalizer of the randomized iterate.
    """
    if optimizer_cfg.kind is not OptimizerKind.AMSGRAD:
        raise DomainError(f"the AMSGrad bound does not apply to {optimizer_cfg.kind.value}")
    if N < 1:
        raise DomainError(f"need N >= 1, got {N}")
    values = [schedule_eval(schedule, n) for n in range(1, N + 2)]
    gamma = np.array([v.gamma for v in values])
    log_T = np.log([v.T for v in values])
    T = np.array([v.T for v in values], dtype=float)
    n = np.arange(1, N + 1)
    # index i holds gamma_{i+1}, so gamma_n is gamma[n - 1] and gamma_{n+1} is gamma[n]
    total = math.fsum([
        initial_gap,
        constants.b0,
        constants.b1 * math.fsum(gamma[n] / T[n]),
        constants.b2 * math.fsum(gamma[n] ** 2 * log_T[n]),
        constants.b3 * math.fsum((1 - constants.rho1 ** n) * gamma[n - 1] ** 2 * log_T[n - 1]),
        constants.b4 * math.fsum(1 - gamma[n] ** 2 / gamma[n - 1] ** 2),
    ])
    return total / selector_for(optimizer_cfg, schedule, N).varpi
