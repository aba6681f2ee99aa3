import math
from dataclasses import dataclass
from typing import NamedTuple

from src.config.config import (
    DEFAULT_ALPHA_EXP,
    DEFAULT_C_EPS,
    DEFAULT_C_GAMMA,
    DEFAULT_C_M,
    DEFAULT_C_T,
    DEFAULT_EPS_EXP,
    DEFAULT_GAMMA_EXP,
    DEFAULT_M_EXP,
    T_CEIL_GUARD,
)
from src.core.errors import DomainError
from .preconditioners import OptimizerConfig, OptimizerKind


@dataclass(frozen=True)
class ScheduleSpec:
    """
    Power-law schedules of the optimizer, all indexed by n >= 1:

        gamma_n = C_gamma * n^-gamma_exp        step size
        T_n     = max(2, ceil(C_T * n^alpha))   truncation bound of the level
        eps_n   = C_eps * n^eps_exp             preconditioner regularizer
        M_{n-1} = C_M * n^M_exp                 Adagrad clipping threshold
    """
    C_gamma: float = DEFAULT_C_GAMMA
    gamma_exp: float = DEFAULT_GAMMA_EXP
    C_T: float = DEFAULT_C_T
    alpha_exp: float = DEFAULT_ALPHA_EXP
    C_eps: float = DEFAULT_C_EPS
    eps_exp: float = DEFAULT_EPS_EXP
    C_M: float = DEFAULT_C_M
    M_exp: float = DEFAULT_M_EXP


class ScheduleValues(NamedTuple):
    gamma: float
    T: int
    eps: float
    M_prev: float


@dataclass(frozen=True)
class ScheduleViolation:
    """One failed condition of ``validate_schedule``; ``condition`` is the inequality that must hold."""
    condition: str
    message: str

    def __str__(self) -> str:
        return f"{self.condition} ({self.message})"


def schedule_eval(schedule: ScheduleSpec, n: int) -> ScheduleValues:
    """(gamma_n, T_n, eps_n, M_{n-1}) for n >= 1."""
    if n < 1:
        raise DomainError(f"schedules are indexed from n = 1, got {n}")
    gamma = schedule.C_gamma * n ** (-schedule.gamma_exp)
    T = max(2, math.ceil(schedule.C_T * n ** schedule.alpha_exp - T_CEIL_GUARD))
    eps = schedule.C_eps * n ** schedule.eps_exp
    M_prev = schedule.C_M * n ** schedule.M_exp
    return ScheduleValues(gamma, T, eps, M_prev)


def validate_schedule(schedule: ScheduleSpec, optimizer: OptimizerConfig) -> list[ScheduleViolation]:
    """Every violated condition for running ``optimizer`` with ``schedule``; an empty list means ok.

    Common conditions: positive constants, alpha > 0, non-negative exponents (which make gamma_n
    non-increasing, T_n and eps_n non-decreasing). Then the rate condition of the optimizer:

        identity / generic:  gamma + lam_lower < 1
        adagrad:             gamma + M < 1 + eps_exp
        amsgrad:             2 gamma + eps_exp < 2
    """
    violations: list[ScheduleViolation] = []

    for name in ("C_gamma", "C_T", "C_eps", "C_M"):
        if not getattr(schedule, name) > 0.0:
            violations.append(ScheduleViolation(f"{name} > 0", f"got {getattr(schedule, name)}"))
    if not schedule.alpha_exp > 0.0:
        violations.append(ScheduleViolation("alpha > 0", f"got alpha={schedule.alpha_exp}"))
    if schedule.gamma_exp < 0.0:
        violations.append(ScheduleViolation("gamma >= 0", f"step sizes must be non-increasing, got gamma={schedule.gamma_exp}"))
    if schedule.eps_exp < 0.0:
        violations.append(ScheduleViolation("eps_exp >= 0", f"eps_n must be non-decreasing, got eps_exp={schedule.eps_exp}"))
    if schedule.M_exp < 0.0:
        violations.append(ScheduleViolation("M >= 0", f"got M={schedule.M_exp}"))

    g = schedule.gamma_exp
    if optimizer.kind is OptimizerKind.IDENTITY:
        lam = optimizer.lam_lower_exp
        if lam < 0.0 or optimizer.lam_upper_exp < 0.0:
            violations.append(ScheduleViolation("lam_lower >= 0 and lam_upper >= 0", f"got {lam}, {optimizer.lam_upper_exp}"))
        if not g + lam < 1.0:
            violations.append(ScheduleViolation("gamma + lam_lower < 1", f"{g} + {lam} = {g + lam}"))
    elif optimizer.kind is OptimizerKind.ADAGRAD:
        if not g + schedule.M_exp < 1.0 + schedule.eps_exp:
            violations.append(ScheduleViolation(
                "gamma + M < 1 + eps_exp", f"{g} + {schedule.M_exp} = {g + schedule.M_exp} >= {1.0 + schedule.eps_exp}"))
    elif optimizer.kind is OptimizerKind.AMSGRAD:
        if not 2.0 * g + schedule.eps_exp < 2.0:
            violations.append(ScheduleViolation("2 gamma + eps_exp < 2", f"2*{g} + {schedule.eps_exp} = {2.0 * g + schedule.eps_exp}"))

    violations.extend(ScheduleViolation(condition, message) for condition, message in optimizer.violations())
    return violations
