import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from src.core.errors import DomainError
from src.optim.preconditioners import OptimizerKind
from src.optim.schedules import ScheduleSpec


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float


def _ols(xs: np.ndarray, ys: np.ndarray) -> SlopeFit:
    if np.ptp(xs) == 0.0:
        raise DomainError("cannot fit a line through points sharing one abscissa")
    fit = linregress(xs, ys)
    return SlopeFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2))


def _as_points(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise DomainError(f"need two 1-D arrays of the same length, got {xs.shape} and {ys.shape}")
    if xs.size < 3:
        raise DomainError(f"need at least 3 points, got {xs.size}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise DomainError("points must be finite")
    return xs, ys


def fit_loglog(xs, ys) -> SlopeFit:
    """Least squares line through (log x, log y); the slope is the empirical power law exponent.

    Raises:
        DomainError: fewer than 3 points or a non-positive coordinate
    """
    xs, ys = _as_points(xs, ys)
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise DomainError("log-log fit needs strictly positive coordinates")
    return _ols(np.log(xs), np.log(ys))


def fit_affine(xs, ys) -> SlopeFit:
    """Ordinary least squares line through (x, y)."""
    return _ols(*_as_points(xs, ys))


def psi(N: float, eta: float) -> float:
    """N^(1 - eta) if eta < 1, log N if eta = 1, 1 if eta > 1."""
    if N < 2:
        raise DomainError(f"rate functions need N >= 2, got {N}")
    if eta < 1.0:
        return N ** (1.0 - eta)
    if eta == 1.0:
        return math.log(N)
    return 1.0


def phi(N: float, eta: float) -> float:
    """N^(1 - eta) log N if eta < 1, (log N)^2 if eta = 1, 1 if eta > 1."""
    if N < 2:
        raise DomainError(f"rate functions need N >= 2, got {N}")
    if eta < 1.0:
        return N ** (1.0 - eta) * math.log(N)
    if eta == 1.0:
        return math.log(N) ** 2
    return 1.0


def rate_reference(N_grid) -> np.ndarray:
    """(log N)^2 / sqrt(N) per entry, the reference curve drawn over convergence plots."""
    N = np.asarray(N_grid, dtype=float)
    if np.any(N < 2):
        raise DomainError("rate reference needs N >= 2")
    return np.log(N) ** 2 / np.sqrt(N)


def rate_envelope(kind: OptimizerKind | str, schedule: ScheduleSpec, N: float, lam_lower: float = 0.0,
                  lam_upper: float = 0.0) -> float:
    """The order of E|grad V(theta_R)|^2 after N iterations, up to constants.

        identity:  N^-(1-g-ll)       (1 + Psi(a+g-lu) + Phi(2g-2lu))
        adagrad:   N^-(1+e-g-M)      (1 + Psi(a+g-e) + Psi(1+g-3e-a/2) + Phi(2g-2e))
        amsgrad:   N^-(1-g-e/2)      (1 + Psi(a+g) + Phi(2g) + g log N)

    with g, a, e, M the exponents of gamma_n, T_n, eps_n and M_n, and ll / lu the exponents of the
    lower / upper preconditioner eigenvalue bounds.
    """
    kind = OptimizerKind(kind)
    g, a, e, m = schedule.gamma_exp, schedule.alpha_exp, schedule.eps_exp, schedule.M_exp
    if kind is OptimizerKind.IDENTITY:
        return N ** -(1.0 - g - lam_lower) * (1.0 + psi(N, a + g - lam_upper) + phi(N, 2 * g - 2 * lam_upper))
    if kind is OptimizerKind.ADAGRAD:
        return N ** -(1.0 + e - g - m) * (
            1.0 + psi(N, a + g - e) + psi(N, 1.0 + g - 3 * e - a / 2) + phi(N, 2 * g - 2 * e)
        )
    return N ** -(1.0 - g - e / 2) * (1.0 + psi(N, a + g) + phi(N, 2 * g) + g * math.log(N))
