"""Replicate studies of an estimator: bias against an oracle and raw moments of its norm.

A sampler is any callable ``(stream, n) -> array (n, d)`` returning ``n`` independent estimates
drawn from ``stream``. Both reductions are deterministic given the stream and the replicate count.
"""
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from src.config.config import DEFAULT_T_GRID, MIN_MOMENT_REPLICATES
from src.core.errors import DomainError, UnsupportedError
from src.core.records import ParamVector
from src.core.rng import RngStream
from src.mlmc.levels import LevelDistribution
from src.optim.problems import Problem
from src.ui.logging import Logger

DIAG_CODENAME = 'DIAGNOS'

logger = Logger()
diag_logger = logger.get_logger(f'[cyan][{DIAG_CODENAME}][/]', False)

Sampler = Callable[[RngStream, int], np.ndarray]


def replicate_sampler(fn: Callable[[RngStream], np.ndarray]) -> Sampler:
    """Lift a one-estimate function into a sampler; replicate i draws from ``stream.child(i)``."""
    def sample(stream: RngStream, n: int) -> np.ndarray:
        return np.stack([np.atleast_1d(np.asarray(fn(stream.child(i)), dtype=float)) for i in range(n)])
    return sample


def mlmc_sampler(problem: Problem, theta: ParamVector, T: float, dist: LevelDistribution | None = None) -> Sampler:
    """Raw MLMC estimates of the problem's mean field at theta."""
    dist = dist or LevelDistribution.geometric()
    return lambda stream, n: problem.estimate_batch(theta, T, dist, stream, n)


def conditional_sampler(problem: Problem, theta: ParamVector, T: float, dist: LevelDistribution | None = None) -> Sampler:
    """Estimates with the level integrated out: same mean as ``mlmc_sampler``, far smaller variance."""
    dist = dist or LevelDistribution.geometric()
    return lambda stream, n: problem.conditional_batch(theta, T, dist, stream, n)


def _draw(make_estimate: Sampler, replicates: int, stream: RngStream) -> np.ndarray:
    if replicates < 2:
        raise DomainError(f"need at least 2 replicates, got {replicates}")
    values = np.asarray(make_estimate(stream, replicates), dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2 or values.shape[0] != replicates:
        raise DomainError(f"sampler returned shape {values.shape}, expected ({replicates}, d)")
    return values


def _bias_from_values(values: np.ndarray, oracle: np.ndarray) -> tuple[float, float]:
    n = values.shape[0]
    total = values.sum(axis=0)
    bias = float(np.linalg.norm(total / n - oracle))
    # leave-one-out means (S - x_i) / (n - 1)
    loo = np.linalg.norm((total - values) / (n - 1) - oracle, axis=1)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return bias, se


def _moment_from_values(values: np.ndarray, p: int) -> tuple[float, float]:
    if p not in (2, 3):
        raise DomainError(f"moment order must be 2 or 3, got {p}")
    sq = np.sum(values * values, axis=1)
    powered = sq if p == 2 else sq * np.sqrt(sq)
    n = powered.size
    # the jackknife standard error of a mean is the usual s / sqrt(n)
    return float(powered.mean()), float(powered.std(ddof=1) / math.sqrt(n))


def estimate_bias(make_estimate: Sampler, oracle_grad, replicates: int, stream: RngStream) -> tuple[float, float]:
    """| mean of the replicates - oracle_grad | with its jackknife standard error.

    Args:
        make_estimate (Sampler): source of independent estimates
        oracle_grad: the exact value being estimated, shape (d,)
        replicates (int): number of estimates, at least 2
        stream (RngStream): where the estimates draw from

    Returns:
        tuple[float, float]: (bias norm, standard error)
    """
    values = _draw(make_estimate, replicates, stream)
    oracle = np.atleast_1d(np.asarray(oracle_grad, dtype=float))
    if oracle.shape != values.shape[1:]:
        raise DomainError(f"oracle has shape {oracle.shape}, estimates have {values.shape[1:]}")
    return _bias_from_values(values, oracle)


def estimate_moment(make_estimate: Sampler, p: int, replicates: int, stream: RngStream) -> tuple[float, float]:
    """Empirical E|estimate|^p for p in {2, 3}, with its standard error."""
    if p not in (2, 3):
        raise DomainError(f"moment order must be 2 or 3, got {p}")
    return _moment_from_values(_draw(make_estimate, replicates, stream), p)


@dataclass(frozen=True)
class MomentReport:
    """
    Bias and moments of an MLMC estimator over a grid of truncation bounds T.

    Column ``i`` of every array belongs to ``T_grid[i]``; the ``*_se`` arrays hold the standard
    errors of the column with the same stem.
    """
    T_grid: np.ndarray
    bias_norm: np.ndarray
    bias_se: np.ndarray
    m2: np.ndarray
    m2_se: np.ndarray
    m3: np.ndarray
    m3_se: np.ndarray
    replicates: int

    @property
    def std_errors(self) -> dict[str, np.ndarray]:
        return {"bias_norm": self.bias_se, "m2": self.m2_se, "m3": self.m3_se}

    def header(self) -> list[str]:
        return ["T", "bias_norm", "bias_se", "m2", "m2_se", "m3", "m3_se"]

    def rows(self) -> list[list[float]]:
        return [
            [int(T), *(float(col[i]) for col in (self.bias_norm, self.bias_se, self.m2, self.m2_se, self.m3, self.m3_se))]
            for i, T in enumerate(self.T_grid)
        ]

    def violations(self) -> list[str]:
        """Failed report invariants: non-finite entries and too few replicates."""
        problems = []
        for name in ("bias_norm", "bias_se", "m2", "m2_se", "m3", "m3_se"):
            if not np.all(np.isfinite(getattr(self, name))):
                problems.append(f"{name} has non-finite entries")
        if self.replicates < MIN_MOMENT_REPLICATES:
            problems.append(f"replicates = {self.replicates} < {MIN_MOMENT_REPLICATES}")
        return problems


def moment_study(problem: Problem, theta: ParamVector, oracle, T_grid: Sequence[int] = DEFAULT_T_GRID,
                 replicates: int = MIN_MOMENT_REPLICATES, stream: RngStream | None = None,
                 dist: LevelDistribution | None = None, conditional_bias: bool = True) -> MomentReport:
    """Bias, E|H|^2 and E|H|^3 of the MLMC estimator at theta for every T of the grid.

    Grid point i uses ``stream.child(i)``: its ``child(0)`` feeds the bias column and ``child(1)``
    the moment columns. The bias uses the level-integrated estimator when ``conditional_bias`` is
    set and the problem has one, the raw estimator otherwise; moments always use the raw estimator.
    """
    if stream is None:
        raise DomainError("moment_study needs an explicit stream")
    dist = dist or LevelDistribution.geometric()
    T_grid = np.asarray(T_grid, dtype=np.int64)
    if T_grid.ndim != 1 or T_grid.size == 0:
        raise DomainError("T grid must be a non-empty 1-D sequence")
    if replicates < MIN_MOMENT_REPLICATES:
        diag_logger.warning(f"{problem.name}: {replicates} replicates, moment reports want >= {MIN_MOMENT_REPLICATES}")

    oracle = np.atleast_1d(np.asarray(oracle, dtype=float))
    cols = {name: np.empty(T_grid.size) for name in ("bias_norm", "bias_se", "m2", "m2_se", "m3", "m3_se")}

    with diag_logger.progress(f"moments of {problem.name}") as bar:
        task = bar.add_task("T grid", total=T_grid.size)
        for i, T in enumerate(T_grid):
            sub = stream.child(i)
            raw = _draw(mlmc_sampler(problem, theta, T, dist), replicates, sub.child(1))

            bias_values = raw
            if conditional_bias:
                try:
                    bias_values = _draw(conditional_sampler(problem, theta, T, dist), replicates, sub.child(0))
                except UnsupportedError:
                    diag_logger.debug(f"{problem.name}: no level-integrated estimator, bias from raw estimates")
            cols["bias_norm"][i], cols["bias_se"][i] = _bias_from_values(bias_values, oracle)
            cols["m2"][i], cols["m2_se"][i] = _moment_from_values(raw, 2)
            cols["m3"][i], cols["m3_se"][i] = _moment_from_values(raw, 3)
            diag_logger.debug(f"{problem.name}: T={T} bias={cols['bias_norm'][i]:.4g} m2={cols['m2'][i]:.4g}")
            bar.advance(task)

    return MomentReport(T_grid=T_grid, replicates=replicates, **cols)
