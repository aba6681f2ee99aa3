import numpy as np

from src.config.config import PROGRESS_PERIOD
from src.core.errors import ConfigurationError, MLMCError, OptimizerError, StateError
from src.core.records import RunRecord, as_param_vector
from src.core.rng import RngStream
from src.mlmc.levels import LevelDistribution
from src.ui.logging import Logger
from .preconditioners import (
    AdagradState,
    AmsgradState,
    OptimizerConfig,
    OptimizerKind,
    adagrad_update,
    amsgrad_update,
)
from .problems import Problem
from .schedules import ScheduleSpec, schedule_eval, validate_schedule

OPTIM_CODENAME = 'OPTIMZR'

logger = Logger()
optim_logger = logger.get_logger(f'[yellow][{OPTIM_CODENAME}][/]', False)


def _sq_norm(v) -> float | None:
    return None if v is None else float(np.dot(v, v))


def run_optimizer(problem: Problem, optimizer_cfg: OptimizerConfig, schedule: ScheduleSpec, N: int, stream: RngStream,
                  theta0, dist: LevelDistribution | None = None, allow_invalid_schedule: bool = False,
                  progress_period: int = PROGRESS_PERIOD) -> list[RunRecord]:
    """Preconditioned MLMC stochastic gradient descent.

    Iteration n (0-based) samples a level, simulates the chain prefix it needs at theta_n, forms the
    MLMC estimate H, updates the preconditioner and sets
    theta_{n+1} = theta_n - gamma_{n+1} A_n H (identity / Adagrad) or theta_n - gamma_{n+1} A_n m_n (AMSGrad).
    Schedules are evaluated at n + 1.

    Args:
        problem (Problem): what to minimize
        optimizer_cfg (OptimizerConfig): identity, adagrad or amsgrad
        schedule (ScheduleSpec): step size, truncation, regularizer and clipping schedules
        N (int): number of iterations, N >= 0
        stream (RngStream): the run's only source of randomness
        theta0: starting point
        dist (LevelDistribution, optional): level law, geometric(1/2) by default
        allow_invalid_schedule (bool): run even when ``validate_schedule`` reports violations

    Returns:
        list[RunRecord]: N + 1 records, the last one for theta_N without an estimate

    Raises:
        ConfigurationError: the schedule is invalid and not explicitly allowed
        OptimizerError: anything raised inside the loop, tagged with the iteration index
    """
    if N < 0:
        raise ConfigurationError(f"number of iterations must be >= 0, got {N}")
    violations = validate_schedule(schedule, optimizer_cfg)
    if violations:
        if not allow_invalid_schedule:
            raise ConfigurationError("invalid schedule", [str(v) for v in violations])
        optim_logger.warning(f"running with an invalid schedule: {'; '.join(str(v) for v in violations)}")

    dist = dist or LevelDistribution.geometric()
    theta = as_param_vector(theta0, problem.dim)
    kind = optimizer_cfg.kind
    if kind is OptimizerKind.ADAGRAD:
        state = AdagradState.initial(problem.dim)
    elif kind is OptimizerKind.AMSGRAD:
        state = AmsgradState.initial(problem.dim, optimizer_cfg.rho1, optimizer_cfg.rho2, optimizer_cfg.delta)
    else:
        state = None

    optim_logger.info(f"{problem.name}: {kind.value} for N={N} from |theta_0|={np.linalg.norm(theta):.4g}")

    records: list[RunRecord] = []
    cost = 0
    chain_state = None
    for n in range(N):
        try:
            sched = schedule_eval(schedule, n + 1)
            est = problem.estimate(theta, sched.T, dist, stream, previous_state=chain_state)
            chain_state = est.final_state
            A = None
            if kind is OptimizerKind.ADAGRAD:
                A, state = adagrad_update(state, est.grad, sched.eps, sched.M_prev)
                direction = A * est.grad
            elif kind is OptimizerKind.AMSGRAD:
                A, m, state = amsgrad_update(state, est.grad, sched.eps)
                direction = A * m
            else:
                direction = est.grad

            cost += est.cost
            records.append(RunRecord(
                iteration=n,
                theta=theta,
                grad_estimate=est.grad,
                level=est.level,
                chain_len=est.chain_len,
                cumulative_cost=cost,
                true_grad_sq_norm=_sq_norm(problem.true_grad(theta)),
                precond_diag=A,
            ))

            theta = theta - sched.gamma * direction
            if not np.all(np.isfinite(theta)):
                raise StateError("iterate became non-finite")
        except (MLMCError, ValueError, ArithmeticError) as e:
            optim_logger.error(f"{problem.name}: iteration {n} failed: {e}")
            raise OptimizerError(n, e) from e

        if progress_period and (n + 1) % progress_period == 0:
            optim_logger.debug(f"{problem.name}: n={n + 1} cost={cost} |H|={np.linalg.norm(est.grad):.4g}")

    records.append(RunRecord(
        iteration=N,
        theta=theta,
        grad_estimate=None,
        level=None,
        chain_len=0,
        cumulative_cost=cost,
        true_grad_sq_norm=_sq_norm(problem.true_grad(theta)),
    ))
    optim_logger.info(f"{problem.name}: done, cost={cost}")
    return records
