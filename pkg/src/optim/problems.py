"""Stochastic optimization problems the loop can drive.

A problem turns (theta, T, level distribution, stream) into one gradient estimate of V at theta,
reporting the level it used and what the estimate cost.
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.config.config import DEFAULT_CLIP_BOUND
from src.core.errors import DomainError, UnsupportedError
from src.core.records import ParamVector
from src.core.rng import RngStream
from src.iwae.estimators import mlmc_iwae_at_level, plain_iwae_gradient
from src.iwae.models import LatentModelSpec
from src.kernels.mcmc import ChainInit, MarkovKernelSpec, simulate_chain, simulate_chains
from src.kernels.targets import gaussian_target
from src.mlmc.batch import level_groups, mlmc_estimates_batch, truncated_mean_batch
from src.mlmc.estimator import GradFn, mlmc_estimate
from src.mlmc.levels import LevelDistribution, draw_level, level_draw, max_level, sample_levels, tau, used_length

# states simulated per chunk when whole chains of length floor(tau(kmax)) are needed
CONDITIONAL_CHUNK_STATES = 1 << 22


@dataclass
class Estimate:
    grad: np.ndarray
    level: int
    chain_len: int
    cost: int
    final_state: Optional[np.ndarray] = None


class Problem(ABC):
    """Base class of everything ``run_optimizer`` can minimize."""
    dim: int
    name: str = "problem"

    @abstractmethod
    def estimate(self, theta: ParamVector, T: float, dist: LevelDistribution, stream: RngStream,
                 previous_state: Optional[np.ndarray] = None) -> Estimate:
        ...

    def true_grad(self, theta: ParamVector) -> Optional[np.ndarray]:
        """Exact gradient of V when the problem has one, else None."""
        return None

    def objective(self, theta: ParamVector) -> Optional[float]:
        return None

    def estimate_batch(self, theta: ParamVector, T: float, dist: LevelDistribution, stream: RngStream, n: int) -> np.ndarray:
        """``n`` independent estimates at theta, shape (n, d). Replicate i draws from ``stream.child(i)``."""
        return np.stack([self.estimate(theta, T, dist, stream.child(i)).grad for i in range(n)])

    def conditional_batch(self, theta: ParamVector, T: float, dist: LevelDistribution, stream: RngStream, n: int) -> np.ndarray:
        """Estimates with the level integrated out exactly (same mean, lower variance)."""
        raise UnsupportedError(f"{self.name} has no level-integrated estimator")


class MarkovChainProblem(Problem):
    """
    Mean field h(theta) = E_{pi_theta}[H_theta(X)] estimated by MLMC on a theta-indexed Markov chain.

    Each estimate simulates exactly the chain prefix its level needs. Chains start from ``init``,
    or from the last state of the previous chain when ``warm_start`` is set.
    """

    def __init__(self, grad_fn: GradFn, kernel_for: Callable[[ParamVector], MarkovKernelSpec], init: ChainInit,
                 dim: int, true_grad: Callable[[ParamVector], np.ndarray] | None = None,
                 objective: Callable[[ParamVector], float] | None = None, warm_start: bool = False,
                 name: str = "markov-chain"):
        self.grad_fn = grad_fn
        self.kernel_for = kernel_for
        self.init = init
        self.dim = dim
        self._true_grad = true_grad
        self._objective = objective
        self.warm_start = warm_start
        self.name = name

    def true_grad(self, theta):
        return None if self._true_grad is None else np.asarray(self._true_grad(theta), dtype=float)

    def objective(self, theta):
        return None if self._objective is None else float(self._objective(theta))

    def estimate(self, theta, T, dist, stream, previous_state=None) -> Estimate:
        draw = draw_level(dist, stream, T)
        length = used_length(dist, draw, T)
        if self.warm_start and previous_state is not None:
            x0 = previous_state
        else:
            x0 = self.init.initial_state(theta, stream)
        trajectory = simulate_chain(self.kernel_for(theta), x0, length, stream)
        grad, used = mlmc_estimate(self.grad_fn, theta, trajectory.states, draw, T)
        return Estimate(grad, draw.level, used, used, trajectory.states[-1])

    def _chain_values(self, theta, kernel, length, count, stream) -> np.ndarray:
        x0 = self.init.initial_states(theta, stream, count)
        batch = simulate_chains(kernel, x0, length, count, stream)
        flat = batch.states.reshape(count * length, -1)
        return self.grad_fn.values(theta, flat).reshape(count, length, -1)

    def estimate_batch(self, theta, T, dist, stream, n) -> np.ndarray:
        """Replicates grouped by level; every group runs its chains side by side."""
        kernel = self.kernel_for(theta)
        levels = sample_levels(dist, stream, n)
        out = np.empty((n, self.dim))
        truncated = []
        for k, idx in level_groups(levels).items():
            draw = level_draw(dist, k, T)
            if draw.truncated:
                truncated.append(idx)
                continue
            values = self._chain_values(theta, kernel, used_length(dist, draw, T), idx.size, stream)
            out[idx] = mlmc_estimates_batch(values, draw, T)
        if truncated:
            idx = np.concatenate(truncated)
            out[idx] = self._chain_values(theta, kernel, 1, idx.size, stream)[:, 0, :]
        return out

    def conditional_batch(self, theta, T, dist, stream, n) -> np.ndarray:
        """H(X_1) + mean over floor(tau(kmax)) states - mean over floor(tau(0)) states, per chain."""
        kernel = self.kernel_for(theta)
        length = math.floor(tau(dist, max_level(dist, T)))
        chunk = max(1, CONDITIONAL_CHUNK_STATES // (length * max(1, kernel.dim)))
        out = np.empty((n, self.dim))
        for start in range(0, n, chunk):
            count = min(chunk, n - start)
            values = self._chain_values(theta, kernel, length, count, stream)
            out[start:start + count] = (
                values[:, 0, :] + truncated_mean_batch(values, length) - truncated_mean_batch(values, tau(dist, 0))
            )
        return out


class ExactGradientProblem(Problem):
    """Deterministic control: the "estimate" is grad V itself, one unit of cost, no chain."""

    def __init__(self, grad: Callable[[ParamVector], np.ndarray], dim: int,
                 objective: Callable[[ParamVector], float] | None = None, name: str = "exact-gradient"):
        self.grad = grad
        self.dim = dim
        self._objective = objective
        self.name = name

    def estimate(self, theta, T, dist, stream, previous_state=None) -> Estimate:
        return Estimate(np.asarray(self.grad(theta), dtype=float), 0, 1, 1)

    def true_grad(self, theta):
        return np.asarray(self.grad(theta), dtype=float)

    def objective(self, theta):
        return None if self._objective is None else float(self._objective(theta))


class IwaeProblem(Problem):
    """
    Maximum likelihood for a latent-variable model: V(theta) = -(1/m) sum_i log p_theta(y_i).

    ``estimator='mlmc'`` uses one level per iteration shared by every data point (MLMC-IWAE);
    ``estimator='plain'`` uses the k-particle SNIS gradient.
    """

    def __init__(self, model: LatentModelSpec, ys, k: int, estimator: str = "mlmc", name: str = "iwae"):
        if estimator not in ("mlmc", "plain"):
            raise DomainError(f"unknown IWAE gradient estimator {estimator!r}")
        if k < 1:
            raise DomainError(f"need at least one particle, got k={k}")
        self.model = model
        self.ys = np.atleast_1d(np.asarray(ys, dtype=float))
        self.k = k
        self.estimator = estimator
        self.dim = model.dim
        self.name = name

    def estimate(self, theta, T, dist, stream, previous_state=None) -> Estimate:
        m = self.ys.size
        if self.estimator == "plain":
            grads = [plain_iwae_gradient(self.model, theta, y, self.k, stream)[0] for y in self.ys]
            return Estimate(-np.mean(grads, axis=0), 0, 1, self.k * m)

        draw = draw_level(dist, stream, T)
        length = used_length(dist, draw, T)
        grads = [mlmc_iwae_at_level(self.model, theta, y, self.k, draw, T, stream) for y in self.ys]
        return Estimate(-np.mean(grads, axis=0), draw.level, length, length * self.k * m)

    def true_grad(self, theta):
        if self.model.exact_marginal_grad is None:
            return None
        return -np.mean([np.atleast_1d(self.model.exact_marginal_grad(theta, y)) for y in self.ys], axis=0)

    def objective(self, theta):
        if self.model.log_marginal is None:
            return None
        return -float(np.mean([self.model.log_marginal(theta, y) for y in self.ys]))


def _state_as_gradient(theta, x):
    return x


def quadratic_problem(dim: int = 10, bound: float = DEFAULT_CLIP_BOUND, init: str = "fixed", x0=None,
                      kernel: str = "rwmh", scale: float | None = None, warm_start: bool = False) -> MarkovChainProblem:
    """V(theta) = |theta|^2 / 2 with pi_theta = N(theta, I) and H_theta(x) = clip(x, +-G).

    The mean field is theta = grad V (up to clipping in the far tails).

    Args:
        init: "fixed" starts every chain at ``x0`` (zeros by default), "stationary" draws X_1 ~ N(theta, I)
        kernel: "rwmh" or "mala"; ``scale`` is sigma_p resp. h (artifact defaults when None)
    """
    if init == "fixed":
        chain_init = ChainInit.fixed(np.zeros(dim) if x0 is None else np.broadcast_to(np.asarray(x0, dtype=float), (dim,)))
    elif init == "stationary":
        chain_init = ChainInit.from_sampler(lambda theta, stream, n: theta + stream.normal((n, dim)))
    else:
        raise DomainError(f"unknown chain init {init!r}")

    if kernel == "rwmh":
        kernel_for = lambda theta: MarkovKernelSpec.rwmh(gaussian_target(theta), scale)
    elif kernel == "mala":
        kernel_for = lambda theta: MarkovKernelSpec.mala(gaussian_target(theta), scale)
    else:
        raise DomainError(f"unknown kernel {kernel!r}")

    return MarkovChainProblem(
        GradFn(_state_as_gradient, bound, vectorized=True),
        kernel_for,
        chain_init,
        dim,
        true_grad=lambda theta: np.asarray(theta, dtype=float).copy(),
        objective=lambda theta: 0.5 * float(np.dot(theta, theta)),
        warm_start=warm_start,
        name=f"quadratic(d={dim})",
    )


def ar1_problem(phi: float = 0.5, scale: float = math.sqrt(0.75), x0: float = 2.0, bound: float = DEFAULT_CLIP_BOUND) -> MarkovChainProblem:
    """Autoregressive chain x' = theta + phi (x - theta) + scale xi started at x0, with H(x) = clip(x, +-G).

    Its stationary mean is theta, so the mean field is grad of V = theta^2 / 2. At theta = 0 this
    is the bias/moment fixture x' = 0.5 x + sqrt(0.75) xi with oracle mean 0.
    """
    if not abs(phi) < 1.0:
        raise DomainError(f"autoregressive coefficient must satisfy |phi| < 1, got {phi}")
    return MarkovChainProblem(
        GradFn(_state_as_gradient, bound, vectorized=True),
        lambda theta: MarkovKernelSpec.autoregressive(phi, scale, center=theta),
        ChainInit.fixed([x0]),
        1,
        true_grad=lambda theta: np.asarray(theta, dtype=float).copy(),
        objective=lambda theta: 0.5 * float(np.dot(theta, theta)),
        name="ar1",
    )
