import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from src.core.errors import DegenerateWeightsError, DomainError
from src.core.rng import RngStream
from src.mlmc.batch import level_groups, mlmc_estimates_batch
from src.mlmc.estimator import mlmc_combine
from src.mlmc.levels import LevelDistribution, LevelDraw, draw_level, level_draw, sample_levels, used_length
from src.ui.logging import Logger
from .models import LatentModelSpec

IWAE_CODENAME = 'IWAE   '

logger = Logger()
iwae_logger = logger.get_logger(f'[magenta][{IWAE_CODENAME}][/]', False)


@dataclass
class WeightedParticleSet:
  """Particles with their log importance weights and the self-normalized weights (summing to 1)."""
  particles: np.ndarray
  log_weights: np.ndarray
  normalized: np.ndarray


def _normalize_rows(log_w: np.ndarray) -> np.ndarray:
  """Self-normalized weights along the last axis, via log-sum-exp."""
  if np.isnan(log_w).any() or np.any(log_w == np.inf) or np.any(np.all(log_w == -np.inf, axis=-1)):
    raise DegenerateWeightsError("importance weights are all zero, infinite or NaN")
  w = np.exp(log_w - logsumexp(log_w, axis=-1, keepdims=True))
  return w / w.sum(axis=-1, keepdims=True)


def normalize_log_weights(log_w, particles=None) -> WeightedParticleSet:
  """Normalize one set of log weights.

  Raises:
      DegenerateWeightsError: every weight is zero (log weight -inf) or some weight is NaN
  """
  log_w = np.asarray(log_w, dtype=float)
  if log_w.ndim != 1 or log_w.size == 0:
    raise DomainError("need a non-empty 1-D array of log weights")
  return WeightedParticleSet(
    particles=np.arange(log_w.size) if particles is None else np.asarray(particles),
    log_weights=log_w,
    normalized=_normalize_rows(log_w),
  )


def snis_gradient(model: LatentModelSpec, theta, y: float, particles) -> np.ndarray:
  """Self-normalized importance-sampling estimate of grad_theta log p_theta(y).

  sum_l w_l / (sum_j w_j) * grad_theta log p_theta(y, z_l) over the given particles.
  """
  particles = np.atleast_1d(np.asarray(particles, dtype=float))
  if particles.size < 1:
    raise DomainError("need at least one particle")
  weights = normalize_log_weights(model.log_weights(theta, y, particles), particles)
  return weights.normalized @ model.grad_theta_log_joint(theta, y, particles)


def sir_step(model: LatentModelSpec, theta, y: float, z_prev: float, k: int, stream: RngStream) -> tuple[float, np.ndarray]:
  """One step of the sampling-importance-resampling chain.

  z_prev is planted at a uniform slot J among k - 1 fresh proposals; the step returns the
  weighted gradient term over the k particles and the next state resampled by weight.
  """
  if k < 1:
    raise DomainError(f"need k >= 1 particles, got {k}")
  J = int(stream.integers(k))
  fresh = np.asarray(model.q_sampler(y, stream, (k - 1,)), dtype=float)
  particles = np.insert(fresh, J, z_prev)
  weights = normalize_log_weights(model.log_weights(theta, y, particles), particles)
  grad_term = weights.normalized @ model.grad_theta_log_joint(theta, y, particles)
  z_next = particles[int(stream.choice(k, p=weights.normalized))]
  return float(z_next), grad_term


def mlmc_iwae_at_level(model: LatentModelSpec, theta, y: float, k: int, draw: LevelDraw, T: float,
                       stream: RngStream) -> np.ndarray:
  """MLMC-IWAE estimate for an already sampled level: t_K SIR steps from a fresh q draw, then the MLMC combination."""
  t = draw.span if draw.span <= T else 1
  z = float(np.asarray(model.q_sampler(y, stream, (1,)))[0])
  terms = np.empty((t, model.dim))
  for p in range(t):
    z, terms[p] = sir_step(model, theta, y, z, k, stream)
  return mlmc_combine(terms, draw, T)


def mlmc_iwae_gradient(model: LatentModelSpec, theta, y: float, k: int, T: float, stream: RngStream,
                       dist: LevelDistribution | None = None) -> tuple[np.ndarray, int]:
  """MLMC estimate of grad_theta log p_theta(y) built on the SIR chain.

  Samples K, runs t_K = 1 v (2^K 1{2^K <= T}) SIR steps and combines the partial means of the
  gradient terms at t_K and t_K / 2 around the first term.

  Returns:
      (estimate, cost) with cost = t_K * k joint-density evaluations
  """
  if k < 1:
    raise DomainError(f"need k >= 1 particles, got {k}")
  dist = dist or LevelDistribution.geometric()
  draw = draw_level(dist, stream, T)
  estimate = mlmc_iwae_at_level(model, theta, y, k, draw, T, stream)
  return estimate, used_length(dist, draw, T) * k


def plain_iwae_gradient(model: LatentModelSpec, theta, y: float, k: int, stream: RngStream) -> tuple[np.ndarray, int]:
  """The k-particle SNIS gradient with fresh proposals; cost k."""
  if k < 1:
    raise DomainError(f"need k >= 1 particles, got {k}")
  particles = np.asarray(model.q_sampler(y, stream, (k,)), dtype=float)
  return snis_gradient(model, theta, y, particles), k


def iwae_bound(model: LatentModelSpec, theta, y: float, k: int, stream: RngStream) -> float:
  """One draw of log((1/k) sum_l w_l) with k fresh proposals."""
  if k < 1:
    raise DomainError(f"need k >= 1 particles, got {k}")
  z = np.asarray(model.q_sampler(y, stream, (k,)), dtype=float)
  log_w = model.log_weights(theta, y, z)
  _normalize_rows(log_w)
  return float(logsumexp(log_w) - math.log(k))


# --- replicate-batched versions ---

def iwae_bound_batch(model: LatentModelSpec, theta, y: float, k: int, stream: RngStream, n: int) -> np.ndarray:
  """``n`` independent IWAE bounds, shape (n,)."""
  z = np.asarray(model.q_sampler(y, stream, (n, k)), dtype=float)
  log_w = model.log_weights(theta, y, z)
  _normalize_rows(log_w)
  return logsumexp(log_w, axis=-1) - math.log(k)


def plain_iwae_gradient_batch(model: LatentModelSpec, theta, y: float, k: int, stream: RngStream, n: int) -> np.ndarray:
  """``n`` independent k-particle SNIS gradients, shape (n, d)."""
  z = np.asarray(model.q_sampler(y, stream, (n, k)), dtype=float)
  w = _normalize_rows(model.log_weights(theta, y, z))
  return np.einsum('nk,nkd->nd', w, model.grad_theta_log_joint(theta, y, z))


def sir_chains(model: LatentModelSpec, theta, y: float, k: int, steps: int, stream: RngStream, n: int,
               z0=None) -> tuple[np.ndarray, np.ndarray]:
  """Run ``n`` SIR chains for ``steps`` steps side by side.

  Returns:
      (final states (n,), gradient terms (n, steps, d))
  """
  if k < 1:
    raise DomainError(f"need k >= 1 particles, got {k}")
  z = np.asarray(model.q_sampler(y, stream, (n,)), dtype=float) if z0 is None else np.broadcast_to(np.asarray(z0, dtype=float), (n,)).copy()
  terms = np.empty((n, steps, model.dim))
  slots = np.arange(k)[None, :]
  rows = np.arange(n)
  for p in range(steps):
    J = np.asarray(stream.integers(k, size=n))
    fresh = np.asarray(model.q_sampler(y, stream, (n, k - 1)), dtype=float)
    particles = np.empty((n, k))
    planted = slots == J[:, None]
    particles[planted] = z
    particles[~planted] = fresh.ravel()
    w = _normalize_rows(model.log_weights(theta, y, particles))
    terms[:, p, :] = np.einsum('nk,nkd->nd', w, model.grad_theta_log_joint(theta, y, particles))
    cum = np.cumsum(w, axis=1)
    u = stream.uniform(n)
    pick = np.minimum((cum <= u[:, None]).sum(axis=1), k - 1)
    z = particles[rows, pick]
  return z, terms


def mlmc_iwae_gradient_batch(model: LatentModelSpec, theta, y: float, k: int, T: float, stream: RngStream, n: int,
                             dist: LevelDistribution | None = None) -> tuple[np.ndarray, np.ndarray]:
  """``n`` independent MLMC-IWAE estimates, grouped by level.

  Returns:
      (estimates (n, d), costs (n,))
  """
  dist = dist or LevelDistribution.geometric()
  levels = sample_levels(dist, stream, n)
  out = np.empty((n, model.dim))
  costs = np.empty(n, dtype=np.int64)
  truncated = []
  for level, idx in level_groups(levels).items():
    draw = level_draw(dist, level, T)
    if draw.truncated:
      truncated.append(idx)
      continue
    t = used_length(dist, draw, T)
    _, terms = sir_chains(model, theta, y, k, t, stream, idx.size)
    out[idx] = mlmc_estimates_batch(terms, draw, T)
    costs[idx] = t * k
  if truncated:
    idx = np.concatenate(truncated)
    _, terms = sir_chains(model, theta, y, k, 1, stream, idx.size)
    out[idx] = terms[:, 0, :]
    costs[idx] = k
  iwae_logger.debug(f"{model.name}: {n} MLMC-IWAE estimates at T={T}, mean cost {costs.mean():.4g}")
  return out, costs
