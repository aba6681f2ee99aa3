"""Toy latent-variable models with closed-form marginals.

Latents are scalars. Every callable broadcasts over arrays of latents ``z`` of any shape; the
parameter gradient adds a trailing axis of size d.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.config.config import IWAE_PROPOSAL_SCALE
from src.core.errors import DomainError
from src.core.rng import RngStream

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class LatentModelSpec:
  """
  Joint model p_theta(y, z) with a fixed proposal q(z | y).

  Attributes:
      log_joint: (theta, y, z) -> log p_theta(y, z)
      grad_theta_log_joint: (theta, y, z) -> grad_theta log p_theta(y, z), shape z.shape + (d,)
      q_sampler: (y, stream, shape) -> z draws from q(. | y)
      log_q: (y, z) -> log q(z | y)
      exact_marginal_grad: (theta, y) -> grad_theta log p_theta(y), when known
      log_marginal: (theta, y) -> log p_theta(y), when known
  """
  log_joint: Callable
  grad_theta_log_joint: Callable
  q_sampler: Callable[[float, RngStream, tuple], np.ndarray]
  log_q: Callable
  dim: int = 1
  exact_marginal_grad: Optional[Callable] = None
  log_marginal: Optional[Callable] = None
  name: str = "latent-model"

  def log_weights(self, theta, y, z) -> np.ndarray:
    """log w = log p_theta(y, z) - log q(z | y)."""
    return self.log_joint(theta, y, z) - self.log_q(y, z)


def _scalar(theta) -> float:
  return float(np.asarray(theta, dtype=float).reshape(-1)[0])


def exact_marginal_grad_linear_gaussian(theta, y: float) -> float:
  """grad_theta log N(y; theta, 2) = (y - theta) / 2."""
  return (y - _scalar(theta)) / 2.0


def log_marginal_linear_gaussian(theta, y: float) -> float:
  """log N(y; theta, 2)."""
  r = y - _scalar(theta)
  return -r * r / 4.0 - 0.5 * math.log(4.0 * math.pi)


def _linear_gaussian_joint(theta, y, z):
  th = _scalar(theta)
  z = np.asarray(z, dtype=float)
  r = y - th - z
  return -0.5 * z * z - 0.5 * r * r - LOG_2PI


def _linear_gaussian_grad(theta, y, z):
  th = _scalar(theta)
  return (y - th - np.asarray(z, dtype=float))[..., None]


def _gaussian_proposal(mean_of: Callable[[float], float], scale: float):
  log_norm = math.log(scale) + 0.5 * LOG_2PI

  def sampler(y, stream: RngStream, shape):
    return mean_of(y) + scale * stream.normal(shape)

  def log_q(y, z):
    u = (np.asarray(z, dtype=float) - mean_of(y)) / scale
    return -0.5 * u * u - log_norm

  return sampler, log_q


def linear_gaussian_model(proposal_scale: float = IWAE_PROPOSAL_SCALE, proposal_mean: float = 0.0) -> LatentModelSpec:
  """z ~ N(0, 1), y | z ~ N(theta + z, 1), with proposal q = N(proposal_mean, proposal_scale^2).

  The marginal is N(theta, 2) and the posterior N((y - theta)/2, 1/2). The default proposal is
  deliberately wider than the posterior so self-normalized estimates carry a visible bias;
  ``proposal_scale=1`` makes q the prior.
  """
  if not proposal_scale > 0.0:
    raise DomainError(f"proposal scale must be positive, got {proposal_scale}")
  sampler, log_q = _gaussian_proposal(lambda y: proposal_mean, proposal_scale)
  return LatentModelSpec(
    _linear_gaussian_joint,
    _linear_gaussian_grad,
    sampler,
    log_q,
    dim=1,
    exact_marginal_grad=lambda theta, y: np.array([exact_marginal_grad_linear_gaussian(theta, y)]),
    log_marginal=log_marginal_linear_gaussian,
    name=f"linear-gaussian(q=N({proposal_mean}, {proposal_scale}^2))",
  )


def posterior_model(theta) -> LatentModelSpec:
  """The linear-Gaussian model whose proposal is the exact posterior at ``theta``.

  Importance weights are then constant and equal to p_theta(y).
  """
  th = _scalar(theta)
  sampler, log_q = _gaussian_proposal(lambda y: (y - th) / 2.0, math.sqrt(0.5))
  return LatentModelSpec(
    _linear_gaussian_joint,
    _linear_gaussian_grad,
    sampler,
    log_q,
    dim=1,
    exact_marginal_grad=lambda t, y: np.array([exact_marginal_grad_linear_gaussian(t, y)]),
    log_marginal=log_marginal_linear_gaussian,
    name=f"linear-gaussian(q=posterior at theta={th})",
  )
