import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from src.config.config import MALA_STEP_NUMERATOR, RWMH_SCALE_NUMERATOR
from src.core.errors import ConfigurationError, DomainError, StateError
from src.core.records import ParamVector
from src.core.rng import RngStream
from .targets import TargetDensity


class KernelKind(Enum):
  RWMH = "rwmh"
  MALA = "mala"
  AUTOREGRESSIVE = "autoregressive"
  DISCRETE = "discrete"
  FROZEN = "frozen"


class InitKind(Enum):
  FIXED = "fixed"
  SAMPLER = "sampler"


InitSampler = Callable[[ParamVector, RngStream, int], np.ndarray]


@dataclass(frozen=True, eq=False)
class ChainInit:
  """
  How the first state X_1 of a fresh chain is chosen: a fixed point x0, or a sampler
  ``sampler(theta, stream, n) -> (n, q)`` (e.g. the stationary law when it is known).
  """
  kind: InitKind
  x0: Optional[np.ndarray] = None
  sampler: Optional[InitSampler] = None

  @classmethod
  def fixed(cls, x0) -> "ChainInit":
    return cls(InitKind.FIXED, x0=np.atleast_1d(np.asarray(x0, dtype=float)))

  @classmethod
  def from_sampler(cls, sampler: InitSampler) -> "ChainInit":
    return cls(InitKind.SAMPLER, sampler=sampler)

  def initial_state(self, theta: ParamVector, stream: RngStream) -> np.ndarray:
    if self.kind is InitKind.FIXED:
      return self.x0.copy()
    return np.asarray(self.sampler(theta, stream, 1), dtype=float)[0]

  def initial_states(self, theta: ParamVector, stream: RngStream, n: int) -> np.ndarray:
    if self.kind is InitKind.FIXED:
      return np.tile(self.x0, (n, 1))
    return np.asarray(self.sampler(theta, stream, n), dtype=float).reshape(n, -1)


def default_proposal_scale(q: int) -> float:
  """sigma_p = 2.4 / sqrt(q), an artifact default (the method leaves the scale free)."""
  return RWMH_SCALE_NUMERATOR / math.sqrt(q)


def default_mala_step(q: int) -> float:
  """h = 0.5 / q, an artifact default."""
  return MALA_STEP_NUMERATOR / q


@dataclass(frozen=True, eq=False)
class MarkovKernelSpec:
  """
  A transition rule P on R^q.

  ``scale`` is the proposal scale sigma_p for RWMH, the step h for MALA and the noise scale for the
  autoregressive kernel x' = center + phi (x - center) + scale * xi. The discrete kernel moves
  between state indices 0..m-1 (stored as 1-vectors) following ``matrix``; the frozen kernel never
  moves.
  """
  kind: KernelKind
  dim: int
  target: Optional[TargetDensity] = None
  scale: float = 1.0
  phi: float = 0.0
  center: Optional[np.ndarray] = None
  matrix: Optional[np.ndarray] = None
  init: Optional[ChainInit] = field(default=None)

  def __post_init__(self):
    if self.kind in (KernelKind.RWMH, KernelKind.MALA):
      if self.target is None:
        raise ConfigurationError(f"{self.kind.value} kernel needs a target density")
      if not self.scale > 0.0:
        name = "proposal scale sigma_p" if self.kind is KernelKind.RWMH else "step h"
        raise DomainError(f"{name} must be positive, got {self.scale}")
    if self.kind is KernelKind.MALA and not self.target.has_gradient:
      raise ConfigurationError("MALA kernel needs grad_log_pdf on its target")
    if self.kind is KernelKind.AUTOREGRESSIVE and not self.scale >= 0.0:
      raise DomainError(f"autoregressive noise scale must be non-negative, got {self.scale}")
    if self.kind is KernelKind.DISCRETE:
      P = self.matrix
      if P is None or P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise DomainError("discrete kernel needs a square transition matrix")
      if np.any(P < 0.0) or not np.allclose(P.sum(axis=1), 1.0, atol=1e-12):
        raise DomainError("discrete kernel matrix must be row-stochastic")

  @classmethod
  def rwmh(cls, target: TargetDensity, sigma_p: float | None = None, init: ChainInit | None = None) -> "MarkovKernelSpec":
    scale = default_proposal_scale(target.dim) if sigma_p is None else float(sigma_p)
    return cls(KernelKind.RWMH, target.dim, target=target, scale=scale, init=init)

  @classmethod
  def mala(cls, target: TargetDensity, h: float | None = None, init: ChainInit | None = None) -> "MarkovKernelSpec":
    step = default_mala_step(target.dim) if h is None else float(h)
    return cls(KernelKind.MALA, target.dim, target=target, scale=step, init=init)

  @classmethod
  def autoregressive(cls, phi: float, scale: float, center=0.0, init: ChainInit | None = None) -> "MarkovKernelSpec":
    c = np.atleast_1d(np.asarray(center, dtype=float))
    return cls(KernelKind.AUTOREGRESSIVE, c.size, scale=float(scale), phi=float(phi), center=c, init=init)

  @classmethod
  def discrete(cls, matrix, init: ChainInit | None = None) -> "MarkovKernelSpec":
    return cls(KernelKind.DISCRETE, 1, matrix=np.asarray(matrix, dtype=float), init=init)

  @classmethod
  def frozen(cls, dim: int, init: ChainInit | None = None) -> "MarkovKernelSpec":
    return cls(KernelKind.FROZEN, dim, init=init)


@dataclass
class Trajectory:
  """States X_1..X_len of one chain, shape (len, q), and how many proposals were accepted."""
  states: np.ndarray
  accept_count: int

  @property
  def length(self) -> int:
    return self.states.shape[0]

  @property
  def acceptance_rate(self) -> float:
    return self.accept_count / max(1, self.length - 1)


@dataclass
class ChainBatch:
  """Many independent chains of equal length: states (n_chains, len, q), accept_counts (n_chains,)."""
  states: np.ndarray
  accept_counts: np.ndarray


# --- acceptance ratios ---

def rwmh_log_acceptance(x, y, target: TargetDensity) -> float:
  """log pi(y) - log pi(x); the RWMH acceptance probability is 1 ^ exp of it."""
  return float(target.log_pdf(np.asarray(y, dtype=float)) - target.log_pdf(np.asarray(x, dtype=float)))


def _mala_log_proposal(to, frm, grad_frm, h):
  diff = to - (frm + h * grad_frm)
  return -np.sum(diff * diff, axis=-1) / (4.0 * h)


def mala_log_acceptance(x, y, target: TargetDensity, h: float) -> float:
  """Log Hastings ratio log[pi(y) q_h(y, x)] - log[pi(x) q_h(x, y)] of a MALA move x -> y."""
  x = np.asarray(x, dtype=float)
  y = np.asarray(y, dtype=float)
  gx = target.grad_log_pdf(x)
  gy = target.grad_log_pdf(y)
  correction = _mala_log_proposal(x, y, gy, h) - _mala_log_proposal(y, x, gx, h)
  return float(target.log_pdf(y) - target.log_pdf(x) + correction)


def _accept(log_alpha, u):
  with np.errstate(divide='ignore', invalid='ignore'):
    log_alpha = np.where(np.isnan(log_alpha), -np.inf, np.minimum(0.0, log_alpha))
    return np.log(u) < log_alpha


def _check_finite(lx, what: str = "current state"):
  if not np.all(np.isfinite(lx)):
    raise StateError(f"log density is not finite at the {what}")


# --- single moves (x may carry leading batch axes) ---

def _rwmh_move(x, lx, target: TargetDensity, sigma_p: float, stream: RngStream):
  z = stream.normal(x.shape)
  y = x + sigma_p * z
  with np.errstate(invalid='ignore', over='ignore'):
    ly = target.log_pdf(y)
    accepted = _accept(ly - lx, stream.uniform(x.shape[:-1] or None))
  keep = np.asarray(accepted)[..., None]
  return np.where(keep, y, x), np.where(accepted, ly, lx), accepted


def _mala_move(x, lx, gx, target: TargetDensity, h: float, stream: RngStream):
  z = stream.normal(x.shape)
  mean_x = x + h * gx
  y = mean_x + math.sqrt(2.0 * h) * z
  with np.errstate(invalid='ignore', over='ignore'):
    ly = target.log_pdf(y)
    gy = np.asarray(target.grad_log_pdf(y), dtype=float)
    correction = _mala_log_proposal(x, y, gy, h) - _mala_log_proposal(y, x, gx, h)
    accepted = _accept(ly - lx + correction, stream.uniform(x.shape[:-1] or None))
  keep = np.asarray(accepted)[..., None]
  return np.where(keep, y, x), np.where(accepted, ly, lx), np.where(keep, gy, gx), accepted


def rwmh_step(x, target: TargetDensity, sigma_p: float, stream: RngStream) -> tuple[np.ndarray, bool]:
  """One random-walk Metropolis-Hastings move: Y = x + sigma_p Z, accepted with prob 1 ^ pi(Y)/pi(x).

  Raises:
      DomainError: sigma_p <= 0
      StateError: log_pdf(x) is not finite
  """
  if not sigma_p > 0.0:
    raise DomainError(f"proposal scale must be positive, got {sigma_p}")
  x = np.atleast_1d(np.asarray(x, dtype=float))
  lx = target.log_pdf(x)
  _check_finite(lx)
  y, _, accepted = _rwmh_move(x, lx, target, sigma_p, stream)
  return y, bool(accepted)


def mala_step(x, target: TargetDensity, h: float, stream: RngStream) -> tuple[np.ndarray, bool]:
  """One Metropolis-adjusted Langevin move: Y = x - h grad U(x) + sqrt(2h) Z with the full Hastings correction.

  Raises:
      ConfigurationError: the target has no gradient
      DomainError: h <= 0
      StateError: log_pdf(x) is not finite
  """
  if not target.has_gradient:
    raise ConfigurationError("MALA needs grad_log_pdf on the target")
  if not h > 0.0:
    raise DomainError(f"MALA step must be positive, got {h}")
  x = np.atleast_1d(np.asarray(x, dtype=float))
  lx = target.log_pdf(x)
  _check_finite(lx)
  y, _, _, accepted = _mala_move(x, lx, np.asarray(target.grad_log_pdf(x), dtype=float), target, h, stream)
  return y, bool(accepted)


def _plain_move(kernel: MarkovKernelSpec, x, stream: RngStream):
  if kernel.kind is KernelKind.AUTOREGRESSIVE:
    xi = stream.normal(x.shape)
    y = kernel.center + kernel.phi * (x - kernel.center) + kernel.scale * xi
    return y, np.ones(x.shape[:-1], dtype=bool)
  if kernel.kind is KernelKind.DISCRETE:
    idx = x[..., 0].astype(np.int64)
    cum = np.cumsum(kernel.matrix[idx], axis=-1)
    u = stream.uniform(idx.shape or None)
    nxt = np.minimum(np.sum(cum <= np.asarray(u)[..., None], axis=-1), kernel.matrix.shape[0] - 1)
    return nxt[..., None].astype(float), nxt != idx
  return x.copy(), np.zeros(x.shape[:-1], dtype=bool)


def _run(kernel: MarkovKernelSpec, x0: np.ndarray, length: int, stream: RngStream):
  """Shared driver: x0 has shape (..., q); returns states (..., length, q) and accept counts (...)."""
  states = np.empty(x0.shape[:-1] + (length, x0.shape[-1]))
  states[..., 0, :] = x0
  accepts = np.zeros(x0.shape[:-1], dtype=np.int64)
  x = x0

  if kernel.kind is KernelKind.RWMH:
    lx = kernel.target.log_pdf(x)
    _check_finite(lx, "initial state")
    for i in range(1, length):
      x, lx, acc = _rwmh_move(x, lx, kernel.target, kernel.scale, stream)
      states[..., i, :] = x
      accepts += acc
  elif kernel.kind is KernelKind.MALA:
    lx = kernel.target.log_pdf(x)
    _check_finite(lx, "initial state")
    gx = np.asarray(kernel.target.grad_log_pdf(x), dtype=float)
    for i in range(1, length):
      x, lx, gx, acc = _mala_move(x, lx, gx, kernel.target, kernel.scale, stream)
      states[..., i, :] = x
      accepts += acc
  else:
    for i in range(1, length):
      x, acc = _plain_move(kernel, x, stream)
      states[..., i, :] = x
      accepts += acc
  return states, accepts


def simulate_chain(kernel: MarkovKernelSpec, x0, length: int, stream: RngStream) -> Trajectory:
  """Run ``length - 1`` steps from x0; states[0] = x0.

  Raises:
      DomainError: length < 1
      StateError: the target log density is not finite at x0
  """
  if length < 1:
    raise DomainError(f"chain length must be >= 1, got {length}")
  x0 = np.atleast_1d(np.asarray(x0, dtype=float))
  states, accepts = _run(kernel, x0, length, stream)
  return Trajectory(states, int(accepts))


def simulate_chains(kernel: MarkovKernelSpec, x0, length: int, n_chains: int, stream: RngStream) -> ChainBatch:
  """Run ``n_chains`` independent chains side by side.

  Args:
      x0: a single start (q,) shared by every chain, or one start per chain (n_chains, q)
  """
  if length < 1:
    raise DomainError(f"chain length must be >= 1, got {length}")
  start = np.atleast_1d(np.asarray(x0, dtype=float))
  start = np.broadcast_to(start, (n_chains, kernel.dim)).copy()
  states, accepts = _run(kernel, start, length, stream)
  return ChainBatch(states, accepts)
