from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.core.errors import DomainError
from src.core.rng import RngStream
from src.ui.logging import Logger

KERNEL_CODENAME = 'KERNELS'

logger = Logger()
kernel_logger = logger.get_logger(f'[blue][{KERNEL_CODENAME}][/]', False)

FD_STEP = 1e-5
FD_RELATIVE_TOLERANCE = 1e-5


@dataclass(frozen=True)
class TargetDensity:
  """
  An unnormalized density pi on R^q, handled in log space.

  ``log_pdf`` maps states of shape (..., q) to log densities of shape (...); ``grad_log_pdf`` (when
  present) maps (..., q) to (..., q). Leading axes are batch axes so a whole population of chains
  can be evaluated at once.
  """
  log_pdf: Callable[[np.ndarray], np.ndarray]
  dim: int
  grad_log_pdf: Optional[Callable[[np.ndarray], np.ndarray]] = None
  name: str = "target"

  def __post_init__(self):
    if self.dim < 1:
      raise DomainError(f"target dimension must be >= 1, got {self.dim}")

  @property
  def has_gradient(self) -> bool:
    return self.grad_log_pdf is not None

  def grad_potential(self, x: np.ndarray) -> np.ndarray:
    """Gradient of U = -log pi."""
    return -np.asarray(self.grad_log_pdf(x), dtype=float)


def gaussian_target(mean, var_diag=1.0) -> TargetDensity:
  """N(mean, diag(var_diag)), log density up to its normalizing constant."""
  mu = np.atleast_1d(np.asarray(mean, dtype=float))
  var = np.broadcast_to(np.asarray(var_diag, dtype=float), mu.shape).copy()
  if np.any(var <= 0.0):
    raise DomainError("gaussian target needs positive variances")

  def log_pdf(x):
    z = np.asarray(x, dtype=float) - mu
    return -0.5 * np.sum(z * z / var, axis=-1)

  def grad_log_pdf(x):
    return -(np.asarray(x, dtype=float) - mu) / var

  return TargetDensity(log_pdf, mu.size, grad_log_pdf, name=f"gaussian(d={mu.size})")


def check_gradient(target: TargetDensity, stream: RngStream, probes: int = 100, scale: float = 1.0) -> float:
  """Largest relative gap between grad_log_pdf and central finite differences of log_pdf.

  Probe points are ``scale`` * standard normal draws. The relative gap at a probe is
  |analytic - numeric| / max(1, |analytic|), taken entrywise.

  Returns:
      float: the worst gap over all probes; a correct gradient stays below 1e-5
  """
  if not target.has_gradient:
    raise DomainError(f"{target.name} has no gradient to check")

  worst = 0.0
  eye = np.eye(target.dim)
  for x in scale * stream.normal((probes, target.dim)):
    analytic = np.asarray(target.grad_log_pdf(x), dtype=float)
    numeric = np.array([
      (target.log_pdf(x + FD_STEP * e) - target.log_pdf(x - FD_STEP * e)) / (2.0 * FD_STEP) for e in eye
    ])
    gap = np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))
    worst = max(worst, float(gap.max()))
  if worst > FD_RELATIVE_TOLERANCE:
    kernel_logger.warning(f"{target.name}: gradient disagrees with finite differences by {worst:.3g}")
  return worst
