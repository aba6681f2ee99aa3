from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError

ParamVector = np.ndarray
"""A point theta in R^d: a 1-D float array with finite entries."""


def as_param_vector(values: Any, dim: int | None = None) -> ParamVector:
  """Copy ``values`` into a validated ParamVector.

  Args:
      values: anything numpy can turn into a 1-D float array
      dim (int, optional): expected dimension

  Raises:
      DomainError: wrong shape, empty, wrong dimension or non-finite entries
  """
  theta = np.array(values, dtype=float, copy=True)
  if theta.ndim == 0:
    theta = theta.reshape(1)
  if theta.ndim != 1 or theta.size < 1:
    raise DomainError(f"parameter vector must be 1-D with d >= 1, got shape {theta.shape}")
  if dim is not None and theta.size != dim:
    raise DomainError(f"parameter vector has dimension {theta.size}, expected {dim}")
  if not np.all(np.isfinite(theta)):
    raise DomainError("parameter vector has non-finite entries")
  return theta


@dataclass(frozen=True)
class RunRecord:
  """
  One line of an optimizer run.

  Record ``n`` holds the iterate theta_n and, for n < N, the estimate computed at theta_n that
  produced theta_{n+1}. The terminal record (theta_N) carries no estimate: ``grad_estimate`` and
  ``level`` are None and ``chain_len`` is 0. ``precond_diag`` is the diagonal of A_n when the run
  uses a preconditioner.
  """
  iteration: int
  theta: ParamVector
  grad_estimate: np.ndarray | None
  level: int | None
  chain_len: int
  cumulative_cost: int
  true_grad_sq_norm: float | None = None
  precond_diag: np.ndarray | None = None

  def to_dict(self) -> dict:
    """Plain-python form, used for replay comparisons and debugging output."""
    return {
      'iteration': self.iteration,
      'theta': self.theta.tolist(),
      'grad_estimate': None if self.grad_estimate is None else self.grad_estimate.tolist(),
      'level': self.level,
      'chain_len': self.chain_len,
      'cumulative_cost': self.cumulative_cost,
      'true_grad_sq_norm': self.true_grad_sq_norm,
      'precond_diag': None if self.precond_diag is None else self.precond_diag.tolist(),
    }
