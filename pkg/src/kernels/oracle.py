"""Grid discretizations of 1-D kernels, used as exact oracles for invariance and mixing checks."""
import numpy as np

from src.core.errors import DomainError, UnsupportedError
from .mcmc import KernelKind, MarkovKernelSpec
from .targets import TargetDensity


def _cell_widths(grid: np.ndarray) -> np.ndarray:
  edges = np.concatenate(([grid[0]], 0.5 * (grid[1:] + grid[:-1]), [grid[-1]]))
  widths = np.diff(edges)
  # end cells get the same width as their neighbour
  widths[0] = widths[1] if grid.size > 1 else 1.0
  widths[-1] = widths[-2] if grid.size > 1 else 1.0
  return widths


def grid_distribution(target: TargetDensity, grid) -> np.ndarray:
  """pi restricted to the grid: pi(x_i) * width_i, normalized."""
  grid = np.asarray(grid, dtype=float)
  logp = target.log_pdf(grid[:, None]) + np.log(_cell_widths(grid))
  w = np.exp(logp - logp.max())
  return w / w.sum()


def transition_matrix_oracle(kernel: MarkovKernelSpec, grid) -> np.ndarray:
  """Row-stochastic matrix of the kernel on a sorted 1-D grid.

  Off-diagonal mass is proposal density x acceptance probability x cell width; whatever is left
  (rejections and proposals leaving the grid) sits on the diagonal. For Metropolis-type kernels
  this keeps detailed balance with ``grid_distribution`` exact up to rounding.

  Raises:
      UnsupportedError: the kernel is not one-dimensional, or has no density (frozen/autoregressive)
      DomainError: the grid is not sorted
  """
  if kernel.kind is KernelKind.DISCRETE:
    return kernel.matrix.copy()
  if kernel.kind not in (KernelKind.RWMH, KernelKind.MALA):
    raise UnsupportedError(f"no transition-matrix oracle for {kernel.kind.value} kernels")
  if kernel.dim != 1:
    raise UnsupportedError(f"transition-matrix oracle needs a 1-D target, got dimension {kernel.dim}")

  grid = np.asarray(grid, dtype=float)
  if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0.0):
    raise DomainError("grid must be a strictly increasing 1-D array with at least two points")

  target = kernel.target
  widths = _cell_widths(grid)
  x = grid[:, None]
  y = grid[None, :]
  logp = target.log_pdf(grid[:, None])

  if kernel.kind is KernelKind.RWMH:
    s = kernel.scale
    log_q = -0.5 * ((y - x) / s) ** 2 - np.log(s * np.sqrt(2.0 * np.pi))
    log_ratio = logp[None, :] - logp[:, None]
  else:
    h = kernel.scale
    g = target.grad_log_pdf(grid[:, None])[:, 0]
    mean = (grid + h * g)[:, None]
    log_q = -((y - mean) ** 2) / (4.0 * h) - 0.5 * np.log(4.0 * np.pi * h)
    log_q_back = log_q.T
    log_ratio = logp[None, :] - logp[:, None] + log_q_back - log_q

  P = np.exp(log_q + np.minimum(0.0, log_ratio)) * widths[None, :]
  np.fill_diagonal(P, 0.0)
  np.fill_diagonal(P, 1.0 - P.sum(axis=1))
  return P


def stationary_distribution(P) -> np.ndarray:
  """Left Perron vector of a row-stochastic matrix, normalized to sum 1."""
  P = np.asarray(P, dtype=float)
  values, vectors = np.linalg.eig(P.T)
  v = np.real(vectors[:, np.argmin(np.abs(values - 1.0))])
  v = np.abs(v)
  return v / v.sum()


def tv_decay(P, start: int, steps: int, pi=None) -> np.ndarray:
  """Total-variation distances || delta_start P^k - pi || for k = 1..steps."""
  P = np.asarray(P, dtype=float)
  pi = stationary_distribution(P) if pi is None else np.asarray(pi, dtype=float)
  dist = np.zeros(P.shape[0])
  dist[start] = 1.0
  out = np.empty(steps)
  for k in range(steps):
    dist = dist @ P
    out[k] = 0.5 * np.abs(dist - pi).sum()
  return out
