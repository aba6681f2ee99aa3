import numpy as np
import pytest

from src.core.errors import DomainError, UnsupportedError
from src.kernels.mcmc import MarkovKernelSpec
from src.kernels.oracle import grid_distribution, stationary_distribution, transition_matrix_oracle, tv_decay
from src.kernels.targets import gaussian_target

GRID = np.linspace(-6.0, 6.0, 201)
STD_NORMAL = gaussian_target(0.0)


def detailed_balance_residual(P, pi):
  flow = pi[:, None] * P
  return np.max(np.abs(flow - flow.T))


def test_rwmh_oracle_keeps_the_target():
  P = transition_matrix_oracle(MarkovKernelSpec.rwmh(STD_NORMAL, 1.0), GRID)
  pi = grid_distribution(STD_NORMAL, GRID)
  assert np.allclose(P.sum(axis=1), 1.0)
  assert np.all(P >= 0.0)
  assert np.abs(pi @ P - pi).sum() <= 0.02
  assert detailed_balance_residual(P, pi) <= 1e-3


def test_mala_oracle_keeps_the_target():
  P = transition_matrix_oracle(MarkovKernelSpec.mala(STD_NORMAL, 0.25), GRID)
  pi = grid_distribution(STD_NORMAL, GRID)
  assert np.all(P >= 0.0)
  assert np.abs(pi @ P - pi).sum() <= 0.02
  assert detailed_balance_residual(P, pi) <= 1e-3


def test_stationary_distribution_of_two_state_chain():
  P = np.array([[0.9, 0.1], [0.2, 0.8]])
  assert stationary_distribution(P) == pytest.approx([2.0 / 3.0, 1.0 / 3.0])
  assert np.array_equal(transition_matrix_oracle(MarkovKernelSpec.discrete(P), None), P)


def test_geometric_decay_of_total_variation():
  P = np.array([[0.9, 0.1], [0.2, 0.8]])
  tv = tv_decay(P, 0, 30)
  # second eigenvalue 0.7
  assert tv[10] / tv[0] == pytest.approx(0.7 ** 10, rel=1e-6)
  assert np.all(np.diff(tv) <= 0.0)


def test_rwmh_oracle_mixes():
  P = transition_matrix_oracle(MarkovKernelSpec.rwmh(STD_NORMAL, 2.4), GRID)
  tv = tv_decay(P, 150, 200, pi=grid_distribution(STD_NORMAL, GRID))
  assert tv[-1] < 1e-3
  assert tv[-1] < tv[0]


def test_oracle_rejects_unsupported_kernels():
  with pytest.raises(UnsupportedError):
    transition_matrix_oracle(MarkovKernelSpec.rwmh(gaussian_target([0.0, 0.0])), GRID)
  with pytest.raises(UnsupportedError):
    transition_matrix_oracle(MarkovKernelSpec.autoregressive(0.5, 1.0), GRID)
  with pytest.raises(DomainError):
    transition_matrix_oracle(MarkovKernelSpec.rwmh(STD_NORMAL), GRID[::-1])
