import numpy as np
import pytest

from src.core.errors import ConfigurationError, ConfigParseError, DomainError, MLMCError, OptimizerError
from src.core.records import RunRecord, as_param_vector
from src.core.rng import RngStream, make_stream, standard_normal


def test_same_seed_and_stream_replay():
  a = standard_normal(make_stream(42, 0), 5)
  b = standard_normal(make_stream(42, 0), 5)
  assert np.array_equal(a, b)


def test_streams_are_independent_of_each_other():
  a = standard_normal(make_stream(42, 0), 1000)
  b = standard_normal(make_stream(42, 1), 1000)
  assert not np.array_equal(a, b)
  assert abs(np.corrcoef(a, b)[0, 1]) < 0.1


def test_replicate_stream_does_not_depend_on_other_replicates():
  # drawing from stream 0 first must not change stream 3
  alone = standard_normal(make_stream(7, 3), 10)
  standard_normal(make_stream(7, 0), 10_000)
  again = standard_normal(make_stream(7, 3), 10)
  assert np.array_equal(alone, again)


def test_zero_draws():
  assert standard_normal(make_stream(1, 0), 0).shape == (0,)


def test_negative_draws_rejected():
  with pytest.raises(DomainError):
    standard_normal(make_stream(1, 0), -1)


def test_seed_must_fit_in_64_bits():
  with pytest.raises(DomainError):
    RngStream(1 << 64, 0)
  with pytest.raises(DomainError):
    RngStream(0, -1)


def test_child_streams():
  parent = RngStream(5, 2)
  c0 = parent.child(0).normal(4)
  assert np.array_equal(c0, RngStream(5, 2).child(0).normal(4))
  assert not np.array_equal(c0, parent.child(1).normal(4))
  assert parent.child(0).path == (0,)
  assert parent.child(0).child(3).path == (0, 3)


def test_standard_normal_moments():
  z = standard_normal(make_stream(0, 0), 100_000)
  assert abs(z.mean()) < 0.02
  assert abs(z.var() - 1.0) < 0.02


def test_param_vector_validation():
  theta = as_param_vector([1, 2, 3])
  assert theta.dtype == float and theta.shape == (3,)
  assert as_param_vector(2.5).shape == (1,)
  with pytest.raises(DomainError):
    as_param_vector([1.0, np.nan])
  with pytest.raises(DomainError):
    as_param_vector([1.0, 2.0], dim=3)
  with pytest.raises(DomainError):
    as_param_vector([])


def test_param_vector_is_a_copy():
  src = np.zeros(3)
  theta = as_param_vector(src)
  theta[0] = 1.0
  assert src[0] == 0.0


def test_run_record_to_dict():
  rec = RunRecord(3, np.array([1.0, 2.0]), np.array([0.5, -0.5]), 2, 4, 17, 5.0, np.array([1.0, 1.0]))
  d = rec.to_dict()
  assert d['theta'] == [1.0, 2.0]
  assert d['grad_estimate'] == [0.5, -0.5]
  assert d['level'] == 2 and d['chain_len'] == 4 and d['cumulative_cost'] == 17
  terminal = RunRecord(4, np.array([0.0]), None, None, 0, 17)
  assert terminal.to_dict()['grad_estimate'] is None
  assert terminal.to_dict()['precond_diag'] is None


def test_error_hierarchy():
  assert issubclass(DomainError, ValueError)
  assert issubclass(ConfigParseError, ConfigurationError)
  err = ConfigurationError("invalid configuration", ["a.b: unknown key", "c: missing required key"])
  assert err.violations == ["a.b: unknown key", "c: missing required key"]
  assert "a.b: unknown key" in str(err)
  parse = ConfigParseError("Expecting value", 3, 7)
  assert parse.line == 3 and parse.column == 7
  assert "line 3, column 7" in str(parse)
  wrapped = OptimizerError(12, DomainError("bad"))
  assert isinstance(wrapped, MLMCError)
  assert wrapped.iteration == 12 and "iteration 12" in str(wrapped)
