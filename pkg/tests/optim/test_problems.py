import math

import numpy as np
import pytest

from src.core.errors import DomainError, UnsupportedError
from src.core.rng import RngStream
from src.iwae.models import linear_gaussian_model
from src.mlmc.levels import LevelDistribution
from src.optim.problems import ExactGradientProblem, IwaeProblem, ar1_problem, quadratic_problem

GEO = LevelDistribution.geometric(0.5)


def within(samples, target, sigmas=5.0):
    mean = samples.mean(axis=0)
    se = samples.std(axis=0, ddof=1) / math.sqrt(samples.shape[0])
    return np.all(np.abs(mean - target) <= sigmas * se + 1e-12)


def test_quadratic_estimate_shape_and_cost():
    problem = quadratic_problem(dim=5)
    est = problem.estimate(np.ones(5), 16, GEO, RngStream(0, 0))
    assert est.grad.shape == (5,)
    assert est.cost == est.chain_len >= 1
    assert est.final_state.shape == (5,)
    assert problem.true_grad(np.arange(5.0)).tolist() == [0.0, 1.0, 2.0, 3.0, 4.0]
    assert problem.objective(np.ones(5)) == 2.5


def test_quadratic_stationary_estimates_are_unbiased():
    theta = np.array([1.0, -1.0])
    problem = quadratic_problem(dim=2, init="stationary")
    values = problem.estimate_batch(theta, 16, GEO, RngStream(1, 0), 4000)
    assert values.shape == (4000, 2)
    assert within(values, theta)


def test_unknown_problem_options():
    with pytest.raises(DomainError):
        quadratic_problem(init="random")
    with pytest.raises(DomainError):
        quadratic_problem(kernel="hmc")
    with pytest.raises(DomainError):
        ar1_problem(phi=1.0)


def test_warm_start_uses_previous_state():
    problem = quadratic_problem(dim=1, warm_start=True)
    est = problem.estimate(np.zeros(1), 2, GEO, RngStream(0, 0), previous_state=np.array([50.0]))
    # the first state of the chain is clipped at the default bound
    assert est.grad[0] > 1.0


def test_conditional_and_raw_estimates_share_their_mean():
    problem = ar1_problem()
    theta = np.zeros(1)
    raw = problem.estimate_batch(theta, 32, GEO, RngStream(3, 0), 20_000)
    cond = problem.conditional_batch(theta, 32, GEO, RngStream(3, 1), 20_000)
    se = math.sqrt(raw.var(ddof=1) / raw.size + cond.var(ddof=1) / cond.size)
    assert abs(raw.mean() - cond.mean()) <= 5.0 * se
    assert cond.var() < raw.var()


def test_exact_gradient_problem():
    problem = ExactGradientProblem(lambda theta: 2.0 * theta, dim=2, objective=lambda theta: float(theta @ theta))
    est = problem.estimate(np.array([1.0, 2.0]), 8, GEO, RngStream(0, 0))
    assert est.grad.tolist() == [2.0, 4.0] and est.cost == 1
    assert problem.objective(np.array([1.0, 2.0])) == 5.0
    with pytest.raises(UnsupportedError):
        problem.conditional_batch(np.zeros(2), 8, GEO, RngStream(0, 0), 10)


def test_iwae_problem():
    model = linear_gaussian_model()
    problem = IwaeProblem(model, [1.0, 3.0], k=5)
    theta = np.zeros(1)
    assert problem.true_grad(theta) == pytest.approx([-1.0])
    assert problem.objective(theta) == pytest.approx(1.25 + 0.5 * math.log(4.0 * math.pi))
    est = problem.estimate(theta, 8, GEO, RngStream(0, 0))
    assert est.grad.shape == (1,)
    assert est.cost == est.chain_len * 5 * 2
    plain = IwaeProblem(model, 1.0, k=5, estimator="plain").estimate(theta, 8, GEO, RngStream(0, 0))
    assert plain.cost == 5
    with pytest.raises(DomainError):
        IwaeProblem(model, 1.0, k=5, estimator="biased")
    with pytest.raises(DomainError):
        IwaeProblem(model, 1.0, k=0)
