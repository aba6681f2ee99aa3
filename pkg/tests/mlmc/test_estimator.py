import numpy as np
import pytest

from src.core.errors import DomainError, LengthError
from src.core.rng import RngStream
from src.mlmc.batch import level_groups, mlmc_estimates_batch, truncated_mean_batch
from src.mlmc.estimator import (
    GradFn,
    mixture_mean,
    mixture_mean_closed_form,
    mlmc_combine,
    mlmc_estimate,
    partial_mean,
)
from src.mlmc.levels import LevelDistribution, level_draw

GEO = LevelDistribution.geometric(0.5)
IDENTITY = GradFn(lambda theta, x: x, bound=1e6, vectorized=True)


def test_partial_mean():
    assert partial_mean([1.0, 2.0, 3.0, 4.0], 2) == pytest.approx([1.5])
    assert partial_mean([1.0, 2.0, 3.0, 4.0], 3.7) == pytest.approx([2.0])
    assert partial_mean([[1.0, 0.0], [3.0, 2.0]], 2) == pytest.approx([2.0, 1.0])
    with pytest.raises(DomainError):
        partial_mean([1.0], 0.5)
    with pytest.raises(LengthError):
        partial_mean([1.0, 2.0], 3)


def test_combine_level_one():
    # H(X1) + 2 * (mean of 2 - mean of 1)
    est = mlmc_combine([1.0, 3.0], level_draw(GEO, 1, 8), 8)
    assert est == pytest.approx([1.0 + 2.0 * (2.0 - 1.0)])


def test_combine_truncated_level_keeps_base():
    values = np.arange(1.0, 17.0)
    assert mlmc_combine(values, level_draw(GEO, 4, 8), 8) == pytest.approx([1.0])


def test_constant_chain_gives_constant():
    values = np.full(8, 2.5)
    for k in range(1, 4):
        assert mlmc_combine(values, level_draw(GEO, k, 8), 8) == pytest.approx([2.5])


def test_estimate_reads_only_needed_prefix():
    chain = np.arange(1.0, 9.0)[:, None]
    est, used = mlmc_estimate(IDENTITY, np.zeros(1), chain, level_draw(GEO, 2, 8), 8)
    assert used == 4
    assert est == pytest.approx([1.0 + 4.0 * (2.5 - 1.5)])
    with pytest.raises(LengthError):
        mlmc_estimate(IDENTITY, np.zeros(1), chain[:2], level_draw(GEO, 2, 8), 8)


def test_grad_fn_clips():
    grad = GradFn(lambda theta, x: x, bound=10.0)
    assert grad(np.zeros(1), np.array([25.0, -3.0])) == pytest.approx([10.0, -3.0])
    with pytest.raises(DomainError):
        GradFn(lambda theta, x: x, bound=0.0)


def test_telescoping_identity_on_fixed_chains():
    stream = RngStream(2024, 0)
    for i in range(200):
        T = 2 ** (1 + i % 9) + i % 3
        chain = stream.normal((1024, 2))
        mixed = mixture_mean(IDENTITY, np.zeros(2), chain, GEO, T)
        span = 2 ** int(np.floor(np.log2(T)))
        plain = partial_mean(chain, span)
        assert np.max(np.abs(mixed - plain)) <= 1e-12 * max(1.0, np.max(np.abs(plain)))


def test_mixture_closed_form_general_mu():
    dist = LevelDistribution.finite([0.4, 0.3, 0.2, 0.1])
    values = RngStream(1, 0).normal((20, 1))
    literal = mixture_mean(IDENTITY, np.zeros(1), values, dist, 20)
    assert literal == pytest.approx(mixture_mean_closed_form(values, dist, 20), abs=1e-12)


def test_batch_matches_scalar():
    values = RngStream(9, 0).normal((6, 8, 3))
    draw = level_draw(GEO, 3, 8)
    batch = mlmc_estimates_batch(values, draw, 8)
    for i in range(6):
        assert batch[i] == pytest.approx(mlmc_combine(values[i], draw, 8), abs=1e-12)
    assert truncated_mean_batch(values, 4) == pytest.approx(values[:, :4, :].mean(axis=1))


def test_level_groups():
    groups = level_groups(np.array([2, 1, 2, 3, 1]))
    assert list(groups) == [1, 2, 3]
    assert groups[2].tolist() == [0, 2]
