import math

import numpy as np
import pytest

from src.core.errors import DomainError
from src.diagnostics.bounds import amsgrad_constants, amsgrad_rate_bound
from src.diagnostics.fitting import fit_affine, fit_loglog, phi, psi, rate_envelope, rate_reference
from src.optim.preconditioners import OptimizerConfig, OptimizerKind
from src.optim.schedules import ScheduleSpec
from src.optim.selector import selector_for


def test_loglog_recovers_a_power_law():
    xs = np.array([2.0, 4.0, 8.0, 16.0, 32.0])
    fit = fit_loglog(xs, 3.0 / xs)
    assert fit.slope == pytest.approx(-1.0)
    assert fit.intercept == pytest.approx(math.log(3.0))
    assert fit.r_squared == pytest.approx(1.0)


def test_affine_fit():
    fit = fit_affine([1.0, 2.0, 3.0, 4.0], [3.0, 5.0, 7.0, 9.0])
    assert fit.slope == pytest.approx(2.0) and fit.intercept == pytest.approx(1.0)


def test_fit_rejects_bad_points():
    with pytest.raises(DomainError):
        fit_loglog([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(DomainError):
        fit_loglog([1.0, 2.0, 3.0], [1.0, 0.0, 2.0])
    with pytest.raises(DomainError):
        fit_affine([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        fit_affine([1.0, 2.0, np.nan], [1.0, 2.0, 3.0])


def test_rate_functions():
    assert psi(100, 0.5) == pytest.approx(10.0)
    assert psi(100, 1.0) == pytest.approx(math.log(100))
    assert psi(100, 1.5) == 1.0
    assert phi(100, 0.5) == pytest.approx(10.0 * math.log(100))
    assert phi(100, 1.0) == pytest.approx(math.log(100) ** 2)
    assert phi(100, 2.0) == 1.0
    with pytest.raises(DomainError):
        psi(1, 0.5)


def test_rate_reference():
    assert rate_reference([4.0, 16.0]) == pytest.approx([math.log(4.0) ** 2 / 2.0, math.log(16.0) ** 2 / 4.0])
    with pytest.raises(DomainError):
        rate_reference([1.0, 4.0])


def test_amsgrad_envelope_with_default_schedule():
    N = 100
    log_n = math.log(N)
    expected = N ** -0.5 * (1.0 + log_n + log_n ** 2 + 0.5 * log_n)
    assert rate_envelope("amsgrad", ScheduleSpec(), N) == pytest.approx(expected)
    assert rate_envelope(OptimizerKind.AMSGRAD, ScheduleSpec(), 10_000) < rate_envelope("amsgrad", ScheduleSpec(), 100)


def test_identity_envelope():
    schedule = ScheduleSpec(gamma_exp=0.5, alpha_exp=0.5)
    # psi(N, 1) = log N, phi(N, 1) = log^2 N
    N = 1000
    assert rate_envelope("identity", schedule, N) == pytest.approx(N ** -0.5 * (1 + math.log(N) + math.log(N) ** 2))


def test_amsgrad_constants():
    c = amsgrad_constants(c1=0.5, c2=1.0, G=1.0, L=0.0, delta=1.0, rho1=0.5, d=1, gamma1=1.0, T1=2.0)
    assert c.b1 == pytest.approx(0.5)
    assert c.b4 == pytest.approx(0.5)
    no_momentum = amsgrad_constants(c1=0.5, c2=1.0, G=1.0, L=1.0, delta=1.0, rho1=0.0, d=3, gamma1=0.1, T1=2.0)
    assert no_momentum.b3 == 0.0 and no_momentum.b4 == 0.0


def test_amsgrad_constants_reject_bad_inputs():
    with pytest.raises(DomainError):
        amsgrad_constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1, 1.0, 2.0)
    with pytest.raises(DomainError):
        amsgrad_constants(1.0, 1.0, 1.0, 1.0, 0.0, 0.5, 1, 1.0, 2.0)
    with pytest.raises(DomainError):
        amsgrad_constants(1.0, 1.0, 1.0, -1.0, 1.0, 0.5, 1, 1.0, 2.0)


def test_amsgrad_rate_bound():
    schedule = ScheduleSpec(C_gamma=0.1)
    cfg = OptimizerConfig(OptimizerKind.AMSGRAD, delta=1.0)
    c = amsgrad_constants(c1=1.0, c2=1.0, G=10.0, L=1.0, delta=1.0, rho1=0.9, d=10, gamma1=0.1, T1=2.0)
    base = amsgrad_rate_bound(c, schedule, cfg, 500, 0.0)
    shifted = amsgrad_rate_bound(c, schedule, cfg, 500, 50.0)
    assert 0.0 < base < shifted
    assert shifted - base == pytest.approx(50.0 / selector_for(cfg, schedule, 500).varpi)
    with pytest.raises(DomainError):
        amsgrad_rate_bound(c, schedule, OptimizerConfig(OptimizerKind.ADAGRAD), 500, 0.0)
    with pytest.raises(DomainError):
        amsgrad_rate_bound(c, schedule, cfg, 0, 0.0)
