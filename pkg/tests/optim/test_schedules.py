import pytest

from src.core.errors import DomainError
from src.optim.preconditioners import OptimizerConfig, OptimizerKind
from src.optim.schedules import ScheduleSpec, schedule_eval, validate_schedule

ADAGRAD = OptimizerConfig(OptimizerKind.ADAGRAD)
AMSGRAD = OptimizerConfig(OptimizerKind.AMSGRAD)


def conditions(violations):
    return [v.condition for v in violations]


def test_default_schedule_values():
    schedule = ScheduleSpec()
    assert schedule_eval(schedule, 4).gamma == 0.0005
    assert schedule_eval(schedule, 16).T == 4
    assert schedule_eval(schedule, 17).T == 5
    assert schedule_eval(schedule, 1).T == 2
    assert all(schedule_eval(schedule, n).eps == 1.0 for n in (1, 10, 1000))


def test_schedule_starts_at_one():
    with pytest.raises(DomainError):
        schedule_eval(ScheduleSpec(), 0)


def test_schedules_are_monotone():
    schedule = ScheduleSpec(C_gamma=0.3, gamma_exp=0.7, C_T=0.5, alpha_exp=0.6, eps_exp=0.2)
    values = [schedule_eval(schedule, n) for n in range(1, 2001)]
    for a, b in zip(values, values[1:]):
        assert b.gamma <= a.gamma
        assert b.T >= a.T >= 2
        assert b.eps >= a.eps


def test_adagrad_defaults_are_valid():
    assert validate_schedule(ScheduleSpec(gamma_exp=0.5, M_exp=0.0, eps_exp=0.0, alpha_exp=0.5), ADAGRAD) == []
    assert validate_schedule(ScheduleSpec(), AMSGRAD) == []


def test_amsgrad_rate_condition():
    found = validate_schedule(ScheduleSpec(gamma_exp=0.9, eps_exp=0.3), AMSGRAD)
    assert conditions(found) == ["2 gamma + eps_exp < 2"]
    assert "2.1" in str(found[0])


def test_generic_rate_condition():
    generic = OptimizerConfig(OptimizerKind.IDENTITY, lam_lower_exp=0.5)
    assert conditions(validate_schedule(ScheduleSpec(gamma_exp=0.6), generic)) == ["gamma + lam_lower < 1"]
    assert validate_schedule(ScheduleSpec(gamma_exp=0.4), generic) == []


def test_adagrad_rate_condition():
    found = validate_schedule(ScheduleSpec(gamma_exp=0.8, M_exp=0.3), ADAGRAD)
    assert conditions(found) == ["gamma + M < 1 + eps_exp"]
    assert validate_schedule(ScheduleSpec(gamma_exp=0.8, M_exp=0.3, eps_exp=0.2), ADAGRAD) == []


def test_every_violation_is_reported():
    schedule = ScheduleSpec(C_gamma=0.0, alpha_exp=0.0, gamma_exp=-0.1, eps_exp=-1.0)
    found = conditions(validate_schedule(schedule, OptimizerConfig(rho1=1.0, delta=0.0)))
    for expected in ("C_gamma > 0", "alpha > 0", "gamma >= 0", "eps_exp >= 0", "0 <= rho1 < 1", "delta > 0"):
        assert expected in found
