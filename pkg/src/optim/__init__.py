from .preconditioners import (
    OptimizerKind,
    OptimizerConfig,
    AdagradState,
    AmsgradState,
    adagrad_update,
    adagrad_lower_eps,
    amsgrad_update,
    amsgrad_lower_eps,
)
from .schedules import ScheduleSpec, ScheduleValues, ScheduleViolation, schedule_eval, validate_schedule
from .selector import (
    IterateSelector,
    build_selector,
    selector_lambdas,
    selector_for,
    select_random_iterate,
    select_random_iterates,
    expected_at_random_iterate,
)
from .problems import (
    Estimate,
    Problem,
    MarkovChainProblem,
    ExactGradientProblem,
    IwaeProblem,
    quadratic_problem,
    ar1_problem,
)
from .loop import run_optimizer

__all__ = [
    "OptimizerKind", "OptimizerConfig", "AdagradState", "AmsgradState", "adagrad_update", "adagrad_lower_eps",
    "amsgrad_update", "amsgrad_lower_eps",
    "ScheduleSpec", "ScheduleValues", "ScheduleViolation", "schedule_eval", "validate_schedule",
    "IterateSelector", "build_selector", "selector_lambdas", "selector_for", "select_random_iterate",
    "select_random_iterates", "expected_at_random_iterate",
    "Estimate", "Problem", "MarkovChainProblem", "ExactGradientProblem", "IwaeProblem", "quadratic_problem",
    "ar1_problem",
    "run_optimizer",
]
