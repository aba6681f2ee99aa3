from .experiment_controller import ExperimentResult, build_problem, run_experiment, print_table
from .main import main, build_parser, resolve_threads

__all__ = ["main", "build_parser", "resolve_threads", "ExperimentResult", "build_problem", "run_experiment", "print_table"]
