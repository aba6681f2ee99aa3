from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from rich.table import Table

from src.config.config import ARTIFACT_VERSION
from src.config.experiment_config import ExperimentConfig, config_hash
from src.core.errors import ConfigurationError, MLMCError
from src.core.records import RunRecord, as_param_vector
from src.core.rng import RngStream
from src.diagnostics.moments import estimate_bias, moment_study
from src.iwae.estimators import mlmc_iwae_gradient_batch, plain_iwae_gradient_batch
from src.iwae.models import linear_gaussian_model
from src.mlmc.levels import LevelDistribution, expected_cost
from src.optim.preconditioners import OptimizerKind
from src.optim.problems import IwaeProblem, Problem, ar1_problem, quadratic_problem
from src.optim.loop import run_optimizer
from src.optim.selector import expected_at_random_iterate, select_random_iterate, selector_for
from src.ui.logging import Logger, console
from src.ui.plots import emit_plot
from src.utils.parsers import ResultTable, read_csv, write_csv

EXPRMNT_CODENAME = 'EXPRMNT'

logger = Logger()
exp_logger = logger.get_logger(f'[green][{EXPRMNT_CODENAME}][/]', False)

REPORT_PREVIEW_ROWS = 10


@dataclass
class ExperimentResult:
    """The main table of an experiment, every file written and the hard invariant checks that failed."""
    table: ResultTable
    files: list[Path] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def metadata_for(cfg: ExperimentConfig) -> dict[str, str]:
    return {"config_hash": config_hash(cfg), "seed": str(cfg.seed), "version": ARTIFACT_VERSION}


def build_problem(cfg: ExperimentConfig) -> Problem:
    """The optimization problem named by ``cfg.problem``."""
    p = cfg.problem
    if p is None:
        raise ConfigurationError(f"a {cfg.experiment} experiment needs a problem block")
    if p.id == "quadratic":
        return quadratic_problem(p.dim, p.bound, p.init, p.x0, p.kernel, p.scale, p.warm_start)
    if p.id == "ar1":
        return ar1_problem(p.phi, x0=2.0 if p.x0 is None else p.x0, bound=p.bound)
    model = linear_gaussian_model(cfg.iwae.proposal_scale, cfg.iwae.proposal_mean)
    return IwaeProblem(model, cfg.iwae.ys, cfg.iwae.k, cfg.iwae.estimator)


def starting_point(cfg: ExperimentConfig, dim: int) -> np.ndarray:
    theta = cfg.problem.theta if cfg.problem is not None else None
    if theta is None:
        return np.zeros(dim)
    if isinstance(theta, tuple):
        return as_param_vector(theta, dim)
    return np.full(dim, float(theta))


def _finite_failures(name: str, table: ResultTable) -> list[str]:
    bad = [i for i, row in enumerate(table.rows) if not np.all(np.isfinite(np.asarray(row, dtype=float)))]
    return [f"{name}: non-finite values in rows {bad[:5]}"] if bad else []


def _write(table: ResultTable, path: Path, files: list[Path], failures: list[str]) -> None:
    found = _finite_failures(path.name, table)
    if found:
        failures.extend(found)
        return
    files.append(write_csv(table, path))


def _run_moments(cfg: ExperimentConfig, out: Path) -> ExperimentResult:
    problem = build_problem(cfg)
    theta = starting_point(cfg, problem.dim)
    oracle = problem.true_grad(theta)
    if oracle is None:
        raise ConfigurationError(f"{problem.name} has no exact gradient to measure the bias against")
    report = moment_study(
        problem, theta, oracle, cfg.mlmc.T_grid, cfg.replicate_count, RngStream(cfg.seed, 0),
        LevelDistribution.geometric(cfg.mlmc.q),
    )
    result = ExperimentResult(ResultTable(report.header(), report.rows(), metadata_for(cfg)))
    result.failures.extend(f"moments.csv: {v}" for v in report.violations())
    _write(result.table, out / "moments.csv", result.files, result.failures)
    return result


def _run_replicate(cfg: ExperimentConfig, problem: Problem, theta0: np.ndarray, r: int) -> tuple[list[RunRecord], dict[int, int]]:
    """One optimizer run on stream r, then the randomized iterate of every horizon from stream replicates + r."""
    records = run_optimizer(
        problem, cfg.optimizer, cfg.schedule, cfg.iterations, RngStream(cfg.seed, r), theta0,
        LevelDistribution.geometric(cfg.mlmc.q), allow_invalid_schedule=cfg.allow_invalid_schedule,
    )
    selector_stream = RngStream(cfg.seed, cfg.replicate_count + r)
    picks = {
        h: select_random_iterate(selector_for(cfg.optimizer, cfg.schedule, h), selector_stream)
        for h in _horizons(cfg)
    }
    return records, picks


def _horizons(cfg: ExperimentConfig) -> list[int]:
    return sorted(set(cfg.horizons) | {cfg.iterations})


def _replicate_checks(cfg: ExperimentConfig, r: int, records: list[RunRecord]) -> list[str]:
    failures = []
    costs = np.array([rec.cumulative_cost for rec in records])
    if np.any(np.diff(costs) < 0):
        failures.append(f"replicate {r}: cumulative cost decreases")
    if cfg.optimizer.kind is OptimizerKind.AMSGRAD:
        diags = np.array([rec.precond_diag for rec in records if rec.precond_diag is not None])
        if diags.size and np.any(np.diff(diags, axis=0) > 0):
            failures.append(f"replicate {r}: AMSGrad preconditioner increased")
    return failures


def _run_optimize(cfg: ExperimentConfig, out: Path, threads: int) -> ExperimentResult:
    problem = build_problem(cfg)
    theta0 = starting_point(cfg, problem.dim)
    if problem.true_grad(theta0) is None:
        raise ConfigurationError(f"{problem.name} has no exact gradient, |grad V(theta_n)|^2 cannot be tracked")
    R, N = cfg.replicate_count, cfg.iterations
    exp_logger.info(f"optimize {problem.name}: {R} replicates x {N} iterations on {threads} thread(s)")

    results: dict[int, tuple[list[RunRecord], dict[int, int]]] = {}
    with exp_logger.progress("replicates") as bar, ThreadPoolExecutor(max_workers=threads) as pool:
        task = bar.add_task("replicates", total=R)
        futures = {pool.submit(_run_replicate, cfg, problem, theta0, r): r for r in range(R)}
        for future in as_completed(futures):
            r = futures[future]
            try:
                results[r] = future.result()
            except MLMCError as e:
                e.add_note(f"optimize experiment, replicate {r}")
                raise
            bar.advance(task)

    meta = metadata_for(cfg)
    files: list[Path] = []
    failures: list[str] = []
    grad_sq = np.empty((R, N + 1))
    cost = np.empty((R, N + 1))
    selected = np.zeros(N + 1)
    for r in range(R):
        records, picks = results[r]
        grad_sq[r] = [rec.true_grad_sq_norm for rec in records]
        cost[r] = [rec.cumulative_cost for rec in records]
        selected[picks[N]] += 1
        failures.extend(_replicate_checks(cfg, r, records))
        rows = [
            [rec.iteration, rec.cumulative_cost, rec.true_grad_sq_norm, -1 if rec.level is None else rec.level,
             rec.chain_len, int(rec.iteration == picks[N])]
            for rec in records
        ]
        header = ["n", "cumulative_cost", "grad_sq_norm", "level", "chain_len", "selected"]
        _write(ResultTable(header, rows, meta), out / f"replicate_{r}.csv", files, failures)

    mean_cost = cost.mean(axis=0)
    mean_grad = grad_sq.mean(axis=0)
    table = ResultTable(
        ["n", "cumulative_cost", "grad_sq_norm", "selected_fraction"],
        [[n, float(mean_cost[n]), float(mean_grad[n]), float(selected[n] / R)] for n in range(N + 1)],
        meta,
    )
    _write(table, out / "optimize.csv", files, failures)

    summary_rows = []
    for h in _horizons(cfg):
        selector = selector_for(cfg.optimizer, cfg.schedule, h)
        at_R = np.array([expected_at_random_iterate(selector, grad_sq[r, :h + 1]) for r in range(R)])
        sampled = np.array([grad_sq[r, results[r][1][h]] for r in range(R)])
        se = float(at_R.std(ddof=1) / np.sqrt(R)) if R > 1 else 0.0
        summary_rows.append([h, float(at_R.mean()), se, float(sampled.mean())])
        exp_logger.info(f"N={h}: E|grad V(theta_R)|^2 = {at_R.mean():.4g} +- {se:.2g}")
    summary = ResultTable(["horizon", "mean_grad_sq_at_R", "std_error", "sampled_grad_sq_at_R"], summary_rows, meta)
    _write(summary, out / "summary.csv", files, failures)
    return ExperimentResult(table, files, failures)


def _run_iwae(cfg: ExperimentConfig, out: Path) -> ExperimentResult:
    ic = cfg.iwae
    model = linear_gaussian_model(ic.proposal_scale, ic.proposal_mean)
    theta, y, k, R = np.array([ic.theta]), ic.y, ic.k, cfg.replicate_count
    exact = model.exact_marginal_grad(theta, y)
    dist = LevelDistribution.geometric(cfg.mlmc.q)
    stream = RngStream(cfg.seed, 0)

    plain_bias, plain_se = estimate_bias(
        lambda s, n: plain_iwae_gradient_batch(model, theta, y, k, s, n), exact, R, stream.child(0)
    )
    rows = []
    for i, T in enumerate(ic.T_grid):
        bias, se = estimate_bias(
            lambda s, n: mlmc_iwae_gradient_batch(model, theta, y, k, T, s, n, dist)[0], exact, R, stream.child(1 + i)
        )
        rows.append([T, plain_bias, plain_se, bias, se, k, k * expected_cost(dist, T)])
        exp_logger.debug(f"iwae T={T}: plain {plain_bias:.4g}, mlmc {bias:.4g}")

    header = ["T", "plain_bias", "plain_se", "mlmc_bias", "mlmc_se", "plain_cost", "mlmc_cost"]
    result = ExperimentResult(ResultTable(header, rows, metadata_for(cfg)))
    _write(result.table, out / "iwae.csv", result.files, result.failures)
    return result


def print_table(table: ResultTable, title: str) -> None:
    """Rich rendering of a result table; long tables show their head and tail."""
    view = Table(title=title, caption=", ".join(f"{k}={v}" for k, v in table.metadata.items()))
    for name in table.header:
        view.add_column(name, justify="right")
    rows = table.rows
    if len(rows) > 2 * REPORT_PREVIEW_ROWS:
        shown = rows[:REPORT_PREVIEW_ROWS] + [None] + rows[-REPORT_PREVIEW_ROWS:]
    else:
        shown = rows
    for row in shown:
        if row is None:
            view.add_row(*("..." for _ in table.header))
        else:
            view.add_row(*(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    console.print(view)


def _run_report(cfg: ExperimentConfig, out: Path) -> ExperimentResult:
    source = Path(cfg.report.input)
    table = read_csv(source)
    print_table(table, source.name)
    result = ExperimentResult(table)
    for kind in cfg.report.plots:
        result.files.append(emit_plot(table, kind, out / f"{source.stem}_{kind}.svg"))
    return result


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run the experiment ``cfg`` describes and write its files under ``cfg.output``.

    Args:
        cfg (ExperimentConfig): validated configuration
        threads (int): worker threads for optimizer replicates; results do not depend on it

    Returns:
        ExperimentResult: main table, written files, failed hard checks

    Raises:
        MLMCError: anything raised while running, with the experiment noted on it
    """
    if threads < 1:
        raise ConfigurationError(f"need at least one thread, got {threads}")
    out = Path(cfg.output)
    exp_logger.info(f"{cfg.experiment}: seed={cfg.seed} hash={config_hash(cfg)} -> {out}")
    try:
        if cfg.experiment == "moments":
            result = _run_moments(cfg, out)
        elif cfg.experiment == "optimize":
            result = _run_optimize(cfg, out, threads)
        elif cfg.experiment == "iwae":
            result = _run_iwae(cfg, out)
        else:
            result = _run_report(cfg, out)
    except MLMCError as e:
        e.add_note(f"while running the {cfg.experiment} experiment")
        exp_logger.error(f"{cfg.experiment} failed: {e}")
        raise
    for failure in result.failures:
        exp_logger.warning(failure)
    return result
