"""Experiment orchestration: declarative grids, deterministic parallel runs, CSV.

Every grid cell derives its private random streams from the master seed and
the cell's content (dimension, budget, run index, objective), never from its
position in the work queue, so results are byte-identical regardless of the
worker count. Cells that differ only in the selection rule share the same
sampled batch, which pairs the comparisons and avoids re-sampling.
"""
from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analysis import RateFit, fit_rate, summarize
from .estimators import (
    EstimatorSpec,
    RankedBatch,
    hull_filtered_mu,
    hull_filtered_mu_self,
    mu_best_average,
    parse_estimator,
    rank,
)
from .objectives import ObjectiveSpec, make_objective, sample_optimum, sphere, split_objective_name
from .sampling import SamplerSpec, generate_batch, parse_sampler, sample_uniform_ball, stream_for_key

CSV_HEADER = "experiment,objective,d,lambda,estimator,mu,run,regret,wall_time_s"

SUITE_OBJECTIVES = ("sphere", "rastrigin", "perturbed_sphere", "griewank")

DEFAULT_COMPARE_METHODS = (
    "gaussian+best",
    "gaussian+avg:ratio:1.1",
    "gaussian+havg:ratio:1.1:1e-9",
    "gaussian:qo+best",
    "gaussian:mid+best",
    "gaussian@metarec+best",
    "gaussian@metatune+best",
    "hammersley+best",
    "gaussian+zero",
)

# Defaults merged under an explicit config for the compare subcommand, whose
# protocol draws the optimum from a standard normal instead of the ball.
COMPARE_DEFAULTS = {
    "objectives": ",".join(SUITE_OBJECTIVES),
    "dims": "3,10,30",
    "budgets": "30,100,300,1000",
    "runs": "30",
    "sampler": "gaussian",
    "optimum": "gaussian",
    "methods": ",".join(DEFAULT_COMPARE_METHODS),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat description of an experiment grid."""

    objective: str = "sphere"
    objectives: tuple[str, ...] = ()
    d: int = 3
    dims: tuple[int, ...] = ()
    r: float = 1.0
    optimum_radius: float = 0.9
    budgets: tuple[int, ...] = (5000,)
    ratios: tuple[float, ...] = ()
    estimators: tuple[str, ...] = ("best",)
    methods: tuple[str, ...] = ()
    runs: int = 30
    master_seed: int = 0
    sampler: str = "uniform"
    sampler_r: float | None = None
    sampler_sigma: float | None = None
    optimum: str = "ball"
    min_fit_budget: int = 64

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.budgets:
            raise ValueError("budgets must be non-empty")
        if any(b < 1 for b in self.budgets):
            raise ValueError("budgets must be positive")
        if not 0 <= self.optimum_radius < self.r:
            raise ValueError("optimum_radius must lie in [0, r)")
        if self.optimum not in ("ball", "gaussian"):
            raise ValueError("optimum must be 'ball' or 'gaussian'")

    def sampler_spec(self) -> SamplerSpec:
        spec = parse_sampler(self.sampler)
        changes = {"radius": self.sampler_r if self.sampler_r is not None else self.r}
        if self.sampler_sigma is not None:
            changes["sigma"] = self.sampler_sigma
        return replace(spec, **changes)


_LIST_KEYS = {
    "objectives": str,
    "dims": int,
    "budgets": int,
    "ratios": float,
    "estimators": str,
    "methods": str,
}
_SCALAR_KEYS = {
    "objective": str,
    "d": int,
    "r": float,
    "optimum_radius": float,
    "runs": int,
    "master_seed": int,
    "sampler": str,
    "sampler_r": float,
    "sampler_sigma": float,
    "optimum": str,
    "min_fit_budget": int,
}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    data: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        data[key.strip()] = value.strip()
    return data


def config_from_mapping(data: dict[str, str]) -> ExperimentConfig:
    kwargs = {}
    for key, value in data.items():
        if key in _LIST_KEYS:
            cast = _LIST_KEYS[key]
            kwargs[key] = tuple(cast(v.strip()) for v in str(value).split(",") if v.strip())
        elif key in _SCALAR_KEYS:
            kwargs[key] = _SCALAR_KEYS[key](value)
        else:
            raise ValueError(f"unknown config key {key!r}")
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_mapping(parse_config_text(fh.read()))


@dataclass(frozen=True)
class RegretRecord:
    """One CSV row: a grid-cell result or an aggregate."""

    experiment: str
    objective: str
    d: int
    lam: int | str
    estimator: str
    mu: int | str
    run: int | str
    regret: float
    wall_time: float | None = None


@dataclass(frozen=True)
class CellResult:
    recommendation: np.ndarray
    mu: int
    regret: float
    objective: ObjectiveSpec


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def render_records_csv(records, timing: bool = False) -> str:
    """Render records with the fixed column order; floats keep full precision.

    Wall times are inherently nondeterministic, so the wall_time_s field is
    left empty unless ``timing`` is requested; everything else is a pure
    function of the config and master seed.
    """
    lines = [CSV_HEADER]
    for r in records:
        wall = _fmt(r.wall_time) if timing and r.wall_time is not None else ""
        lines.append(
            f"{r.experiment},{r.objective},{r.d},{r.lam},{r.estimator},{r.mu},{r.run},{_fmt(r.regret)},{wall}"
        )
    return "\n".join(lines) + "\n"


def _parallel_map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _draw_optimum(config: ExperimentConfig, stream, d: int) -> np.ndarray:
    if config.optimum == "gaussian":
        return stream.generator().standard_normal(d)
    return sample_optimum(stream, d, config.optimum_radius, config.r)


def _cell_setup(config, objective_name, d, lam, run, sampler):
    """Draw the optimum, build the objective, sample and rank one batch."""
    base_name, _ = split_objective_name(objective_name)
    seed = config.master_seed
    x_star = _draw_optimum(config, stream_for_key(seed, "optimum", d, lam, run), d)
    objective = make_objective(
        objective_name, d, x_star, stream_for_key(seed, "objective", base_name, d, lam, run)
    )
    points = generate_batch(sampler, stream_for_key(seed, "batch", d, lam, run), d, lam)
    return objective, rank(points, objective.evaluate(points))


def _regret_of(objective: ObjectiveSpec, point: np.ndarray) -> float:
    regret = float(objective.evaluate(point) - objective.f_star)
    if regret < 0.0:
        if regret < -1e-12:
            warnings.warn(f"regret {regret} below -1e-12; clamped to 0", RuntimeWarning)
        regret = 0.0
    return regret


def run_cell(
    config: ExperimentConfig,
    lam: int,
    run: int,
    estimator: EstimatorSpec | str | None = None,
    objective: str | None = None,
    d: int | None = None,
    sampler: SamplerSpec | None = None,
) -> CellResult:
    """Execute one (objective, d, lambda, estimator, run) cell."""
    spec = estimator if isinstance(estimator, EstimatorSpec) else parse_estimator(estimator or config.estimators[0])
    name = objective or config.objective
    dim = d if d is not None else config.d
    samp = sampler or config.sampler_spec()
    obj, ranked = _cell_setup(config, name, dim, lam, run, samp)
    point, mu = spec.recommend(ranked)
    return CellResult(recommendation=point, mu=mu, regret=_regret_of(obj, point), objective=obj)


def run_single(
    config: ExperimentConfig,
    lam: int,
    run: int,
    estimator: EstimatorSpec | str | None = None,
    objective: str | None = None,
    d: int | None = None,
    experiment: str = "single",
) -> RegretRecord:
    """One cell as a RegretRecord; deterministic apart from the wall time."""
    spec = estimator if isinstance(estimator, EstimatorSpec) else parse_estimator(estimator or config.estimators[0])
    start = time.perf_counter()
    cell = run_cell(config, lam, run, spec, objective, d)
    elapsed = time.perf_counter() - start
    return RegretRecord(
        experiment=experiment,
        objective=objective or config.objective,
        d=d if d is not None else config.d,
        lam=lam,
        estimator=spec.label,
        mu=cell.mu,
        run=run,
        regret=cell.regret,
        wall_time=elapsed,
    )


def _ratio_mu(ratio: float, lam: int) -> int:
    return max(1, min(int(math.floor(ratio * lam + 0.5)), lam - 1)) if lam > 1 else 1


def _append_aggregates(records, template: RegretRecord, regrets: list[float]) -> None:
    if len(regrets) < 2:
        records.append(replace(template, run="mean", regret=float(np.mean(regrets)), wall_time=None))
        return
    stats = summarize(regrets)
    for run_tag, value in (("mean", stats.mean), ("ci95_lo", stats.ci_low), ("ci95_hi", stats.ci_high)):
        records.append(replace(template, run=run_tag, regret=value, wall_time=None))


def default_ratio_grid(count: int = 20) -> tuple[float, ...]:
    return tuple(float(x) for x in np.geomspace(1e-4, 0.5, count))


def sweep_ratio(config: ExperimentConfig, jobs: int = 1) -> list[RegretRecord]:
    """Regret across a grid of selection ratios mu/lambda.

    Within one (lambda, run) cell all ratios share the same ranked batch, so
    the sweep points are paired comparisons on identical samples.
    """
    ratios = tuple(config.ratios) if config.ratios else default_ratio_grid()
    if not ratios:
        raise ValueError("ratios must be non-empty")
    sampler = config.sampler_spec()
    cells = [(lam, run) for lam in config.budgets for run in range(config.runs)]

    def work(cell):
        lam, run = cell
        start = time.perf_counter()
        obj, ranked = _cell_setup(config, config.objective, config.d, lam, run, sampler)
        out = []
        for ratio in ratios:
            mu = _ratio_mu(ratio, lam)
            out.append((mu, _regret_of(obj, mu_best_average(ranked, mu))))
        return out, time.perf_counter() - start

    results = dict(zip(cells, _parallel_map(work, cells, jobs)))
    records: list[RegretRecord] = []
    for lam in config.budgets:
        for j, ratio in enumerate(ratios):
            label = f"ratio:{ratio:.12g}"
            group: list[float] = []
            mu = _ratio_mu(ratio, lam)
            for run in range(config.runs):
                rows, elapsed = results[(lam, run)]
                mu_run, regret = rows[j]
                group.append(regret)
                records.append(
                    RegretRecord("sweep-ratio", config.objective, config.d, lam, label,
                                 mu_run, run, regret, elapsed)
                )
            _append_aggregates(
                records,
                RegretRecord("sweep-ratio", config.objective, config.d, lam, label, mu, 0, 0.0),
                group,
            )
    return records


def rate_fit_experiment(config: ExperimentConfig, jobs: int = 1) -> tuple[list[RegretRecord], dict[str, RateFit]]:
    """Mean regret per budget per estimator, then a log-log rate fit.

    Budgets below ``min_fit_budget`` contribute records but are excluded
    from the fit to avoid pre-asymptotic bias.
    """
    if len(config.budgets) < 3:
        raise ValueError("rate fitting needs at least 3 budgets")
    specs = [parse_estimator(e) for e in config.estimators]
    sampler = config.sampler_spec()
    cells = [(lam, run) for lam in config.budgets for run in range(config.runs)]

    def work(cell):
        lam, run = cell
        start = time.perf_counter()
        obj, ranked = _cell_setup(config, config.objective, config.d, lam, run, sampler)
        out = []
        for spec in specs:
            point, mu = spec.recommend(ranked)
            out.append((mu, _regret_of(obj, point)))
        return out, time.perf_counter() - start

    results = dict(zip(cells, _parallel_map(work, cells, jobs)))
    records: list[RegretRecord] = []
    means: dict[str, list[float]] = {spec.label: [] for spec in specs}
    for lam in config.budgets:
        for j, spec in enumerate(specs):
            group: list[float] = []
            mus: list[int] = []
            for run in range(config.runs):
                rows, elapsed = results[(lam, run)]
                mu, regret = rows[j]
                group.append(regret)
                mus.append(mu)
                records.append(
                    RegretRecord("rate-fit", config.objective, config.d, lam, spec.label,
                                 mu, run, regret, elapsed)
                )
            means[spec.label].append(float(np.mean(group)))
            _append_aggregates(
                records,
                RegretRecord("rate-fit", config.objective, config.d, lam, spec.label, mus[0], 0, 0.0),
                group,
            )
    eligible = [i for i, lam in enumerate(config.budgets) if lam >= config.min_fit_budget]
    if len(eligible) < 3:
        raise ValueError(
            f"only {len(eligible)} budgets reach min_fit_budget={config.min_fit_budget}; need >= 3"
        )
    fits: dict[str, RateFit] = {}
    for spec in specs:
        lams = [config.budgets[i] for i in eligible]
        regs = [means[spec.label][i] for i in eligible]
        fit = fit_rate(lams, regs)
        fits[spec.label] = fit
        for tag, value in (("fit_slope", fit.slope), ("fit_intercept", fit.intercept),
                           ("fit_residual", fit.residual)):
            records.append(
                RegretRecord("rate-fit", config.objective, config.d, "", spec.label, "", tag, value)
            )
    return records, fits


@dataclass(frozen=True)
class CompareResult:
    """Pairwise win-rate matrix over the test-case grid."""

    labels: tuple[str, ...]          # sorted by average win rate, best first
    matrix: np.ndarray               # matrix[i, j] = win rate of labels[i] over labels[j]
    avg_win_rate: tuple[float, ...]
    n_cases: int


def parse_method(text: str, default_sampler: SamplerSpec) -> tuple[SamplerSpec, EstimatorSpec]:
    """Parse ``<sampler>+<estimator>``; a bare estimator uses the default sampler."""
    if "+" in text:
        sampler_text, estimator_text = text.split("+", 1)
        sampler = parse_sampler(sampler_text)
        sampler = replace(sampler, radius=default_sampler.radius, sigma=default_sampler.sigma)
    else:
        sampler, estimator_text = default_sampler, text
    return sampler, parse_estimator(estimator_text)


def compare(config: ExperimentConfig, jobs: int = 1) -> CompareResult:
    """Average-regret win rates of each method against each other method.

    A method is a sampler plus an estimator. For every test case
    (objective, d, lambda), each method's regret is averaged over the runs;
    entry (A, B) is the fraction of cases where A's average is strictly
    lower. Exact ties award no win to either side.
    """
    method_texts = config.methods or DEFAULT_COMPARE_METHODS
    if len(method_texts) < 2:
        raise ValueError("compare needs at least 2 methods")
    default_sampler = config.sampler_spec()
    methods = [parse_method(t, default_sampler) for t in method_texts]
    labels = [t.strip() for t in method_texts]
    objectives = config.objectives or (config.objective,)
    dims = config.dims or (config.d,)
    cases = [(obj, d, lam) for obj in objectives for d in dims for lam in config.budgets]
    cells = [(ci, run) for ci in range(len(cases)) for run in range(config.runs)]

    def work(cell):
        ci, run = cell
        obj_name, d, lam = cases[ci]
        base_name, _ = split_objective_name(obj_name)
        seed = config.master_seed
        x_star = _draw_optimum(config, stream_for_key(seed, "optimum", d, lam, run), d)
        objective = make_objective(
            obj_name, d, x_star, stream_for_key(seed, "objective", base_name, d, lam, run)
        )
        batch_stream = stream_for_key(seed, "batch", d, lam, run)
        out = []
        for sampler, estimator in methods:
            points = generate_batch(sampler, batch_stream, d, lam)
            ranked = rank(points, objective.evaluate(points))
            point, _ = estimator.recommend(ranked)
            out.append(_regret_of(objective, point))
        return out

    results = dict(zip(cells, _parallel_map(work, cells, jobs)))
    n_methods, n_cases = len(methods), len(cases)
    case_means = np.empty((n_cases, n_methods))
    for ci in range(n_cases):
        per_run = np.array([results[(ci, run)] for run in range(config.runs)])
        case_means[ci] = per_run.mean(axis=0)

    wins = np.zeros((n_methods, n_methods))
    for a in range(n_methods):
        for b in range(n_methods):
            if a != b:
                wins[a, b] = float(np.mean(case_means[:, a] < case_means[:, b]))
    avg = wins.sum(axis=1) / (n_methods - 1)
    order = sorted(range(n_methods), key=lambda i: (-avg[i], labels[i]))
    return CompareResult(
        labels=tuple(labels[i] for i in order),
        matrix=wins[np.ix_(order, order)],
        avg_win_rate=tuple(float(avg[i]) for i in order),
        n_cases=n_cases,
    )


def render_win_matrix_csv(result: CompareResult) -> str:
    lines = ["method," + ",".join(result.labels) + ",avg_win_rate"]
    for i, label in enumerate(result.labels):
        cells = ["" if i == j else _fmt(result.matrix[i, j]) for j in range(len(result.labels))]
        lines.append(f"{label}," + ",".join(cells) + f",{_fmt(result.avg_win_rate[i])}")
    return "\n".join(lines) + "\n"


def _two_well_values(points: np.ndarray, center: float = 0.6, width: float = 0.1) -> np.ndarray:
    """Sum of two narrow radial wells at (+-center, 0) in the plane."""
    pts = np.asarray(points, dtype=float)
    a = np.array([center, 0.0])
    da = ((pts - a) ** 2).sum(axis=1)
    db = ((pts + a) ** 2).sum(axis=1)
    return -np.exp(-da / (2.0 * width**2)) - np.exp(-db / (2.0 * width**2))


def hull_demo(seed: int = 0, n_seeds: int = 20, lam: int = 1000, mu_max: int = 10) -> str:
    """Text report contrasting the two hull-based mu selection rules.

    The deterministic five-point configuration hides a worse-ranked point
    inside the hull of the three best, which only the cross-containment
    rule notices. The statistical part shows the filter keeping everything
    on a unimodal landscape and trimming on a two-well one.
    """
    pts = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0], [4.0, 4.0], [1.0, 1.0]])
    ranked = rank(pts, np.arange(5.0))
    cross = hull_filtered_mu(ranked, 5)
    self_only = hull_filtered_mu_self(ranked, 5)
    lines = [
        "five-point configuration (a worse point sits inside the hull of the three best):",
        f"  cross-containment rule: mu = {cross}",
        f"  self-containment rule:  mu = {self_only}",
        "",
        f"randomized check over {n_seeds} seeds (d=2, lambda={lam}, mu_max={mu_max}):",
    ]
    sphere_kept = 0
    two_well_trimmed = 0
    for s in range(n_seeds):
        stream = stream_for_key(seed, "hull-demo", s)
        points = sample_uniform_ball(stream.split(0), 2, 1.0, lam)
        x_star = sample_optimum(stream.split(1), 2, 0.9)
        if hull_filtered_mu(rank(points, sphere(points, x_star)), mu_max) == mu_max:
            sphere_kept += 1
        if hull_filtered_mu(rank(points, _two_well_values(points)), mu_max) < mu_max:
            two_well_trimmed += 1
    lines.append(f"  unimodal sphere: cross rule kept mu_max in {sphere_kept}/{n_seeds} seeds")
    lines.append(f"  two wells at +-0.6, width 0.1: cross rule trimmed mu in {two_well_trimmed}/{n_seeds} seeds")
    return "\n".join(lines) + "\n"
