"""Experiment configuration, batch execution and Table 3 style summaries."""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .diagnostics import DiagnosticsProbe, summarize
from .fetch import default_cache_dir, fetch_matrix
from .linalg import ModelProblemSpec, build_model_problem, make_preconditioner, spmv
from .mmio import read_matrix_market
from .reference import VARIANT_ORDER, reference
from .variants import ALL_VARIANTS, ErrorReduction, Stagnation, StatusKind, VariantId, run


class ConfigError(ValueError):
    """Invalid experiment configuration."""


STOP_RULES = ("stagnation", "error_reduction", "fixed")
RHS_RULES = ("uniform", "random")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines the numbers an experiment produces.

    ``problem`` is a cached matrix name (``"nos4"``), a path to a ``.mtx``
    file, or a model problem ``"model:n=48,rho=0.8,kappa=1e3"``.  The model
    problem's eigenvectors are drawn with ``seed``.  ``rhs="uniform"`` sets
    the exact solution to entries ``1/sqrt(n)``; ``"random"`` draws it from
    ``seed``.  The initial guess is always zero.
    """

    problem: str
    preconditioner: str = "none"
    variants: tuple = ALL_VARIANTS
    max_iter: int | None = None
    stop: str = "stagnation"
    stagnation_window: int = 50
    stagnation_improvement: float = 0.01
    error_threshold: float = 1e-5
    cadence: int = 1
    rhs: str = "uniform"
    seed: int = 0
    output_dir: str | None = None
    cache_dir: str | None = None
    workers: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "variants", tuple(VariantId.parse(v) for v in self.variants))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.variants:
            raise ConfigError("at least one variant is required")
        if self.preconditioner not in ("none", "jacobi"):
            raise ConfigError(f"preconditioner must be 'none' or 'jacobi', got {self.preconditioner!r}")
        if self.stop not in STOP_RULES:
            raise ConfigError(f"stop must be one of {STOP_RULES}, got {self.stop!r}")
        if self.rhs not in RHS_RULES:
            raise ConfigError(f"rhs must be one of {RHS_RULES}, got {self.rhs!r}")
        if self.max_iter is not None and self.max_iter < 0:
            raise ConfigError("max_iter must be non-negative")
        if self.cadence < 1 or self.stagnation_window < 1 or self.workers < 1:
            raise ConfigError("cadence, stagnation_window and workers must be positive")

    @classmethod
    def from_dict(cls, data):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
        if "problem" not in data:
            raise ConfigError("configuration needs a 'problem'")
        data = dict(data)
        problem = data["problem"]
        if isinstance(problem, dict):
            if "model" not in problem:
                raise ConfigError("problem mapping must have a 'model' entry")
            model = problem["model"] or {}
            data["problem"] = "model:" + ",".join(f"{k}={v}" for k, v in model.items())
        if "variants" in data and isinstance(data["variants"], str):
            data["variants"] = [v for v in data["variants"].split() if v]
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_yaml(cls, path):
        try:
            data = yaml.safe_load(Path(path).read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"configuration {path} must be a mapping")
        return cls.from_dict(data)

    def with_overrides(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


@dataclass(frozen=True)
class Problem:
    name: str
    A: object
    reference_key: str | None = None


_MODEL_KEYS = {"n": int, "rho": float, "kappa": float, "seed": int}


def parse_model(text, seed=0):
    """``"model:n=48,rho=0.8,kappa=1e3"`` -> :class:`ModelProblemSpec`."""
    body = text.split(":", 1)[1] if ":" in text else ""
    kwargs = {"seed": seed}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in _MODEL_KEYS:
            raise ConfigError(f"unknown model parameter {key!r}")
        try:
            kwargs[key] = _MODEL_KEYS[key](float(value)) if _MODEL_KEYS[key] is int else float(value)
        except ValueError as exc:
            raise ConfigError(f"bad model parameter {item!r}") from exc
    try:
        return ModelProblemSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def model_reference_key(spec):
    """Table key of the model problem, e.g. ``model_48_8_3`` for rho=0.8, kappa=1e3."""
    return f"model_{spec.n}_{round(spec.rho * 10)}_{round(math.log10(spec.kappa))}"


def load_problem(config, transport=None):
    text = config.problem
    if text.startswith("model"):
        spec = parse_model(text, seed=config.seed)
        A, _ = build_model_problem(spec)
        return Problem(spec.name, A, model_reference_key(spec))
    path = Path(text)
    if path.suffix == ".mtx" and path.exists():
        return Problem(path.stem, read_matrix_market(path), path.stem)
    cache = config.cache_dir or default_cache_dir()
    return Problem(text, read_matrix_market(fetch_matrix(text, cache, transport=transport)), text)


def exact_solution(n, rule="uniform", seed=0):
    if rule == "uniform":
        return np.full(n, 1.0 / math.sqrt(n))
    x = np.random.default_rng(seed).standard_normal(n)
    return x / np.linalg.norm(x)


def default_max_iter(problem, preconditioner):
    ref = reference(problem.reference_key, preconditioner) if problem.reference_key else None
    hs = ref["iterations"]["HS"] if ref else None
    return 4 * hs if hs else 10 * problem.A.n


def _stop_rule(config):
    if config.stop == "stagnation":
        return Stagnation(config.stagnation_window, config.stagnation_improvement)
    if config.stop == "error_reduction":
        return ErrorReduction(config.error_threshold)
    return None  # "fixed": run to max_iter


# --- summary table ----------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    iterations: int | None
    min_log10_err: float
    status: str = ""
    bold_iterations: bool = False
    bold_error: bool = False

    @property
    def dash(self):
        return self.iterations is None


def _differs(value, base):
    return abs(value - base) > 0.1 * abs(base)


@dataclass
class SummaryRow:
    problem: str
    preconditioner: str
    n: int
    nnz: int
    cells: dict = field(default_factory=dict)

    @classmethod
    def from_summaries(cls, problem, preconditioner, n, nnz, summaries, statuses=None):
        """``summaries`` maps variant label -> :class:`Summary`; flags are set
        against the ``HS`` entry when present."""
        statuses = statuses or {}
        hs = summaries.get("HS")
        cells = {}
        for label, s in summaries.items():
            bold_it = bold_err = False
            if hs is not None and label != "HS":
                if s.iters_to_1e5 is not None and hs.iters_to_1e5 is not None:
                    bold_it = _differs(s.iters_to_1e5, hs.iters_to_1e5)
                if math.isfinite(s.min_log10_err) and math.isfinite(hs.min_log10_err):
                    bold_err = _differs(s.min_log10_err, hs.min_log10_err)
            cells[label] = Cell(s.iters_to_1e5, s.min_log10_err, statuses.get(label, ""), bold_it, bold_err)
        return cls(problem, preconditioner, n, nnz, cells)


@dataclass
class SummaryTable:
    rows: list = field(default_factory=list)

    @property
    def variants(self):
        seen = []
        for row in self.rows:
            for label in row.cells:
                if label not in seen:
                    seen.append(label)
        order = {v: i for i, v in enumerate(VARIANT_ORDER)}
        return sorted(seen, key=lambda v: (order.get(v.split(":")[0], len(order)), v))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    problem: str
    histories: dict
    row: SummaryRow
    csv_paths: dict = field(default_factory=dict)


def _file_label(label):
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", label).strip("-")


def run_experiment(config, transport=None, problem=None):
    """Run every configured variant on the same ``A``, ``M``, ``b`` and ``x0 = 0``.

    Per-iteration CSVs are written to ``config.output_dir`` when set.  A
    breakdown only affects the variant that broke down.
    """
    from .report import emit_csv

    problem = problem or load_problem(config, transport=transport)
    A = problem.A
    M = make_preconditioner(config.preconditioner, A)
    x_star = exact_solution(A.n, config.rhs, config.seed)
    b = spmv(A, x_star)
    x0 = np.zeros(A.n)
    max_iter = config.max_iter if config.max_iter is not None else default_max_iter(problem, config.preconditioner)
    rule = _stop_rule(config)

    def solve(variant):
        probe = DiagnosticsProbe(A, M, b, x_star=x_star, cadence=config.cadence, x0=x0)
        return run(variant, A, M, b, x0, max_iter=max_iter, stop=rule, probe=probe, problem=problem.name)

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            results = list(pool.map(solve, config.variants))
    else:
        results = [solve(v) for v in config.variants]

    histories = {v.label: h for v, h in zip(config.variants, results)}
    summaries, statuses = {}, {}
    for label, h in histories.items():
        summaries[label] = summarize(h)
        statuses[label] = str(h.status)
    row = SummaryRow.from_summaries(problem.name, config.preconditioner, A.n, A.nnz, summaries, statuses)

    paths = {}
    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        for label, h in histories.items():
            path = out / f"{problem.name}_{config.preconditioner}_{_file_label(label)}.csv"
            emit_csv(h, path)
            paths[label] = path
    return ExperimentResult(config, problem.name, histories, row, paths)


def broke_down(history):
    return history.status is not None and history.status.kind is StatusKind.BREAKDOWN


__all__ = [
    "Cell", "ConfigError", "ExperimentConfig", "ExperimentResult", "Problem", "SummaryRow", "SummaryTable",
    "broke_down", "default_max_iter", "exact_solution", "load_problem", "model_reference_key", "parse_model",
    "run_experiment",
]

