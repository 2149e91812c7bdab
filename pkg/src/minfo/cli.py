"""Command-line experiment harness.

Subcommands: estimate, sweep, equitability, ksg, gradcheck, complexity.
Every run is deterministic given its configuration: per-task seeds are pure
hashes of (base seed, method tag, grid index), so parallel and sequential
sweeps emit byte-identical artifacts. Progress goes to stderr; results go to
the output path (stdout with ``--out -``).

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .baselines import KsgConfig, gaussian_mi_analytic, ksg_estimate
from .estimator import EstimatorConfig, train_mine
from .nn import NumericError, grad_check, mlp_init
from .sampling import (
    GaussianSpec,
    NonlinearSpec,
    gen_gaussian,
    make_rng,
    make_sampler,
)
from .theory import ComplexityInputs, sample_complexity

EXPERIMENTS = ("estimate", "sweep", "equitability", "ksg", "gradcheck", "complexity")
METHODS = ("mine_dv", "mine_f", "ksg")
RHO_GRID_DEFAULT = (-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9)
SIGMA_GRID_DEFAULT = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
NONLINEARITY_GRID = ("identity", "cube", "sine")
EQUITABILITY_DIM = 2

CSV_HEADER = "experiment,method,k,rho,f,sigma,estimate_nats,truth_nats,abs_err,seed,wall_ms"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending key."""


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def derive_seed(base_seed: int, *parts) -> int:
    """Pure, platform-stable 63-bit seed from the base seed and tag parts."""
    text = ":".join([str(int(base_seed)), *[str(p) for p in parts]])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


@dataclass
class ResultRow:
    """One emitted result; estimate_nats is None only for failed sub-runs."""

    experiment: str
    method: str
    k: int | None = None
    rho: float | None = None
    f: str | None = None
    sigma: float | None = None
    estimate_nats: float | None = None
    truth_nats: float | None = None
    abs_err: float | None = None
    seed: int | None = None
    wall_ms: float | None = None


@dataclass
class RunConfig:
    experiment: str = "estimate"
    rho: float = 0.5
    k: int = 1
    samples: int = 5000
    knn: int = 3
    rho_grid: tuple[float, ...] = RHO_GRID_DEFAULT
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    base_seed: int = 0
    jobs: int | None = None
    out: str = "-"
    format: str = "csv"
    trials: int = 20
    complexity: ComplexityInputs = field(default_factory=ComplexityInputs)

    @property
    def resolved_jobs(self) -> int:
        return self.jobs if self.jobs is not None else (os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# configuration parsing

def _as_bool(key: str, v) -> bool:
    if isinstance(v, bool):
        return v
    raise ConfigError(f"{key}: expected a boolean, got {v!r}")


def _as_int(key: str, v, lo: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(f"{key}: must be at least {lo}, got {v}")
    return v


def _as_float(key: str, v, positive: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    v = float(v)
    if positive and v <= 0:
        raise ConfigError(f"{key}: must be positive, got {v}")
    return v


def _as_choice(key: str, v, choices: tuple[str, ...]) -> str:
    if v not in choices:
        raise ConfigError(f"{key}: must be one of {choices}, got {v!r}")
    return v


def _as_rho(key: str, v) -> float:
    v = _as_float(key, v)
    if not -1.0 < v < 1.0:
        raise ConfigError(f"{key}: must lie strictly inside (-1, 1), got {v}")
    return v


def _as_rho_grid(key: str, v) -> tuple[float, ...]:
    if isinstance(v, str):
        parts = [p for p in v.split(",") if p.strip()]
        try:
            v = [float(p) for p in parts]
        except ValueError:
            raise ConfigError(f"{key}: could not parse {v!r} as comma-separated floats") from None
    if not isinstance(v, (list, tuple)) or not v:
        raise ConfigError(f"{key}: expected a non-empty list of correlations")
    return tuple(_as_rho(key, x) for x in v)


def _as_hidden(key: str, v) -> tuple[int, ...]:
    if not isinstance(v, (list, tuple)) or not v:
        raise ConfigError(f"{key}: expected a non-empty list of layer widths")
    return tuple(_as_int(key, x, lo=1) for x in v)


# (config key, RunConfig attribute, converter) for plain top-level settings
_TOP_KEYS = {
    "experiment": ("experiment", lambda k, v: _as_choice(k, v, EXPERIMENTS)),
    "rho": ("rho", _as_rho),
    "k": ("k", lambda k, v: _as_int(k, v, lo=1)),
    "samples": ("samples", lambda k, v: _as_int(k, v, lo=2)),
    "knn": ("knn", lambda k, v: _as_int(k, v, lo=1)),
    "rho_grid": ("rho_grid", _as_rho_grid),
    "seed": ("base_seed", lambda k, v: _as_int(k, v)),
    "jobs": ("jobs", lambda k, v: _as_int(k, v, lo=1)),
    "out": ("out", lambda k, v: v if isinstance(v, str) and v else _reject(k, v)),
    "format": ("format", lambda k, v: _as_choice(k, v, ("csv", "json"))),
    "trials": ("trials", lambda k, v: _as_int(k, v, lo=1)),
}

# top-level shortcuts that live inside the estimator settings
_ESTIMATOR_SHORTCUTS = {
    "steps": ("steps", lambda k, v: _as_int(k, v, lo=1)),
    "objective": ("objective", lambda k, v: _as_choice(k, v, ("dv", "f"))),
    "marginal": ("marginal_mode", lambda k, v: _as_choice(k, v, ("shuffle", "resample"))),
    "ema_rate": ("ema_rate", lambda k, v: _as_float(k, v, positive=True)),
    "no_ema": ("use_ema_correction", lambda k, v: not _as_bool(k, v)),
    "clip_cap": ("clip_cap", lambda k, v: _as_float(k, v)),
}

# full field set accepted inside the nested "estimator" object
_ESTIMATOR_KEYS = {
    "objective": lambda k, v: _as_choice(k, v, ("dv", "f")),
    "hidden": _as_hidden,
    "activation": lambda k, v: _as_choice(k, v, ("relu", "elu")),
    "batch_size": lambda k, v: _as_int(k, v, lo=2),
    "steps": lambda k, v: _as_int(k, v, lo=1),
    "marginal_mode": lambda k, v: _as_choice(k, v, ("shuffle", "resample")),
    "ema_rate": lambda k, v: _as_float(k, v, positive=True),
    "use_ema_correction": _as_bool,
    "lr": lambda k, v: _as_float(k, v, positive=True),
    "beta1": lambda k, v: _as_float(k, v),
    "beta2": lambda k, v: _as_float(k, v),
    "adam_eps": lambda k, v: _as_float(k, v, positive=True),
    "eval_size": lambda k, v: _as_int(k, v, lo=2),
    "eval_every": lambda k, v: _as_int(k, v, lo=1),
    "smoothing_window": lambda k, v: _as_int(k, v, lo=1),
    "clip_cap": lambda k, v: _as_float(k, v),
}

_COMPLEXITY_KEYS = {
    "dim_theta": ("d", lambda k, v: _as_int(k, v, lo=1)),
    "bound": ("bound", lambda k, v: _as_float(k, v, positive=True)),
    "lipschitz": ("lipschitz", lambda k, v: _as_float(k, v, positive=True)),
    "param_norm": ("param_norm", lambda k, v: _as_float(k, v, positive=True)),
    "eps": ("eps", lambda k, v: _as_float(k, v, positive=True)),
    "delta": ("delta", lambda k, v: _as_float(k, v, positive=True)),
}


def _reject(key: str, v):
    raise ConfigError(f"{key}: invalid value {v!r}")


def parse_config(file_text: str | None = None, flags: Mapping[str, object] | None = None) -> RunConfig:
    """Merge a JSON config document with flag overrides into a validated RunConfig.

    The document is a flat object whose keys mirror the CLI flags, plus one
    optional nested "estimator" object for the full estimator field set.
    Flags always win over file values; unknown keys are rejected by name. A
    key may not be set both at top level and inside "estimator".
    """
    file_values: dict = {}
    if file_text is not None:
        try:
            parsed = json.loads(file_text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(parsed, dict):
            raise ConfigError("config file must contain a JSON object")
        file_values = parsed

    cfg = RunConfig()
    est_values: dict = {}
    cx_values: dict = {}

    def apply(key: str, value, source: str) -> None:
        if key in _TOP_KEYS:
            attr, conv = _TOP_KEYS[key]
            setattr(cfg, attr, conv(key, value))
        elif key in _ESTIMATOR_SHORTCUTS:
            attr, conv = _ESTIMATOR_SHORTCUTS[key]
            if source == "file" and attr in est_values:
                raise ConfigError(f"{key}: set both at top level and inside \"estimator\"")
            est_values[attr] = conv(key, value)
        elif key in _COMPLEXITY_KEYS:
            attr, conv = _COMPLEXITY_KEYS[key]
            cx_values[attr] = conv(key, value)
        else:
            raise ConfigError(f"unknown config key {key!r}")

    nested = file_values.pop("estimator", None)
    if nested is not None:
        if not isinstance(nested, dict):
            raise ConfigError("estimator: expected a JSON object")
        for key, value in nested.items():
            if key not in _ESTIMATOR_KEYS:
                raise ConfigError(f"unknown estimator key {key!r}")
            est_values[key] = _ESTIMATOR_KEYS[key](key, value)
    for key, value in file_values.items():
        apply(key, value, "file")
    for key, value in (flags or {}).items():
        if value is not None:
            apply(key, value, "flag")

    cfg.estimator = replace(cfg.estimator, **est_values)
    try:
        cfg.estimator.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cx_values:
        try:
            cfg.complexity = replace(cfg.complexity, **cx_values)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if cfg.experiment in ("ksg", "sweep") and cfg.knn >= cfg.samples:
        raise ConfigError(f"knn: must be smaller than samples ({cfg.knn} >= {cfg.samples})")
    return cfg


# ---------------------------------------------------------------------------
# task execution

@dataclass(frozen=True)
class _MineTask:
    experiment: str
    method: str  # mine_dv | mine_f
    gauss: GaussianSpec | None
    nonlin: NonlinearSpec | None
    est: EstimatorConfig  # per-task seed already set


@dataclass(frozen=True)
class _KsgTask:
    experiment: str
    gauss: GaussianSpec
    samples: int
    knn: int
    seed: int


def _execute_task(task) -> ResultRow:
    started = time.perf_counter()
    if isinstance(task, _KsgTask):
        row = ResultRow(experiment=task.experiment, method="ksg", k=task.gauss.k,
                        rho=task.gauss.rho, seed=task.seed,
                        truth_nats=gaussian_mi_analytic(task.gauss))
        try:
            batch = gen_gaussian(task.gauss, task.samples, make_rng(task.seed))
            row.estimate_nats = ksg_estimate(batch, KsgConfig(k=task.knn, seed=task.seed)).nats
        except NumericError:
            row.estimate_nats = None
    else:
        spec = task.gauss if task.gauss is not None else task.nonlin
        row = ResultRow(experiment=task.experiment, method=task.method, seed=task.est.seed)
        if task.gauss is not None:
            row.k = task.gauss.k
            row.rho = task.gauss.rho
            row.truth_nats = gaussian_mi_analytic(task.gauss)
        else:
            row.f = task.nonlin.f
            row.sigma = task.nonlin.sigma
        try:
            row.estimate_nats = train_mine(task.est, make_sampler(spec)).nats
        except NumericError:
            row.estimate_nats = None
    if row.estimate_nats is not None and row.truth_nats is not None:
        row.abs_err = abs(row.estimate_nats - row.truth_nats)
    row.wall_ms = (time.perf_counter() - started) * 1000.0
    return row


def _run_tasks(tasks: list, jobs: int) -> list[ResultRow]:
    """Execute tasks, possibly in parallel; row order always follows task order."""
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_execute_task, tasks))
    else:
        rows = [_execute_task(t) for t in tasks]
    for i, row in enumerate(rows):
        shown = "failed" if row.estimate_nats is None else f"{row.estimate_nats:.4f}"
        timing = "" if row.wall_ms is None else f" ({row.wall_ms:.0f} ms)"
        _log(f"[{i + 1}/{len(rows)}] {row.experiment} {row.method}"
             f"{'' if row.rho is None else f' rho={row.rho:g}'}"
             f"{'' if row.f is None else f' f={row.f} sigma={row.sigma:g}'}"
             f" -> {shown}{timing}")
    return rows


def _mine_method(objective: str) -> str:
    return "mine_dv" if objective == "dv" else "mine_f"


def run_estimate(cfg: RunConfig) -> list[ResultRow]:
    method = _mine_method(cfg.estimator.objective)
    est = replace(cfg.estimator, seed=derive_seed(cfg.base_seed, method, 0))
    task = _MineTask("estimate", method, GaussianSpec(cfg.k, cfg.rho), None, est)
    return _run_tasks([task], jobs=1)


def run_ksg(cfg: RunConfig) -> list[ResultRow]:
    task = _KsgTask("ksg", GaussianSpec(cfg.k, cfg.rho), cfg.samples, cfg.knn,
                    derive_seed(cfg.base_seed, "ksg", 0))
    return _run_tasks([task], jobs=1)


def run_sweep(cfg: RunConfig) -> list[ResultRow]:
    """All three methods across the correlation grid; rows ordered (method, rho)."""
    tasks: list = []
    for method in METHODS:
        for i, rho in enumerate(cfg.rho_grid):
            seed = derive_seed(cfg.base_seed, method, i)
            spec = GaussianSpec(cfg.k, rho)
            if method == "ksg":
                tasks.append(_KsgTask("sweep", spec, cfg.samples, cfg.knn, seed))
            else:
                est = replace(cfg.estimator,
                              objective="dv" if method == "mine_dv" else "f", seed=seed)
                tasks.append(_MineTask("sweep", method, spec, None, est))
    return _run_tasks(tasks, cfg.resolved_jobs)


def run_equitability(cfg: RunConfig) -> list[ResultRow]:
    """MINE-DV over the nonlinearity-by-noise grid, then one spread row per sigma.

    Spread rows carry method "spread" and report max-min of the three cell
    estimates at that noise level; the 3x10 grid cells keep method "mine_dv".
    """
    tasks: list = []
    for f in NONLINEARITY_GRID:
        for i, sigma in enumerate(SIGMA_GRID_DEFAULT):
            est = replace(cfg.estimator, objective="dv", seed=derive_seed(cfg.base_seed, f, i))
            tasks.append(_MineTask("equitability", "mine_dv", None,
                                   NonlinearSpec(f, sigma, dim=EQUITABILITY_DIM), est))
    rows = _run_tasks(tasks, cfg.resolved_jobs)
    for i, sigma in enumerate(SIGMA_GRID_DEFAULT):
        cells = [r.estimate_nats for r in rows if r.method == "mine_dv" and r.sigma == sigma]
        spread = None if any(c is None for c in cells) else max(cells) - min(cells)
        rows.append(ResultRow(experiment="equitability", method="spread",
                              sigma=sigma, estimate_nats=spread))
    return rows


def run_gradcheck(cfg: RunConfig) -> int:
    """Finite-difference gradient audit on `trials` random network/batch configs."""
    rng = np.random.default_rng(derive_seed(cfg.base_seed, "gradcheck", 0))
    worst = 0.0
    failures = 0
    for t in range(cfg.trials):
        input_dim = int(rng.integers(1, 7))
        hidden = [int(rng.integers(2, 33)) for _ in range(int(rng.integers(1, 4)))]
        activation = "relu" if t % 2 == 0 else "elu"
        params = mlp_init(input_dim, hidden, activation, seed=int(rng.integers(0, 2 ** 31)))
        inputs = rng.standard_normal((int(rng.integers(4, 33)), input_dim))
        report = grad_check(params, inputs, tol=1e-4)
        worst = max(worst, report.max_rel_err)
        failures += 0 if report.passed else 1
        _log(f"[{t + 1}/{cfg.trials}] gradcheck dims={input_dim}->{hidden} {activation}: "
             f"max_rel_err={report.max_rel_err:.3e} {'ok' if report.passed else 'FAIL'}")
    print(f"gradcheck: {cfg.trials - failures}/{cfg.trials} passed, "
          f"max_rel_err={worst:.3e}, tol=1e-04")
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


def run_complexity(cfg: RunConfig) -> int:
    n = sample_complexity(cfg.complexity)
    c = cfg.complexity
    _log(f"sample complexity for d={c.d} M={c.bound:g} L={c.lipschitz:g} "
         f"K={c.param_norm:g} eps={c.eps:g} delta={c.delta:g}")
    print(n)
    return EXIT_OK


# ---------------------------------------------------------------------------
# emission

def _q6(v: float) -> float:
    """Quantize to the 6-decimal grid used by both output formats."""
    return float(f"{v:.6f}")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def render_csv(rows: list[ResultRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            r.experiment, r.method, _csv_cell(r.k), _csv_cell(r.rho), _csv_cell(r.f),
            _csv_cell(r.sigma), _csv_cell(r.estimate_nats), _csv_cell(r.truth_nats),
            _csv_cell(r.abs_err), _csv_cell(r.seed), "",
        ]))
    return "\n".join(lines) + "\n"


def render_json(rows: list[ResultRow]) -> str:
    payload = []
    for r in rows:
        payload.append({
            "experiment": r.experiment,
            "method": r.method,
            "k": r.k,
            "rho": None if r.rho is None else _q6(r.rho),
            "f": r.f,
            "sigma": None if r.sigma is None else _q6(r.sigma),
            "estimate_nats": None if r.estimate_nats is None else _q6(r.estimate_nats),
            "truth_nats": None if r.truth_nats is None else _q6(r.truth_nats),
            "abs_err": None if r.abs_err is None else _q6(r.abs_err),
            "seed": r.seed,
            "wall_ms": None,
        })
    return json.dumps(payload, indent=2) + "\n"


def rows_from_csv(text: str) -> list[ResultRow]:
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("missing or unexpected CSV header")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 11:
            raise ValueError(f"expected 11 fields, got {len(parts)}: {ln!r}")
        opt_f = lambda s: None if s == "" else float(s)
        opt_i = lambda s: None if s == "" else int(s)
        rows.append(ResultRow(
            experiment=parts[0], method=parts[1], k=opt_i(parts[2]), rho=opt_f(parts[3]),
            f=parts[4] or None, sigma=opt_f(parts[5]), estimate_nats=opt_f(parts[6]),
            truth_nats=opt_f(parts[7]), abs_err=opt_f(parts[8]), seed=opt_i(parts[9]),
            wall_ms=opt_f(parts[10]),
        ))
    return rows


def rows_from_json(text: str) -> list[ResultRow]:
    payload = json.loads(text)
    if not isinstance(payload, list):
        raise ValueError("expected a JSON array of result objects")
    return [ResultRow(**obj) for obj in payload]


def emit(rows: list[ResultRow], fmt: str = "csv", path: str = "-") -> None:
    """Write rows to the path ("-" for stdout) in the requested format.

    wall_ms is always emitted empty: artifacts must be byte-identical across
    repeated runs, and wall-clock time is not; timings go to the stderr log.
    """
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format: must be one of ('csv', 'json'), got {fmt!r}")
    text = render_csv(rows) if fmt == "csv" else render_json(rows)
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ConfigError(f"out: cannot write {path!r}: {exc}") from None


# ---------------------------------------------------------------------------
# entry point

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run options")
    g.add_argument("--config", metavar="FILE", help="JSON config file; flags override it")
    g.add_argument("--rho", type=float, help="componentwise correlation in (-1, 1)")
    g.add_argument("--k", type=int, help="components per variable")
    g.add_argument("--samples", type=int, help="dataset size for k-NN runs")
    g.add_argument("--knn", type=int, help="neighbor count for k-NN runs")
    g.add_argument("--steps", type=int, help="training steps")
    g.add_argument("--objective", choices=("dv", "f"), help="training objective")
    g.add_argument("--marginal", choices=("shuffle", "resample"), help="marginal batch mode")
    g.add_argument("--ema-rate", dest="ema_rate", type=float, help="EMA rate in (0, 1]")
    g.add_argument("--no-ema", dest="no_ema", action="store_true", default=None,
                   help="disable the EMA gradient correction")
    g.add_argument("--clip-cap", dest="clip_cap", type=float, help="gradient norm cap")
    g.add_argument("--seed", type=int, help="base seed for derived per-task seeds")
    g.add_argument("--jobs", type=int, help="parallel worker count for grids")
    g.add_argument("--out", help="output path, or - for stdout (default)")
    g.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    g.add_argument("--rho-grid", dest="rho_grid", help="comma-separated sweep correlations")
    g.add_argument("--trials", type=int, help="gradcheck trial count")
    g.add_argument("--dim-theta", dest="dim_theta", type=int, help="parameter dimension d")
    g.add_argument("--bound", type=float, help="sup-norm bound on the statistic")
    g.add_argument("--lipschitz", type=float, help="Lipschitz constant in the parameters")
    g.add_argument("--param-norm", dest="param_norm", type=float, help="parameter radius")
    g.add_argument("--eps", type=float, help="target accuracy")
    g.add_argument("--delta", type=float, help="failure probability")

    parser = argparse.ArgumentParser(prog="minfo",
                                     description="Mutual-information estimation harness")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, desc in (
        ("estimate", "one neural MI estimate on correlated Gaussians"),
        ("sweep", "correlation sweep: mine_dv, mine_f, and ksg per grid point"),
        ("equitability", "MINE-DV across nonlinearity x noise grid"),
        ("ksg", "one k-NN MI estimate on correlated Gaussians"),
        ("gradcheck", "finite-difference audit of backpropagation"),
        ("complexity", "sample-count bound for target accuracy/confidence"),
    ):
        sub.add_parser(name, parents=[common], help=desc)
    return parser


_FLAG_KEYS = ("rho", "k", "samples", "knn", "steps", "objective", "marginal", "ema_rate",
              "no_ema", "clip_cap", "seed", "jobs", "out", "format", "rho_grid", "trials",
              "dim_theta", "bound", "lipschitz", "param_norm", "eps", "delta")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        file_text = None
        if args.config is not None:
            try:
                file_text = Path(args.config).read_text()
            except OSError as exc:
                raise ConfigError(f"config: cannot read {args.config!r}: {exc}") from None
        flags: dict = {"experiment": args.experiment}
        for key in _FLAG_KEYS:
            flags[key] = getattr(args, key)
        cfg = parse_config(file_text, flags)
    except ConfigError as exc:
        _log(f"error: {exc}")
        return EXIT_CONFIG

    try:
        if cfg.experiment == "complexity":
            return run_complexity(cfg)
        if cfg.experiment == "gradcheck":
            return run_gradcheck(cfg)
        started = time.perf_counter()
        if cfg.experiment == "estimate":
            rows = run_estimate(cfg)
        elif cfg.experiment == "ksg":
            rows = run_ksg(cfg)
        elif cfg.experiment == "sweep":
            rows = run_sweep(cfg)
        else:
            rows = run_equitability(cfg)
        emit(rows, cfg.format, cfg.out)
        _log(f"{cfg.experiment}: {len(rows)} rows in "
             f"{time.perf_counter() - started:.1f}s -> {cfg.out}")
        failed = [r for r in rows if r.method != "spread" and r.estimate_nats is None]
        if failed:
            _log(f"{len(failed)} sub-run(s) failed numerically")
            return EXIT_NUMERIC
        return EXIT_OK
    except ConfigError as exc:
        _log(f"error: {exc}")
        return EXIT_CONFIG
    except (ValueError, NumericError) as exc:
        _log(f"error: {exc}")
        return EXIT_NUMERIC if isinstance(exc, NumericError) else EXIT_CONFIG


def console_main() -> None:
    sys.exit(main())
