"""Batch front-end writing CSV tables.

Usage::

    kernelspde heat-spde --paths 1000 --steps 200 --interior-points 30 --output stats.csv
    kernelspde converge --config run.cfg --output conv.csv

Config files are flat ``key = value`` text (``#`` starts a comment).
Command-line flags override file values. Exit codes: 0 success, 1 usage or
config error, 2 I/O error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import collocation, reference, spde
from .integral import IntegralKernelEvaluator, QuadratureRule
from .kernels import MaternKernel
from .operators import dirichlet, make_step_operator

SUBCOMMANDS = ("interpolate", "elliptic", "heat-spde", "converge")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str = "heat-spde"
    m: int = 3
    theta: float = 26.5
    n_interior: int = 58
    T: float = 1.0
    steps: int = 800
    noise: str = "r1"
    sigma: float = 1.0
    paths: int = 1000
    seed: int = 0
    panels: int = 64
    nodes: int = 10
    workers: int = 0
    output: str = "-"
    output_stride: int = 1
    levels: str = "9:50,19:100,39:200"
    sigma_grid: int = 401

    def validate(self) -> "RunConfig":
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"subcommand: must be one of {', '.join(SUBCOMMANDS)}")
        positive = ("theta", "n_interior", "T", "steps", "paths", "panels", "nodes",
                    "output_stride", "sigma_grid")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name}: must be positive, got {getattr(self, name)}")
        if self.m < 2:
            raise ConfigError(f"m: must be >= 2, got {self.m}")
        if self.sigma < 0:
            raise ConfigError(f"sigma: must be nonnegative, got {self.sigma}")
        if self.noise not in ("r1", "r2"):
            raise ConfigError(f"noise: must be r1 or r2, got {self.noise!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed: must be an unsigned 64-bit integer, got {self.seed}")
        if self.workers < 0:
            raise ConfigError(f"workers: must be >= 0, got {self.workers}")
        if self.subcommand == "heat-spde" and self.paths < 2:
            raise ConfigError("paths: heat-spde needs at least 2 paths")
        parse_levels(self.levels)
        return self

    @property
    def effective_workers(self) -> int:
        return self.workers or os.cpu_count() or 1


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def _coerce(name: str, raw):
    cast = _CASTS[_FIELD_TYPES[name]]
    try:
        return cast(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: cannot parse {raw!r} as {_FIELD_TYPES[name]}") from None


def parse_levels(text: str) -> list[tuple[int, int]]:
    try:
        levels = [tuple(int(v) for v in item.split(":")) for item in text.split(",") if item.strip()]
    except ValueError:
        raise ConfigError(f"levels: expected 'N:n,N:n,...', got {text!r}") from None
    if any(len(lv) != 2 or min(lv) < 1 for lv in levels):
        raise ConfigError(f"levels: expected positive 'N:n' pairs, got {text!r}")
    return levels


def read_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = _FLAG_KEYS.get(key, key.replace("-", "_"))
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{key}: unknown config key")
            values[key] = val
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


FLAGS = {
    "--seed": "seed", "--paths": "paths", "--steps": "steps", "--interior-points": "n_interior",
    "--theta": "theta", "--sigma": "sigma", "--noise": "noise", "--workers": "workers",
    "--output": "output", "--m": "m", "--T": "T", "--panels": "panels", "--nodes": "nodes",
    "--levels": "levels", "--output-stride": "output_stride",
}

# config files accept flag spellings too, e.g. "interior-points = 30"
_FLAG_KEYS = {flag[2:]: name for flag, name in FLAGS.items()}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kernelspde", description="Kernel collocation solvers for (S)PDEs on (0, 1).")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", metavar="PATH")
    for flag, name in FLAGS.items():
        parser.add_argument(flag, dest=name, default=None)
    return parser


def parse_config(argv=None) -> RunConfig:
    """Merge defaults, the optional config file and flags (highest priority)."""
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        try:
            values.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc.strerror}") from None
    for name in FLAGS.values():
        val = getattr(args, name)
        if val is not None:
            values[name] = val
    values.pop("subcommand", None)
    cfg = RunConfig(subcommand=args.subcommand, **{k: _coerce(k, v) for k, v in values.items()})
    return cfg.validate()


def _fmt(v: float) -> str:
    return repr(float(v))


def stats_rows(stats: spde.EnsembleStats, oracle: reference.SpectralHeatSolution, stride: int = 1):
    idx = np.arange(stride - 1, len(stats.times), stride)
    t = stats.times[idx]
    em = reference.exact_mean(oracle, t[:, None], stats.points[None, :])
    ev = reference.exact_var(oracle, t[:, None], stats.points[None, :])
    for a, j in enumerate(idx):
        for k, x in enumerate(stats.points):
            yield (t[a], x, stats.mean[j, k], stats.var[j, k], em[a, k], ev[a, k])


def _write(path: str, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    if path == "-":
        sys.stdout.write(buf.getvalue())
        return
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def emit_stats_csv(stats: spde.EnsembleStats, oracle: reference.SpectralHeatSolution, path: str,
                   stride: int = 1) -> None:
    """Write ``t,x,sample_mean,sample_var,exact_mean,exact_var``, one row per (t_j, x_k)."""
    _write(path, ["t", "x", "sample_mean", "sample_var", "exact_mean", "exact_var"],
           stats_rows(stats, oracle, stride))


def emit_convergence_csv(results, path: str) -> None:
    """Write ``h,dt,rmse_mean,rmse_var,max_sigma``; needs at least two levels."""
    results = list(results)
    if len(results) < 2:
        raise ValueError("convergence table needs at least 2 refinement levels")
    _write(path, ["h", "dt", "rmse_mean", "rmse_var", "max_sigma"], results)


def _kernel(cfg: RunConfig) -> MaternKernel:
    return MaternKernel(cfg.m, cfg.theta)


def _rule(cfg: RunConfig) -> QuadratureRule:
    return QuadratureRule(cfg.panels, cfg.nodes)


def run_heat(cfg: RunConfig, n_interior: int | None = None, steps: int | None = None):
    pts = collocation.uniform_collocation(n_interior or cfg.n_interior)
    problem = spde.SpdeProblem(pts, _kernel(cfg), cfg.T, steps or cfg.steps, rule=_rule(cfg))
    model = spde.NoiseModel(cfg.noise, cfg.sigma, problem.delta_t)
    stats = spde.run_ensemble(problem, model, cfg.paths, cfg.seed, workers=cfg.effective_workers)
    return problem, stats


def _oracle(cfg: RunConfig) -> reference.SpectralHeatSolution:
    return reference.SpectralHeatSolution(roughness=1 if cfg.noise == "r1" else 2, sigma=cfg.sigma)


def convergence_rows(cfg: RunConfig):
    oracle = _oracle(cfg)
    grid = np.linspace(0.0, 1.0, cfg.sigma_grid)
    for n_interior, steps in parse_levels(cfg.levels):
        problem, stats = run_heat(cfg, n_interior, steps)
        t, x = problem.times[:, None], stats.points[None, :]
        rmse_mean = reference.relative_rmse(reference.exact_mean(oracle, t, x), stats.mean)
        rmse_var = reference.relative_rmse(reference.exact_var(oracle, t, x), stats.var)
        max_sigma = float(collocation.power_function(problem.system(), grid).max())
        yield (problem.points.fill_distance, problem.delta_t, rmse_mean, rmse_var, max_sigma)


def _elliptic(cfg: RunConfig):
    dt = cfg.T / cfg.steps
    pts = collocation.uniform_collocation(cfg.n_interior)
    system = collocation.assemble(pts, make_step_operator(dt), dirichlet(),
                                  IntegralKernelEvaluator(_kernel(cfg), _rule(cfg)))
    est = collocation.solve_elliptic(system, lambda x: (1 + dt * np.pi**2) * np.sin(np.pi * x),
                                     lambda x: np.zeros_like(x))
    grid = np.linspace(0.0, 1.0, cfg.sigma_grid)
    return zip(grid, est(grid), np.sin(np.pi * grid), collocation.power_function(system, grid))


def _interpolate(cfg: RunConfig):
    pts = collocation.uniform_collocation(cfg.n_interior).points
    target = np.sin(np.pi * pts) + 0.5 * np.sin(3 * np.pi * pts)
    interp = collocation.min_norm_interpolant(pts, target, _kernel(cfg))
    grid = np.linspace(0.0, 1.0, cfg.sigma_grid)
    return zip(grid, interp(grid), np.sin(np.pi * grid) + 0.5 * np.sin(3 * np.pi * grid))


def run(cfg: RunConfig) -> None:
    if cfg.subcommand == "heat-spde":
        _, stats = run_heat(cfg)
        emit_stats_csv(stats, _oracle(cfg), cfg.output, cfg.output_stride)
    elif cfg.subcommand == "converge":
        emit_convergence_csv(convergence_rows(cfg), cfg.output)
    elif cfg.subcommand == "elliptic":
        _write(cfg.output, ["x", "estimate", "exact", "sigma"], _elliptic(cfg))
    else:
        _write(cfg.output, ["x", "interpolant", "target"], _interpolate(cfg))


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"kernelspde: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print("kernelspde: " + " ".join(f"{k}={v}" for k, v in asdict(cfg).items()), file=sys.stderr)
    print(f"kernelspde: master seed {cfg.seed}", file=sys.stderr)
    try:
        run(cfg)
    except OSError as exc:
        print(f"kernelspde: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"kernelspde: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"kernelspde: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
