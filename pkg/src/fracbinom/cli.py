"""Command-line front end emitting machine-readable CSV or JSON reports.

Output is deterministic for a fixed configuration: runs carry no wall-clock
content unless --timing is passed, numbers are serialized at fixed
precision (12 significant digits in CSV, shortest round-trip in JSON), and
grid evaluation order is independent of --threads.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import __version__
from .asymptotics import (
    ModerateScale,
    berry_esseen_profile,
    ldp_empirical,
    mdp_empirical,
    moment_diff_profile,
    nu_distance_profile,
)
from .distribution import Params, build_distribution, log_normalizing_constant
from .transforms import (
    QuadratureConfig,
    QuadratureError,
    cf_direct,
    cf_explicit,
    log_gbt_rhs,
    mgf_direct,
    mgf_explicit,
    theta_alpha,
)

_REPORT_COLUMNS = ("n", "empirical", "theoretical", "abs_error")


class FlagError(ValueError):
    """Validation failure attributable to one command-line flag."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    alpha: float
    x: float
    n: int | None = None
    grid: tuple[int, ...] | None = None
    z: float | None = None
    a: float | None = None
    xi: tuple[float, ...] | None = None
    beta: float | None = None
    m: int | None = None
    tail: str | None = None
    output: str = "csv"
    out_path: str | None = None
    seed: int | None = None
    threads: int = 1
    tol: float | None = None
    timing: bool = False

    def params(self) -> Params:
        if self.n is None:
            raise FlagError("--n", "required for this subcommand")
        try:
            return Params(alpha=self.alpha, x=self.x, n=self.n)
        except ValueError as exc:
            flag = "--alpha" if "alpha" in str(exc) else ("--x" if "x must" in str(exc) else "--n")
            raise FlagError(flag, str(exc)) from exc

    def quadrature(self) -> QuadratureConfig | None:
        if self.tol is None:
            return None
        try:
            return QuadratureConfig(rel_tol=self.tol)
        except ValueError as exc:
            raise FlagError("--tol", str(exc)) from exc


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise FlagError(flag, f"not a comma-separated integer list: {text!r}") from exc
    if not values:
        raise FlagError(flag, "empty list")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise FlagError(flag, "must be strictly increasing")
    return values

def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise FlagError(flag, f"not a comma-separated float list: {text!r}") from exc
    if not values:
        raise FlagError(flag, "empty list")
    return values


def _format_cell(value: Any) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _to_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(_format_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _to_json(config: ExperimentConfig, columns, rows, runtime_ms: int) -> str:
    config_dict = {
        "subcommand": config.subcommand,
        "alpha": config.alpha,
        "x": config.x,
    }
    for key in ("n", "z", "a", "beta", "m", "tail", "seed", "tol"):
        value = getattr(config, key)
        if value is not None:
            config_dict[key] = value
    if config.grid is not None:
        config_dict["grid"] = list(config.grid)
    if config.xi is not None:
        config_dict["xi"] = list(config.xi)
    payload = {
        "config": config_dict,
        "rows": [dict(zip(columns, row)) for row in rows],
        "meta": {"version": __version__, "runtime_ms": runtime_ms},
    }
    return json.dumps(payload, indent=2) + "\n"


def _report_rows(report) -> list[tuple]:
    return [(row.n, row.empirical, row.theoretical, row.abs_error) for row in report.rows]


def _require(config: ExperimentConfig, attr: str, flag: str):
    value = getattr(config, attr)
    if value is None:
        raise FlagError(flag, "required for this subcommand")
    return value


def _run_pmf(config: ExperimentConfig):
    table = build_distribution(config.params())
    rows = [(j, table.pmf(j), table.log_pmf(j)) for j in range(table.params.n + 1)]
    return ("j", "pmf", "log_pmf"), rows


def _run_verify_gbt(config: ExperimentConfig):
    params = config.params()
    if not 0.0 < params.x < 1.0:
        raise FlagError("--x", "must lie strictly inside (0, 1) for this subcommand")
    direct = log_normalizing_constant(params)
    lam = params.x / (1.0 - params.x)
    via_identity = params.alpha * params.n * math.log1p(-params.x) + log_gbt_rhs(
        params.alpha, params.n, lam, config.quadrature()
    )
    rel_err = abs(math.expm1(direct - via_identity))
    return ("direct_log_z", "gbt_log_z", "rel_err"), [(direct, via_identity, rel_err)]


def _run_mgf_check(config: ExperimentConfig):
    params = config.params()
    xi_list = config.xi if config.xi is not None else (-2.0, -0.5, 0.0, 0.5, 2.0)
    table = build_distribution(params)
    cfg = config.quadrature()
    rows = []
    for xi in xi_list:
        direct = mgf_direct(table, xi)
        explicit = mgf_explicit(params, xi, cfg)
        rows.append((xi, direct, explicit, abs(direct - explicit) / abs(direct)))
    return ("xi", "mgf_direct", "mgf_explicit", "rel_err"), rows


def _run_cf_check(config: ExperimentConfig):
    params = config.params()
    if config.xi is not None:
        xi_list = config.xi
    else:
        radius = theta_alpha(params.alpha)
        xi_list = tuple(f * radius for f in (-0.9, -0.45, 0.1, 0.45, 0.9))
    table = build_distribution(params)
    cfg = config.quadrature()
    rows = []
    for xi in xi_list:
        direct = cf_direct(table, xi)
        try:
            explicit = cf_explicit(params, xi, cfg)
        except ValueError as exc:
            raise FlagError("--xi", str(exc)) from exc
        rows.append((xi, direct.real, direct.imag, explicit.real, explicit.imag, abs(direct - explicit)))
    return ("xi", "direct_re", "direct_im", "explicit_re", "explicit_im", "abs_err"), rows


def _run_ldp(config: ExperimentConfig):
    grid = _require(config, "grid", "--grid")
    z = _require(config, "z", "--z")
    try:
        report = ldp_empirical(config.alpha, config.x, z, grid, tail=config.tail or "upper", threads=config.threads)
    except ValueError as exc:
        raise FlagError("--z", str(exc)) from exc
    return _REPORT_COLUMNS, _report_rows(report)


def _run_mdp(config: ExperimentConfig):
    grid = config.grid if config.grid is not None else (400, 800, 1600, 3200, 6400)
    a = _require(config, "a", "--a")
    beta = config.beta if config.beta is not None else 0.7
    try:
        scale = ModerateScale(beta=beta, grid=grid)
    except ValueError as exc:
        raise FlagError("--beta", str(exc)) from exc
    try:
        report = mdp_empirical(config.alpha, config.x, a, scale, threads=config.threads)
    except ValueError as exc:
        raise FlagError("--a", str(exc)) from exc
    return _REPORT_COLUMNS, _report_rows(report)


_DOUBLING_GRID = (50, 100, 200, 400, 800, 1600, 3200, 6400)


def _run_berry_esseen(config: ExperimentConfig):
    grid = config.grid if config.grid is not None else _DOUBLING_GRID
    report = berry_esseen_profile(config.alpha, config.x, grid, threads=config.threads)
    return _REPORT_COLUMNS, _report_rows(report)


def _run_compare_nu(config: ExperimentConfig):
    grid = config.grid if config.grid is not None else _DOUBLING_GRID
    report = nu_distance_profile(config.alpha, config.x, grid, threads=config.threads)
    return _REPORT_COLUMNS, _report_rows(report)


def _run_moments(config: ExperimentConfig):
    grid = config.grid if config.grid is not None else (50, 100, 200, 400)
    m = _require(config, "m", "--m")
    try:
        report = moment_diff_profile(config.alpha, config.x, m, grid, threads=config.threads)
    except ValueError as exc:
        raise FlagError("--m", str(exc)) from exc
    return _REPORT_COLUMNS, _report_rows(report)


_RUNNERS = {
    "pmf": _run_pmf,
    "verify-gbt": _run_verify_gbt,
    "mgf-check": _run_mgf_check,
    "cf-check": _run_cf_check,
    "ldp": _run_ldp,
    "mdp": _run_mdp,
    "berry-esseen": _run_berry_esseen,
    "compare-nu": _run_compare_nu,
    "moments": _run_moments,
}


def run(config: ExperimentConfig) -> int:
    """Execute one experiment; returns the process exit code."""
    started = time.perf_counter()
    try:
        columns, rows = _RUNNERS[config.subcommand](config)
    except FlagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    runtime_ms = int((time.perf_counter() - started) * 1000.0) if config.timing else 0
    if config.output == "json":
        text = _to_json(config, columns, rows, runtime_ms)
    else:
        text = _to_csv(columns, rows)
    if config.out_path is None:
        sys.stdout.write(text)
    else:
        with open(config.out_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    return 0


def _add_common(sub: argparse.ArgumentParser, *, with_n: bool, with_grid: bool) -> None:
    sub.add_argument("--alpha", type=float, required=True, help="positive shape exponent")
    sub.add_argument("--x", type=float, required=True, help="success parameter in [0, 1]")
    if with_n:
        sub.add_argument("--n", type=int, required=True, help="support size parameter")
    if with_grid:
        sub.add_argument("--grid", type=str, default=None, help="comma-separated increasing n values")
    sub.add_argument("--output", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", dest="out_path", default=None, help="write the report here instead of stdout")
    sub.add_argument("--seed", type=int, default=None, help="recorded in the report config")
    sub.add_argument("--threads", type=int, default=None, help="grid-loop parallelism (result-invariant)")
    sub.add_argument("--tol", type=float, default=None, help="quadrature relative tolerance override")
    sub.add_argument("--timing", action="store_true", help="record wall-clock runtime (breaks byte-level reproducibility)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracbinom",
        description="Build fractional binomial distributions and run their verification experiments.",
    )
    parser.add_argument("--version", action="version", version=f"fracbinom {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("pmf", help="emit the probability mass function")
    _add_common(sub, with_n=True, with_grid=False)

    sub = subs.add_parser("verify-gbt", help="cross-check the normalizing constant against the closed form")
    _add_common(sub, with_n=True, with_grid=False)

    sub = subs.add_parser("mgf-check", help="explicit vs direct moment generating function")
    _add_common(sub, with_n=True, with_grid=False)
    sub.add_argument("--xi", type=str, default=None, help="comma-separated evaluation points")

    sub = subs.add_parser("cf-check", help="explicit vs direct characteristic function")
    _add_common(sub, with_n=True, with_grid=False)
    sub.add_argument("--xi", type=str, default=None, help="comma-separated evaluation points")

    sub = subs.add_parser("ldp", help="exact tail rates against the large-deviation rate function")
    _add_common(sub, with_n=False, with_grid=True)
    sub.add_argument("--z", type=float, required=True, help="tail threshold for S/n")
    sub.add_argument("--tail", choices=("upper", "lower"), default="upper")

    sub = subs.add_parser("mdp", help="exact tail rates against the moderate-deviation rate function")
    _add_common(sub, with_n=False, with_grid=True)
    sub.add_argument("--a", type=float, required=True, help="deviation size in units of c_n = n**beta")
    sub.add_argument("--beta", type=float, default=0.7)

    sub = subs.add_parser("berry-esseen", help="sqrt(n)-scaled normal-approximation error profile")
    _add_common(sub, with_n=False, with_grid=True)

    sub = subs.add_parser("compare-nu", help="sqrt(n)-scaled distance to the rescaled-binomial law")
    _add_common(sub, with_n=False, with_grid=True)

    sub = subs.add_parser("moments", help="scaled moment differences against the rescaled-binomial law")
    _add_common(sub, with_n=False, with_grid=True)
    sub.add_argument("--m", type=int, required=True, help="moment order")

    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    grid = None
    if getattr(args, "grid", None) is not None:
        grid = _parse_int_list(args.grid, "--grid")
    xi = None
    if getattr(args, "xi", None) is not None:
        xi = _parse_float_list(args.xi, "--xi")
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    if threads < 1:
        raise FlagError("--threads", "must be at least 1")
    return ExperimentConfig(
        subcommand=args.subcommand,
        alpha=args.alpha,
        x=args.x,
        n=getattr(args, "n", None),
        grid=grid,
        z=getattr(args, "z", None),
        a=getattr(args, "a", None),
        xi=xi,
        beta=getattr(args, "beta", None),
        m=getattr(args, "m", None),
        tail=getattr(args, "tail", None),
        output=args.output,
        out_path=args.out_path,
        seed=args.seed,
        threads=threads,
        tol=args.tol,
        timing=args.timing,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except FlagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
