"""Command-line pipeline: check | geometry | solve.

Exit codes are the machine contract:
    0  success (all requested checks pass / geometry certified / two
       distinct solutions found)
    1  configuration or schema error
    2  a requested check failed, or the two solutions are not distinct
    3  at least one check inconclusive (none failed)
    4  a solver did not converge (report still written)
    5  geometry failure: no positive sphere estimate or no negative-energy
       anchor

Human-readable progress goes to stderr; reports, profiles, and figures land
in the output directory.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .config import apply_overrides, build_problem, parse_config_text, validate_config
from .energy import EnergyOperator
from .errors import ConfigurationError, PathCollapseError
from .geometry import certify_geometry
from .grid import Field, build_grid
from .hypotheses import CHECKS, FAIL, INCONCLUSIVE, default_u_grid
from .problems import shift_problem
from .report import log, versions, write_report, write_solution_csv, write_trace_csv
from .solve import SolverConfig, minimize_in_ball, mountain_pass, verify_distinct

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECK_FAIL = 2
EXIT_INCONCLUSIVE = 3
EXIT_NONCONVERGED = 4
EXIT_GEOMETRY = 5


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kirchpass", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("check", "run the requested hypothesis checks"),
        ("geometry", "certify the saddle geometry"),
        ("solve", "full pipeline: shift, geometry, two solutions, distinctness"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the run configuration JSON")
        cmd.add_argument("--set", dest="overrides", action="append", default=[],
                         metavar="KEY=VALUE", help="override a config entry (repeatable)")
        cmd.add_argument("--output", default=None, help="output directory (overrides config)")
        cmd.add_argument("--seed", type=int, default=None, help="seed (overrides config)")
    return parser


def _load_config(args) -> dict:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
    raw = parse_config_text(text)
    raw = apply_overrides(raw, args.overrides)
    config = validate_config(raw)
    if args.output is not None:
        config["output"]["dir"] = args.output
    if args.seed is not None:
        config["seed"] = args.seed
    return config


def _check_kwargs(entry: dict, seed: int) -> dict:
    cid = entry["id"]
    kwargs = {}
    if cid == "V1":
        for key in ("d0", "M_list", "y_radii", "mc_samples"):
            if key in entry:
                kwargs[key] = tuple(entry[key]) if isinstance(entry[key], list) else entry[key]
        kwargs["seed"] = seed
        return kwargs
    grid_keys = {}
    if "u_max" in entry:
        grid_keys["u_max"] = entry["u_max"]
    if "u_floor" in entry:
        grid_keys["u_floor"] = entry["u_floor"]
    if "u_level" in entry:
        grid_keys["level"] = entry["u_level"]
    if "u_signs" in entry:
        grid_keys["signs"] = entry["u_signs"]
    if grid_keys:
        u_max = grid_keys.pop("u_max", 1e3 if cid in ("S2", "S3") else 50.0)
        floor = grid_keys.pop("u_floor", 1e-3)
        kwargs["u_grid"] = default_u_grid(u_max=u_max, floor=floor, **grid_keys)
    elif cid in ("S2", "S3"):
        kwargs["u_grid"] = default_u_grid(u_max=1e3)
    if cid in ("S2", "S3") and "r0" in entry:
        kwargs["r0"] = entry["r0"]
    if cid == "AR" and "mu_grid" in entry:
        kwargs["mu_grid"] = tuple(entry["mu_grid"])
    return kwargs


def run_checks(config: dict) -> tuple[list, int]:
    spec = build_problem(config)
    grid = build_grid(spec.R, spec.n, spec.scheme)
    shifted = shift_problem(spec, grid)
    reports = []
    for entry in config["checks"]:
        cid = entry["id"]
        kwargs = _check_kwargs(entry, config["seed"])
        target = spec.potential if cid == "V1" else shifted.nonlinearity
        log(f"check {cid} ...")
        reports.append(CHECKS[cid](target, **kwargs))
    verdicts = [r.verdict for r in reports]
    if FAIL in verdicts:
        code = EXIT_CHECK_FAIL
    elif INCONCLUSIVE in verdicts:
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_OK
    return reports, code


def cmd_check(config: dict) -> int:
    t0 = time.perf_counter()
    out_dir = Path(config["output"]["dir"])
    reports, code = run_checks(config)
    report = {
        "config": config,
        "versions": versions(),
        "hypotheses": [r.to_dict() for r in reports],
        "timings": {"total_s": time.perf_counter() - t0},
    }
    write_report(out_dir / "report.json", report)
    log(f"check: wrote {out_dir / 'report.json'} (exit {code})")
    return code


def cmd_geometry(config: dict) -> int:
    t0 = time.perf_counter()
    out_dir = Path(config["output"]["dir"])
    spec = build_problem(config)
    grid = build_grid(spec.R, spec.n, spec.scheme)
    shifted = shift_problem(spec, grid)
    geo_cfg = config["geometry"]
    geo = certify_geometry(
        shifted,
        grid,
        rho=geo_cfg["rho"],
        sphere_samples=geo_cfg["sphere_samples"],
        t_max=geo_cfg["t_max"],
        t_factor=geo_cfg["t_factor"],
        t_min=geo_cfg["t_min"],
        rho_min=geo_cfg["rho_min"],
        rho_max=geo_cfg["rho_max"],
        seed=config["seed"],
    )
    report = {
        "config": config,
        "versions": versions(),
        "geometry": geo.to_dict(),
        "timings": {"total_s": time.perf_counter() - t0},
    }
    write_report(out_dir / "report.json", report)
    log(f"geometry: rho={geo.rho:.6g} eta={geo.eta:.6g} ok={geo.ok}")
    return EXIT_OK if geo.ok else EXIT_GEOMETRY


def cmd_solve(config: dict) -> int:
    t0 = time.perf_counter()
    out_dir = Path(config["output"]["dir"])
    timings = {}
    spec = build_problem(config)
    grid = build_grid(spec.R, spec.n, spec.scheme)
    shifted = shift_problem(spec, grid)
    op = EnergyOperator(shifted, grid)
    report = {"config": config, "versions": versions(), "shift": {"V0": shifted.V0}}

    tg = time.perf_counter()
    geo_cfg = config["geometry"]
    geo = certify_geometry(
        shifted,
        grid,
        rho=geo_cfg["rho"],
        sphere_samples=geo_cfg["sphere_samples"],
        t_max=geo_cfg["t_max"],
        t_factor=geo_cfg["t_factor"],
        t_min=geo_cfg["t_min"],
        rho_min=geo_cfg["rho_min"],
        rho_max=geo_cfg["rho_max"],
        seed=config["seed"],
        op=op,
    )
    timings["geometry_s"] = time.perf_counter() - tg
    report["geometry"] = geo.to_dict()
    log(f"geometry: rho={geo.rho:.6g} eta={geo.eta:.6g} ok={geo.ok}")
    if not geo.ok:
        report["timings"] = {**timings, "total_s": time.perf_counter() - t0}
        write_report(out_dir / "report.json", report)
        log(f"solve: geometry failure ({geo.failure})")
        return EXIT_GEOMETRY

    solver_cfg = SolverConfig(seed=config["seed"], **config["solver"])
    start = None
    if geo.t_star is not None:
        start = Field(geo.t_star * geo.u_dir.values, grid)

    ts = time.perf_counter()
    cp1 = minimize_in_ball(shifted, grid, geo.rho, solver_cfg, start=start, op=op)
    timings["step1_s"] = time.perf_counter() - ts
    report["step1"] = cp1.to_dict()
    log(f"step1: level={cp1.level:.6g} residual={cp1.residual:.3g} converged={cp1.converged}")

    ts = time.perf_counter()
    collapse = None
    try:
        cp2 = mountain_pass(shifted, grid, geo.negative_point.u, solver_cfg, eta=geo.eta, op=op)
    except PathCollapseError as exc:
        collapse = str(exc)
        cp2 = None
    timings["step2_s"] = time.perf_counter() - ts
    if cp2 is not None:
        report["step2"] = cp2.to_dict()
        log(f"step2: level={cp2.level:.6g} residual={cp2.residual:.3g} converged={cp2.converged}")
    else:
        report["step2"] = {"collapse": collapse}
        log(f"step2: path collapse ({collapse})")

    code = EXIT_OK
    if cp2 is None or not (cp1.converged and cp2.converged):
        code = EXIT_NONCONVERGED
        report["distinctness"] = None
    else:
        distinct = verify_distinct(shifted, grid, cp1, cp2, solver_cfg, op=op)
        report["distinctness"] = distinct.to_dict()
        log(f"distinct: {distinct.passed}" + (f" ({distinct.reason})" if distinct.reason else ""))
        if not distinct.passed:
            code = EXIT_CHECK_FAIL

    write_solution_csv(out_dir / "step1_solution.csv", grid.nodes, cp1.u.values)
    write_trace_csv(out_dir / "step1_trace.csv", cp1.trace)
    if cp2 is not None:
        write_solution_csv(out_dir / "step2_solution.csv", grid.nodes, cp2.u.values)
        write_trace_csv(out_dir / "step2_trace.csv", cp2.trace)

    if config["output"]["plots"] and cp2 is not None:
        from . import figures

        tf = time.perf_counter()
        figures.render_solution_figure(out_dir / "solutions.png", grid.nodes, cp1.u.values, cp2.u.values)
        figures.render_trace_figure(out_dir / "convergence.png", cp1.trace, cp2.trace)
        if cp2.path_levels is not None:
            figures.render_path_figure(out_dir / "path_profile.png", cp2.path_levels, geo.eta)
        timings["figures_s"] = time.perf_counter() - tf

    report["timings"] = {**timings, "total_s": time.perf_counter() - t0}
    write_report(out_dir / "report.json", report)
    log(f"solve: wrote {out_dir / 'report.json'} (exit {code})")
    return code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = _load_config(args)
    except ConfigurationError as exc:
        log(f"config error: {exc}")
        return EXIT_CONFIG
    try:
        if args.command == "check":
            return cmd_check(config)
        if args.command == "geometry":
            return cmd_geometry(config)
        return cmd_solve(config)
    except ConfigurationError as exc:
        log(f"config error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
