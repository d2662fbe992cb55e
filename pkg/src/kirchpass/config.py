"""Run configuration: schema validation, defaults, overrides, factories.

A run is described by a single JSON file validated against the schema
shipped with the package (unknown keys rejected, defaults documented there).
The effective post-default configuration is echoed into every report, so a
run can be reproduced from its own report.
"""

from __future__ import annotations

import copy
import json
from importlib import resources

import jsonschema

from .errors import ConfigurationError
from .problems import (
    Amplitude,
    ArViolator,
    ConstantPotential,
    KirchhoffExample,
    Nonlinearity,
    Potential,
    ProblemSpec,
    SublinearOrigin,
    SumNonlinearity,
    TabulatedPotential,
    ZeroNonlinearity,
    ZigzagPotential,
)

DEFAULTS = {
    "problem": {
        "b": 1.0,
        "potential": {"kind": "constant", "value": 1.0},
        "nonlinearity": {"kind": "kirchhoff-example", "a": 1.0},
        "V0": None,
    },
    "grid": {"R": 8.0, "n": 256, "scheme": "uniform-order4"},
    "solver": {
        "tol_residual": 1e-6,
        "tol_cerami": 1e-5,
        "max_iters": 10_000,
        "armijo_slope": 1e-4,
        "armijo_shrink": 0.5,
        "path_points": 41,
        "deform_step": 0.1,
        "distinct_delta": 0.1,
    },
    "geometry": {
        "rho": None,
        "rho_min": 0.01,
        "rho_max": 32.0,
        "sphere_samples": 256,
        "t_max": 1000.0,
        "t_factor": 2.0,
        "t_min": 1e-6,
    },
    "checks": [],
    "output": {"dir": ".", "plots": True},
    "seed": 0,
}


def load_schema() -> dict:
    with resources.files("kirchpass").joinpath("config_schema.json").open("r") as fh:
        return json.load(fh)


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def parse_config_text(text: str) -> dict:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a JSON object")
    return raw


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply repeatable --set key.path=value pairs; values parse as JSON first."""
    out = copy.deepcopy(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"override {item!r} is not of the form KEY=VALUE")
        key, text = item.split("=", 1)
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigurationError(f"override {key!r} descends into a non-object")
        node[parts[-1]] = value
    return out


def validate_config(raw: dict) -> dict:
    """Merge defaults, validate against the schema, return the effective config."""
    merged = _deep_merge(DEFAULTS, raw)
    try:
        jsonschema.validate(merged, load_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigurationError(f"config invalid at {path}: {exc.message}") from exc
    return merged


def build_potential(cfg: dict) -> Potential:
    kind = cfg.get("kind", "constant")
    if kind == "constant":
        return ConstantPotential(float(cfg.get("value", 1.0)))
    if kind == "zigzag":
        return ZigzagPotential(float(cfg.get("a0", 0.0)))
    if kind == "custom-tabulated":
        if "r" not in cfg or "values" not in cfg:
            raise ConfigurationError("custom-tabulated potential needs both 'r' and 'values'")
        return TabulatedPotential(cfg["r"], cfg["values"])
    raise ConfigurationError(f"unknown potential kind {kind!r}")


def build_nonlinearity(cfg: dict) -> Nonlinearity:
    kind = cfg["kind"]
    if kind == "kirchhoff-example":
        return KirchhoffExample(Amplitude(float(cfg.get("a", 1.0))))
    if kind == "sublinear-origin":
        return SublinearOrigin(c3=float(cfg.get("c3", 1.0)), tau=float(cfg.get("tau", 1.0)))
    if kind == "ar-violator":
        return ArViolator()
    if kind == "zero":
        return ZeroNonlinearity()
    if kind == "sum":
        return SumNonlinearity(tuple(build_nonlinearity(t) for t in cfg["terms"]))
    raise ConfigurationError(f"unknown nonlinearity kind {kind!r}")


def build_problem(config: dict) -> ProblemSpec:
    prob = config["problem"]
    grid = config["grid"]
    return ProblemSpec(
        b=float(prob["b"]),
        potential=build_potential(prob["potential"]),
        nonlinearity=build_nonlinearity(prob["nonlinearity"]),
        V0=prob.get("V0"),
        R=float(grid["R"]),
        n=int(grid["n"]),
        scheme=grid["scheme"],
    )
