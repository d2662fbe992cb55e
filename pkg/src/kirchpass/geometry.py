"""Numerical certification of the saddle geometry.

Three ingredients: a sampled lower estimate of the energy on a small H-sphere
(positive estimate = geometry certified, by sampling, not proof), a scaling
scan along a fixed direction that finds a point of negative energy outside
the sphere, and a downward scan that locates negative energy at small
amplitude (the seed for the ball-constrained minimization).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .energy import EnergyOperator
from .errors import NegativePointNotFoundError
from .grid import Field, RadialGrid
from .problems import ProblemSpec


@dataclass
class SphereEstimate:
    rho: float
    eta: float                    # min sampled energy on the sphere of radius rho
    analytic_bound: float | None  # 1/2 rho^2 - C1 rho^4 - C2 rho^q, when constants given
    samples: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "eta": self.eta,
            "analytic_bound": self.analytic_bound,
            "samples": self.samples,
            "seed": self.seed,
        }


@dataclass
class NegativePointResult:
    u: Field
    t: float
    level: float
    norm: float
    scan_t: np.ndarray
    scan_levels: np.ndarray
    ratio_tail: np.ndarray        # I(t u)/t^4 over the last three scan points
    trend_decreasing: bool

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "level": self.level,
            "norm": self.norm,
            "scan_t": self.scan_t.tolist(),
            "scan_levels": self.scan_levels.tolist(),
            "ratio_tail": self.ratio_tail.tolist(),
            "trend_decreasing": self.trend_decreasing,
        }


@dataclass
class GeometryReport:
    rho: float
    eta: float
    rho_selection: str            # "config" | "analytic" | "sampled-scan"
    sphere: SphereEstimate
    negative_point: NegativePointResult | None
    t_star: float | None
    seed: int
    ok: bool
    failure: str | None = None
    u_dir: Field | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "eta": self.eta,
            "rho_selection": self.rho_selection,
            "sphere": self.sphere.to_dict(),
            "negative_point": self.negative_point.to_dict() if self.negative_point else None,
            "t_star": self.t_star,
            "seed": self.seed,
            "ok": self.ok,
            "failure": self.failure,
        }


def default_direction(spec: ProblemSpec, grid: RadialGrid, op: EnergyOperator | None = None) -> Field:
    """H-normalized positive bump max(0, 1 - r)^2; the standard scan direction."""
    op = op or EnergyOperator(spec, grid)
    vals = np.maximum(0.0, 1.0 - grid.nodes) ** 2
    return Field(vals / op.h_norm(vals), grid)


def sphere_directions(op: EnergyOperator, m: int, seed: int) -> np.ndarray:
    """m random unit-H directions as rows.

    Randomized radial Gaussian bumps (random center, width, sign) rather than
    white node noise: after H-normalization, node noise carries vanishing
    pointwise amplitude and can never trigger the superquartic terms that
    break the sphere bound at large radii, so it certifies nothing.
    """
    grid = op.grid
    rng = np.random.default_rng(seed)
    out = np.empty((m, grid.n))
    for k in range(m):
        center = rng.uniform(0.0, grid.R / 8.0)
        width = np.exp(rng.uniform(np.log(grid.R / 32.0), np.log(grid.R / 4.0)))
        sign = 1.0 if rng.random() < 0.5 else -1.0
        prof = sign * np.exp(-0.5 * ((grid.nodes - center) / width) ** 2)
        out[k] = prof / op.h_norm(prof)
    return out


def estimate_sphere_min(
    spec: ProblemSpec,
    grid: RadialGrid,
    rho: float,
    m: int = 256,
    seed: int = 0,
    constants: dict | None = None,
    op: EnergyOperator | None = None,
    directions: np.ndarray | None = None,
) -> SphereEstimate:
    """Min of I over m sampled directions on the H-sphere of radius rho.

    With fitted growth constants {c1, c2, q} the analytic lower bound
    1/2 rho^2 - S4 c1/4 rho^4 - Sq c2/q rho^q is reported alongside, using
    embedding constants estimated on the same direction ensemble.
    """
    if not rho > 0:
        raise ValueError(f"sphere radius must be positive, got {rho}")
    if m < 32:
        raise ValueError(f"need at least 32 directions, got {m}")
    op = op or EnergyOperator(spec, grid)
    dirs = directions if directions is not None else sphere_directions(op, m, seed)
    eta = min(op.value(rho * d) for d in dirs)
    analytic = None
    if constants is not None:
        c1, c2, q = constants["c1"], constants["c2"], constants["q"]
        s4 = max(float(op.w @ d**4) for d in dirs)
        sq = max(float(op.w @ np.abs(d) ** q) for d in dirs)
        analytic = 0.5 * rho**2 - s4 * c1 / 4.0 * rho**4 - sq * c2 / q * rho**q
    return SphereEstimate(rho=float(rho), eta=float(eta), analytic_bound=analytic, samples=len(dirs), seed=seed)


def select_rho(
    op: EnergyOperator,
    rho_min: float = 1e-2,
    rho_max: float = 32.0,
    candidates: int = 25,
    scan_samples: int = 64,
    seed: int = 0,
    margin: float = 0.05,
    constants: dict | None = None,
    directions: np.ndarray | None = None,
) -> tuple[float, str]:
    """Choose the sphere radius when the config leaves it open.

    With fitted growth constants: maximize the analytic lower bound over a
    log-grid.  Otherwise: the smallest candidate whose sampled sphere minimum
    clears margin * rho^2/2 (the quadratic term), falling back to the
    best-performing candidate if none does.  Passing the certificate's own
    direction set keeps the scan and the final estimate consistent.
    """
    grid_rhos = np.geomspace(rho_min, rho_max, candidates)
    if directions is None:
        directions = sphere_directions(op, scan_samples, seed)
    if constants is not None:
        c1, c2, q = constants["c1"], constants["c2"], constants["q"]
        s4 = max(float(op.w @ d**4) for d in directions)
        sq = max(float(op.w @ np.abs(d) ** q) for d in directions)
        bounds = 0.5 * grid_rhos**2 - s4 * c1 / 4.0 * grid_rhos**4 - sq * c2 / q * grid_rhos**q
        return float(grid_rhos[int(np.argmax(bounds))]), "analytic"
    best_rho, best_eta = None, -np.inf
    for rho in grid_rhos:
        eta = min(op.value(rho * d) for d in directions)
        if eta > best_eta:
            best_rho, best_eta = rho, eta
        if eta >= margin * 0.5 * rho**2:
            return float(rho), "sampled-scan"
    return float(best_rho), "sampled-scan"


def find_negative_energy_point(
    spec: ProblemSpec,
    grid: RadialGrid,
    u_dir: Field,
    t_max: float = 1e3,
    factor: float = 2.0,
    rho: float = 0.0,
    op: EnergyOperator | None = None,
) -> NegativePointResult:
    """Geometric scan t = 1, factor, factor^2, ... for I(t u_dir) < 0.

    Returns the first scaling with negative energy and H-norm above rho; the
    quartic-normalized levels I(t u)/t^4 over the last three scan points are
    recorded so the superquartic divergence can be eyeballed.  Raises
    NegativePointNotFoundError when the scan exhausts t_max.
    """
    if factor <= 1.0:
        raise ValueError(f"scan factor must exceed 1, got {factor}")
    op = op or EnergyOperator(spec, grid)
    d = u_dir.values
    if op.h_norm(d) == 0.0:
        raise ValueError("scan direction must be nonzero")
    ts, levels = [], []
    t = 1.0
    while t <= t_max * (1.0 + 1e-12):
        vals = t * d
        lev = op.value(vals)
        ts.append(t)
        levels.append(lev)
        if lev < 0.0 and op.h_norm(vals) > rho:
            ts_a, lv_a = np.array(ts), np.array(levels)
            tail = lv_a[-3:] / ts_a[-3:] ** 4
            # re-check the claim off the scan bookkeeping
            e_vals = t * d
            level = op.value(e_vals)
            norm = op.h_norm(e_vals)
            assert level < 0.0 and norm > rho
            return NegativePointResult(
                u=Field(e_vals, grid),
                t=t,
                level=level,
                norm=norm,
                scan_t=ts_a,
                scan_levels=lv_a,
                ratio_tail=tail,
                trend_decreasing=bool(np.all(np.diff(tail) < 0.0)),
            )
        t *= factor
    raise NegativePointNotFoundError(
        f"no scaling up to t_max={t_max} reached negative energy along the given direction "
        "(superquartic growth absent on this ray, or t_max too small)"
    )


def small_t_scan(
    spec: ProblemSpec,
    grid: RadialGrid,
    u_dir: Field,
    t_min: float = 1e-6,
    op: EnergyOperator | None = None,
) -> float | None:
    """Largest t in the dyadic scan 1, 1/2, 1/4, ... >= t_min with I(t u_dir) < 0.

    Absence is a valid outcome: the ball minimization then starts from a
    seeded small field and may legitimately end at the degenerate zero
    minimizer.
    """
    op = op or EnergyOperator(spec, grid)
    d = u_dir.values
    t = 1.0
    while t >= t_min:
        if op.value(t * d) < 0.0:
            return t
        t *= 0.5
    return None


def certify_geometry(
    spec: ProblemSpec,
    grid: RadialGrid,
    rho: float | None = None,
    sphere_samples: int = 256,
    t_max: float = 1e3,
    t_factor: float = 2.0,
    t_min: float = 1e-6,
    rho_min: float = 1e-2,
    rho_max: float = 32.0,
    seed: int = 0,
    constants: dict | None = None,
    op: EnergyOperator | None = None,
) -> GeometryReport:
    """Full geometry pipeline: pick rho, certify the sphere, find e and t_star.

    The rho scan and the final certificate share one direction set, so the
    certified sphere minimum is exactly the quantity the selection saw.
    """
    op = op or EnergyOperator(spec, grid)
    directions = sphere_directions(op, sphere_samples, seed)
    if rho is not None:
        rho_sel = "config"
        rho = float(rho)
    else:
        rho, rho_sel = select_rho(
            op,
            rho_min=rho_min,
            rho_max=rho_max,
            seed=seed,
            constants=constants,
            directions=directions,
        )
    sphere = estimate_sphere_min(
        spec, grid, rho, m=sphere_samples, seed=seed, constants=constants, op=op,
        directions=directions,
    )
    u_dir = default_direction(spec, grid, op)
    failure = None
    neg = None
    try:
        neg = find_negative_energy_point(
            spec, grid, u_dir, t_max=t_max, factor=t_factor, rho=rho, op=op
        )
    except NegativePointNotFoundError as exc:
        failure = str(exc)
    t_star = small_t_scan(spec, grid, u_dir, t_min=t_min, op=op)
    if sphere.eta <= 0.0:
        failure = f"sampled sphere minimum {sphere.eta:.6g} <= 0 at rho={rho:.6g}"
    return GeometryReport(
        rho=rho,
        eta=sphere.eta,
        rho_selection=rho_sel,
        sphere=sphere,
        negative_point=neg,
        t_star=t_star,
        seed=seed,
        ok=(sphere.eta > 0.0 and neg is not None),
        failure=failure,
        u_dir=u_dir,
    )
