"""The two critical-point solvers: constrained descent and path deformation.

Both run on an abstract landscape (value, Riesz gradient, inner product), so
the same line-search and deformation cores drive the discretized functional
and low-dimensional surrogates alike.  The ball solver realizes the
negative-level local minimizer as projected gradient descent with Armijo
backtracking; the saddle solver deforms a discrete path between the origin
and a negative-energy anchor, always descending the current path maximum.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import LinearOperator, minres

from .energy import EnergyOperator
from .errors import ConfigurationError, PathCollapseError
from .geometry import GeometryReport
from .grid import Field, RadialGrid
from .problems import ProblemSpec

_STEP_GROWTH = 2.0
_STEP_CAP = 1e6


@dataclass
class SolverConfig:
    tol_residual: float = 1e-6
    tol_cerami: float = 1e-5
    max_iters: int = 10_000
    armijo_slope: float = 1e-4
    armijo_shrink: float = 0.5
    path_points: int = 41
    deform_step: float = 0.1
    distinct_delta: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name in ("tol_residual", "tol_cerami", "armijo_slope", "deform_step", "distinct_delta"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if not 0 < self.armijo_shrink < 1:
            raise ConfigurationError("armijo_shrink must lie in (0, 1)")
        if self.path_points < 5 or self.path_points % 2 == 0:
            raise ConfigurationError("path_points must be odd and at least 5")


@dataclass
class CriticalPoint:
    u: Field
    level: float
    residual: float
    cerami: float
    iters: int
    kind: str                      # "local-min" | "mountain-pass"
    converged: bool
    norm: float
    degenerate: bool = False       # ball solver found nothing below level 0
    boundary: bool = False         # stationarity measured tangentially on the sphere
    trace: np.ndarray = field(default=None, repr=False)   # columns: iter, level, residual, cerami
    path_levels: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "residual": self.residual,
            "cerami": self.cerami,
            "iters": self.iters,
            "kind": self.kind,
            "converged": self.converged,
            "norm": self.norm,
            "degenerate": self.degenerate,
            "boundary": self.boundary,
        }


@dataclass
class DistinctnessReport:
    passed: bool
    reason: str | None
    level_min: float
    level_pass: float
    h_distance: float
    delta: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "reason": self.reason,
            "level_min": self.level_min,
            "level_pass": self.level_pass,
            "h_distance": self.h_distance,
            "delta": self.delta,
        }


class Landscape:
    """Minimal objective interface shared by the PDE functional and surrogates."""

    def __init__(self, value, grad, inner):
        self.value = value          # x -> float
        self.grad = grad            # x -> (riesz direction, dual norm)
        self.inner = inner          # (x, y) -> float

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.inner(x, x), 0.0)))


def pde_landscape(op: EnergyOperator) -> Landscape:
    return Landscape(
        value=op.value,
        grad=lambda x: op.gradient(x)[:2],
        inner=op.h_inner,
    )


# ---------------------------------------------------------------------------
# constrained descent (the negative-level minimizer)
# ---------------------------------------------------------------------------


def descend_in_ball(ls: Landscape, x0: np.ndarray, rho: float, cfg: SolverConfig) -> dict:
    """Projected gradient descent inside the closed H-ball of radius rho.

    Stationarity is the dual norm in the interior; on the sphere, when the
    unconstrained descent direction points outward, it is the norm of the
    gradient component tangent to the sphere.  Armijo backtracking on the
    projected step keeps the level trace nonincreasing.
    """
    x = np.array(x0, dtype=float)
    nx = ls.norm(x)
    if nx > rho:
        x *= rho / nx
    level = ls.value(x)
    alpha = 1.0
    trace = []
    converged = False
    boundary = False
    it = 0
    for it in range(cfg.max_iters):
        g, dual = ls.grad(x)
        nx = ls.norm(x)
        boundary = False
        stat = dual
        if nx >= rho * (1.0 - 1e-10):
            gr = ls.inner(g, x)
            if gr < 0.0:  # -g points outward: blocked by the constraint
                boundary = True
                stat = float(np.sqrt(max(dual**2 - gr**2 / nx**2, 0.0)))
        cerami = (1.0 + nx) * dual
        trace.append((it, level, stat, cerami))
        if stat <= cfg.tol_residual:
            converged = True
            break
        a = alpha
        accepted = False
        while a > 1e-18:
            xt = x - a * g
            nt = ls.norm(xt)
            if nt > rho:
                xt = xt * (rho / nt)
            lt = ls.value(xt)
            dec = ls.inner(g, x - xt)
            if lt <= level - cfg.armijo_slope * dec and lt <= level:
                accepted = True
                break
            a *= cfg.armijo_shrink
        if not accepted:
            break  # line search exhausted: stalled below float resolution
        if lt > level + 1e-12 * (1.0 + abs(level)):
            raise RuntimeError("descent produced an energy increase; Armijo bookkeeping broken")
        x, level = xt, lt
        alpha = min(a * _STEP_GROWTH, _STEP_CAP)
    return {
        "x": x,
        "level": level,
        "iters": it + 1,
        "converged": converged,
        "boundary": boundary,
        "trace": np.array(trace),
    }


def seeded_start(grid: RadialGrid, op: EnergyOperator, rho: float, seed: int) -> np.ndarray:
    """Small smooth random field (sum of three seeded bumps) with norm rho/2."""
    rng = np.random.default_rng(seed)
    vals = np.zeros(grid.n)
    for _ in range(3):
        c = rng.uniform(0.0, 0.6 * grid.R)
        wdt = np.exp(rng.uniform(np.log(grid.R / 32.0), np.log(grid.R / 4.0)))
        vals += rng.normal() * np.exp(-0.5 * ((grid.nodes - c) / wdt) ** 2)
    return vals * (0.5 * rho / op.h_norm(vals))


def minimize_in_ball(
    spec: ProblemSpec,
    grid: RadialGrid,
    rho: float,
    config: SolverConfig,
    start: Field | None = None,
    op: EnergyOperator | None = None,
) -> CriticalPoint:
    """Negative-level constrained minimizer on the closed H-ball of radius rho.

    Starts from the supplied field (typically t_star times the scan
    direction) or a seeded small random field; returns the degenerate zero
    point when nothing below level zero was found.
    """
    op = op or EnergyOperator(spec, grid)
    ls = pde_landscape(op)
    x0 = start.values if start is not None else seeded_start(grid, op, rho, config.seed)
    out = descend_in_ball(ls, x0, rho, config)
    if out["level"] >= 0.0:
        zero = np.zeros(grid.n)
        _, dual, cer = op.gradient(zero)
        return CriticalPoint(
            u=Field(zero, grid),
            level=0.0,
            residual=dual,
            cerami=cer,
            iters=out["iters"],
            kind="local-min",
            converged=dual <= config.tol_residual,
            norm=0.0,
            degenerate=True,
            trace=out["trace"],
        )
    x = out["x"]
    level = op.value(x)  # recomputed from scratch, not trusted from the loop
    _, dual, cer = op.gradient(x)
    return CriticalPoint(
        u=Field(x, grid),
        level=level,
        residual=out["trace"][-1, 2] if out["converged"] else dual,
        cerami=cer,
        iters=out["iters"],
        kind="local-min",
        converged=out["converged"],
        norm=op.h_norm(x),
        boundary=out["boundary"],
        trace=out["trace"],
    )


# ---------------------------------------------------------------------------
# path deformation (the saddle point)
# ---------------------------------------------------------------------------


def _reparametrize(ls: Landscape, pts: list, levels: np.ndarray, dists: np.ndarray) -> None:
    """Respace all interior vertices uniformly in arclength along the polyline."""
    n_pts = len(pts)
    cum = np.concatenate(([0.0], np.cumsum(dists)))
    total = cum[-1]
    if total <= 0:
        return
    old = [p.copy() for p in pts]
    targets = np.linspace(0.0, total, n_pts)
    seg = 0
    for j in range(1, n_pts - 1):
        while seg < n_pts - 2 and cum[seg + 1] < targets[j]:
            seg += 1
        width = cum[seg + 1] - cum[seg]
        frac = 0.0 if width <= 0 else (targets[j] - cum[seg]) / width
        pts[j] = old[seg] + frac * (old[seg + 1] - old[seg])
        levels[j] = ls.value(pts[j])
    for i in range(n_pts - 1):
        dists[i] = ls.norm(pts[i + 1] - pts[i])


def deform_path(
    ls: Landscape,
    e: np.ndarray,
    cfg: SolverConfig,
    eta_floor: float | None = None,
) -> dict:
    """Deform the segment 0 -> e until its maximum is a critical point.

    Endpoints never move.  Each iteration slides the crest vertex onto the
    maximum of the interpolated path (line search over its two segments) and
    checks the residual there, then relaxes every interior vertex by one
    Armijo step along the component of its Riesz gradient perpendicular to
    the local path tangent, and finally re-spaces the polyline uniformly in
    H-arclength.  Tangential motion is excluded from the descent so vertices
    cannot slide off the ridge and tear the path; the re-spacing keeps the
    crest resolved.
    """
    n_pts = cfg.path_points
    ts = np.linspace(0.0, 1.0, n_pts)
    pts = [t * np.asarray(e, dtype=float) for t in ts]
    levels = np.array([ls.value(p) for p in pts])
    dists = np.array([ls.norm(pts[i + 1] - pts[i]) for i in range(n_pts - 1)])
    alpha = cfg.deform_step
    trace = []
    converged = False
    stall_count = 0
    it = 0
    k = int(np.argmax(levels))
    for it in range(cfg.max_iters):
        if it and it % 10 == 0:
            _reparametrize(ls, pts, levels, dists)
        # Locate the maximum of the interpolated path.  Probing every segment
        # midpoint is what makes the detector reliable: the crossing of the
        # ridge can hide inside a segment both of whose vertices sit low, and
        # chasing the highest vertex alone lets the path leak past the saddle.
        mids = np.array(
            [ls.value(0.5 * (pts[i] + pts[i + 1])) for i in range(n_pts - 1)]
        )
        seg_scores = np.maximum(np.maximum(levels[:-1], levels[1:]), mids)
        seg0 = int(np.argmax(seg_scores))
        seg, s_star, crest_level = seg0, 0.5, -np.inf
        for cand in (seg0 - 1, seg0, seg0 + 1):  # shared vertices tie the scores
            if not 0 <= cand <= n_pts - 2:
                continue
            chord = pts[cand + 1] - pts[cand]
            res = minimize_scalar(
                lambda s, c=cand, ch=chord: -ls.value(pts[c] + s * ch),
                bounds=(0.0, 1.0),
                method="bounded",
                options={"xatol": 1e-10},
            )
            if -res.fun > crest_level:
                seg, s_star, crest_level = cand, float(res.x), float(-res.fun)
        crest = pts[seg] + s_star * (pts[seg + 1] - pts[seg])
        if crest_level <= max(levels[0], levels[-1]) + 1e-15:
            raise PathCollapseError(
                "path maximum sits at a fixed endpoint; the interior sank below both anchors"
            )
        if eta_floor is not None and crest_level < eta_floor:
            raise PathCollapseError(
                f"path maximum {crest_level:.6g} fell below the certified floor {eta_floor:.6g}"
            )
        # adopt the crest as a vertex (never the anchors)
        k = seg if s_star < 0.5 else seg + 1
        k = min(max(k, 1), n_pts - 2)
        pts[k], levels[k] = crest, crest_level
        for i in (k - 1, k):
            dists[i] = ls.norm(pts[i + 1] - pts[i])
        g, dual = ls.grad(pts[k])
        cerami = (1.0 + ls.norm(pts[k])) * dual
        trace.append((it, levels[k], dual, cerami))
        if dual <= cfg.tol_residual:
            converged = True
            break
        # Descend the crest perpendicular to the path until it is dethroned;
        # tangential motion is excluded so the vertex cannot slide off the
        # ridge, and the step stays capped by the local spacing.
        progressed = False
        for _ in range(8):
            tau = pts[k + 1] - pts[k - 1]
            tau_norm = ls.norm(tau)
            if tau_norm <= 1e-14 * (1.0 + ls.norm(pts[k])):
                break  # folded neighbors: no perpendicular direction defined
            tau = tau / tau_norm
            gperp = g - ls.inner(g, tau) * tau
            pn = ls.norm(gperp)
            if pn <= 0.1 * cfg.tol_residual:
                break
            cap = min(dists[k - 1], dists[k])
            a = min(alpha, cap / pn)
            accepted = False
            while a > 1e-18:
                xt = pts[k] - a * gperp
                lt = ls.value(xt)
                if lt <= levels[k] - cfg.armijo_slope * a * pn * pn:
                    accepted = True
                    break
                a *= cfg.armijo_shrink
            if not accepted:
                break
            progressed = True
            pts[k], levels[k] = xt, lt
            alpha = min(a * _STEP_GROWTH, _STEP_CAP)
            for i in (k - 1, k):
                dists[i] = ls.norm(pts[i + 1] - pts[i])
            if levels[k] < levels.max():
                break
            g, dual = ls.grad(pts[k])
            if dual <= cfg.tol_residual:
                break
        # keep the neighbors trailing the moved crest
        for j in (k - 1, k + 1):
            if 0 < j < n_pts - 1:
                pts[j] = 0.5 * (pts[j - 1] + pts[j + 1])
                levels[j] = ls.value(pts[j])
                for i in (j - 1, j):
                    dists[i] = ls.norm(pts[i + 1] - pts[i])
        if progressed:
            stall_count = 0
        else:
            stall_count += 1
            if stall_count >= 25:
                break  # crest cannot be lowered further at float resolution
    return {
        "x": pts[k],
        "level": levels[k],
        "iters": it + 1,
        "converged": converged,
        "trace": np.array(trace),
        "path_levels": levels.copy(),
        "path_dists": dists.copy(),
    }


def _newton_polish(
    op: EnergyOperator,
    x0: np.ndarray,
    cfg: SolverConfig,
    trust_radius: float,
    max_outer: int = 60,
) -> tuple[np.ndarray, float, bool, int]:
    """Drive the assembled derivative to zero from a near-critical start.

    One Newton system per step, solved matrix-free with MINRES on
    finite-difference directional derivatives of the assembled gradient and
    the factored H matrix as the (SPD) preconditioner; steps are trust-region
    capped and accepted only when the dual-norm residual shrinks.  Used to
    finish the saddle after the path deformation has located it: plain crest
    descent crawls once the residual is small.
    """
    x = np.array(x0, dtype=float)
    n = x.size
    best_x, best_dual = x.copy(), np.inf
    it = 0
    for it in range(max_outer):
        rhs = op.grad_vec(x)
        gr = op.riesz(rhs)
        dual = float(np.sqrt(max(gr @ rhs, 0.0)))
        if dual < best_dual:
            best_x, best_dual = x.copy(), dual
        if dual <= cfg.tol_residual:
            return x, dual, True, it
        fd = 1e-7 * (1.0 + float(np.linalg.norm(x)))

        def hess_vec(v):
            vn = float(np.linalg.norm(v))
            if vn == 0.0:
                return np.zeros_like(v)
            s = fd / vn
            return (op.grad_vec(x + s * v) - op.grad_vec(x - s * v)) / (2.0 * s)

        a_op = LinearOperator((n, n), matvec=hess_vec)
        m_op = LinearOperator((n, n), matvec=op.riesz)
        try:
            delta, _ = minres(a_op, -rhs, M=m_op, rtol=1e-10, maxiter=4 * n)
        except TypeError:  # older scipy spells the tolerance differently
            delta, _ = minres(a_op, -rhs, M=m_op, tol=1e-10, maxiter=4 * n)
        nd = op.h_norm(delta)
        if not np.all(np.isfinite(delta)) or nd == 0.0:
            break
        if nd > trust_radius:
            delta = delta * (trust_radius / nd)
        scale = 1.0
        accepted = False
        for _ in range(12):
            xt = x + scale * delta
            rt = op.grad_vec(xt)
            dt = float(np.sqrt(max(op.riesz(rt) @ rt, 0.0)))
            if dt < dual:
                x = xt
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            break
    return best_x, best_dual, False, it + 1


def mountain_pass(
    spec: ProblemSpec,
    grid: RadialGrid,
    e: Field,
    config: SolverConfig,
    eta: float | None = None,
    op: EnergyOperator | None = None,
) -> CriticalPoint:
    """Saddle point between the origin and the negative-energy anchor e.

    Path deformation localizes the saddle; when the deformation alone has
    not reached the residual tolerance, a trust-region Newton polish
    finishes from the crest, and is accepted only if it stays near the
    crest without dropping below the certified level floor.
    """
    op = op or EnergyOperator(spec, grid)
    if op.value(e.values) >= 0.0:
        raise ConfigurationError("mountain-pass anchor must have negative energy")
    ls = pde_landscape(op)
    eta_floor = None if eta is None else 0.5 * eta
    path_cfg = replace(config, max_iters=min(config.max_iters, 500))
    out = deform_path(ls, e.values, path_cfg, eta_floor=eta_floor)
    x = out["x"]
    iters = out["iters"]
    converged = out["converged"]
    if not converged:
        spacing = op.h_norm(e.values) / (config.path_points - 1)
        px, pdual, pok, pit = _newton_polish(op, x, config, trust_radius=2.0 * spacing)
        iters += pit
        plevel = op.value(px)
        drift = op.h_norm(px - x)
        floor = eta_floor if eta_floor is not None else 0.0
        if pok and plevel > floor and drift <= 0.25 * op.h_norm(e.values) + 10.0 * spacing:
            x = px
            converged = True
    level = op.value(x)
    _, dual, cer = op.gradient(x)
    return CriticalPoint(
        u=Field(x, grid),
        level=level,
        residual=dual,
        cerami=cer,
        iters=iters,
        kind="mountain-pass",
        converged=converged,
        norm=op.h_norm(x),
        trace=out["trace"],
        path_levels=out["path_levels"],
    )


def verify_distinct(
    spec: ProblemSpec,
    grid: RadialGrid,
    cp_min: CriticalPoint,
    cp_pass: CriticalPoint,
    config: SolverConfig,
    op: EnergyOperator | None = None,
) -> DistinctnessReport:
    """Two-solution check: negative level, positive level, H-separation."""
    op = op or EnergyOperator(spec, grid)
    dist = op.h_norm(cp_min.u.values - cp_pass.u.values)
    reason = None
    if cp_min.degenerate or not cp_min.level < 0.0:
        reason = "step-1 level not negative"
    elif not cp_pass.level > 0.0:
        reason = "step-2 level not positive"
    elif dist < config.distinct_delta:
        reason = f"H-distance {dist:.6g} below delta {config.distinct_delta:.6g}"
    return DistinctnessReport(
        passed=reason is None,
        reason=reason,
        level_min=cp_min.level,
        level_pass=cp_pass.level,
        h_distance=dist,
        delta=config.distinct_delta,
    )
