"""Empirical verification of the structural hypotheses on V and f.

Every condition here is quantified over all of R^3 x R in the continuum; the
checkers test finite nested sample lattices and say so.  A "pass" verdict
always means "holds on the sampled set with the fitted constants", never a
proof; limits are replaced by finite divergence or decay trend tests with
stated thresholds.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .problems import Nonlinearity, Potential
from .util import nested_geometric, nested_linear, worker_count

_HEADROOM = 1.0 + 1e-9  # keeps fitted-constant margins from float-negative

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class ConditionReport:
    condition: str
    verdict: str                 # pass | fail | inconclusive
    margin: float                # worst sampled slack, signed
    fitted: dict
    samples: str
    counterexamples: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "verdict": self.verdict,
            "margin": self.margin,
            "fitted": self.fitted,
            "samples": self.samples,
            "counterexamples": self.counterexamples,
            "details": self.details,
        }


def default_u_grid(u_max: float = 50.0, level: int = 11, floor: float = 1e-3,
                   signs: str = "both") -> np.ndarray:
    """Nested sample lattice in u: linear plus log coverage of [floor, u_max].

    Doubling the level adds only midpoints, so failures persist when the
    density is increased.
    """
    lin = nested_linear(floor, u_max, level)
    geo = nested_geometric(floor, u_max, level)
    pos = np.unique(np.concatenate([lin, geo]))
    if signs == "positive":
        return pos
    if signs == "negative":
        return -pos
    return np.concatenate([-pos[::-1], pos])


def default_x_samples() -> np.ndarray:
    """Axis points used for the x-dependence of the conditions."""
    x1 = np.array([0.0, 0.5, 1.0, -1.0, np.pi / 2, -np.pi / 2, 2.5, -2.5, 4.0])
    out = np.zeros((x1.size, 3))
    out[:, 0] = x1
    return out


def _mesh_eval(fun, x_samples: np.ndarray, u_grid: np.ndarray) -> np.ndarray:
    """Evaluate fun(x, u) on the sample product, rows = x, cols = u."""
    xx = x_samples[:, None, :]
    uu = u_grid[None, :]
    return np.asarray(fun(xx, uu), dtype=float)


def _add_counterexamples(records: list, x_samples, u_grid, mask, quantities: dict, cap: int = 10):
    """Record up to cap witness points where mask is True."""
    idx = np.argwhere(mask)
    for i, j in idx[:cap]:
        rec = {"x": x_samples[i].tolist(), "u": float(u_grid[j])}
        for name, arr in quantities.items():
            rec[name] = float(arr[i, j])
        records.append(rec)


# ---------------------------------------------------------------------------
# (S1): |f(x,u)| <= c1 |u|^3 + c2 |u|^{q-1}, q in (4, 6)
# ---------------------------------------------------------------------------


def check_S1(
    nonlinearity: Nonlinearity,
    u_grid: np.ndarray | None = None,
    x_samples: np.ndarray | None = None,
    q_step: float = 0.05,
) -> ConditionReport:
    """Fit (c1, c2, q) and validate the cubic-plus-power bound on the sample.

    q comes from the log-log growth exponent of sup_x |f| over the top decade
    of |u|; the power constant is fitted on a window away from the sample
    edge so genuinely faster-than-|u|^5 growth shows up as a negative margin
    at the tail instead of being absorbed into the fit.
    """
    if u_grid is None:
        u_grid = default_u_grid()
    if x_samples is None:
        x_samples = default_x_samples()
    fa = np.abs(_mesh_eval(nonlinearity.f_xu, x_samples, u_grid))
    au = np.abs(u_grid)
    u_max = au.max()
    sup_f = fa.max(axis=0)

    top = (au >= u_max / 10.0) & (sup_f > 0)
    slope = float(np.polyfit(np.log(au[top]), np.log(sup_f[top]), 1)[0])
    q_raw = slope + 1.0
    saturated = False
    if q_raw <= 4.0 + q_step:
        q = 5.0  # cubic-dominated growth: any exponent in (4, 6) works
    elif q_raw < 6.0 - q_step:
        q = round(q_raw / q_step) * q_step
    else:
        q = 6.0 - q_step
        saturated = True

    window = (au >= u_max / 10.0) & (au <= u_max / 2.0)
    c2 = float((fa[:, window] / au[window] ** (q - 1.0)).max()) * _HEADROOM
    # the cubic constant is fitted away from the tail so that growth the
    # power term cannot carry shows up as a negative margin there
    body = (au > 0) & (au <= u_max / 2.0)
    excess = np.clip(fa[:, body] - c2 * au[body] ** (q - 1.0), 0.0, None)
    c1 = max(float((excess / au[body] ** 3).max()) * _HEADROOM, 1e-12)

    bound = c1 * au**3 + c2 * au ** (q - 1.0)
    slack = bound[None, :] - fa
    margin = float(slack.min())
    counterexamples = []
    _add_counterexamples(
        counterexamples, x_samples, u_grid, slack < 0,
        {"abs_f": fa, "bound": np.broadcast_to(bound, fa.shape)},
    )
    verdict = PASS if (margin >= 0 and not saturated) else FAIL
    return ConditionReport(
        condition="S1",
        verdict=verdict,
        margin=margin,
        fitted={"c1": c1, "c2": c2, "q": q, "growth_exponent": slope},
        samples=f"u in [{-u_max:g}, {u_max:g}] ({u_grid.size} pts, nested lin+log), "
        f"{x_samples.shape[0]} axis points",
        counterexamples=counterexamples,
        details={"saturated": saturated},
    )


# ---------------------------------------------------------------------------
# (S2): |F|/u^4 -> infinity and inf_x F >= c3 |u|^tau >= 0 for |u| >= r0
# ---------------------------------------------------------------------------


def check_S2(
    nonlinearity: Nonlinearity,
    r0: float = 1.0,
    u_grid: np.ndarray | None = None,
    x_samples: np.ndarray | None = None,
    divergence_factor: float = 10.0,
) -> ConditionReport:
    """Superquartic divergence plus the nonnegative tau-power floor.

    Sub-check (a) evaluates |F|/u^4 at |u| = 10, 100, 1000 (demanding growth
    by divergence_factor across the decades); sub-check (b) fits
    (c3, tau, r0), escalating r0 over a short grid because the floor often
    fails just above the nominal radius while holding slightly further out.
    """
    if u_grid is None:
        u_grid = default_u_grid(u_max=1e3)
    if x_samples is None:
        x_samples = default_x_samples()
    fm = _mesh_eval(nonlinearity.F_xu, x_samples, u_grid)
    au = np.abs(u_grid)

    # (a) divergence of |F|/u^4 over three decades
    signs = [1.0] if u_grid.min() >= 0 else [1.0, -1.0]
    probes = np.array([s * m for m in (10.0, 100.0, 1000.0) for s in signs])
    ratios_all = np.abs(_mesh_eval(nonlinearity.F_xu, x_samples, probes)) / probes**4
    ratios = ratios_all.min(axis=0).reshape(3, len(signs)).min(axis=1)
    diverging = bool(np.all(np.diff(ratios) > 0) and ratios[-1] >= divergence_factor * ratios[0])

    # (b) fit the floor inf_x F >= c3 |u|^tau on |u| >= r0, escalating r0
    counterexamples = []
    g_inf = fm.min(axis=0)
    fitted_r0, c3, tau, floor_margin = None, None, None, None
    for factor in (1.0, 1.25, 1.5, 2.0, 3.0, 4.0):
        cand = r0 * factor
        mask = au >= cand
        if not mask.any():
            continue
        if g_inf[mask].min() >= 0.0:
            fitted_r0 = cand
            taus = np.arange(0.1, 2.0, 0.1)
            with np.errstate(divide="ignore"):
                ratios_tau = [
                    (np.min(g_inf[mask] / au[mask] ** t), t) for t in taus
                ]
            c3_raw, tau = max(ratios_tau)
            c3 = max(c3_raw, 0.0) / _HEADROOM
            floor_margin = float(np.min(g_inf[mask] - c3 * au[mask] ** tau))
            break
    floor_ok = fitted_r0 is not None
    if not floor_ok:
        mask = au >= r0
        bad = (fm < 0) & (au >= r0)[None, :]
        _add_counterexamples(counterexamples, x_samples, u_grid, bad, {"F": fm})
        floor_margin = float(g_inf[mask].min()) if mask.any() else np.nan

    verdict = PASS if (diverging and floor_ok) else FAIL
    return ConditionReport(
        condition="S2",
        verdict=verdict,
        margin=float(floor_margin),
        fitted={"c3": c3, "tau": tau, "r0": fitted_r0},
        samples=f"|u| up to {au.max():g} ({u_grid.size} pts), "
        f"{x_samples.shape[0]} axis points; divergence probes 10/100/1000",
        counterexamples=counterexamples,
        details={
            "divergence_ratios": ratios.tolist(),
            "diverging": diverging,
            "floor_ok": floor_ok,
        },
    )


# ---------------------------------------------------------------------------
# (S3): script-F = u f/4 - F >= 0 and |F|^kappa <= c4 |u|^{2 kappa} script-F
# ---------------------------------------------------------------------------


def check_S3(
    nonlinearity: Nonlinearity,
    r0: float = 1.0,
    u_grid: np.ndarray | None = None,
    x_samples: np.ndarray | None = None,
    kappa_grid: tuple = (1.1, 1.25, 1.5, 2.0, 3.0),
) -> ConditionReport:
    """Nonnegative quarter-identity remainder plus the kappa growth link.

    Points where the remainder vanishes while F does not make the second
    inequality unattainable for any kappa; with the remainder nonnegative
    everywhere, that situation is reported as inconclusive rather than fail
    (the bound degenerates to 0 <= 0 only if F vanishes too).
    """
    if u_grid is None:
        u_grid = default_u_grid(u_max=1e3)
    if x_samples is None:
        x_samples = default_x_samples()
    fm = _mesh_eval(nonlinearity.F_xu, x_samples, u_grid)
    fv = _mesh_eval(nonlinearity.f_xu, x_samples, u_grid)
    script = 0.25 * u_grid[None, :] * fv - fm
    au = np.abs(u_grid)
    # pointwise scales: the remainder is a difference of two like-sized terms
    scale = 1.0 + np.abs(fm) + np.abs(0.25 * u_grid[None, :] * fv)
    tiny = 1e-12 * scale

    margin_a = float(script.min())
    pass_a = bool(np.all(script >= -tiny))
    counterexamples = []
    if not pass_a:
        _add_counterexamples(
            counterexamples, x_samples, u_grid, script < -tiny, {"scriptF": script, "F": fm}
        )

    mask = (au >= r0)[None, :] & np.ones_like(script, dtype=bool)
    degenerate = mask & (script <= tiny) & (np.abs(fm) > 1e3 * tiny)
    usable = mask & (script > tiny)
    c4, kappa, margin_b = None, None, None
    kappa_unattainable = bool(degenerate.any())
    if kappa_unattainable:
        _add_counterexamples(
            counterexamples, x_samples, u_grid, degenerate, {"scriptF": script, "F": fm}
        )
    elif usable.any():
        best = None
        for kap in kappa_grid:
            with np.errstate(over="ignore"):
                ratio = np.abs(fm[usable]) ** kap / (
                    (au[None, :] ** (2.0 * kap) * script)[usable]
                )
            c4_k = float(np.max(ratio))
            if np.isfinite(c4_k) and (best is None or c4_k < best[0]):
                best = (c4_k, kap)
        if best is not None:
            c4 = best[0] * _HEADROOM
            kappa = best[1]
            lhs = np.abs(fm[usable]) ** kappa
            rhs = c4 * (au[None, :] ** (2.0 * kappa) * script)[usable]
            margin_b = float(np.min(rhs - lhs))
    pass_b = margin_b is not None and margin_b >= 0

    if pass_a and pass_b:
        verdict = PASS
    elif pass_a and kappa_unattainable:
        verdict = INCONCLUSIVE
    else:
        verdict = FAIL
    margin = margin_a if not pass_a else (margin_b if margin_b is not None else 0.0)
    return ConditionReport(
        condition="S3",
        verdict=verdict,
        margin=float(margin),
        fitted={"c4": c4, "kappa": kappa, "r0": r0},
        samples=f"|u| up to {au.max():g} ({u_grid.size} pts), {x_samples.shape[0]} axis points",
        counterexamples=counterexamples,
        details={
            "remainder_min": margin_a,
            "sub_a": PASS if pass_a else FAIL,
            "sub_b": PASS if pass_b else ("unattainable" if kappa_unattainable else FAIL),
        },
    )


# ---------------------------------------------------------------------------
# (AR): 0 < mu F(x,u) <= u f(x,u) for u != 0, some mu > 4
# ---------------------------------------------------------------------------


def check_AR(
    nonlinearity: Nonlinearity,
    mu_grid: tuple = (4.25, 4.5, 5.0, 6.0, 8.0),
    u_grid: np.ndarray | None = None,
    x_samples: np.ndarray | None = None,
) -> ConditionReport:
    """Superquartic Ambrosetti-Rabinowitz inequality on the sampled set."""
    if u_grid is None:
        u_grid = default_u_grid()
    if x_samples is None:
        x_samples = default_x_samples()
    u_grid = u_grid[u_grid != 0.0]
    fm = _mesh_eval(nonlinearity.F_xu, x_samples, u_grid)
    fv = _mesh_eval(nonlinearity.f_xu, x_samples, u_grid)
    uf = u_grid[None, :] * fv

    best = None
    for mu in mu_grid:
        m1 = float((mu * fm).min())         # strict positivity of mu F
        m2 = float((uf - mu * fm).min())    # mu F <= u f
        margin = min(m1, m2)
        if best is None or margin > best[0]:
            best = (margin, mu, m1, m2)
    margin, mu, m1, m2 = best
    passed = m1 > 0.0 and m2 >= 0.0
    counterexamples = []
    if not passed:
        viol = (mu * fm <= 0.0) | (uf - mu * fm < 0.0)
        _add_counterexamples(counterexamples, x_samples, u_grid, viol, {"F": fm, "uf": uf})
    return ConditionReport(
        condition="AR",
        verdict=PASS if passed else FAIL,
        margin=margin,
        fitted={"mu": mu},
        samples=f"u in [{u_grid.min():g}, {u_grid.max():g}] ({u_grid.size} pts), "
        f"{x_samples.shape[0]} axis points; mu grid {list(mu_grid)}",
        counterexamples=counterexamples,
        details={"positivity_min": m1, "inequality_min": m2},
    )


# ---------------------------------------------------------------------------
# (V1): sublevel sets of V near far-away centers have vanishing measure
# ---------------------------------------------------------------------------


def _sublevel_measure(potential: Potential, center: np.ndarray, d0: float,
                      m_lev: float, mc_samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo measure of {x : |x - center| <= d0, V(x) <= M} and its band."""
    vol = 4.0 / 3.0 * np.pi * d0**3
    chunks = 16
    sizes = [mc_samples // chunks] * chunks
    sizes[-1] += mc_samples - sum(sizes)

    def run(idx: int) -> int:
        rng = np.random.default_rng([seed, idx])
        n_pts = sizes[idx]
        dirs = rng.normal(size=(n_pts, 3))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        radii = d0 * rng.random(n_pts) ** (1.0 / 3.0)
        pts = center[None, :] + radii[:, None] * dirs
        return int(np.count_nonzero(potential.at_points(pts) <= m_lev))

    workers = min(worker_count(), chunks)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run, range(chunks)))
    else:
        hits = sum(run(i) for i in range(chunks))
    p = hits / mc_samples
    band = 3.0 * np.sqrt(p * (1.0 - p) / mc_samples) * vol
    return p * vol, band


def check_V1(
    potential: Potential,
    d0: float = 1.0,
    M_list: tuple = (2.0,),
    y_radii: tuple = (5.0, 10.0, 20.0),
    mc_samples: int = 200_000,
    seed: int = 0,
) -> ConditionReport:
    """Decay trend of sublevel-set measures around receding centers.

    For each threshold M the Monte-Carlo measures over the three largest
    center radii must decrease with confidence (non-overlapping three-sigma
    bands); empty sublevel sets pass outright, confidently non-decreasing
    measures fail, overlapping bands are inconclusive.
    """
    if d0 <= 0:
        raise ValueError(f"d0 must be positive, got {d0}")
    y_sorted = sorted(y_radii)
    if len(y_sorted) < 3:
        raise ValueError("need at least three center radii for the trend test")
    table = {}
    worst = np.inf
    verdicts = []
    counterexamples = []
    for m_lev in M_list:
        rows = []
        for y in y_sorted:
            center = np.array([y, 0.0, 0.0])
            meas, band = _sublevel_measure(potential, center, d0, m_lev, mc_samples, seed)
            rows.append({"y": y, "measure": meas, "band": band})
        table[f"M={m_lev:g}"] = rows
        last = rows[-3:]
        lo = [r["measure"] - r["band"] for r in last]
        hi = [r["measure"] + r["band"] for r in last]
        if all(r["measure"] == 0.0 for r in last):
            verdicts.append(PASS)
            worst = min(worst, 0.0)
            continue
        gaps = [lo[0] - hi[1], lo[1] - hi[2]]
        worst = min(worst, *gaps)
        if all(g > 0 for g in gaps):
            verdicts.append(PASS)
        elif lo[1] >= hi[0] or lo[2] >= hi[1]:
            verdicts.append(FAIL)
            for r in last:
                counterexamples.append({"M": m_lev, **r})
        else:
            verdicts.append(INCONCLUSIVE)
    if FAIL in verdicts:
        verdict = FAIL
    elif INCONCLUSIVE in verdicts:
        verdict = INCONCLUSIVE
    else:
        verdict = PASS
    return ConditionReport(
        condition="V1",
        verdict=verdict,
        margin=float(worst),
        fitted={"d0": d0, "M_list": list(M_list)},
        samples=f"{mc_samples} Monte-Carlo points per (M, y), centers |y| in {y_sorted}, seed {seed}",
        counterexamples=counterexamples[:10],
        details={"measures": table},
    )


CHECKS = {"S1": check_S1, "S2": check_S2, "S3": check_S3, "AR": check_AR, "V1": check_V1}
