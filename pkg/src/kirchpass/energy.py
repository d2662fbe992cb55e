"""Energy functional assembly on a radial grid.

The functional is

    I(u) = 1/2 int(|grad u|^2 + Vt u^2) + (b/4) (int |grad u|^2)^2 - int Ft(., u)

with Vt the shifted potential and Ft the shifted primitive.  The derivative
in direction v assembles as

    (1 + b int|grad u|^2) int grad u . grad v + int Vt u v - int ft(., u) v,

and the dual-norm residual is computed exactly in the discrete space via the
Riesz representative: one symmetric positive-definite solve with the
H-inner-product matrix, which is factored once per (grid, potential).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import LinearSolveError, ShiftViolationError, UnshiftedSpecError
from .grid import Field, RadialGrid
from .problems import ProblemSpec


@dataclass
class EnergyBreakdown:
    dirichlet: float   # 1/2 int |grad u|^2
    potential: float   # 1/2 int Vt u^2
    kirchhoff: float   # (b/4) (int |grad u|^2)^2
    nonlinear: float   # int Ft(., u)
    total: float       # dirichlet + potential + kirchhoff - nonlinear

    def to_dict(self) -> dict:
        return {
            "dirichlet": self.dirichlet,
            "potential": self.potential,
            "kirchhoff": self.kirchhoff,
            "nonlinear": self.nonlinear,
            "total": self.total,
        }


@dataclass
class GradientReport:
    riesz: Field        # H-representative g with (g, v)_H = <I'(u), v> for all v
    dual_norm: float    # ||I'(u)||_{H*} = ||g||_H
    cerami: float       # (1 + ||u||_H) * dual_norm

    def to_dict(self) -> dict:
        return {"dual_norm": self.dual_norm, "cerami": self.cerami}


class EnergyOperator:
    """Assembled discrete functional for one (shifted spec, grid) pair.

    Works on raw coefficient vectors; the public module functions wrap it in
    the Field-based interface.  Evaluation is pure, the factored H matrix is
    immutable shared state, so concurrent use is safe.
    """

    def __init__(self, spec: ProblemSpec, grid: RadialGrid, require_shifted: bool = True):
        if require_shifted and not spec.shifted:
            raise UnshiftedSpecError("energy assembly requires a shifted problem; call shift_problem first")
        self.spec = spec
        self.grid = grid
        self.w = grid.quad_weights
        self.Dg = grid.grad_matrix
        self.wg = grid.grad_weights
        self.K = grid.stiffness()
        self.vt = np.asarray(spec.potential.radial(grid.nodes), dtype=float)
        if require_shifted and self.vt.min() < 1.0 - 1e-12:
            raise ShiftViolationError(
                f"shifted potential dips to {self.vt.min():.6g} < 1 on the grid"
            )
        self.b = spec.b
        self.H = self.K + np.diag(self.w * self.vt)
        self._chol = None  # factored on first Riesz solve

    # -- inner-product machinery ------------------------------------------

    def h_inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ (self.H @ v))

    def h_norm(self, u: np.ndarray) -> float:
        return float(np.sqrt(max(self.h_inner(u, u), 0.0)))

    def riesz(self, rhs: np.ndarray) -> np.ndarray:
        if self._chol is None:
            try:
                self._chol = scipy.linalg.cho_factor(self.H, lower=True)
            except scipy.linalg.LinAlgError as exc:
                raise LinearSolveError(f"H matrix factorization failed: {exc}") from exc
        return scipy.linalg.cho_solve(self._chol, rhs)

    # -- functional values -------------------------------------------------

    def dirichlet_energy(self, u: np.ndarray) -> float:
        du = self.Dg @ u
        return float(self.wg @ du**2)

    def breakdown(self, u: np.ndarray) -> EnergyBreakdown:
        a = self.dirichlet_energy(u)
        pot = 0.5 * float(self.w @ (self.vt * u**2))
        non = float(self.w @ self.spec.nonlinearity.F_radial(self.grid.nodes, u))
        kir = 0.25 * self.b * a * a
        dir_half = 0.5 * a
        return EnergyBreakdown(
            dirichlet=dir_half,
            potential=pot,
            kirchhoff=kir,
            nonlinear=non,
            total=dir_half + pot + kir - non,
        )

    def value(self, u: np.ndarray) -> float:
        return self.breakdown(u).total

    def grad_vec(self, u: np.ndarray) -> np.ndarray:
        """Assembled directional derivatives against every nodal basis direction."""
        a = self.dirichlet_energy(u)
        fu = self.spec.nonlinearity.f_radial(self.grid.nodes, u)
        return (1.0 + self.b * a) * (self.K @ u) + self.w * (self.vt * u - fu)

    def gradient(self, u: np.ndarray) -> tuple[np.ndarray, float, float]:
        """Riesz representative, dual norm, and the Cerami diagnostic."""
        rhs = self.grad_vec(u)
        g = self.riesz(rhs)
        dual = float(np.sqrt(max(g @ rhs, 0.0)))
        return g, dual, (1.0 + self.h_norm(u)) * dual


def energy(spec: ProblemSpec, grid: RadialGrid, u: Field) -> EnergyBreakdown:
    """Energy breakdown of a field under a shifted problem."""
    op = EnergyOperator(spec, grid)
    return op.breakdown(_values(grid, u))


def energy_raw(spec: ProblemSpec, grid: RadialGrid, u: Field) -> EnergyBreakdown:
    """Energy breakdown without the shift precondition (diagnostics only).

    Used to confirm that shifting leaves the functional unchanged; the
    potential term may be negative here.
    """
    op = EnergyOperator(spec, grid, require_shifted=False)
    return op.breakdown(_values(grid, u))


def gradient(spec: ProblemSpec, grid: RadialGrid, u: Field) -> GradientReport:
    """Riesz-represented derivative of the energy at u."""
    op = EnergyOperator(spec, grid)
    g, dual, cerami = op.gradient(_values(grid, u))
    return GradientReport(riesz=Field(g, grid), dual_norm=dual, cerami=cerami)


def gradient_raw(spec: ProblemSpec, grid: RadialGrid, u: Field) -> np.ndarray:
    """Assembled derivative vector without the shift precondition (diagnostics)."""
    op = EnergyOperator(spec, grid, require_shifted=False)
    return op.grad_vec(_values(grid, u))


def directional_derivative(spec: ProblemSpec, grid: RadialGrid, u: Field, v: Field) -> float:
    """<I'(u), v> assembled directly from the weak form."""
    op = EnergyOperator(spec, grid)
    return float(op.grad_vec(_values(grid, u)) @ _values(grid, v))


def growth_bound_check(
    spec: ProblemSpec,
    u_range: np.ndarray,
    c1: float,
    c2: float,
    q: float,
    radii: np.ndarray | None = None,
) -> float:
    """Worst slack of (c1/4)|u|^4 + (c2/q)|u|^q - |Ft(x, u)| over the sample.

    Nonnegative means the quartic/q growth bound on the primitive holds on
    the sampled set with the fitted constants.
    """
    u = np.asarray(u_range, dtype=float)
    if radii is None:
        radii = np.linspace(0.0, spec.R, 17)
    rr, uu = np.meshgrid(np.asarray(radii, dtype=float), u, indexing="ij")
    ft = np.abs(spec.nonlinearity.F_radial(rr, uu))
    bound = (c1 / 4.0) * np.abs(uu) ** 4 + (c2 / q) * np.abs(uu) ** q
    return float(np.min(bound - ft))


def _values(grid: RadialGrid, u: Field) -> np.ndarray:
    from .grid import _check_field

    return _check_field(grid, u)
