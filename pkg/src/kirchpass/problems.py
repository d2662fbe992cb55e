"""Problem definitions: potentials, nonlinearities, and the shift transform.

A problem couples the nonlocal coefficient b, a potential V, and a
nonlinearity f with primitive F.  Solving happens in the shifted form
(V + V0, f + V0*u) with V + V0 >= 1 at the grid nodes, which leaves the
energy functional unchanged because the two V0 contributions cancel.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, ShiftViolationError
from .grid import RadialGrid, build_grid

# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


def eval_zigzag(r, a0: float = 0.0):
    """Piecewise-linear sawtooth in the radius: minima a0 at integer radii,
    peaks n + a0 at the half-integers (2n-1)/2."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    n = np.maximum(1.0, np.ceil(r))
    rising = r <= (2.0 * n - 1.0) / 2.0
    out = np.where(rising, 2.0 * n * r - 2.0 * n * (n - 1.0), -2.0 * n * r + 2.0 * n**2)
    out = out + a0
    return out if out.ndim else float(out)


class Potential:
    """Radial potential; subclasses implement radial(r)."""

    kind = "custom"

    def radial(self, r):
        raise NotImplementedError

    def at_points(self, x):
        """Evaluate at Cartesian points, shape (..., 3)."""
        x = np.asarray(x, dtype=float)
        return self.radial(np.linalg.norm(x, axis=-1))

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass
class ConstantPotential(Potential):
    value: float
    kind = "constant"

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        out = np.full_like(r, self.value)
        return out if out.ndim else float(out)

    def describe(self):
        return {"kind": self.kind, "value": self.value}


@dataclass
class ZigzagPotential(Potential):
    a0: float = 0.0
    kind = "zigzag"

    def radial(self, r):
        return eval_zigzag(r, self.a0)

    def describe(self):
        return {"kind": self.kind, "a0": self.a0}


@dataclass
class TabulatedPotential(Potential):
    """Per-node table, linearly interpolated, extended by its end values."""

    r_table: np.ndarray
    values: np.ndarray
    kind = "custom-tabulated"

    def __post_init__(self):
        self.r_table = np.asarray(self.r_table, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.r_table.shape != self.values.shape or self.r_table.ndim != 1:
            raise ConfigurationError("tabulated potential needs matching 1-d r/value tables")
        if np.any(np.diff(self.r_table) <= 0):
            raise ConfigurationError("tabulated potential radii must increase")

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        out = np.interp(r, self.r_table, self.values)
        return out if out.ndim else float(out)

    def describe(self):
        return {"kind": self.kind, "points": int(self.r_table.size)}


@dataclass
class ShiftedPotential(Potential):
    base: Potential
    v0: float
    kind = "shifted"

    def radial(self, r):
        return self.base.radial(r) + self.v0

    def describe(self):
        return {"kind": self.kind, "base": self.base.describe(), "v0": self.v0}


# ---------------------------------------------------------------------------
# amplitude profiles (the a(x) factor of the quintic catalog entry)
# ---------------------------------------------------------------------------


@dataclass
class Amplitude:
    """Radial amplitude 0 < inf a <= sup a < inf; scalar or tabulated."""

    value: float = 1.0
    r_table: np.ndarray | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        if (self.r_table is None) != (self.values is None):
            raise ConfigurationError("amplitude table needs both radii and values")
        if self.r_table is not None:
            self.r_table = np.asarray(self.r_table, dtype=float)
            self.values = np.asarray(self.values, dtype=float)
            lo, hi = self.values.min(), self.values.max()
            if not (0 < lo <= hi < np.inf):
                raise ConfigurationError(f"amplitude must satisfy 0 < inf <= sup < inf, got [{lo}, {hi}]")
        elif not (0 < self.value < np.inf):
            raise ConfigurationError(f"scalar amplitude must be positive finite, got {self.value}")

    def radial(self, r):
        if self.r_table is None:
            return np.full_like(np.asarray(r, dtype=float), self.value)
        return np.interp(np.asarray(r, dtype=float), self.r_table, self.values)


# ---------------------------------------------------------------------------
# nonlinearities
# ---------------------------------------------------------------------------


def _smooth_cutoff(s):
    """C-infinity step: 1 on s <= 1, 0 on s >= 2."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    out[s <= 1.0] = 1.0
    mid = (s > 1.0) & (s < 2.0)
    if np.any(mid):
        t = s[mid]
        a = np.exp(-1.0 / (2.0 - t))
        b = np.exp(-1.0 / (t - 1.0))
        out[mid] = a / (a + b)
    return out


def _smooth_cutoff_deriv(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    mid = (s > 1.0) & (s < 2.0)
    if np.any(mid):
        t = s[mid]
        a = np.exp(-1.0 / (2.0 - t))
        b = np.exp(-1.0 / (t - 1.0))
        da = -a / (2.0 - t) ** 2
        db = b / (t - 1.0) ** 2
        out[mid] = (da * b - a * db) / (a + b) ** 2
    return out


class Nonlinearity:
    """Pointwise f(x, u) with primitive F(x, u); F(x, 0) = 0.

    Radial kinds expose f_radial/F_radial for the grid pipeline; the general
    f_xu/F_xu entry points (Cartesian x of shape (..., 3)) serve the
    hypothesis checkers, which need no grid.
    """

    kind = "custom"
    radial = True

    def f_radial(self, r, u):
        raise NotImplementedError

    def F_radial(self, r, u):
        raise NotImplementedError

    def f_xu(self, x, u):
        x = np.asarray(x, dtype=float)
        return self.f_radial(np.linalg.norm(x, axis=-1), u)

    def F_xu(self, x, u):
        x = np.asarray(x, dtype=float)
        return self.F_radial(np.linalg.norm(x, axis=-1), u)

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass
class ZeroNonlinearity(Nonlinearity):
    kind = "zero"

    def f_radial(self, r, u):
        return np.zeros(np.broadcast(np.asarray(r), np.asarray(u)).shape)

    def F_radial(self, r, u):
        return np.zeros(np.broadcast(np.asarray(r), np.asarray(u)).shape)


@dataclass
class KirchhoffExample(Nonlinearity):
    """a(x) * (4u^4 + 2u^2 sin u - 4u cos u), primitive a(x) * ((4/5)u^5 - 2u^2 cos u)."""

    amplitude: Amplitude = None
    kind = "kirchhoff-example"

    def __post_init__(self):
        if self.amplitude is None:
            self.amplitude = Amplitude(1.0)

    def f_radial(self, r, u):
        u = np.asarray(u, dtype=float)
        a = self.amplitude.radial(r)
        return a * (4.0 * u**4 + 2.0 * u**2 * np.sin(u) - 4.0 * u * np.cos(u))

    def F_radial(self, r, u):
        u = np.asarray(u, dtype=float)
        a = self.amplitude.radial(r)
        return a * (0.8 * u**5 - 2.0 * u**2 * np.cos(u))

    def describe(self):
        return {"kind": self.kind, "a": self.amplitude.value if self.amplitude.r_table is None else "table"}


@dataclass
class SublinearOrigin(Nonlinearity):
    """Primitive c3*|u|^tau * cutoff(|u|) + u^4 with tau in (0, 2).

    The tau term makes the energy dip below zero at small amplitudes, which
    is what gives the ball-constrained minimization a strictly negative
    level; the cutoff removes it beyond |u| = 2.
    """

    c3: float = 1.0
    tau: float = 1.0
    kind = "sublinear-origin"

    def __post_init__(self):
        if not 0.0 < self.tau < 2.0:
            raise ConfigurationError(f"tau must lie in (0, 2), got {self.tau}")
        if self.c3 < 0:
            raise ConfigurationError(f"c3 must be nonnegative, got {self.c3}")

    def f_radial(self, r, u):
        u = np.asarray(u, dtype=float)
        s = np.abs(u)
        sgn = np.sign(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            power = np.where(s > 0, s ** (self.tau - 1.0), 0.0)
        out = self.c3 * sgn * (
            self.tau * power * _smooth_cutoff(s) + s**self.tau * _smooth_cutoff_deriv(s)
        )
        out = out + 4.0 * u**3
        return np.broadcast_to(out, np.broadcast(np.asarray(r), u).shape).copy()

    def F_radial(self, r, u):
        u = np.asarray(u, dtype=float)
        s = np.abs(u)
        out = self.c3 * s**self.tau * _smooth_cutoff(s) + u**4
        return np.broadcast_to(out, np.broadcast(np.asarray(r), u).shape).copy()

    def describe(self):
        return {"kind": self.kind, "c3": self.c3, "tau": self.tau}


def _ar_violator_primitive(t):
    """int_0^t s^2 log(1+s) ds for t >= 0, in closed form."""
    t = np.asarray(t, dtype=float)
    return (t**3 / 3.0) * np.log1p(t) - (t**3 / 3.0 - t**2 / 2.0 + t - np.log1p(t)) / 3.0


@dataclass
class ArViolator(Nonlinearity):
    """sin(x1) * log(1 + |u|) * u^2 -- not radial, used by the checkers only."""

    kind = "ar-violator"
    radial = False

    def f_radial(self, r, u):
        raise ConfigurationError("ar-violator depends on the x1 coordinate; it has no radial form")

    F_radial = f_radial

    def f_xu(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        return np.sin(x[..., 0]) * np.log1p(np.abs(u)) * u**2

    def F_xu(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        return np.sin(x[..., 0]) * np.sign(u) * _ar_violator_primitive(np.abs(u))


@dataclass
class SumNonlinearity(Nonlinearity):
    terms: tuple
    kind = "sum"

    def __post_init__(self):
        self.terms = tuple(self.terms)
        if not self.terms:
            raise ConfigurationError("sum nonlinearity needs at least one term")
        self.radial = all(t.radial for t in self.terms)

    def f_radial(self, r, u):
        return sum(t.f_radial(r, u) for t in self.terms)

    def F_radial(self, r, u):
        return sum(t.F_radial(r, u) for t in self.terms)

    def f_xu(self, x, u):
        return sum(t.f_xu(x, u) for t in self.terms)

    def F_xu(self, x, u):
        return sum(t.F_xu(x, u) for t in self.terms)

    def describe(self):
        return {"kind": self.kind, "terms": [t.describe() for t in self.terms]}


@dataclass
class CustomNonlinearity(Nonlinearity):
    """Library-level escape hatch: user supplies pointwise callables f(x, u), F(x, u)."""

    f: callable
    F: callable
    radial_f: callable = None
    radial_F: callable = None
    kind = "custom"

    def __post_init__(self):
        self.radial = self.radial_f is not None

    def f_radial(self, r, u):
        if self.radial_f is None:
            raise ConfigurationError("custom nonlinearity has no radial form")
        return self.radial_f(r, u)

    def F_radial(self, r, u):
        if self.radial_F is None:
            raise ConfigurationError("custom nonlinearity has no radial form")
        return self.radial_F(r, u)

    def f_xu(self, x, u):
        return self.f(x, u)

    def F_xu(self, x, u):
        return self.F(x, u)


@dataclass
class ShiftedNonlinearity(Nonlinearity):
    base: Nonlinearity
    v0: float
    kind = "shifted"

    def __post_init__(self):
        self.radial = self.base.radial

    def f_radial(self, r, u):
        return self.base.f_radial(r, u) + self.v0 * np.asarray(u, dtype=float)

    def F_radial(self, r, u):
        return self.base.F_radial(r, u) + 0.5 * self.v0 * np.asarray(u, dtype=float) ** 2

    def f_xu(self, x, u):
        return self.base.f_xu(x, u) + self.v0 * np.asarray(u, dtype=float)

    def F_xu(self, x, u):
        return self.base.F_xu(x, u) + 0.5 * self.v0 * np.asarray(u, dtype=float) ** 2

    def describe(self):
        return {"kind": self.kind, "base": self.base.describe(), "v0": self.v0}


def eval_example_f(a: float, u) -> np.ndarray:
    """Pointwise f of the quintic catalog entry with constant amplitude a."""
    return KirchhoffExample(Amplitude(a)).f_radial(0.0, u)


def eval_example_F(a: float, u) -> np.ndarray:
    return KirchhoffExample(Amplitude(a)).F_radial(0.0, u)


def eval_ar_violator(u, x1) -> np.ndarray:
    """Pointwise value of the non-radial (AR)-violating nonlinearity."""
    u = np.asarray(u, dtype=float)
    return np.sin(np.asarray(x1, dtype=float)) * np.log1p(np.abs(u)) * u**2


# ---------------------------------------------------------------------------
# problem spec and the shift
# ---------------------------------------------------------------------------


@dataclass
class ProblemSpec:
    """One instance of the equation: coefficient, potential, nonlinearity, grid request."""

    b: float
    potential: Potential
    nonlinearity: Nonlinearity
    V0: float | None = None
    R: float = 8.0
    n: int = 256
    scheme: str = "uniform-order4"
    shifted: bool = False

    def __post_init__(self):
        # b = 0 is the local (classical) limit, kept for benchmarking;
        # negative coefficients make the quartic term a sink and are rejected
        if not self.b >= 0:
            raise ConfigurationError(f"nonlocal coefficient b must be nonnegative, got {self.b}")

    def make_grid(self) -> RadialGrid:
        return build_grid(self.R, self.n, self.scheme)

    def describe(self) -> dict:
        return {
            "b": self.b,
            "potential": self.potential.describe(),
            "nonlinearity": self.nonlinearity.describe(),
            "V0": self.V0,
            "R": self.R,
            "n": self.n,
            "scheme": self.scheme,
            "shifted": self.shifted,
        }


def shift_problem(spec: ProblemSpec, grid: RadialGrid | None = None) -> ProblemSpec:
    """Return the shifted problem (V + V0, f + V0*u) with V + V0 >= 1 at the nodes.

    When spec.V0 is unset, V0 = max(0, 1 - min_nodes V); the original and
    shifted specs define the same energy functional.
    """
    if spec.shifted:
        return spec
    if grid is None:
        grid = spec.make_grid()
    vmin = float(np.min(spec.potential.radial(grid.nodes)))
    if spec.V0 is None:
        v0 = max(0.0, 1.0 - vmin)
    else:
        v0 = float(spec.V0)
        if vmin + v0 < 1.0 - 1e-12:
            raise ShiftViolationError(
                f"requested V0={v0} leaves the shifted potential at {vmin + v0:.6g} < 1"
            )
    return replace(
        spec,
        potential=ShiftedPotential(spec.potential, v0),
        nonlinearity=ShiftedNonlinearity(spec.nonlinearity, v0),
        V0=v0,
        shifted=True,
    )
