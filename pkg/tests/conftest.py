import numpy as np
import pytest

from kirchpass import (
    ConstantPotential,
    CustomNonlinearity,
    KirchhoffExample,
    ProblemSpec,
    SublinearOrigin,
    SumNonlinearity,
    ZeroNonlinearity,
    ZigzagPotential,
    build_grid,
    shift_problem,
)
from kirchpass.problems import CustomNonlinearity  # noqa: F811  (re-export guard)


def _bc(r, u, values):
    """Broadcast a pointwise formula over the (r, u) sample shapes."""
    shape = np.broadcast(np.asarray(r), np.asarray(u)).shape
    return np.broadcast_to(values, shape).copy()


def cubic_nonlinearity():
    """f = u^3 with primitive u^4/4, as both radial and pointwise evaluator."""
    return CustomNonlinearity(
        f=lambda x, u: _bc(np.asarray(x)[..., 0], u, np.asarray(u, dtype=float) ** 3),
        F=lambda x, u: _bc(np.asarray(x)[..., 0], u, 0.25 * np.asarray(u, dtype=float) ** 4),
        radial_f=lambda r, u: _bc(r, u, np.asarray(u, dtype=float) ** 3),
        radial_F=lambda r, u: _bc(r, u, 0.25 * np.asarray(u, dtype=float) ** 4),
    )


def pointwise_nonlinearity(f, F):
    """Wrap scalar formulas f(u), F(u) (x-independent) for the checkers."""
    return CustomNonlinearity(
        f=lambda x, u: _bc(np.asarray(x)[..., 0], u, f(np.asarray(u, dtype=float))),
        F=lambda x, u: _bc(np.asarray(x)[..., 0], u, F(np.asarray(u, dtype=float))),
    )


def composite_problem(R=8.0, n=256):
    """The two-solution demonstration problem: sublinear dip plus quintic tail."""
    return ProblemSpec(
        b=1.0,
        potential=ZigzagPotential(0.0),
        nonlinearity=SumNonlinearity((SublinearOrigin(1.0, 1.0), KirchhoffExample())),
        R=R,
        n=n,
    )


@pytest.fixture(scope="session")
def composite_shifted():
    spec = composite_problem()
    grid = build_grid(spec.R, spec.n, spec.scheme)
    return shift_problem(spec, grid), grid


@pytest.fixture(scope="session")
def small_kirchhoff():
    spec = ProblemSpec(
        b=1.0, potential=ConstantPotential(1.0), nonlinearity=KirchhoffExample(), R=4.0, n=64
    )
    grid = build_grid(4.0, 64)
    return shift_problem(spec, grid), grid


@pytest.fixture(scope="session")
def zero_problem():
    spec = ProblemSpec(
        b=1.0, potential=ConstantPotential(1.0), nonlinearity=ZeroNonlinearity(), R=4.0, n=64
    )
    grid = build_grid(4.0, 64)
    return shift_problem(spec, grid), grid
