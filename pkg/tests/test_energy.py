import numpy as np
import pytest

from kirchpass import (
    ConstantPotential,
    Field,
    ProblemSpec,
    UnshiftedSpecError,
    ZeroNonlinearity,
    build_grid,
    energy,
    gradient,
    shift_problem,
)
from kirchpass.energy import EnergyOperator, growth_bound_check
from kirchpass.grid import gradient_energy


def random_field(grid, rng, scale=0.5):
    return Field(rng.normal(scale=scale, size=grid.n), grid)


def test_energy_zero_field(small_kirchhoff):
    spec, grid = small_kirchhoff
    br = energy(spec, grid, Field(np.zeros(grid.n), grid))
    assert br.dirichlet == br.potential == br.kirchhoff == br.nonlinear == br.total == 0.0


def test_energy_requires_shifted():
    spec = ProblemSpec(
        b=1.0, potential=ConstantPotential(-2.0), nonlinearity=ZeroNonlinearity(), R=4.0, n=32
    )
    grid = build_grid(4.0, 32)
    with pytest.raises(UnshiftedSpecError):
        energy(spec, grid, Field(np.zeros(32), grid))


def test_energy_quadratic_case_small_b(zero_problem):
    # with f = 0 and b -> 0 the functional is half the squared H-norm
    spec, grid = zero_problem
    tiny_b = ProblemSpec(
        b=1e-300,
        potential=spec.potential,
        nonlinearity=spec.nonlinearity,
        R=spec.R,
        n=spec.n,
        shifted=True,
        V0=spec.V0,
    )
    rng = np.random.default_rng(5)
    u = random_field(grid, rng)
    op = EnergyOperator(tiny_b, grid)
    br = op.breakdown(u.values)
    assert br.total == pytest.approx(0.5 * op.h_inner(u.values, u.values), rel=1e-12)


def test_energy_kirchhoff_component(zero_problem):
    spec, grid = zero_problem
    rng = np.random.default_rng(6)
    u = random_field(grid, rng)
    br = energy(spec, grid, u)
    a = gradient_energy(grid, u)
    assert br.kirchhoff == pytest.approx(spec.b * a * a / 4.0, rel=1e-12)
    assert br.total == pytest.approx(
        br.dirichlet + br.potential + br.kirchhoff - br.nonlinear, rel=0, abs=0
    )
    assert br.dirichlet >= 0 and br.potential >= 0 and br.kirchhoff >= 0


def test_gradient_zero_field_is_critical(small_kirchhoff):
    spec, grid = small_kirchhoff
    rep = gradient(spec, grid, Field(np.zeros(grid.n), grid))
    assert rep.dual_norm == 0.0
    assert rep.cerami == 0.0


def test_gradient_finite_difference(small_kirchhoff):
    spec, grid = small_kirchhoff
    op = EnergyOperator(spec, grid)
    rng = np.random.default_rng(11)
    u = rng.normal(scale=0.5, size=grid.n)
    v = rng.normal(size=grid.n)
    v /= op.h_norm(v)
    exact = float(op.grad_vec(u) @ v)
    scale = op.h_norm(u)
    errs = []
    for h_rel in (1e-4, 1e-5, 1e-6):
        h = h_rel * scale
        fd = (op.value(u + h * v) - op.value(u - h * v)) / (2 * h)
        err = abs(fd - exact) / abs(exact)
        errs.append(err)
        assert err <= 1e-6
    # O(h^2) decay where above the roundoff floor
    if errs[1] > 1e-11:
        assert errs[0] / errs[1] >= 30


def test_gradient_scaling_linearity(small_kirchhoff):
    # doubling the functional doubles every directional derivative
    spec, grid = small_kirchhoff
    op = EnergyOperator(spec, grid)
    rng = np.random.default_rng(12)
    u = rng.normal(scale=0.4, size=grid.n)
    v = rng.normal(size=grid.n)
    v /= op.h_norm(v)
    base = float(op.grad_vec(u) @ v)
    h = 1e-5 * op.h_norm(u)
    doubled = lambda x: 2.0 * op.value(x)  # noqa: E731
    fd = (doubled(u + h * v) - doubled(u - h * v)) / (2 * h)
    assert fd == pytest.approx(2.0 * base, rel=1e-6)


def test_riesz_identity(small_kirchhoff):
    spec, grid = small_kirchhoff
    op = EnergyOperator(spec, grid)
    rng = np.random.default_rng(13)
    u = rng.normal(scale=0.5, size=grid.n)
    g, dual, cerami = op.gradient(u)
    rhs = op.grad_vec(u)
    for _ in range(10):
        v = rng.normal(size=grid.n)
        lhs = op.h_inner(g, v)
        ref = float(rhs @ v)
        assert abs(lhs - ref) <= 1e-8 * max(abs(ref), 1e-12)
    assert dual >= 0
    assert cerami >= dual


def test_kirchhoff_term_identity(small_kirchhoff):
    # <I'(u), u> - ||u||_H^2 + int f u = b (int |grad u|^2)^2
    spec, grid = small_kirchhoff
    op = EnergyOperator(spec, grid)
    rng = np.random.default_rng(14)
    for _ in range(5):
        u = rng.normal(scale=0.6, size=grid.n)
        a = op.dirichlet_energy(u)
        fu = spec.nonlinearity.f_radial(grid.nodes, u)
        lhs = float(op.grad_vec(u) @ u) - op.h_inner(u, u) + float(op.w @ (fu * u))
        assert abs(lhs - spec.b * a * a) <= 1e-10 * max(spec.b * a * a, 1.0)


def test_growth_bound_zero_nonlinearity(zero_problem):
    spec, grid = zero_problem
    margin = growth_bound_check(spec, np.linspace(-10, 10, 101), c1=1.0, c2=1.0, q=5.0)
    assert margin >= 0


def test_growth_bound_fails_with_zero_constants(small_kirchhoff):
    spec, grid = small_kirchhoff
    margin = growth_bound_check(spec, np.linspace(-10, 10, 101), c1=0.0, c2=0.0, q=5.0)
    assert margin < 0


def test_growth_bound_kirchhoff_with_fitted_constants(small_kirchhoff):
    from kirchpass import check_S1

    spec, grid = small_kirchhoff
    rep = check_S1(spec.nonlinearity)
    fitted = rep.fitted
    margin = growth_bound_check(
        spec, np.linspace(-10, 10, 501), c1=fitted["c1"], c2=fitted["c2"], q=fitted["q"]
    )
    assert margin >= 0
