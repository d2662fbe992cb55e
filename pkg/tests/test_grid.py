import numpy as np
import pytest

from kirchpass import (
    ConfigurationError,
    Field,
    GridMismatchError,
    ShiftViolationError,
    build_grid,
    gradient_energy,
    h_norm_sq,
    integrate,
)
from kirchpass.grid import derivative


def test_volume_unit_ball():
    grid = build_grid(1.0, 64)
    assert abs(integrate(grid, np.ones(64)) - 4 * np.pi / 3) <= 1e-10 * (4 * np.pi / 3)


def test_volume_radius_two():
    grid = build_grid(2.0, 128)
    assert abs(integrate(grid, np.ones(128)) - 32 * np.pi / 3) <= 1e-10 * (32 * np.pi / 3)


@pytest.mark.parametrize("n", [16, 32, 64, 256])
def test_volume_and_positivity(n):
    grid = build_grid(1.5, n)
    vol = 4 * np.pi * 1.5**3 / 3
    assert abs(grid.quad_weights.sum() - vol) <= 1e-10 * vol
    assert grid.quad_weights.min() > 0
    assert np.all(np.diff(grid.nodes) > 0)
    assert 0 < grid.nodes[0] and grid.nodes[-1] < grid.R


def test_build_rejects_small_n():
    with pytest.raises(ConfigurationError):
        build_grid(1.0, 4)


def test_build_rejects_nonpositive_radius():
    with pytest.raises(ConfigurationError):
        build_grid(0.0, 64)
    with pytest.raises(ConfigurationError):
        build_grid(-2.0, 64)


def test_build_rejects_unknown_scheme():
    with pytest.raises(ConfigurationError):
        build_grid(1.0, 64, "spectral")


def test_integrate_monomial():
    grid = build_grid(1.0, 64)
    assert abs(integrate(grid, grid.nodes**2) - 4 * np.pi / 5) <= 1e-8


def test_integrate_gaussian():
    # closed form: int_{R^3} exp(-|x|^2) dx = pi^{3/2}; truncation at R=8 negligible
    grid = build_grid(8.0, 256)
    assert abs(integrate(grid, np.exp(-grid.nodes**2)) - np.pi**1.5) <= 1e-6


def test_integrate_length_mismatch():
    grid = build_grid(1.0, 64)
    with pytest.raises(GridMismatchError):
        integrate(grid, np.ones(63))


def test_integrate_linearity():
    grid = build_grid(2.0, 48)
    rng = np.random.default_rng(1)
    s1, s2 = rng.normal(size=48), rng.normal(size=48)
    lhs = integrate(grid, 3.25 * s1 + s2)
    rhs = 3.25 * integrate(grid, s1) + integrate(grid, s2)
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(rhs))


def test_quadrature_convergence_order():
    exact = 4 * np.pi * ((4 - 2) * np.sin(2) + 4 * np.cos(2))  # int cos(r) over B_2
    errs = []
    for n in (32, 64, 128):
        grid = build_grid(2.0, n)
        errs.append(abs(integrate(grid, np.cos(grid.nodes)) - exact))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(orders >= 2.0)


def test_derivative_reproduces_linear():
    for scheme in ("uniform-order4", "uniform-order2"):
        grid = build_grid(3.0, 32, scheme)
        du = derivative(grid, 2.5 * grid.nodes)
        assert np.max(np.abs(du / 2.5 - 1.0)) <= 1e-10


def test_gradient_energy_linear_field():
    grid = build_grid(1.0, 128)
    u = Field(grid.R - grid.nodes, grid)
    assert abs(gradient_energy(grid, u) - 4 * np.pi / 3) <= 1e-6


def test_gradient_energy_zero_field():
    grid = build_grid(1.0, 32)
    assert gradient_energy(grid, Field(np.zeros(32), grid)) == 0.0


def test_gradient_energy_gaussian():
    # 4*pi int_0^inf r^4 exp(-r^2) dr = (3/2) pi^{3/2}
    grid = build_grid(8.0, 512)
    u = Field(np.exp(-grid.nodes**2 / 2), grid)
    assert abs(gradient_energy(grid, u) - 1.5 * np.pi**1.5) <= 1e-5


def test_gradient_energy_convergence_order():
    exact = 1.5 * np.pi**1.5
    errs = []
    for n in (128, 256, 512):
        grid = build_grid(8.0, n)
        errs.append(abs(gradient_energy(grid, Field(np.exp(-grid.nodes**2 / 2), grid)) - exact))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(orders >= 2.0)


def test_gradient_energy_grid_mismatch():
    g1 = build_grid(1.0, 32)
    g2 = build_grid(2.0, 32)
    u = Field(np.ones(32), g1)
    with pytest.raises(GridMismatchError):
        gradient_energy(g2, u)


def test_h_norm_sq_zero():
    grid = build_grid(1.0, 32)
    assert h_norm_sq(grid, Field(np.zeros(32), grid), np.ones(32)) == 0.0


def test_h_norm_sq_linear_field():
    # 4*pi/3 from the gradient plus 4*pi int_0^1 (1-r)^2 r^2 dr = 4*pi/30
    grid = build_grid(1.0, 128)
    u = Field(1.0 - grid.nodes, grid)
    got = h_norm_sq(grid, u, np.ones(128))
    assert abs(got - (4 * np.pi / 3 + 4 * np.pi / 30)) <= 1e-6


def test_h_norm_sq_rejects_unshifted_potential():
    grid = build_grid(1.0, 32)
    vt = np.ones(32)
    vt[10] = 0.5
    with pytest.raises(ShiftViolationError):
        h_norm_sq(grid, Field(np.ones(32), grid), vt)


def test_h_norm_positive_for_nonzero():
    grid = build_grid(2.0, 48)
    rng = np.random.default_rng(7)
    u = Field(rng.normal(size=48), grid)
    assert h_norm_sq(grid, u, np.full(48, 1.5)) > 0


def test_stiffness_has_no_cheap_oscillation():
    # the energy quadratic form must price grid-scale oscillation like 1/h^2
    grid = build_grid(8.0, 128)
    k = grid.stiffness()
    eigs = np.linalg.eigvalsh(k)
    assert eigs[0] >= -1e-9
    saw = np.cos(np.pi * np.arange(128))
    assert saw @ (k @ saw) > 1e3


def test_field_length_validation():
    grid = build_grid(1.0, 32)
    with pytest.raises(GridMismatchError):
        Field(np.ones(31), grid)


def test_determinism():
    g1 = build_grid(3.0, 96)
    g2 = build_grid(3.0, 96)
    assert np.array_equal(g1.quad_weights, g2.quad_weights)
    assert np.array_equal(g1.diff_matrix, g2.diff_matrix)
    assert np.array_equal(g1.grad_matrix, g2.grad_matrix)
