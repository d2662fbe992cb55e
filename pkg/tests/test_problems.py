import numpy as np
import pytest
from scipy.integrate import quad

from kirchpass import (
    Amplitude,
    ArViolator,
    ConfigurationError,
    ConstantPotential,
    Field,
    KirchhoffExample,
    ProblemSpec,
    ShiftViolationError,
    SublinearOrigin,
    SumNonlinearity,
    TabulatedPotential,
    ZeroNonlinearity,
    ZigzagPotential,
    build_grid,
    eval_ar_violator,
    eval_example_F,
    eval_example_f,
    eval_zigzag,
    shift_problem,
)
from kirchpass.energy import energy_raw, gradient_raw


def make_spec(potential, nonlinearity=None, R=4.0, n=64, V0=None):
    return ProblemSpec(
        b=1.0,
        potential=potential,
        nonlinearity=nonlinearity or KirchhoffExample(),
        V0=V0,
        R=R,
        n=n,
    )


# -- shift ------------------------------------------------------------------


def test_shift_constant_negative():
    grid = build_grid(4.0, 64)
    shifted = shift_problem(make_spec(ConstantPotential(-2.0)), grid)
    assert shifted.V0 == pytest.approx(3.0)
    assert np.allclose(shifted.potential.radial(grid.nodes), 1.0)
    # f gains the 3u term
    u = 0.7
    assert shifted.nonlinearity.f_radial(1.0, u) == pytest.approx(
        KirchhoffExample().f_radial(1.0, u) + 3.0 * u
    )


def test_shift_already_above_one():
    grid = build_grid(4.0, 64)
    shifted = shift_problem(make_spec(ConstantPotential(5.0)), grid)
    assert shifted.V0 == 0.0
    assert np.allclose(shifted.potential.radial(grid.nodes), 5.0)


def test_shift_zigzag_node_minimum():
    spec = make_spec(ZigzagPotential(-3.0), R=8.0, n=256)
    grid = build_grid(8.0, 256)
    shifted = shift_problem(spec, grid)
    # oracle: brute-force minimum of the sawtooth over the very same nodes
    v0_expected = max(0.0, 1.0 - float(np.min(eval_zigzag(grid.nodes, -3.0))))
    assert shifted.V0 == pytest.approx(v0_expected, abs=0.0)
    assert abs(shifted.V0 - 4.0) < 0.1  # the sawtooth minimum is a0 = -3
    assert float(np.min(shifted.potential.radial(grid.nodes))) >= 1.0 - 1e-12


def test_shift_explicit_v0_validated():
    grid = build_grid(4.0, 64)
    with pytest.raises(ShiftViolationError):
        shift_problem(make_spec(ConstantPotential(-2.0), V0=1.0), grid)


def test_shift_idempotent():
    grid = build_grid(4.0, 64)
    shifted = shift_problem(make_spec(ConstantPotential(-2.0)), grid)
    assert shift_problem(shifted, grid) is shifted


def test_shift_neutrality_energy_and_gradient():
    spec = make_spec(ConstantPotential(-2.0))
    grid = build_grid(4.0, 64)
    shifted = shift_problem(spec, grid)
    rng = np.random.default_rng(3)
    for _ in range(10):
        u = Field(rng.normal(scale=0.5, size=64), grid)
        e0 = energy_raw(spec, grid, u).total
        e1 = energy_raw(shifted, grid, u).total
        assert abs(e0 - e1) <= 1e-12 * (1 + abs(e1))
        g0 = gradient_raw(spec, grid, u)
        g1 = gradient_raw(shifted, grid, u)
        assert np.max(np.abs(g0 - g1)) <= 1e-12 * (1 + np.linalg.norm(g1))


# -- sawtooth potential -----------------------------------------------------


def test_zigzag_values():
    assert eval_zigzag(1.0, 0.0) == pytest.approx(0.0, abs=1e-14)
    assert eval_zigzag(0.5, 0.0) == pytest.approx(1.0)
    assert eval_zigzag(2.5, 7.0) == pytest.approx(10.0)


def test_zigzag_structure():
    # minima a0 at the integers, peaks n + a0 at the half-integers
    a0 = -1.5
    for n in range(1, 21):
        assert eval_zigzag(float(n), a0) == pytest.approx(a0, abs=1e-12)
        assert eval_zigzag(n - 0.5, a0) == pytest.approx(n + a0, abs=1e-12)


def test_zigzag_continuity_at_breakpoints():
    eps = 1e-9
    for n in range(1, 21):
        for point in (float(n), (2 * n - 1) / 2):
            left = eval_zigzag(max(point - eps, 0.0), 0.25)
            right = eval_zigzag(point + eps, 0.25)
            assert abs(left - right) <= 1e-7  # slope <= 2n bounds the jump by 4n*eps


def test_zigzag_rejects_negative_radius():
    with pytest.raises(ValueError):
        eval_zigzag(-0.1, 0.0)


def test_tabulated_potential_interpolates_and_extends():
    pot = TabulatedPotential(np.array([0.0, 1.0, 2.0]), np.array([5.0, 3.0, 4.0]))
    assert pot.radial(0.5) == pytest.approx(4.0)
    assert pot.radial(10.0) == pytest.approx(4.0)  # extended by the last value


# -- catalog nonlinearities ---------------------------------------------------


def test_example_f_and_F_at_zero():
    assert eval_example_f(1.0, 0.0) == 0.0
    assert eval_example_F(1.0, 0.0) == 0.0


def test_example_f_and_F_at_pi():
    # sin(pi) = 0, cos(pi) = -1
    assert eval_example_f(1.0, np.pi) == pytest.approx(4 * np.pi**4 + 4 * np.pi, rel=1e-14)
    assert eval_example_F(1.0, np.pi) == pytest.approx(0.8 * np.pi**5 + 2 * np.pi**2, rel=1e-14)


def test_example_amplitude_linearity():
    for u in (-3.2, 0.4, 1.9, 7.0):
        assert eval_example_f(2.0, u) == pytest.approx(2 * eval_example_f(1.0, u), rel=1e-14)
        assert eval_example_F(2.0, u) == pytest.approx(2 * eval_example_F(1.0, u), rel=1e-14)


def test_ar_violator_values():
    assert eval_ar_violator(0.0, 1.3) == 0.0
    assert eval_ar_violator(np.e - 1.0, np.pi / 2) == pytest.approx((np.e - 1.0) ** 2)
    assert eval_ar_violator(4.2, 0.0) == 0.0


def test_ar_violator_has_no_radial_form():
    with pytest.raises(ConfigurationError):
        ArViolator().f_radial(1.0, 1.0)


@pytest.mark.parametrize(
    "nl",
    [
        KirchhoffExample(),
        KirchhoffExample(Amplitude(2.5)),
        SublinearOrigin(1.0, 1.0),
        SublinearOrigin(0.5, 0.7),
        ArViolator(),
        SumNonlinearity((SublinearOrigin(1.0, 1.0), KirchhoffExample())),
    ],
    ids=["kirchhoff", "kirchhoff-a2.5", "sublinear", "sublinear-0.7", "ar", "sum"],
)
def test_primitive_consistency(nl):
    # quadrature oracle: F(x, u) must match the integral of f(x, .) from 0 to u
    x = np.array([0.8, -0.3, 0.4])
    for u in np.linspace(-10.0, 10.0, 21):
        val, _ = quad(lambda s: float(nl.f_xu(x, s)), 0.0, float(u), limit=300)
        expected = float(nl.F_xu(x, u))
        assert abs(expected - val) <= 1e-8 * (1 + abs(expected))


def test_primitive_vanishes_at_origin():
    for nl in (KirchhoffExample(), SublinearOrigin(1.0, 1.0), ZeroNonlinearity(), ArViolator()):
        assert float(nl.F_xu(np.array([1.0, 0.0, 0.0]), 0.0)) == 0.0


def test_sublinear_cutoff_support():
    nl = SublinearOrigin(2.0, 1.0)
    # inside the cutoff: primitive is c3|u| + u^4
    assert float(nl.F_radial(0.0, 0.5)) == pytest.approx(2.0 * 0.5 + 0.5**4)
    # beyond the cutoff the tau term is gone
    assert float(nl.F_radial(0.0, 3.0)) == pytest.approx(3.0**4)


def test_sublinear_rejects_bad_tau():
    with pytest.raises(ConfigurationError):
        SublinearOrigin(1.0, 2.0)
    with pytest.raises(ConfigurationError):
        SublinearOrigin(-1.0, 1.0)


def test_amplitude_validation():
    with pytest.raises(ConfigurationError):
        Amplitude(0.0)
    with pytest.raises(ConfigurationError):
        Amplitude(r_table=np.array([0.0, 1.0]), values=np.array([1.0, -0.5]))
    amp = Amplitude(r_table=np.array([0.0, 2.0]), values=np.array([1.0, 3.0]))
    assert amp.radial(1.0) == pytest.approx(2.0)


def test_problem_spec_rejects_negative_b():
    with pytest.raises(ConfigurationError):
        ProblemSpec(b=-1.0, potential=ConstantPotential(1.0), nonlinearity=ZeroNonlinearity())
