"""Critical-point solver and hypothesis checker for a nonlocal Kirchhoff equation.

The equation lives on R^3 with a diffusion coefficient depending on the total
gradient energy; the package discretizes the radially reduced problem on a
truncated ball, certifies the saddle geometry by sampling, and computes two
critical points: a negative-level constrained minimizer and a positive-level
mountain-pass point.
"""

__version__ = "0.1.0"

from .energy import EnergyBreakdown, EnergyOperator, GradientReport, energy, energy_raw, gradient
from .errors import (
    ConfigurationError,
    GridMismatchError,
    LinearSolveError,
    NegativePointNotFoundError,
    PathCollapseError,
    ShiftViolationError,
    UnshiftedSpecError,
)
from .geometry import (
    GeometryReport,
    certify_geometry,
    default_direction,
    estimate_sphere_min,
    find_negative_energy_point,
    small_t_scan,
)
from .grid import Field, RadialGrid, build_grid, gradient_energy, h_norm_sq, integrate
from .hypotheses import (
    ConditionReport,
    check_AR,
    check_S1,
    check_S2,
    check_S3,
    check_V1,
)
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
    eval_ar_violator,
    eval_example_F,
    eval_example_f,
    eval_zigzag,
    shift_problem,
)
from .solve import (
    CriticalPoint,
    DistinctnessReport,
    Landscape,
    SolverConfig,
    minimize_in_ball,
    mountain_pass,
    verify_distinct,
)

__all__ = [name for name in dir() if not name.startswith("_")]
