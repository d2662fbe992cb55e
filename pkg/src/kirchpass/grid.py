"""Radial discretization of the truncated ball B_R in R^3.

Radially symmetric functions are stored by their values at n uniform interior
nodes of (0, R).  Volume integrals become weighted sums with the 4*pi*r^2
Jacobian folded into the weights (piecewise-polynomial product integration, so
polynomial samples up to the stencil degree are integrated exactly), and first
derivatives come from centered finite-difference stencils with one-sided
closures at both ends.  There is no node at r = 0, which side-steps the
coordinate singularity; fields carry an implicit homogeneous Dirichlet value
at r = R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GridMismatchError, ShiftViolationError

# scheme identifier -> interior stencil width of the derivative operator
SCHEMES = {"uniform-order4": 5, "uniform-order2": 3}

# degree of the local interpolants behind the quadrature weights
_QUAD_DEGREE = 3

_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


def _fd_weights(offsets: np.ndarray, deriv: int = 1) -> np.ndarray:
    """Finite-difference weights for the deriv-th derivative at offset 0."""
    m = offsets.size
    scale = np.abs(offsets).max()
    x = offsets / scale
    # rows: moment conditions sum_j c_j x_j^k / k! = delta_{k,deriv}
    a = np.vander(x, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[deriv] = math.factorial(deriv)
    return np.linalg.solve(a, rhs) / scale**deriv


def _product_weights(nodes: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Quadrature weights against the 4*pi*r^2 Jacobian on [0, R].

    One cell per node, node at the cell center.  On each cell the sampled
    function is replaced by the Lagrange interpolant through the nearest
    _QUAD_DEGREE+1 nodes and the product with r^2 is integrated exactly
    (Gauss-Legendre of sufficient order per cell).  Cardinal functions sum to
    one, so the total weight equals the volume of B_R to roundoff; the
    cell-centered layout keeps every weight strictly positive.
    """
    n = nodes.size
    m = _QUAD_DEGREE + 1
    w = np.zeros(n)
    for cell in range(n):
        a, b = edges[cell], edges[cell + 1]
        start = min(max(cell - m // 2, 0), n - m)
        idx = np.arange(start, start + m)
        xs = nodes[idx]
        # Gauss points mapped to [a, b]
        gx = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
        gw = 0.5 * (b - a) * _GL_W * 4.0 * np.pi * gx**2
        # cardinal functions of the stencil evaluated at the Gauss points
        for k in range(m):
            card = np.ones_like(gx)
            for j in range(m):
                if j != k:
                    card *= (gx - xs[j]) / (xs[k] - xs[j])
            w[idx[k]] += card @ gw
    return w


def _derivative_matrix(nodes: np.ndarray, width: int) -> np.ndarray:
    """First-derivative operator acting on interior node values only.

    Centered stencils where possible, one-sided near both ends; exact for
    polynomials up to degree width-1, so sampled linear functions reproduce
    their slope to roundoff everywhere.
    """
    n = nodes.size
    d = np.zeros((n, n))
    half = width // 2
    for i in range(n):
        start = min(max(i - half, 0), n - width)
        idx = np.arange(start, start + width)
        d[i, idx] = _fd_weights(nodes[idx] - nodes[i])
    return d


def _staggered_derivative(nodes: np.ndarray, edges: np.ndarray, width: int) -> np.ndarray:
    """First derivative evaluated at the cell edges from the node values.

    The staggered layout is what the energy quadratic form is built on: a
    node-centered first-derivative matrix annihilates the odd-even mode and
    seeds the discrete functional with spurious near-null directions, while
    the edge-centered stencils keep every oscillatory mode expensive.
    """
    n = nodes.size
    m = edges.size
    d = np.zeros((m, n))
    for k in range(m):
        start = min(max(int(np.searchsorted(nodes, edges[k])) - width // 2, 0), n - width)
        idx = np.arange(start, start + width)
        d[k, idx] = _fd_weights(nodes[idx] - edges[k])
    return d


def _edge_weights(edges: np.ndarray, spans: np.ndarray) -> np.ndarray:
    """Product-quadrature weights for samples living at the cell edges."""
    m = edges.size
    deg = _QUAD_DEGREE + 1
    w = np.zeros(m)
    for cell in range(spans.size - 1):
        a, b = spans[cell], spans[cell + 1]
        start = min(max(cell - deg // 2 + 1, 0), m - deg)
        idx = np.arange(start, start + deg)
        xs = edges[idx]
        gx = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
        gw = 0.5 * (b - a) * _GL_W * 4.0 * np.pi * gx**2
        for k in range(deg):
            card = np.ones_like(gx)
            for j in range(deg):
                if j != k:
                    card *= (gx - xs[j]) / (xs[k] - xs[j])
            w[idx[k]] += card @ gw
    return w


@dataclass(eq=False)
class RadialGrid:
    """Truncated radial grid with quadrature weights and derivative stencils."""

    R: float
    n: int
    diff_scheme: str
    nodes: np.ndarray
    quad_weights: np.ndarray
    diff_matrix: np.ndarray       # node-centered derivative (diagnostics)
    grad_matrix: np.ndarray       # edge-centered derivative (energy forms)
    grad_weights: np.ndarray      # quadrature weights at the edges
    _stiffness: np.ndarray | None = field(default=None, repr=False)

    @property
    def key(self) -> tuple:
        return (self.R, self.n, self.diff_scheme)

    def stiffness(self) -> np.ndarray:
        """Discrete Dirichlet form from the staggered gradient; symmetrized, cached."""
        if self._stiffness is None:
            k = self.grad_matrix.T @ (self.grad_weights[:, None] * self.grad_matrix)
            self._stiffness = 0.5 * (k + k.T)
        return self._stiffness


@dataclass(eq=False)
class Field:
    """Values of a radial function at the grid nodes (u(R) = 0 implied)."""

    values: np.ndarray
    grid: RadialGrid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise GridMismatchError(
                f"field has {self.values.shape} values, grid has n={self.grid.n}"
            )


def build_grid(R: float, n: int, scheme: str = "uniform-order4") -> RadialGrid:
    """Build a uniform radial grid with n interior nodes on (0, R)."""
    if not R > 0:
        raise ConfigurationError(f"truncation radius must be positive, got R={R}")
    if n < 8:
        raise ConfigurationError(f"need at least 8 interior nodes, got n={n}")
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {scheme!r}; options: {sorted(SCHEMES)}")
    # cell-centered layout: one cell per node, no node at r = 0 or r = R
    h = R / n
    nodes = h * (np.arange(n) + 0.5)
    edges = h * np.arange(n + 1)
    width = SCHEMES[scheme]
    return RadialGrid(
        R=float(R),
        n=int(n),
        diff_scheme=scheme,
        nodes=nodes,
        quad_weights=_product_weights(nodes, edges),
        diff_matrix=_derivative_matrix(nodes, width),
        grad_matrix=_staggered_derivative(nodes, edges, width - 1),
        grad_weights=_edge_weights(edges, edges),
    )


def _check_samples(grid: RadialGrid, samples: np.ndarray) -> np.ndarray:
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.n,):
        raise GridMismatchError(
            f"sample vector has shape {samples.shape}, grid has n={grid.n}"
        )
    return samples


def _check_field(grid: RadialGrid, u: Field) -> np.ndarray:
    if u.grid.key != grid.key:
        raise GridMismatchError(f"field lives on grid {u.grid.key}, not {grid.key}")
    return u.values


def integrate(grid: RadialGrid, samples: np.ndarray) -> float:
    """Integral over B_R of the radial function sampled at the nodes."""
    return float(grid.quad_weights @ _check_samples(grid, samples))


def derivative(grid: RadialGrid, samples: np.ndarray) -> np.ndarray:
    """Nodal first derivative of the sampled radial function."""
    return grid.diff_matrix @ _check_samples(grid, samples)


def gradient_energy(grid: RadialGrid, u: Field) -> float:
    """Integral of |grad u|^2 over B_R, via 4*pi * int u'(r)^2 r^2 dr."""
    du = grid.grad_matrix @ _check_field(grid, u)
    return float(grid.grad_weights @ du**2)


def h_norm_sq(grid: RadialGrid, u: Field, vtilde: np.ndarray) -> float:
    """Squared H-norm: gradient energy plus the Vtilde-weighted mass term.

    Requires the post-shift regime Vtilde >= 1 at every node.
    """
    vtilde = _check_samples(grid, vtilde)
    if vtilde.min() < 1.0 - 1e-12:
        raise ShiftViolationError(
            f"shifted potential dips to {vtilde.min():.6g} < 1; increase the shift"
        )
    vals = _check_field(grid, u)
    return gradient_energy(grid, u) + float(grid.quad_weights @ (vtilde * vals**2))
