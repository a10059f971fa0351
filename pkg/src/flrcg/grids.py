"""Uniform grids on [0, 1], trapezoid quadrature, and the orthonormal cosine basis.

Functions on the domain are stored as samples on a shared :class:`Grid`;
integrals are composite trapezoid sums, which is exact for piecewise-linear
integrands and O(N^-2) accurate for smooth ones.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Quadrature grid on [0, 1].

    ``points`` are strictly increasing with endpoints 0 and 1; ``weights`` are
    nonnegative and sum to 1 (the length of the domain).
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if points.ndim != 1 or weights.ndim != 1 or points.size != weights.size:
            raise ValueError("points and weights must be 1-d arrays of equal length")
        if points.size < 2:
            raise ValueError("grid needs at least 2 points")
        if points[0] != 0.0 or points[-1] != 1.0:
            raise ValueError("grid must start at 0 and end at 1")
        if np.any(np.diff(points) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if np.any(weights < 0):
            raise ValueError("quadrature weights must be nonnegative")
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            raise ValueError("quadrature weights must sum to 1")
        points.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.points.size


@dataclass(frozen=True)
class FunctionOnGrid:
    """Samples of a function on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size != len(self.grid):
            raise ValueError("values must be 1-d with one entry per grid point")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class CosineBasis:
    """Orthonormal cosine system on [0, 1]: phi_0 = 1, phi_j = sqrt(2) cos(j pi t)."""

    J: int

    def __post_init__(self):
        if not isinstance(self.J, (int, np.integer)) or self.J < 1:
            raise ValueError("truncation J must be a positive integer")


def make_uniform_grid(N):
    """Uniform N-point grid with composite trapezoid weights (h/2, h, ..., h, h/2)."""
    if N < 2:
        raise ValueError("N must be at least 2")
    points = np.linspace(0.0, 1.0, N)
    h = 1.0 / (N - 1)
    weights = np.full(N, h)
    weights[0] = weights[-1] = h / 2.0
    return Grid(points, weights)


def quad_integrate(f):
    """Trapezoid integral of ``f`` over [0, 1]."""
    return float(f.grid.weights @ f.values)


def l2_inner(f, g):
    """Quadrature L2 inner product of two functions on the same grid."""
    if f.grid is not g.grid and not np.array_equal(f.grid.points, g.grid.points):
        raise ValueError("functions must share the same grid")
    return float(f.grid.weights @ (f.values * g.values))


def _basis_column(j, points):
    if j == 0:
        return np.ones_like(points)
    return np.sqrt(2.0) * np.cos(j * np.pi * points)


def basis_evaluate(basis, j, grid):
    """Evaluate basis function phi_j on the grid."""
    if not 0 <= j < basis.J:
        raise IndexError(f"basis index {j} out of range [0, {basis.J})")
    return FunctionOnGrid(grid, _basis_column(j, grid.points))


def _design_matrix(basis, grid):
    # column j holds phi_j sampled on the grid
    return np.column_stack([_basis_column(j, grid.points) for j in range(basis.J)])


def coefs_to_grid(c, basis, grid):
    """Synthesize sum_j c_j phi_j on the grid. Linear in ``c``."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or c.size != basis.J:
        raise ValueError("coefficient vector length must equal the basis truncation")
    return FunctionOnGrid(grid, _design_matrix(basis, grid) @ c)


def grid_to_coefs(f, basis):
    """Quadrature analysis coefficients c_j = <f, phi_j>."""
    phi = _design_matrix(basis, f.grid)
    return phi.T @ (f.grid.weights * f.values)
