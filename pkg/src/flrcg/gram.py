"""Gram matrix construction for the representer system K alpha = y.

Two paths: an exact spectral path for data given as coefficients in the basis
that diagonalizes the kernel operator, and a quadrature path that discretizes
the double integral K_ij = integral integral k(s,t) X_i(t) X_j(s) dt ds for
closed-form kernels. The grid path is a congruence X W K_g W X^T, so it is
positive semidefinite whenever the pointwise kernel matrix K_g is.
"""

from dataclasses import dataclass

import numpy as np

from .grids import CosineBasis, _design_matrix


@dataclass(frozen=True)
class SpectralKernel:
    """Kernel with known eigenvalues in the cosine basis (exact path only)."""

    t: np.ndarray
    basis: CosineBasis

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if np.any(t <= 0):
            raise ValueError("spectral kernel eigenvalues must be positive")
        object.__setattr__(self, "t", t)


@dataclass(frozen=True)
class GaussianKernel:
    """k(s, t) = exp(-(s - t)^2 / (2 gamma^2))."""

    gamma: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("Gaussian bandwidth gamma must be positive")


@dataclass(frozen=True)
class BrownianKernel:
    """k(s, t) = min(s, t)."""


@dataclass(frozen=True)
class ConstantKernel:
    """k(s, t) = 1; test double for the flat-kernel limit."""


def kernel_matrix(kernel, grid):
    """Pointwise kernel matrix K_g[a, b] = k(point_a, point_b).

    The spectral variant is evaluated through its truncated expansion
    sum_j t_j phi_j(s) phi_j(t); it is provided for cross-checks, while
    :func:`gram_grid` directs spectral kernels to the exact path.
    """
    p = grid.points
    if isinstance(kernel, ConstantKernel):
        return np.ones((p.size, p.size))
    if isinstance(kernel, BrownianKernel):
        return np.minimum(p[:, None], p[None, :])
    if isinstance(kernel, GaussianKernel):
        d = p[:, None] - p[None, :]
        return np.exp(-(d**2) / (2.0 * kernel.gamma**2))
    if isinstance(kernel, SpectralKernel):
        phi = _design_matrix(kernel.basis, grid)
        return (phi * kernel.t) @ phi.T
    raise TypeError(f"unknown kernel variant: {kernel!r}")


def gram_spectral(Xcoefs, t):
    """Exact Gram matrix K_ij = sum_k t_k x_ik x_jk from basis coefficients."""
    X = np.asarray(Xcoefs, dtype=float)
    t = np.asarray(t, dtype=float)
    if X.ndim != 2 or X.shape[1] != t.size:
        raise ValueError("Xcoefs must be n x J with J matching the eigenvalues")
    K = (X * t) @ X.T
    return (K + K.T) / 2.0


def gram_grid(Xgrid, kernel, grid):
    """Quadrature Gram matrix for a closed-form kernel.

    Spectral kernels are rejected: their Gram matrix is available exactly via
    :func:`gram_spectral`, without quadrature error.
    """
    if isinstance(kernel, SpectralKernel):
        raise ValueError("spectral kernels take the exact path: use gram_spectral")
    Kg = kernel_matrix(kernel, grid)
    return gram_from_kernel_matrix(Xgrid, Kg, grid)


def gram_from_kernel_matrix(Xgrid, Kg, grid):
    """K = X W K_g W X^T with W = diag(quadrature weights)."""
    X = np.asarray(Xgrid, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(grid):
        raise ValueError("Xgrid must be n x N with one column per grid point")
    XW = X * grid.weights
    K = XW @ Kg @ XW.T
    return (K + K.T) / 2.0


def psd_check(K, tol=1e-10):
    """Smallest eigenvalue of a symmetric matrix and whether it passes the PSD gate.

    Returns (min_eig, passed) with passed = min_eig >= -tol * max_eig.
    Raises on non-symmetric input.
    """
    K = np.asarray(K, dtype=float)
    if K.size == 0:
        return 0.0, True
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("K must be square")
    if not np.array_equal(K, K.T):
        raise ValueError("K must be exactly symmetric")
    eigs = np.linalg.eigvalsh(K)
    lo, hi = float(eigs[0]), float(eigs[-1])
    return lo, lo >= -tol * max(hi, 0.0)


def t_half_apply(c, t):
    """Apply T^(1/2) in the shared eigenbasis: output_j = sqrt(t_j) c_j."""
    c = np.asarray(c, dtype=float)
    t = np.asarray(t, dtype=float)
    if c.shape != t.shape:
        raise ValueError("coefficient and eigenvalue lengths must match")
    if np.any(t < 0):
        raise ValueError("eigenvalues must be nonnegative")
    return np.sqrt(t) * c


def empirical_lambda_eigs(K, tol=1e-10):
    """Eigenvalues of K/n in decreasing order.

    The nonzero spectrum of K/n equals the nonzero spectrum of the empirical
    operator T^(1/2) C_n T^(1/2), which licenses running CG on the Gram system.
    """
    lo, ok = psd_check(K, tol)
    if not ok:
        raise ValueError(f"K violates positive semidefiniteness: min eig {lo}")
    n = K.shape[0]
    return np.sort(np.linalg.eigvalsh(np.asarray(K, dtype=float) / n))[::-1]
