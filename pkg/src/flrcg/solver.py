"""Krylov-restricted residual minimization on the Gram system with early stopping.

The iterate after m steps minimizes the residual norm
(1/n) sqrt((y - Kc)^T K (y - Kc)) over the Krylov space
span{(K/n)^l (y/n) : l = 0..m-1}. The recurrence is a conjugate-residual
iteration in the K-weighted inner product (two K-matvecs per step, O(n^2 m)
total); its optimality is not assumed but validated against the brute-force
:func:`oracle_fit` in the test suite.

Early stopping: iteration halts at the first m >= 0 whose residual is <= the
threshold (checked before the first step, so m* = 0 is legal), at the
iteration budget, or when the Krylov space is numerically exhausted.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, NumericalError


@dataclass(frozen=True)
class FixedIterations:
    """Run exactly m iterations (fewer only on Krylov exhaustion)."""

    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ConfigError(f"iteration count must be >= 0, got {self.m}")


@dataclass(frozen=True)
class Threshold:
    """Stop at the first residual <= omega."""

    omega: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ConfigError(f"threshold omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class TheoremSchedule:
    """Stop at the first residual <= (2 + tau) n^(-(alpha+1)/(1+s+2 alpha))."""

    tau: float
    alpha: float
    s: float

    def __post_init__(self):
        omega_threshold(self.tau, self.alpha, self.s, 1)  # validates parameters


@dataclass(frozen=True)
class IterationBudget:
    """Hard iteration cap (default n) and relative degeneracy tolerance."""

    m_max: int | None = None
    eps_deg: float = 1e-14

    def __post_init__(self):
        if self.m_max is not None and self.m_max < 1:
            raise ConfigError(f"m_max must be >= 1, got {self.m_max}")


@dataclass(frozen=True)
class FitResult:
    """CG output: representer coefficients, stopping index, and residual trace.

    ``trace[k]`` is the residual norm after k iterations; ``m_star`` equals
    ``len(trace) - 1``. ``stop_reason`` is one of "threshold-met",
    "max-iterations", "krylov-exhausted".
    """

    coeffs: np.ndarray
    m_star: int
    trace: np.ndarray
    stop_reason: str


def omega_threshold(tau, alpha, s, n):
    """Early-stopping threshold (2 + tau) n^(-(alpha+1)/(1+s+2 alpha))."""
    if tau <= 0:
        raise ConfigError(f"tau must be positive, got {tau}")
    if alpha <= 0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    if not 0.0 < s < 1.0:
        raise ConfigError(f"s must lie in (0, 1), got {s}")
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    return (2.0 + tau) * float(n) ** (-(alpha + 1.0) / (1.0 + s + 2.0 * alpha))


def _check_system(K, y):
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("K must be square")
    if not np.array_equal(K, K.T, equal_nan=True):
        raise ValueError("K must be exactly symmetric")
    if y.shape != (K.shape[0],) or y.size < 1:
        raise ValueError("y must be a vector matching K with n >= 1")
    return K, y


def cg_fit(K, y, rule, budget=IterationBudget()):
    """Conjugate-residual fit of the representer coefficients with early stopping.

    Args:
        K: n x n symmetric PSD Gram matrix.
        y: response vector of length n.
        rule: FixedIterations, Threshold, or TheoremSchedule.
        budget: IterationBudget; m_max defaults to n.

    Returns:
        FitResult with the coefficient vector, m*, the full residual trace,
        and the stop reason.
    """
    K, y = _check_system(K, y)
    n = y.size

    if isinstance(rule, FixedIterations):
        omega = None
        limit = rule.m
    elif isinstance(rule, Threshold):
        omega = rule.omega
        limit = budget.m_max if budget.m_max is not None else n
    elif isinstance(rule, TheoremSchedule):
        omega = omega_threshold(rule.tau, rule.alpha, rule.s, n)
        limit = budget.m_max if budget.m_max is not None else n
    else:
        raise TypeError(f"unknown stopping rule: {rule!r}")

    # scale reference for degeneracy and PSD guards
    kmax = float(np.max(np.sum(np.abs(K), axis=1))) if n > 0 else 0.0

    c = np.zeros(n)
    rho = y / n
    z = K @ rho
    rz = float(rho @ z)
    zz = float(z @ z)
    if not np.isfinite(rz) or not np.isfinite(zz):
        raise NumericalError("non-finite residual at initialization", iteration=0)
    if rz < -1e-12 * kmax * float(rho @ rho):
        raise NumericalError("K is not positive semidefinite", iteration=0)
    trace = [np.sqrt(max(rz, 0.0))]
    pi = rho.copy()

    stop_reason = None
    while True:
        if omega is not None and trace[-1] <= omega:
            stop_reason = "threshold-met"
            break
        if len(trace) - 1 >= limit:
            stop_reason = "max-iterations"
            break
        if zz == 0.0:
            # K rho = 0: the residual cannot decrease further
            stop_reason = "krylov-exhausted"
            break
        u = K @ pi
        v = K @ u
        uv = float(u @ v)
        if not np.isfinite(uv):
            raise NumericalError("non-finite curvature", iteration=len(trace))
        if uv <= budget.eps_deg * kmax**3 * float(pi @ pi):
            stop_reason = "krylov-exhausted"
            break
        a = n * zz / uv
        c_next = c + a * pi
        rho_next = rho - (a / n) * u
        z_next = z - (a / n) * v
        rz_next = float(rho_next @ z_next)
        zz_next = float(z_next @ z_next)
        if not np.isfinite(rz_next) or not np.all(np.isfinite(c_next)):
            raise NumericalError("non-finite iterate", iteration=len(trace))
        r_next = np.sqrt(max(rz_next, 0.0))
        if r_next > trace[-1]:
            # residual can only stall at the round-off floor; treat as exhausted
            stop_reason = "krylov-exhausted"
            break
        b = zz_next / zz
        c, rho, z = c_next, rho_next, z_next
        pi = rho + b * pi
        rz, zz = rz_next, zz_next
        trace.append(r_next)

    return FitResult(coeffs=c, m_star=len(trace) - 1,
                     trace=np.asarray(trace), stop_reason=stop_reason)


def residual_hnorm(K, y, c):
    """Residual norm (1/n) sqrt((y - Kc)^T K (y - Kc))."""
    K, y = _check_system(K, y)
    c = np.asarray(c, dtype=float)
    if c.shape != y.shape:
        raise ValueError("coefficient vector must match y")
    n = y.size
    r = y - K @ c
    q = float(r @ (K @ r))
    scale = float(np.max(np.sum(np.abs(K), axis=1))) * float(r @ r)
    if q < -1e-12 * max(scale, 1.0):
        raise ValueError("negative quadratic form: K violates the PSD contract")
    return np.sqrt(max(q, 0.0)) / n


def oracle_fit(K, y, m, rcond=1e-12):
    """Defining Krylov minimizer via dense linear algebra (desk-scale oracle).

    Builds the Krylov vectors (K/n)^l (y/n), l = 0..m-1, and solves the
    K-weighted least-squares problem for the residual-minimal combination
    through an eigendecomposition of K. Independent of the iterative
    recurrence; rank-deficient bases fall back to the pseudo-inverse with
    cutoff rcond * (max singular value).
    """
    K, y = _check_system(K, y)
    n = y.size
    if n > 32:
        raise ValueError("oracle_fit is a desk-scale oracle: n must be <= 32")
    if not 0 <= m <= n:
        raise ValueError("m must satisfy 0 <= m <= n")
    if m == 0:
        return np.zeros(n)
    V = np.empty((n, m))
    V[:, 0] = y / n
    for l in range(1, m):
        V[:, l] = (K @ V[:, l - 1]) / n
    w, Q = np.linalg.eigh(K)
    w = np.clip(w, 0.0, None)
    sqw = np.sqrt(w)
    A = sqw[:, None] * (Q.T @ (K @ V))
    b = sqw * (Q.T @ y)
    gamma, *_ = np.linalg.lstsq(A, b, rcond=rcond)
    return V @ gamma


def predict_beta(Xcoefs, t, c):
    """Slope estimate in the shared eigenbasis: beta_j = t_j sum_i c_i x_ij."""
    X = np.asarray(Xcoefs, dtype=float)
    t = np.asarray(t, dtype=float)
    c = np.asarray(c, dtype=float)
    if X.ndim != 2 or X.shape[1] != t.size or c.shape != (X.shape[0],):
        raise ValueError("inconsistent dimensions")
    return t * (X.T @ c)
