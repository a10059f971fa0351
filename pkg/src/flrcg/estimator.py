"""scikit-learn estimator wrapping the kernel CG solver.

Rows of X are functional covariates expressed as coefficients in the basis
that diagonalizes the kernel operator; the kernel enters through its
eigenvalue sequence. This keeps the solver composable with sklearn pipelines,
grid search, and cloning.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import ConfigError
from .gram import gram_spectral
from .solver import (
    FixedIterations,
    IterationBudget,
    TheoremSchedule,
    Threshold,
    cg_fit,
    predict_beta,
)


class FunctionalCGRegressor(RegressorMixin, BaseEstimator):
    """Functional linear regression via conjugate gradient with early stopping.

    Parameters
    ----------
    kernel_eigenvalues : array-like of shape (n_features,), optional
        Eigenvalues of the kernel operator in the coefficient basis.
        Defaults to all ones (identity kernel).
    stopping : {"theorem", "fixed", "threshold"}
        "theorem" stops at the first residual below
        (2 + tau) n^(-(alpha+1)/(1+s+2 alpha)); "fixed" runs n_iter steps;
        "threshold" uses the explicit value ``omega``.
    tau, alpha, s : float
        Parameters of the theorem schedule.
    n_iter : int, optional
        Iteration count for stopping="fixed".
    omega : float, optional
        Residual threshold for stopping="threshold".
    max_iter : int, optional
        Hard iteration cap; defaults to n_samples.

    Attributes
    ----------
    coef_ : slope-function coefficients in the kernel eigenbasis.
    dual_coef_ : representer coefficients (length n_samples).
    m_star_ : iterations performed.
    residual_trace_ : residual norm per iteration.
    stop_reason_ : why iteration stopped.
    """

    def __init__(self, kernel_eigenvalues=None, stopping="theorem", tau=1.0,
                 alpha=1.0, s=0.5, n_iter=None, omega=None, max_iter=None):
        self.kernel_eigenvalues = kernel_eigenvalues
        self.stopping = stopping
        self.tau = tau
        self.alpha = alpha
        self.s = s
        self.n_iter = n_iter
        self.omega = omega
        self.max_iter = max_iter

    def _stopping_rule(self):
        if self.stopping == "theorem":
            return TheoremSchedule(self.tau, self.alpha, self.s)
        if self.stopping == "fixed":
            if self.n_iter is None:
                raise ConfigError("stopping='fixed' requires n_iter")
            return FixedIterations(self.n_iter)
        if self.stopping == "threshold":
            if self.omega is None:
                raise ConfigError("stopping='threshold' requires omega")
            return Threshold(self.omega)
        raise ConfigError(f"unknown stopping mode: {self.stopping!r}")

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if self.kernel_eigenvalues is None:
            t = np.ones(X.shape[1])
        else:
            t = check_array(self.kernel_eigenvalues, ensure_2d=False, dtype=float)
            if t.shape != (X.shape[1],):
                raise ValueError(
                    "kernel_eigenvalues length must equal the number of features"
                )
        K = gram_spectral(X, t)
        budget = IterationBudget(m_max=self.max_iter)
        result = cg_fit(K, y, self._stopping_rule(), budget)
        self.kernel_eigenvalues_ = t
        self.dual_coef_ = result.coeffs
        self.coef_ = predict_beta(X, t, result.coeffs)
        self.m_star_ = result.m_star
        self.residual_trace_ = result.trace
        self.stop_reason_ = result.stop_reason
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("X has a different number of features than at fit time")
        return X @ self.coef_
