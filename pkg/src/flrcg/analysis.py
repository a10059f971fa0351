"""Error metrics, diagnostics, the ridge baseline, and the Monte Carlo rate sweep.

The rate experiment samples datasets at increasing n, fits CG with the
early-stopping schedule, and regresses log median L2 error on log n. Only the
exponent is falsifiable (the theory's constants are unspecified), so the
probabilistic claim is checked through replication medians.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericalError
from .gram import gram_spectral
from .simulate import RngSpec, build_model, sample_dataset
from .solver import TheoremSchedule, cg_fit, omega_threshold, predict_beta


def l2_error(beta_hat, beta_star):
    """L2 estimation error sqrt(sum_j (bhat_j - b*_j)^2) (Parseval)."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta_star = np.asarray(beta_star, dtype=float)
    if beta_hat.shape != beta_star.shape:
        raise ValueError("coefficient vectors must have the same length")
    return float(np.linalg.norm(beta_hat - beta_star))


def effective_dimension(xi, lam):
    """Effective dimension sum_j xi_j / (xi_j + lambda)."""
    xi = np.asarray(xi, dtype=float)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if np.any(xi < 0):
        raise ValueError("eigenvalues must be nonnegative")
    return float(np.sum(xi / (xi + lam)))


def hs_distance_covariance(dataset, model):
    """Frobenius distance between the empirical covariance and diag(c).

    Computed in the J-dimensional coefficient truncation; scales as n^(-1/2).
    """
    X = dataset.Xcoefs
    if X.shape[1] != model.J:
        raise ValueError("dataset and model truncations differ")
    E = (X.T @ X) / dataset.n - np.diag(model.c)
    return float(np.linalg.norm(E, "fro"))


def tikhonov_fit(K, y, lam):
    """Ridge baseline: representer solution (K/n + lambda I)^(-1) (y/n)."""
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    n = y.size
    try:
        return np.linalg.solve(K / n + lam * np.eye(n), y / n)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"ridge solve failed: {exc}") from exc


def fit_loglog_slope(ns, errors):
    """Ordinary least squares of log(error) on log(n); returns (slope, intercept)."""
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if ns.shape != errors.shape or ns.size < 2:
        raise ValueError("need two sequences of equal length >= 2")
    if np.any(ns <= 0) or np.any(errors <= 0):
        raise ValueError("inputs must be positive for a log-log fit")
    slope, intercept = np.polyfit(np.log(ns), np.log(errors), 1)
    return float(slope), float(intercept)


@dataclass(frozen=True)
class RateConfig:
    """Model parameters and sweep layout for the rate experiment."""

    s: float = 0.5
    alpha: float = 1.0
    theta: float = 0.5
    J: int = 200
    omega: float = 1.0
    sigma: float = 0.5
    tau: float = 1.0
    n_grid: tuple = (128, 256, 512, 1024, 2048)
    replications: int = 50
    master_seed: int = 0

    def __post_init__(self):
        ns = tuple(int(n) for n in self.n_grid)
        if len(ns) < 1 or any(n < 8 for n in ns) or any(
            b <= a for a, b in zip(ns, ns[1:])
        ):
            raise ValueError("n_grid must be increasing with every n >= 8")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        object.__setattr__(self, "n_grid", ns)


@dataclass(frozen=True)
class CellRecord:
    """One (sample size, replication) cell of the rate sweep."""

    n: int
    rep: int
    m_star: int
    l2_error: float
    pred_error: float
    omega: float
    stop_reason: str
    seed: int


@dataclass(frozen=True)
class RateResult:
    """All cell records plus the fitted log-log slope of the median error."""

    records: tuple
    slope: float
    intercept: float
    median_l2_error: dict = field(default_factory=dict)
    median_m_star: dict = field(default_factory=dict)


def _run_cell(model, config, n_index, rep):
    n = config.n_grid[n_index]
    rng = RngSpec(config.master_seed, (n_index, rep))
    dataset = sample_dataset(model, n, rng)
    K = gram_spectral(dataset.Xcoefs, model.t)
    omega = omega_threshold(config.tau, config.alpha, config.s, n)
    try:
        fit = cg_fit(K, dataset.y, TheoremSchedule(config.tau, config.alpha, config.s))
        beta_hat = predict_beta(dataset.Xcoefs, model.t, fit.coeffs)
        diff = beta_hat - dataset.beta_star
        return CellRecord(
            n=n,
            rep=rep,
            m_star=fit.m_star,
            l2_error=float(np.linalg.norm(diff)),
            pred_error=float(np.sqrt(model.c @ diff**2)),
            omega=omega,
            stop_reason=fit.stop_reason,
            seed=config.master_seed,
        )
    except NumericalError as exc:
        return CellRecord(n=n, rep=rep, m_star=-1, l2_error=float("nan"),
                          pred_error=float("nan"), omega=omega,
                          stop_reason=f"solver-error:{exc.iteration}",
                          seed=config.master_seed)


def run_rate_experiment(config, threads=1):
    """Run the full (n, replication) sweep and fit the log-log error slope.

    Deterministic given the master seed: every cell draws from its own RNG
    stream keyed by (n index, replication), so serial and parallel runs agree
    bitwise. Solver failures are recorded per cell, not fatal to the sweep.
    """
    model = build_model(config.s, config.alpha, config.theta, config.J,
                        config.omega, config.sigma)
    cells = [(i, r) for i in range(len(config.n_grid))
             for r in range(config.replications)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda c: _run_cell(model, config, *c), cells))
    else:
        records = [_run_cell(model, config, i, r) for i, r in cells]
    records.sort(key=lambda rec: (rec.n, rec.rep))

    median_err = {}
    median_m = {}
    for n in config.n_grid:
        errs = [rec.l2_error for rec in records if rec.n == n]
        ms = [rec.m_star for rec in records if rec.n == n]
        median_err[n] = float(np.median(errs))
        median_m[n] = float(np.median(ms))
    if len(median_err) >= 2:
        slope, intercept = fit_loglog_slope(
            list(median_err.keys()), list(median_err.values())
        )
    else:
        slope, intercept = float("nan"), float("nan")
    return RateResult(records=tuple(records), slope=slope, intercept=intercept,
                      median_l2_error=median_err, median_m_star=median_m)
