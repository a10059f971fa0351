"""Simulation ground truth and i.i.d. sampling for the functional linear model.

The kernel operator and the covariance operator are built to commute: both are
diagonal in the cosine basis, with eigenvalues t_j = j^(-theta/s) and
c_j = j^(-(1-theta)/s). Their product xi_j = t_j c_j = j^(-1/s) realizes the
eigenvalue decay exactly, so the decay exponent s and the source exponent alpha
are exact simulation knobs rather than asymptotic statements.

All randomness flows through :class:`RngSpec`, a (seed, stream) pair mapped to
a numpy ``SeedSequence``; identical specs reproduce identical draws, and
sub-streams derived via :meth:`RngSpec.child` are independent, which makes
parallel sampling order-independent. Within a dataset, covariate i draws from
sub-stream (0, i) and the noise vector from sub-stream (1,); this layout is
fixed per release.
"""

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError


@dataclass(frozen=True)
class RngSpec:
    """Deterministic random stream identified by (master seed, stream id path)."""

    seed: int
    stream: tuple = ()

    def child(self, *ids):
        """Derive an independent sub-stream; injective in ``ids``."""
        return RngSpec(self.seed, self.stream + tuple(int(i) for i in ids))

    def generator(self):
        return np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=self.stream)
        )


@dataclass(frozen=True)
class SpectralModel:
    """Simulation truth: spectra of the kernel and covariance operators plus source.

    ``t`` and ``c`` are the eigenvalues of the kernel operator T and the
    covariance C in the shared cosine basis; ``g`` is the source vector so the
    true slope is beta*_j = sqrt(t_j) (t_j c_j)^alpha g_j.
    """

    s: float
    alpha: float
    theta: float
    J: int
    t: np.ndarray
    c: np.ndarray
    g: np.ndarray
    sigma: float

    def __post_init__(self):
        for name in ("t", "c", "g"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.J,):
                raise ValueError(f"{name} must have length J={self.J}")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def xi(self):
        """Eigenvalues of T^(1/2) C T^(1/2) in the shared basis."""
        return self.t * self.c


@dataclass(frozen=True)
class Dataset:
    """n functional covariates (basis coefficients), responses, and ground truth."""

    n: int
    Xcoefs: np.ndarray
    y: np.ndarray
    beta_star: np.ndarray | None
    seed: int

    def __post_init__(self):
        X = np.asarray(self.Xcoefs, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or X.shape[0] != self.n or y.shape != (self.n,):
            raise ValueError("inconsistent dataset dimensions")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset entries must be finite")
        object.__setattr__(self, "Xcoefs", X)
        object.__setattr__(self, "y", y)
        if self.beta_star is not None:
            b = np.asarray(self.beta_star, dtype=float)
            if b.shape != (X.shape[1],):
                raise ValueError("beta_star length must match the number of columns")
            object.__setattr__(self, "beta_star", b)


def build_model(s, alpha, theta=0.5, J=200, omega=1.0, sigma=0.5):
    """Construct a SpectralModel with t_j = j^(-theta/s), c_j = j^(-(1-theta)/s), g_j = j^(-omega).

    Raises ConfigError naming the offending parameter when one is out of range.
    """
    if not 0.0 < s < 1.0:
        raise ConfigError(f"s must lie in (0, 1), got {s}")
    if alpha <= 0.0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    if not 0.0 < theta < 1.0:
        raise ConfigError(f"theta must lie in (0, 1), got {theta}")
    if J < 1:
        raise ConfigError(f"J must be at least 1, got {J}")
    if omega <= 0.5:
        raise ConfigError(f"omega must exceed 1/2, got {omega}")
    if sigma < 0.0:
        raise ConfigError(f"sigma must be nonnegative, got {sigma}")
    j = np.arange(1, J + 1, dtype=float)
    t = j ** (-theta / s)
    c = j ** (-(1.0 - theta) / s)
    g = j ** (-omega)
    return SpectralModel(s=float(s), alpha=float(alpha), theta=float(theta),
                         J=int(J), t=t, c=c, g=g, sigma=float(sigma))


def slope_from_source(model):
    """True slope coefficients beta*_j = sqrt(t_j) (t_j c_j)^alpha g_j."""
    return np.sqrt(model.t) * model.xi ** model.alpha * model.g


def sample_X(model, rng):
    """One covariate draw: x_j = sqrt(c_j) Z_j with Z_j i.i.d. standard normal."""
    z = rng.generator().standard_normal(model.J)
    return np.sqrt(model.c) * z


def sample_dataset(model, n, rng):
    """Sample n i.i.d. pairs (X_i, Y_i) with Y_i = <X_i, beta*> + sigma eps_i.

    The inner product is taken in coefficient space, so sigma = 0 gives exact
    responses. Covariate i uses sub-stream (0, i); the noise vector uses (1,).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    X = np.empty((n, model.J))
    for i in range(n):
        X[i] = sample_X(model, rng.child(0, i))
    beta_star = slope_from_source(model)
    y = X @ beta_star
    if model.sigma > 0.0:
        y = y + model.sigma * rng.child(1).generator().standard_normal(n)
    return Dataset(n=n, Xcoefs=X, y=y, beta_star=beta_star, seed=rng.seed)


def fourth_moment_ratio(model, f, M, rng, chunk=8192):
    """Monte Carlo estimate of E<X,f>^4 / (E<X,f>^2)^2 from M draws of X.

    For the Gaussian simulator the exact value is 3. Raises on directions f
    with E<X,f>^2 = 0. Single-draw estimates are returned as-is (high variance).
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (model.J,):
        raise ValueError("direction f must have length J")
    if M < 1:
        raise ValueError("M must be at least 1")
    if float(model.c @ f**2) == 0.0:
        raise ValueError("degenerate direction: E<X,f>^2 = 0")
    gen = rng.generator()
    scale = np.sqrt(model.c) * f
    m2 = 0.0
    m4 = 0.0
    done = 0
    while done < M:
        k = min(chunk, M - done)
        proj = gen.standard_normal((k, model.J)) @ scale
        m2 += float(np.sum(proj**2))
        m4 += float(np.sum(proj**4))
        done += k
    m2 /= M
    m4 /= M
    return m4 / m2**2


def dataset_to_json(dataset, model=None):
    """Documented JSON layout: {n, J, s, alpha, sigma, seed, Xcoefs, y, beta_star}.

    Xcoefs is flattened row-major. Model metadata fields are null when no
    model is supplied (externally provided data).
    """
    J = dataset.Xcoefs.shape[1]
    return {
        "n": dataset.n,
        "J": J,
        "s": model.s if model is not None else None,
        "alpha": model.alpha if model is not None else None,
        "sigma": model.sigma if model is not None else None,
        "seed": dataset.seed,
        "Xcoefs": dataset.Xcoefs.ravel().tolist(),
        "y": dataset.y.tolist(),
        "beta_star": None if dataset.beta_star is None else dataset.beta_star.tolist(),
    }


def dataset_from_json(obj):
    n, J = int(obj["n"]), int(obj["J"])
    X = np.asarray(obj["Xcoefs"], dtype=float).reshape(n, J)
    beta = obj.get("beta_star")
    return Dataset(
        n=n,
        Xcoefs=X,
        y=np.asarray(obj["y"], dtype=float),
        beta_star=None if beta is None else np.asarray(beta, dtype=float),
        seed=int(obj["seed"]),
    )


def save_dataset(dataset, path, model=None):
    """Write the dataset JSON atomically (temp file + rename)."""
    payload = json.dumps(dataset_to_json(dataset, model), indent=1)
    atomic_write_text(path, payload)


def load_dataset(path):
    with open(path) as fh:
        return dataset_from_json(json.load(fh))


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` via a temp file and rename in one step."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
