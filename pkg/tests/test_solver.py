import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flrcg import (
    ConfigError,
    FixedIterations,
    IterationBudget,
    NumericalError,
    RngSpec,
    TheoremSchedule,
    Threshold,
    build_model,
    cg_fit,
    gram_spectral,
    omega_threshold,
    oracle_fit,
    predict_beta,
    residual_hnorm,
    sample_dataset,
)


def random_instance(seed, n_max=8, J=12):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    X = rng.standard_normal((n, J))
    t = rng.uniform(0.1, 1.0, J)
    K = gram_spectral(X, t)
    y = rng.standard_normal(n)
    return X, t, K, y


def test_omega_threshold_value():
    assert omega_threshold(1.0, 0.5, 0.5, 1000) == pytest.approx(
        3.0 * 1000.0 ** -0.6
    )
    assert omega_threshold(0.7, 1.0, 0.5, 1) == pytest.approx(2.7)


@pytest.mark.parametrize("kwargs", [
    dict(tau=0.0, alpha=1.0, s=0.5, n=10),
    dict(tau=1.0, alpha=-1.0, s=0.5, n=10),
    dict(tau=1.0, alpha=1.0, s=1.0, n=10),
    dict(tau=1.0, alpha=1.0, s=0.5, n=0),
])
def test_omega_threshold_rejects_bad_parameters(kwargs):
    with pytest.raises(ConfigError):
        omega_threshold(**kwargs)


def test_cg_fit_scalar_system():
    res = cg_fit(np.array([[2.0]]), np.array([3.0]), FixedIterations(1))
    assert res.coeffs[0] == pytest.approx(1.5)
    assert res.trace[0] == pytest.approx(np.sqrt(18.0))
    assert res.trace[1] == pytest.approx(0.0, abs=1e-14)
    assert res.m_star == 1


def test_cg_fit_diagonal_exact_solve():
    res = cg_fit(np.diag([1.0, 2.0]), np.array([1.0, 1.0]), FixedIterations(2))
    assert np.allclose(res.coeffs, [1.0, 0.5])
    assert res.trace[-1] <= 1e-12


def test_cg_fit_diagonal_one_step():
    res = cg_fit(np.diag([1.0, 2.0]), np.array([1.0, 1.0]), FixedIterations(1))
    assert np.allclose(res.coeffs, [5.0 / 9.0, 5.0 / 9.0], atol=1e-10)
    oracle = oracle_fit(np.diag([1.0, 2.0]), np.array([1.0, 1.0]), 1)
    assert np.allclose(res.coeffs, oracle, atol=1e-10)


def test_residual_hnorm_cases():
    K = np.array([[2.0]])
    y = np.array([3.0])
    assert residual_hnorm(K, y, np.zeros(1)) == pytest.approx(np.sqrt(18.0))
    assert residual_hnorm(K, y, np.array([1.5])) <= 1e-12


def test_oracle_full_iterations_solves_system():
    _, _, K, y = random_instance(0, n_max=8)
    n = y.size
    c = oracle_fit(K, y, n)
    exact = np.linalg.solve(K, y)
    assert np.allclose(c, exact, rtol=1e-10, atol=1e-10 * np.abs(exact).max())


def test_oracle_scalar():
    assert oracle_fit(np.array([[2.0]]), np.array([3.0]), 1)[0] == pytest.approx(1.5)


def test_oracle_rejects_large_systems():
    K = np.eye(40)
    with pytest.raises(ValueError):
        oracle_fit(K, np.ones(40), 2)


@pytest.mark.parametrize("seed", range(25))
def test_cg_matches_oracle(seed):
    X, t, K, y = random_instance(seed)
    n = y.size
    r0 = residual_hnorm(K, y, np.zeros(n))
    for m in range(0, min(5, n) + 1):
        res = cg_fit(K, y, FixedIterations(m))
        c_oracle = oracle_fit(K, y, m)
        r_cg = residual_hnorm(K, y, res.coeffs)
        r_or = residual_hnorm(K, y, c_oracle)
        assert abs(r_cg - r_or) <= 1e-8 * max(r0, 1e-30)


@pytest.mark.parametrize("seed", range(10))
def test_krylov_optimality_against_random_polynomials(seed):
    X, t, K, y = random_instance(seed, n_max=8)
    n = y.size
    rng = np.random.default_rng(1000 + seed)
    m = int(rng.integers(1, min(5, n) + 1))
    res = cg_fit(K, y, FixedIterations(m))
    r_cg = residual_hnorm(K, y, res.coeffs)
    # Krylov basis vectors (K/n)^l (y/n)
    V = np.empty((n, m))
    V[:, 0] = y / n
    for l in range(1, m):
        V[:, l] = K @ V[:, l - 1] / n
    for _ in range(100):
        c_rand = V @ rng.standard_normal(m)
        assert r_cg <= residual_hnorm(K, y, c_rand) + 1e-12


@pytest.mark.parametrize("seed", range(100))
def test_residual_trace_monotone(seed):
    _, _, K, y = random_instance(seed, n_max=8)
    res = cg_fit(K, y, FixedIterations(y.size))
    assert np.all(np.diff(res.trace) <= 0.0)
    assert np.all(res.trace >= 0.0)
    assert res.m_star == res.trace.size - 1


def test_exhaustion_full_rank():
    _, _, K, y = random_instance(3, n_max=6)
    res = cg_fit(K, y, FixedIterations(y.size))
    assert res.trace[-1] <= 1e-10 * res.trace[0]


def test_residual_identity_spectral_path():
    m = build_model(0.5, 1.0, J=15)
    ds = sample_dataset(m, 10, RngSpec(77))
    K = gram_spectral(ds.Xcoefs, m.t)
    for k in range(0, 6):
        res = cg_fit(K, ds.y, FixedIterations(k))
        gram_form = residual_hnorm(K, ds.y, res.coeffs)
        # coefficient-space form in the J-dimensional eigenbasis
        beta_hat = predict_beta(ds.Xcoefs, m.t, res.coeffs)
        vec = np.sqrt(m.t) * (ds.Xcoefs.T @ (ds.Xcoefs @ beta_hat - ds.y)) / ds.n
        coef_form = np.linalg.norm(vec)
        assert abs(gram_form - coef_form) <= 1e-8 * res.trace[0]


@given(gamma=st.floats(min_value=1e-3, max_value=1e3))
@settings(max_examples=25, deadline=None)
def test_response_equivariance(gamma):
    _, _, K, y = random_instance(11, n_max=6)
    base = cg_fit(K, y, FixedIterations(3)).coeffs
    scaled = cg_fit(K, gamma * y, FixedIterations(3)).coeffs
    assert np.allclose(scaled, gamma * base, rtol=1e-12,
                       atol=1e-12 * np.abs(gamma * base).max())


@pytest.mark.parametrize("gamma", [0.1, 10.0])
def test_kernel_scale_invariance_of_estimate(gamma):
    X, t, K, y = random_instance(13, n_max=6)
    m = 3
    c_base = cg_fit(K, y, FixedIterations(m)).coeffs
    c_scaled = cg_fit(gamma * K, y, FixedIterations(m)).coeffs
    b_base = predict_beta(X, t, c_base)
    b_scaled = predict_beta(X, gamma * t, c_scaled)
    assert np.max(np.abs(b_base - b_scaled)) <= 1e-8 * max(
        np.max(np.abs(b_base)), 1e-30
    )


def test_theorem_schedule_stops_at_first_crossing():
    m = build_model(0.5, 1.0, J=40)
    ds = sample_dataset(m, 64, RngSpec(5))
    K = gram_spectral(ds.Xcoefs, m.t)
    rule = TheoremSchedule(1.0, 1.0, 0.5)
    res = cg_fit(K, ds.y, rule)
    omega = omega_threshold(1.0, 1.0, 0.5, 64)
    if res.stop_reason == "threshold-met":
        assert res.trace[res.m_star] <= omega
        assert np.all(res.trace[: res.m_star] > omega)
    else:
        assert np.all(res.trace > omega)


def test_threshold_met_before_first_iteration():
    res = cg_fit(np.array([[2.0]]), np.array([3.0]), Threshold(100.0))
    assert res.m_star == 0
    assert res.stop_reason == "threshold-met"


def test_fixed_iterations_zero():
    res = cg_fit(np.array([[2.0]]), np.array([3.0]), FixedIterations(0))
    assert res.m_star == 0
    assert np.all(res.coeffs == 0.0)


def test_budget_caps_threshold_run():
    _, _, K, y = random_instance(17, n_max=8)
    res = cg_fit(K, y, Threshold(1e-300), IterationBudget(m_max=2))
    assert res.m_star <= 2
    assert res.stop_reason in ("max-iterations", "krylov-exhausted")


def test_rank_deficient_system_exhausts():
    # K has rank 1; the Krylov space collapses after one step
    x = np.array([[1.0, 2.0]])
    K = gram_spectral(np.vstack([x, x]), np.array([1.0, 1.0]))
    y = np.array([1.0, 1.0])
    res = cg_fit(K, y, FixedIterations(2))
    assert res.stop_reason == "krylov-exhausted"
    assert res.trace[-1] <= 1e-12 * res.trace[0]


def test_cg_rejects_asymmetric_matrix():
    with pytest.raises(ValueError):
        cg_fit(np.array([[1.0, 2.0], [0.0, 1.0]]), np.ones(2), FixedIterations(1))


def test_cg_raises_on_nonfinite_input():
    with pytest.raises(NumericalError):
        cg_fit(np.array([[np.nan]]), np.array([1.0]), FixedIterations(1))


def test_cg_detects_negative_definite():
    with pytest.raises(NumericalError):
        cg_fit(np.array([[-2.0]]), np.array([3.0]), FixedIterations(1))


def test_predict_beta_cases():
    beta = predict_beta(np.array([[1.0, 0.0]]), np.array([0.5, 0.25]),
                        np.array([2.0]))
    assert np.allclose(beta, [1.0, 0.0])
    assert np.all(
        predict_beta(np.array([[1.0, 0.0]]), np.array([0.5, 0.25]),
                     np.zeros(1)) == 0.0
    )
    two = predict_beta(np.array([[1.0, 0.0], [1.0, 0.0]]),
                       np.array([0.5, 0.25]), np.array([0.5, 0.5]))
    one = predict_beta(np.array([[1.0, 0.0]]), np.array([0.5, 0.25]),
                       np.array([1.0]))
    assert np.allclose(two, one)


def test_stopping_rule_validation():
    with pytest.raises(ConfigError):
        FixedIterations(-1)
    with pytest.raises(ConfigError):
        Threshold(0.0)
    with pytest.raises(ConfigError):
        TheoremSchedule(tau=1.0, alpha=1.0, s=2.0)
    with pytest.raises(ConfigError):
        IterationBudget(m_max=0)
