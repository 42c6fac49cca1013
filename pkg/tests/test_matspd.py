from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from opineq.errors import DomainError, IllConditionedError
from opineq.matspd import (
    GeodesicPath,
    arithmetic_mean,
    block_diag,
    check_hermitian,
    frac_power,
    geometric_mean,
    harmonic_mean,
    loewner_geq,
    random_hpd,
    random_unit_vector,
    random_unitary,
    scalar_geq,
)

from conftest import opnorm

seeds = st.integers(0, 2**32 - 1)


def _scipy_gmean(A, B, s):
    # independent route: Schur-based fractional powers from scipy
    h = sla.fractional_matrix_power(A, 0.5)
    hi = np.linalg.inv(h)
    return h @ sla.fractional_matrix_power(hi @ B @ hi, s) @ h


# ---- frac_power ------------------------------------------------------------

def test_frac_power_identity_cases(rng):
    A = random_hpd(4, 1e3, rng)
    assert np.array_equal(frac_power(A, 1), A)
    assert np.array_equal(frac_power(A, 0), np.eye(4))


def test_frac_power_diagonal():
    np.testing.assert_allclose(frac_power(np.diag([4.0, 9.0]), 0.5), np.diag([2.0, 3.0]), atol=1e-15)


@pytest.mark.parametrize("s", [-2.0, -0.5, 0.3, 1.7])
def test_frac_power_matches_scipy(rng, s):
    A = random_hpd(5, 1e3, rng)
    np.testing.assert_allclose(frac_power(A, s), sla.fractional_matrix_power(A, s),
                               atol=1e-10 * opnorm(frac_power(A, s)))


def test_frac_power_inverse_pair(rng):
    for _ in range(20):
        A = random_hpd(6, 1e4, rng)
        s = rng.uniform(-1, 1)
        np.testing.assert_allclose(frac_power(A, s) @ frac_power(A, -s), np.eye(6), atol=1e-10)


def test_frac_power_rejects_singular():
    with pytest.raises(IllConditionedError):
        frac_power(np.diag([1.0, 0.0]), 0.5)
    with pytest.raises(IllConditionedError):
        frac_power(np.diag([1.0, 1e-15]), 0.5)


def test_check_hermitian_rejects():
    with pytest.raises(DomainError):
        check_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        check_hermitian(np.ones((2, 3)))
    with pytest.raises(DomainError):
        check_hermitian(np.eye(65))
    with pytest.raises(DomainError):
        check_hermitian(np.array([[np.nan]]))


@settings(max_examples=50, deadline=None)
@given(seeds, st.floats(-2, 2), st.floats(-2, 2))
def test_power_composition(seed, p, q):
    A = random_hpd(4, 1e2, seed)
    lhs = frac_power(frac_power(A, p), q)
    rhs = frac_power(A, p * q)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * (opnorm(lhs) + opnorm(rhs))


# ---- means -----------------------------------------------------------------

def test_geometric_mean_trivial(rng):
    A, B = random_hpd(3, 1e3, rng), random_hpd(3, 1e3, rng)
    for s in (-0.5, 0.2, 0.5, 1.3):
        np.testing.assert_allclose(geometric_mean(A, A, s), A, atol=1e-12 * opnorm(A))
    assert np.array_equal(geometric_mean(A, B, 0), A)
    assert np.array_equal(geometric_mean(A, B, 1), B)


def test_geometric_mean_diagonal_example():
    G = geometric_mean(np.diag([1.0, 4.0]), np.diag([9.0, 1.0]), 0.5)
    np.testing.assert_allclose(G, np.diag([3.0, 2.0]), atol=1e-14)


@pytest.mark.parametrize("s", [-0.75, 0.25, 0.6, 1.5])
def test_geometric_mean_matches_scipy(rng, s):
    A, B = random_hpd(5, 1e3, rng), random_hpd(5, 1e3, rng)
    G = geometric_mean(A, B, s)
    np.testing.assert_allclose(G, _scipy_gmean(A, B, s), atol=1e-9 * opnorm(G))


def test_geodesic_path_reuse_matches_fresh(rng):
    A, B = random_hpd(4, 1e4, rng), random_hpd(4, 1e4, rng)
    path = GeodesicPath(A, B)
    for s in np.linspace(-1, 2, 7):
        np.testing.assert_allclose(path(s), geometric_mean(A, B, s), atol=1e-12 * opnorm(path(s)))


def test_means_of_equal_matrices(rng):
    A = random_hpd(3, 1e3, rng)
    np.testing.assert_allclose(arithmetic_mean(A, A, 0.3), A)
    np.testing.assert_allclose(harmonic_mean(A, A, 0.3), A, atol=1e-12 * opnorm(A))


def test_means_diagonal_example():
    A, B = np.eye(2), 3 * np.eye(2)
    np.testing.assert_allclose(arithmetic_mean(A, B, 0.5), 2 * np.eye(2))
    np.testing.assert_allclose(harmonic_mean(A, B, 0.5), 1.5 * np.eye(2), atol=1e-15)


def test_means_dimension_mismatch():
    with pytest.raises(DomainError):
        arithmetic_mean(np.eye(2), np.eye(3))
    with pytest.raises(DomainError):
        GeodesicPath(np.eye(2), np.eye(3))


def test_harmonic_geometric_arithmetic_chain(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        A, B = random_hpd(n, 1e4, rng), random_hpd(n, 1e4, rng)
        t = rng.uniform()
        H, G, M = harmonic_mean(A, B, t), geometric_mean(A, B, t), arithmetic_mean(A, B, t)
        assert loewner_geq(G, H).passed
        assert loewner_geq(M, G).passed


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 6), st.floats(0, 1))
def test_commutative_reduction(seed, n, t):
    rng = np.random.default_rng(seed)
    a, b = np.exp(rng.uniform(-3, 3, n)), np.exp(rng.uniform(-3, 3, n))
    A, B = np.diag(a), np.diag(b)
    np.testing.assert_allclose(np.diag(geometric_mean(A, B, t)).real, a ** (1 - t) * b**t, rtol=1e-12)
    np.testing.assert_allclose(np.diag(harmonic_mean(A, B, t)).real,
                               1 / ((1 - t) / a + t / b), rtol=1e-12)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 6), st.floats(0, 1))
def test_congruence_invariance(seed, n, t):
    rng = np.random.default_rng(seed)
    A, B = random_hpd(n, 1e3, rng), random_hpd(n, 1e3, rng)
    X = random_unitary(n, rng) @ np.diag(np.exp(rng.uniform(-1, 1, n)))
    lhs = X.conj().T @ geometric_mean(A, B, t) @ X
    rhs = geometric_mean(X.conj().T @ A @ X, X.conj().T @ B @ X, t)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * (opnorm(lhs) + opnorm(rhs))


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 6))
def test_half_mean_symmetry(seed, n):
    A, B = random_hpd(n, 1e4, seed), random_hpd(n, 1e4, seed + 1)
    lhs, rhs = geometric_mean(A, B, 0.5), geometric_mean(B, A, 0.5)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * (opnorm(lhs) + opnorm(rhs))


# ---- Loewner certification -------------------------------------------------

def test_loewner_equal(rng):
    A = random_hpd(3, 1e3, rng)
    rep = loewner_geq(A, A)
    assert rep.slack == 0 and rep.passed


def test_loewner_counterexample():
    # slack -1 against scale ||X|| + ||Y|| = 5: fails exactly when tol < 1/5
    X, Y = np.diag([2.0, 2.0]), np.diag([1.0, 3.0])
    rep = loewner_geq(X, Y, 0.19)
    assert rep.slack == pytest.approx(-1.0)
    assert rep.scale == pytest.approx(5.0)
    assert not rep.passed
    assert loewner_geq(X, Y, 0.21).passed


def test_loewner_shift(rng):
    Y = random_hpd(4, 1e2, rng)
    rep = loewner_geq(Y + 1e-6 * np.eye(4), Y)
    assert rep.slack == pytest.approx(1e-6, rel=1e-6)
    assert rep.passed


def test_loewner_scale_and_report_fields():
    rep = loewner_geq(np.diag([3.0, 1.0]), np.eye(2), inequality_id="x", t=0.5)
    assert rep.scale == pytest.approx(4.0)
    assert rep.relative_slack == pytest.approx(0.0)
    d = rep.to_dict()
    assert d["inequality_id"] == "x" and d["dim"] == 2 and d["t"] == 0.5
    assert isinstance(d["passed"], bool)


def test_loewner_mismatch():
    with pytest.raises(DomainError):
        loewner_geq(np.eye(2), np.eye(3))


def test_scalar_geq_scale_override():
    rep = scalar_geq(0.0, 1e-12, 1e-9, scale=10.0)
    assert rep.passed and rep.slack == -1e-12
    assert not scalar_geq(0.0, 1e-12, 1e-9).passed


# ---- generators ------------------------------------------------------------

def test_random_hpd_deterministic():
    assert np.array_equal(random_hpd(5, 1e3, 7), random_hpd(5, 1e3, 7))
    assert not np.array_equal(random_hpd(5, 1e3, 7), random_hpd(5, 1e3, 8))


def test_random_hpd_one_dimensional():
    M = random_hpd(1, 1e4, 3)
    assert M.shape == (1, 1) and M[0, 0].real > 0


def test_random_hpd_unit_condition():
    M = random_hpd(4, 1.0, 5)
    np.testing.assert_allclose(M, M[0, 0].real * np.eye(4), atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 12), st.floats(1, 1e6))
def test_random_hpd_condition_cap(seed, n, cap):
    w = np.linalg.eigvalsh(random_hpd(n, cap, seed))
    assert w[0] > 0
    assert w[-1] / w[0] <= cap * (1 + 1e-9)


def test_random_hpd_real_flag():
    assert np.isrealobj(random_hpd(3, 10, 1, real=True))
    assert np.iscomplexobj(random_hpd(3, 10, 1))


def test_random_hpd_rejects():
    with pytest.raises(DomainError):
        random_hpd(0)
    with pytest.raises(DomainError):
        random_hpd(3, 0.5)


def test_random_unitary_and_vector(rng):
    U = random_unitary(5, rng)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(5), atol=1e-13)
    assert np.linalg.norm(random_unit_vector(7, rng)) == pytest.approx(1.0, abs=1e-15)


def test_block_diag():
    M = block_diag(np.eye(2), 3 * np.ones((1, 1)))
    np.testing.assert_array_equal(M, np.diag([1.0, 1.0, 3.0]))
