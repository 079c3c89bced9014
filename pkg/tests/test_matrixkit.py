import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isac_sic_lab import kernels
from isac_sic_lab.errors import NumericError, StructuralError
from isac_sic_lab.matrixkit import (
    correlated_columns,
    hermitian_eig,
    logdet_hpd,
    psd_sqrt,
    sample_complex_gaussian,
)


def random_hermitian(n, rng, scale=1.0):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (X + X.conj().T) / 2


def random_hpd(n, rng):
    X = rng.standard_normal((n, n + 2)) + 1j * rng.standard_normal((n, n + 2))
    return X @ X.conj().T / n + 0.1 * np.eye(n)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_eig_reconstructs_and_is_unitary(n, seed):
    A = random_hermitian(n, np.random.default_rng(seed))
    e = hermitian_eig(A)
    assert np.all(np.diff(e.eigenvalues) <= 0)
    np.testing.assert_allclose(e.reconstruct(), A, atol=1e-12 * max(1, np.abs(A).max()))
    np.testing.assert_allclose(e.U.conj().T @ e.U, np.eye(n), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_eigenvalues_match_characteristic_polynomial_roots(n, rng):
    # independent oracle: roots of det(xI - A) via the companion matrix
    A = random_hermitian(n, rng)
    roots = np.sort(np.roots(np.poly(A)).real)[::-1]
    np.testing.assert_allclose(hermitian_eig(A).eigenvalues, roots, atol=1e-8)


def test_eigenvalues_match_lapack(rng):
    for n in range(1, 9):
        A = random_hermitian(n, rng, scale=10.0)
        np.testing.assert_allclose(
            hermitian_eig(A).eigenvalues, np.linalg.eigvalsh(A)[::-1], atol=1e-11
        )


def test_diagonal_ties_keep_order():
    e = hermitian_eig(np.diag([2.0, 5.0, 2.0]))
    np.testing.assert_array_equal(e.eigenvalues, [5.0, 2.0, 2.0])
    np.testing.assert_allclose(np.abs(e.U[:, 1:]), np.eye(3)[:, [0, 2]])


def test_eig_rejects_bad_input():
    with pytest.raises(StructuralError):
        hermitian_eig(np.ones((2, 3)))
    with pytest.raises(StructuralError, match="Hermitian"):
        hermitian_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(StructuralError):
        hermitian_eig(np.array([[np.nan, 0], [0, 1.0]]))


def test_jacobi_reports_non_convergence():
    A = np.array([[1.0, 0.5], [0.5, 2.0]], dtype=complex)
    assert kernels.jacobi_eigh(A, max_sweeps=0)[2] == -1


def test_logdet_matches_eigenvalues(rng):
    for n in (1, 2, 3, 5, 8):
        A = random_hpd(n, rng)
        ref = np.sum(np.log2(np.linalg.eigvalsh(A)))
        assert logdet_hpd(A) == pytest.approx(ref, abs=1e-10)


def test_logdet_inverse_and_sylvester(rng):
    A = random_hpd(4, rng)
    assert logdet_hpd(np.linalg.inv(A)) == pytest.approx(-logdet_hpd(A), abs=1e-10)
    H = sample_complex_gaussian(5, 3, rng)
    p = 7.0
    lhs = logdet_hpd(np.eye(5) + p * H @ H.conj().T)
    rhs = logdet_hpd(np.eye(3) + p * H.conj().T @ H)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_logdet_reports_failing_pivot():
    A = np.diag([1.0, 2.0, -1.0])
    with pytest.raises(NumericError, match="pivot 2"):
        logdet_hpd(A)


def test_complex_gaussian_moments():
    Z = sample_complex_gaussian(4, 200_000, np.random.default_rng(1))
    C = Z @ Z.conj().T / Z.shape[1]
    P = Z @ Z.T / Z.shape[1]  # pseudo-covariance of a circular vector is zero
    assert np.linalg.norm(C - np.eye(4)) < 0.02
    assert np.linalg.norm(P) < 0.02


def test_sampling_is_deterministic():
    a = sample_complex_gaussian(3, 4, np.random.default_rng(9))
    b = sample_complex_gaussian(3, 4, np.random.default_rng(9))
    np.testing.assert_array_equal(a, b)
    with pytest.raises(StructuralError):
        sample_complex_gaussian(0, 4, np.random.default_rng(9))


def test_psd_sqrt(rng):
    R = random_hpd(3, rng)
    S = psd_sqrt(R)
    np.testing.assert_allclose(S @ S, R, atol=1e-12)
    np.testing.assert_allclose(S, S.conj().T, atol=1e-14)
    # rank-deficient PSD is fine
    v = np.array([1.0, 1j, 0.0])
    P = np.outer(v, v.conj())
    np.testing.assert_allclose(psd_sqrt(P) @ psd_sqrt(P), P, atol=1e-7)
    with pytest.raises(StructuralError, match="semi-definite"):
        psd_sqrt(np.diag([1.0, -0.1]))


def test_correlated_columns_covariance(rng):
    R = random_hpd(3, rng)
    X = correlated_columns(R, 200_000, np.random.default_rng(2))
    C = X @ X.conj().T / X.shape[1]
    assert np.linalg.norm(C - R) / np.linalg.norm(R) < 0.02
