"""Small dense complex linear algebra: eigendecomposition, log-det, sampling."""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NumericError, StructuralError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-12


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues (descending) and unitary eigenvector matrix (columns).

    ``A == U @ diag(eigenvalues) @ U^H``.
    """

    eigenvalues: np.ndarray
    U: np.ndarray

    def reconstruct(self):
        return (self.U * self.eigenvalues) @ self.U.conj().T


def _check_hermitian(A, name="matrix"):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise StructuralError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise StructuralError(f"{name} has non-finite entries")
    asym = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    if asym > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(A))) if A.size else 1.0):
        raise StructuralError(f"{name} is not Hermitian (max asymmetry {asym:.3g})")
    return np.asarray(A, dtype=np.complex128)


def hermitian_eig(A):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotation.

    Parameters
    ----------
    A : (n, n) array_like
        Hermitian within ``1e-12`` (absolute, scaled by the largest entry).

    Returns
    -------
    HermitianEig
        Eigenvalues sorted descending; ties keep their diagonal order.

    Raises
    ------
    StructuralError
        If `A` is not square or not Hermitian.
    NumericError
        If the rotations fail to converge.
    """
    A = _check_hermitian(A)
    w, V, sweeps = kernels.jacobi_eigh(A)
    if sweeps < 0:
        raise NumericError("Jacobi eigen-solver did not converge")
    order = np.argsort(-w, kind="stable")
    return HermitianEig(eigenvalues=np.asarray(w)[order], U=np.asarray(V)[:, order])


def logdet_hpd(A):
    """Base-2 log-determinant of a Hermitian positive-definite matrix.

    Computed as ``2 * sum(log2(diag(chol(A))))``.
    """
    A = _check_hermitian(A)
    val, pivot = kernels.cholesky_logdet2(A)
    if pivot >= 0:
        raise NumericError(
            f"matrix is not positive definite: Cholesky failed at pivot {pivot}"
        )
    return float(val)


def sample_complex_gaussian(rows, cols, rng):
    """``rows x cols`` i.i.d. CN(0, 1) entries (real and imaginary parts N(0, 1/2))."""
    if rows < 1 or cols < 1:
        raise StructuralError(f"dimensions must be >= 1, got ({rows}, {cols})")
    x = rng.standard_normal((rows, cols, 2))
    return (x[..., 0] + 1j * x[..., 1]) * np.sqrt(0.5)


def psd_sqrt(R):
    """Hermitian square root of a PSD matrix.

    Eigenvalues in ``[-1e-12, 0)`` are clamped to zero; anything more
    negative is rejected as indefinite.
    """
    eig = hermitian_eig(R)
    lam = eig.eigenvalues
    if lam.size and lam.min() < -PSD_TOL:
        raise StructuralError(
            f"matrix is not positive semi-definite (eigenvalue {lam.min():.3g})"
        )
    root = np.sqrt(np.clip(lam, 0.0, None))
    return (eig.U * root) @ eig.U.conj().T


def correlated_columns(R, cols, rng):
    """``cols`` independent CN(0, R) columns, as ``R^{1/2} @ Z``."""
    R = np.asarray(R, dtype=np.complex128)
    Z = sample_complex_gaussian(R.shape[0], cols, rng)
    return psd_sqrt(R) @ Z
