"""Hot numeric kernels, each with a numba path and a pure-numpy path.

The public functions dispatch on :data:`isac_sic_lab._accel.USE_NUMBA` at
call time. Scalar kernels (Jacobi, Cholesky) are written once as plain
Python over numpy arrays; the numba path is the same source compiled.
Batch kernels have a separate vectorized numpy implementation.
"""
import math

import numpy as np

from . import _accel
from ._accel import njit

JACOBI_TOL = 1e-15
JACOBI_MAX_SWEEPS = 100


def _jacobi_eigh_py(a, tol, max_sweeps):
    # Cyclic complex Jacobi. Returns (diag, V, sweeps); sweeps == -1 means
    # no convergence. a == V diag(w) V^H on success.
    n = a.shape[0]
    A = a.astype(np.complex128).copy()
    V = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(A[i, j]) ** 2
    scale = math.sqrt(scale)
    w = np.empty(n)
    if scale == 0.0:
        for i in range(n):
            w[i] = 0.0
        return w, V, 0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += abs(A[p, q]) ** 2
        if math.sqrt(off) <= tol * scale:
            for i in range(n):
                w[i] = A[i, i].real
            return w, V, sweep
        if sweep == max_sweeps:
            break
        for p in range(n):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ph = np.conj(apq / mag)
                # W restricted to (p, q): [[c, s], [-s*ph, c*ph]]
                w_pp = c + 0j
                w_pq = s + 0j
                w_qp = -s * ph
                w_qq = c * ph
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = akp * w_pp + akq * w_qp
                    A[k, q] = akp * w_pq + akq * w_qq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = np.conj(w_pp) * apk + np.conj(w_qp) * aqk
                    A[q, k] = np.conj(w_pq) * apk + np.conj(w_qq) * aqk
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = vkp * w_pp + vkq * w_qp
                    V[k, q] = vkp * w_pq + vkq * w_qq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    for i in range(n):
        w[i] = A[i, i].real
    return w, V, -1


def _cholesky_logdet2_py(a):
    # Returns (log2 det a, failing pivot); pivot == -1 on success.
    n = a.shape[0]
    L = np.zeros((n, n), dtype=np.complex128)
    total = 0.0
    for j in range(n):
        d = a[j, j].real
        for k in range(j):
            d -= L[j, k].real ** 2 + L[j, k].imag ** 2
        if not d > 0.0:
            return math.nan, j
        ljj = math.sqrt(d)
        L[j, j] = ljj
        total += math.log2(ljj)
        for i in range(j + 1, n):
            acc = a[i, j]
            for k in range(j):
                acc -= L[i, k] * np.conj(L[j, k])
            L[i, j] = acc / ljj
    return 2.0 * total, -1


_jacobi_eigh_nb = njit(_jacobi_eigh_py)
_cholesky_logdet2_nb = njit(_cholesky_logdet2_py)


@njit
def _logdet2_batch_nb(A):
    nb = A.shape[0]
    out = np.empty(nb)
    for b in range(nb):
        val, piv = _cholesky_logdet2_nb(A[b])
        if piv >= 0:
            return out, b
        out[b] = val
    return out, -1


def _logdet2_batch_np(A):
    try:
        chol = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        for b in range(A.shape[0]):
            if _cholesky_logdet2_py(A[b])[1] >= 0:
                return None, b
        raise
    diag = np.diagonal(chol, axis1=-2, axis2=-1).real
    return 2.0 * np.log2(diag).sum(axis=-1), -1


def _jacobi_eigvals_inplace_py(A, tol, max_sweeps):
    # Values-only Jacobi that overwrites A; diag(A) holds the eigenvalues.
    n = A.shape[0]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += A[i, j].real ** 2 + A[i, j].imag ** 2
    thresh = (tol * tol) * scale
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += A[p, q].real ** 2 + A[p, q].imag ** 2
        if off <= thresh:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                theta = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ph = np.conj(apq / mag)
                w_qp = -s * ph
                w_qq = c * ph
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = akp * c + akq * w_qp
                    A[k, q] = akp * s + akq * w_qq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk + np.conj(w_qp) * aqk
                    A[q, k] = s * apk + np.conj(w_qq) * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    return -1


_jacobi_eigvals_inplace_nb = njit(_jacobi_eigvals_inplace_py)


@njit
def _gram_eigvals_batch_nb(H):
    nb, m, k = H.shape
    out = np.empty((nb, k))
    G = np.empty((k, k), dtype=np.complex128)
    for b in range(nb):
        for i in range(k):
            for j in range(i, k):
                acc = 0j
                for r in range(m):
                    acc += np.conj(H[b, r, i]) * H[b, r, j]
                G[i, j] = acc
                G[j, i] = np.conj(acc)
            G[i, i] = G[i, i].real
        _jacobi_eigvals_inplace_nb(G, 1e-15, 100)
        # insertion sort, descending
        for i in range(k):
            v = G[i, i].real
            j = i
            while j > 0 and out[b, j - 1] < v:
                out[b, j] = out[b, j - 1]
                j -= 1
            out[b, j] = v
    return out


def _gram_eigvals_batch_np(H):
    G = np.conj(np.swapaxes(H, -1, -2)) @ H
    return np.linalg.eigvalsh(G)[:, ::-1]


def jacobi_eigh(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Unsorted eigenpairs of one Hermitian matrix by cyclic Jacobi rotations."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if _accel.USE_NUMBA:
        return _jacobi_eigh_nb(a, tol, max_sweeps)
    return _jacobi_eigh_py(a, tol, max_sweeps)


def cholesky_logdet2(a):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if _accel.USE_NUMBA:
        return _cholesky_logdet2_nb(a)
    return _cholesky_logdet2_py(a)


def logdet2_batch(A):
    """log2 det of a stack of Hermitian positive-definite matrices.

    Returns ``(values, failed)`` where ``failed`` is the index of the first
    matrix whose Cholesky factorization broke down, or -1.
    """
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if _accel.USE_NUMBA:
        return _logdet2_batch_nb(A)
    return _logdet2_batch_np(A)


def gram_eigvals_batch(H):
    """Eigenvalues of ``H^H H`` for a stack ``H`` of shape (B, M, K), descending."""
    H = np.ascontiguousarray(H, dtype=np.complex128)
    if _accel.USE_NUMBA:
        return _gram_eigvals_batch_nb(H)
    return _gram_eigvals_batch_np(H)
