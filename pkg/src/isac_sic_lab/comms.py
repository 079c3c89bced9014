"""Uplink sum communication rate under C-SIC, S-SIC and FDSAC."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import StructuralError
from .matrixkit import correlated_columns, logdet_hpd, sample_complex_gaussian
from .model import C_SIC, FDSAC, S_SIC, validate_config

EULER_GAMMA = 0.57721566490153286061
LN2 = math.log(2.0)


@dataclass(frozen=True)
class RateSample:
    sum_cr: float
    per_user_sinr: np.ndarray
    order: str
    slot_rates: np.ndarray = None


@dataclass(frozen=True)
class EcrAsymptote:
    """High-SNR line ``ECR ~ slope * (log2 p_c - offset)``."""

    slope: float
    offset: float

    def __call__(self, p_c):
        return self.slope * (np.log2(p_c) - self.offset)


def _check_channel(H, p_c):
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2:
        raise StructuralError(f"H must be a matrix, got shape {H.shape}")
    M, K = H.shape
    if K > M:
        raise StructuralError(f"H must have K <= M columns, got {M}x{K}")
    if p_c < 0:
        raise StructuralError(f"p_c must be >= 0, got {p_c}")
    return H


def mmse_sic_sinrs(H, p_c):
    """Per-user SINRs of the MMSE-SIC receiver, decoding column K first.

    ``gamma_k = p_c h_k^H (I + p_c sum_{i<k} h_i h_i^H)^{-1} h_k``, so that
    ``sum(log2(1 + gamma)) == log2 det(I + p_c H H^H)``.
    """
    H = _check_channel(H, p_c)
    M, K = H.shape
    gam = np.empty(K)
    C = np.eye(M, dtype=np.complex128)
    for k in range(K):
        h = H[:, k]
        gam[k] = p_c * np.real(h.conj() @ np.linalg.solve(C, h))
        C = C + p_c * np.outer(h, h.conj())
    return gam


def sum_cr_csic(H, p_c):
    H = _check_channel(H, p_c)
    M = H.shape[0]
    return logdet_hpd(np.eye(M) + p_c * H @ H.conj().T)


def sum_cr_ssic(H, p_c, slot_noise):
    """Slot-averaged sum rate when the sensing echo is still present.

    Slot ``l`` sees white interference of power ``slot_noise[l] >= 1``.
    """
    H = _check_channel(H, p_c)
    rho = np.atleast_1d(np.asarray(slot_noise, dtype=float))
    if np.any(rho < 1.0):
        raise StructuralError("slot noise must be >= 1 in every slot")
    slot_rates = np.array([sum_cr_csic(H, p_c / r) for r in rho])
    # per-user SINRs reported for the first slot
    return RateSample(
        sum_cr=float(np.mean(slot_rates)),
        per_user_sinr=mmse_sic_sinrs(H, p_c / rho[0]),
        order=S_SIC,
        slot_rates=slot_rates,
    )


def fdsac_sum_cr(H, p_c, alpha_bw):
    if not 0.0 <= alpha_bw <= 1.0:
        raise StructuralError(f"alpha_bw must lie in [0, 1], got {alpha_bw}")
    if alpha_bw == 0.0:
        return 0.0
    return alpha_bw * sum_cr_csic(H, p_c / alpha_bw)


def digamma_int(n):
    """psi(n) for a positive integer: harmonic number H_{n-1} minus Euler's gamma."""
    if n < 1:
        raise StructuralError(f"digamma_int needs n >= 1, got {n}")
    return math.fsum(1.0 / a for a in range(1, n)) - EULER_GAMMA


def ecr_asymptote(cfg, slot_noise=None, order=None):
    """Slope K and power offset of the ergodic sum rate.

    The offset follows from ``E[ln det(Hbar^H Hbar)] = sum_k psi(M - k + 1)``
    for an M x K matrix of i.i.d. CN(0, 1) entries. For S-SIC the mean of
    ``log2(slot_noise)`` is added.
    """
    order = cfg.sic_order if order is None else order
    alpha = np.asarray(cfg.alpha, dtype=float)
    per_user = [
        math.log2(alpha[k]) + digamma_int(cfg.M - k) / LN2 for k in range(cfg.K)
    ]
    offset = -math.fsum(per_user) / cfg.K
    if order == S_SIC:
        if slot_noise is None:
            from .sensing import design_sensing

            slot_noise = design_sensing(cfg, S_SIC).slot_noise
        offset += float(np.mean(np.log2(slot_noise)))
    elif order != C_SIC:
        raise StructuralError(f"unknown SIC order {order!r}")
    return EcrAsymptote(slope=float(cfg.K), offset=offset)


def comm_gap(cfg, slot_noise):
    """ECR advantage of C-SIC over S-SIC at high SNR, in bits/s/Hz."""
    gap = cfg.K * float(np.mean(np.log2(slot_noise)))
    via_offsets = cfg.K * (
        ecr_asymptote(cfg, slot_noise, S_SIC).offset
        - ecr_asymptote(cfg, order=C_SIC).offset
    )
    assert abs(gap - via_offsets) <= 1e-9 * max(1.0, abs(gap))
    return gap


def rates_from_gram_eigs(eigs, p_c, scheme, slot_noise=None, alpha_bw=0.5):
    """Vectorized sum rates from eigenvalues of ``H^H H``.

    Parameters
    ----------
    eigs : (B, K) ndarray
    p_c : float
    scheme : {"C-SIC", "S-SIC", "FDSAC"}
    slot_noise : array_like, optional
        Required for S-SIC.
    alpha_bw : float
        FDSAC communication bandwidth fraction.

    Returns
    -------
    (B,) ndarray of bits/s/Hz.
    """
    eigs = np.clip(eigs, 0.0, None)
    if scheme == C_SIC:
        return np.log2(1.0 + p_c * eigs).sum(axis=1)
    if scheme == S_SIC:
        rho, counts = np.unique(np.asarray(slot_noise, dtype=float), return_counts=True)
        out = np.zeros(eigs.shape[0])
        for r, c in zip(rho, counts):
            out += c * np.log2(1.0 + (p_c / r) * eigs).sum(axis=1)
        return out / counts.sum()
    if scheme == FDSAC:
        if alpha_bw == 0.0:
            return np.zeros(eigs.shape[0])
        return alpha_bw * np.log2(1.0 + (p_c / alpha_bw) * eigs).sum(axis=1)
    raise StructuralError(f"unknown scheme {scheme!r}")


def echo_plus_noise(cfg, s_l, count, rng):
    """Draw ``count`` vectors ``a_l = G^H s_l + n_l`` (length M) for a fixed slot.

    Under S-SIC this is the interference seen by the communication decoder;
    its covariance should be ``(1 + |s_l^H R s_l|) I_M``.
    """
    validate_config(cfg)
    s_l = np.asarray(s_l, dtype=np.complex128).reshape(cfg.N)
    G = correlated_columns(cfg.R, count * cfg.M, rng).reshape(cfg.N, count, cfg.M)
    n = sample_complex_gaussian(count, cfg.M, rng)
    return np.einsum("ncm,n->cm", G.conj(), s_l) + n
