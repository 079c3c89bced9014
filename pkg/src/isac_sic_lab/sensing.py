"""Sensing rate under both SIC orders and the FDSAC split."""
from dataclasses import dataclass

import numpy as np

from .errors import StructuralError
from .matrixkit import sample_complex_gaussian
from .model import C_SIC, S_SIC, validate_config


@dataclass(frozen=True)
class SensingDesign:
    """Optimal sensing waveform for one SIC order.

    ``U`` holds the eigenvectors of R as columns, so ``R = U diag(lambda) U^H``
    and the optimal Gram matrix is ``S S^H = U diag(allocation) U^H``.
    """

    order: str
    sigma_sq: float
    water_level: float
    allocation: np.ndarray
    U: np.ndarray
    S: np.ndarray
    slot_noise: np.ndarray
    rate: float


@dataclass(frozen=True)
class SrAsymptote:
    """High-SNR line ``SR ~ slope * (log2 p_s - offset)``; offset in 3-dB units."""

    slope: float
    offset: float

    def __call__(self, p_s):
        return self.slope * (np.log2(p_s) - self.offset)


def _order(cfg, order):
    return cfg.sic_order if order is None else order


def noise_floor(cfg, order=None):
    """Effective noise variance seen by the sensing receiver.

    C-SIC senses with the communication signal still present, which adds
    ``p_c * sum(alpha)`` of white interference. S-SIC has removed it.
    """
    order = _order(cfg, order)
    if order == S_SIC:
        return 1.0
    if order == C_SIC:
        return 1.0 + cfg.p_c * float(np.sum(cfg.alpha))
    raise StructuralError(f"unknown SIC order {order!r}")


def waterfill(eigenvalues, sigma_sq, budget):
    """Water-filling over eigen-modes with floors ``sigma_sq / lambda_n``.

    The active set is found exactly: floors are sorted ascending and each
    prefix is tried in closed form until the water level lands between the
    last active floor and the first inactive one.

    Parameters
    ----------
    eigenvalues : array_like
        Positive mode gains.
    sigma_sq : float
        Noise variance, > 0.
    budget : float
        Total power ``L * p_s``, >= 0.

    Returns
    -------
    water_level : float
    allocation : ndarray
        ``max(0, water_level - sigma_sq / lambda_n)`` in input order; sums
        to `budget`.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.ndim != 1 or lam.size == 0 or np.any(lam <= 0):
        raise StructuralError("eigenvalues must be a non-empty vector of positives")
    if not sigma_sq > 0:
        raise StructuralError(f"sigma_sq must be positive, got {sigma_sq}")
    if budget < 0:
        raise StructuralError(f"budget must be >= 0, got {budget}")
    floors = sigma_sq / lam
    order = np.argsort(floors, kind="stable")
    f = floors[order]
    n = f.size
    level = f[0]
    for k in range(1, n + 1):
        level = (budget + f[:k].sum()) / k
        if k == n or level <= f[k]:
            break
    alloc = np.maximum(0.0, level - floors)
    return float(level), alloc


def sensing_rate(eigenvalues, allocation, sigma_sq, M, L):
    """``(M / L) * sum(log2(1 + lambda_n * s_n / sigma_sq))`` in bits/s/Hz."""
    lam = np.asarray(eigenvalues, dtype=float)
    s = np.asarray(allocation, dtype=float)
    return float(M / L * np.sum(np.log2(1.0 + lam * s / sigma_sq)))


def dft_rows(N, L):
    """First N rows of the L-point DFT, each entry of squared magnitude 1/L."""
    n = np.arange(N)[:, None]
    l = np.arange(L)[None, :]
    return np.exp(-2j * np.pi * n * l / L) / np.sqrt(L)


def build_waveform(U, eigenvalues, allocation, L):
    """Realize an N x L waveform with Gram matrix ``U diag(allocation) U^H``.

    Power is spread evenly across slots with DFT rows, which makes the
    per-slot interference ``|s_l^H R s_l|`` the same in every slot.

    Returns
    -------
    S : (N, L) ndarray
    slot_noise : (L,) ndarray
        ``1 + |s_l^H R s_l|`` evaluated directly from S and R.
    """
    U = np.asarray(U, dtype=np.complex128)
    lam = np.asarray(eigenvalues, dtype=float)
    a = np.asarray(allocation, dtype=float)
    N = U.shape[0]
    if L < N:
        raise StructuralError(f"L >= N required to build the waveform: L={L}, N={N}")
    if np.any(a < 0):
        raise StructuralError("allocation must be nonnegative")
    S = (U * np.sqrt(a)) @ dft_rows(N, L)
    R = (U * lam) @ U.conj().T
    quad = np.einsum("nl,nm,ml->l", S.conj(), R, S)
    return S, 1.0 + np.abs(quad)


def design_sensing(cfg, order=None):
    """Water-filled waveform and its rate for the given (or configured) SIC order."""
    order = _order(cfg, order)
    sigma_sq = noise_floor(cfg, order)
    lam = cfg.eigenvalues
    level, alloc = waterfill(lam, sigma_sq, cfg.L * cfg.p_s)
    S, slot_noise = build_waveform(cfg.eig.U, lam, alloc, cfg.L)
    return SensingDesign(
        order=order,
        sigma_sq=sigma_sq,
        water_level=level,
        allocation=alloc,
        U=cfg.eig.U,
        S=S,
        slot_noise=slot_noise,
        rate=sensing_rate(lam, alloc, sigma_sq, cfg.M, cfg.L),
    )


def max_sensing_rate(cfg, order=None):
    return design_sensing(cfg, order).rate


def sr_asymptote(cfg, order=None):
    order = _order(cfg, order)
    sigma_sq = noise_floor(cfg, order)
    N, L = cfg.N, cfg.L
    offset = float(np.mean(np.log2(N * sigma_sq / (L * cfg.eigenvalues))))
    return SrAsymptote(slope=N * cfg.M / L, offset=offset)


def sensing_gap(cfg):
    """SR advantage of S-SIC over C-SIC at high sensing SNR, in bits/s/Hz."""
    return cfg.N * cfg.M / cfg.L * float(np.log2(1.0 + cfg.p_c * np.sum(cfg.alpha)))


def fdsac_sensing_rate(cfg, alpha_bw=None):
    """Max SR when sensing gets the ``1 - alpha_bw`` share of the band.

    Maximizes ``(M(1-a)/L) log2 det(I + S^H R S / (1-a))``: water-filling
    with noise ``1 - a`` and the rate scaled by ``1 - a``.
    """
    a = cfg.alpha_bw if alpha_bw is None else alpha_bw
    if not 0.0 <= a <= 1.0:
        raise StructuralError(f"alpha_bw must lie in [0, 1], got {a}")
    share = 1.0 - a
    if share == 0.0:
        return 0.0
    lam = cfg.eigenvalues
    _, alloc = waterfill(lam, share, cfg.L * cfg.p_s)
    return share * sensing_rate(lam, alloc, share, cfg.M, cfg.L)


def aggregate_interference_rows(cfg, count, rng):
    """Draw ``count`` rows ``z_m = sum_k conj(h_km) x_k + n_m`` (length L).

    Under C-SIC this is what the sensing receiver treats as noise; its
    covariance should be ``noise_floor(cfg, C_SIC) * I_L``.
    """
    validate_config(cfg)
    alpha = np.asarray(cfg.alpha, dtype=float)
    h = sample_complex_gaussian(count, cfg.K, rng) * np.sqrt(alpha)
    x = sample_complex_gaussian(count * cfg.K, cfg.L, rng).reshape(count, cfg.K, cfg.L)
    x *= np.sqrt(cfg.p_c)
    n = sample_complex_gaussian(count, cfg.L, rng)
    return np.einsum("ck,ckl->cl", h.conj(), x) + n
