"""Reproducible Monte Carlo estimation of outage probability and ergodic rate.

Trials are processed in fixed blocks (see :mod:`isac_sic_lab.rng`). Each
block is reduced to integer outage counts and per-block sums of rates, and
blocks are combined in index order, so results are bit-identical for any
worker count.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import comms, kernels
from .errors import StatisticalError, StructuralError
from .model import FDSAC, S_SIC, db_to_linear, sample_channel_block
from .rng import block_rng, blocks

Z95 = 1.959963984540054


@dataclass(frozen=True)
class EstimateResult:
    point: float
    half_width_95: float
    trials: int
    seed: int

    @property
    def low(self):
        return self.point - self.half_width_95

    @property
    def high(self):
        return self.point + self.half_width_95


@dataclass(frozen=True)
class ProportionEstimate(EstimateResult):
    """Outage estimate with its (asymmetric) Wilson interval."""

    count: int = 0
    wilson_low: float = 0.0
    wilson_high: float = 0.0

    @property
    def low(self):
        return self.wilson_low

    @property
    def high(self):
        return self.wilson_high


@dataclass(frozen=True)
class OpCurve:
    snr_db: np.ndarray
    op: list
    order: str

    def __post_init__(self):
        if len(self.snr_db) != len(self.op):
            raise StructuralError("snr grid and OP estimates differ in length")
        if np.any(np.diff(self.snr_db) <= 0):
            raise StructuralError("snr grid must be strictly increasing")

    @property
    def values(self):
        return np.array([e.point for e in self.op])


def wilson_interval(count, trials, z=Z95):
    """Wilson score interval for a binomial proportion: ``(low, high)``."""
    n = float(trials)
    phat = count / n
    denom = 1.0 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _proportion(count, trials, seed):
    lo, hi = wilson_interval(count, trials)
    return ProportionEstimate(
        point=count / trials,
        half_width_95=(hi - lo) / 2,
        trials=int(trials),
        seed=int(seed),
        count=int(count),
        wilson_low=lo,
        wilson_high=hi,
    )


def _mean(total, total_sq, trials, seed):
    mean = total / trials
    if trials > 1:
        var = max(0.0, (total_sq - trials * mean * mean) / (trials - 1))
        hw = Z95 * math.sqrt(var / trials)
    else:
        hw = math.inf
    return EstimateResult(point=mean, half_width_95=hw, trials=int(trials), seed=int(seed))


def _resolve_schemes(cfg, schemes):
    if schemes is None:
        return (cfg.sic_order,)
    if isinstance(schemes, str):
        return (schemes,)
    return tuple(schemes)


def _slot_noise(cfg, variants):
    if all(scheme != S_SIC for scheme, _ in variants):
        return None
    from .sensing import design_sensing

    return design_sensing(cfg, S_SIC).slot_noise


def gram_eig_block(cfg, seed, block, count):
    """Eigenvalues of ``H^H H`` for the trials of one block, shape (count, K)."""
    H = sample_channel_block(cfg, block_rng(seed, block), count)
    return kernels.gram_eigvals_batch(H)


def _block_stats(cfg, seed, variants, p_grid, slot_noise, rate_target, block, count):
    eigs = gram_eig_block(cfg, seed, block, count)
    nS, nP = len(variants), len(p_grid)
    counts = np.zeros((nS, nP), dtype=np.int64)
    sums = np.zeros((nS, nP))
    sq = np.zeros((nS, nP))
    for i, (scheme, alpha_bw) in enumerate(variants):
        for j, p in enumerate(p_grid):
            r = comms.rates_from_gram_eigs(eigs, p, scheme, slot_noise, alpha_bw)
            if rate_target is not None:
                counts[i, j] = np.count_nonzero(r < rate_target)
            sums[i, j] = r.sum()
            sq[i, j] = np.dot(r, r)
    return counts, sums, sq


def _run(cfg, trials, seed, schemes, p_grid, rate_target, workers):
    # schemes: names, or (name, alpha_bw) pairs to vary the FDSAC split
    if trials < 1:
        raise StructuralError(f"trials must be >= 1, got {trials}")
    variants = tuple(
        (s, cfg.alpha_bw) if isinstance(s, str) else (s[0], float(s[1])) for s in schemes
    )
    slot_noise = _slot_noise(cfg, variants)
    fn = partial(_block_stats, cfg, int(seed), variants, tuple(p_grid), slot_noise, rate_target)
    jobs = list(blocks(trials))
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(fn, [b for b, _ in jobs], [n for _, n in jobs]))
    else:
        parts = [fn(b, n) for b, n in jobs]
    shape = (len(schemes), len(p_grid))
    counts = np.zeros(shape, dtype=np.int64)
    sums = np.zeros(shape)
    sq = np.zeros(shape)
    for c, s, q in parts:  # fixed block order keeps float sums reproducible
        counts += c
        sums += s
        sq += q
    return counts, sums, sq


def op_curves(cfg, rate_target, snr_db, trials, seed, schemes=None, workers=1):
    """OP versus p_c (dB) for several schemes on common channel draws.

    Returns a dict ``scheme -> OpCurve``. ``cfg.p_c`` is ignored; ``cfg.p_s``
    sets the S-SIC waveform.
    """
    if rate_target < 0:
        raise StructuralError(f"rate_target must be >= 0, got {rate_target}")
    schemes = _resolve_schemes(cfg, schemes)
    snr_db = np.asarray(snr_db, dtype=float)
    counts, _, _ = _run(cfg, trials, seed, schemes, db_to_linear(snr_db), rate_target, workers)
    return {
        s: OpCurve(snr_db, [_proportion(c, trials, seed) for c in counts[i]], s)
        for i, s in enumerate(schemes)
    }


def ecr_curves(cfg, snr_db, trials, seed, schemes=None, workers=1):
    """Ergodic sum rate versus p_c (dB): dict ``scheme -> list[EstimateResult]``."""
    schemes = _resolve_schemes(cfg, schemes)
    snr_db = np.asarray(snr_db, dtype=float)
    _, sums, sq = _run(cfg, trials, seed, schemes, db_to_linear(snr_db), None, workers)
    return {
        s: [_mean(sums[i, j], sq[i, j], trials, seed) for j in range(len(snr_db))]
        for i, s in enumerate(schemes)
    }


def estimate_op(cfg, rate_target, trials, seed, scheme=None, workers=1):
    """Fraction of trials whose sum rate falls below `rate_target`, Wilson 95% CI.

    `scheme` defaults to ``cfg.sic_order``; pass ``"FDSAC"`` for the
    bandwidth-split baseline with ``cfg.alpha_bw``.
    """
    scheme = scheme or cfg.sic_order
    if rate_target < 0:
        raise StructuralError(f"rate_target must be >= 0, got {rate_target}")
    counts, _, _ = _run(cfg, trials, seed, (scheme,), (cfg.p_c,), rate_target, workers)
    return _proportion(counts[0, 0], trials, seed)


def estimate_ecr(cfg, trials, seed, scheme=None, workers=1):
    """Sample mean of the sum rate with a normal-approximation 95% CI."""
    scheme = scheme or cfg.sic_order
    _, sums, sq = _run(cfg, trials, seed, (scheme,), (cfg.p_c,), None, workers)
    return _mean(sums[0, 0], sq[0, 0], trials, seed)


def fdsac_ecr_sweep(cfg, alpha_grid, trials, seed, workers=1):
    """FDSAC ergodic rate at ``cfg.p_c`` for each bandwidth fraction, common draws."""
    variants = [(FDSAC, a) for a in alpha_grid]
    _, sums, sq = _run(cfg, trials, seed, variants, (cfg.p_c,), None, workers)
    return [_mean(sums[i, 0], sq[i, 0], trials, seed) for i in range(len(variants))]


def _wishart_block(cfg, seed, block, count):
    H = sample_channel_block(cfg, block_rng(seed, block), count)
    G = np.conj(np.swapaxes(H, -1, -2)) @ H
    vals, failed = kernels.logdet2_batch(G)
    if failed >= 0:
        raise StatisticalError("singular Gram matrix drawn; K must not exceed M")
    return vals.sum(), np.dot(vals, vals)


def estimate_wishart_offset(cfg, trials, seed):
    """Monte Carlo power offset ``-E[log2 det(H^H H)] / K``.

    Equals ``K log2 p_c - E[log2 det(p_c H^H H)]`` divided by K, the
    high-SNR offset of the C-SIC ergodic rate. Uses Cholesky log-dets,
    independent of the closed form in :func:`comms.ecr_asymptote`.
    """
    total = total_sq = 0.0
    for b, n in blocks(trials):
        s, q = _wishart_block(cfg, seed, b, n)
        total += s
        total_sq += q
    est = _mean(total, total_sq, trials, seed)
    K = cfg.K
    return EstimateResult(-est.point / K, est.half_width_95 / K, est.trials, est.seed)


def fit_diversity_slope(curve, window=None):
    """Least-squares slope of ``-log10(OP)`` against ``snr_db / 10``.

    Parameters
    ----------
    curve : OpCurve
    window : slice, tuple of int, or None
        Index range of grid points to use; ``(i, j)`` means ``i..j-1``.

    Raises
    ------
    StatisticalError
        If any OP estimate in the window is zero.
    """
    if window is None:
        idx = slice(None)
    elif isinstance(window, slice):
        idx = window
    else:
        idx = slice(*window)
    x = np.asarray(curve.snr_db, dtype=float)[idx] / 10.0
    y = curve.values[idx]
    if x.size < 2:
        raise StructuralError("need at least 2 points to fit a slope")
    if np.any(y <= 0):
        raise StatisticalError(
            "zero outage estimate in window; increase trials or lower SNR window"
        )
    slope, _ = np.polyfit(x, -np.log10(y), 1)
    return float(slope)


def op_band_window(curve, low=1e-5, high=1e-1, db_range=None):
    """Indices of grid points whose OP lies in ``[low, high]`` (and in db_range)."""
    v = curve.values
    mask = (v >= low) & (v <= high)
    if db_range is not None:
        snr = np.asarray(curve.snr_db)
        mask &= (snr >= db_range[0]) & (snr <= db_range[1])
    return np.flatnonzero(mask)


def fit_slope_in_band(curve, low=1e-5, high=1e-1, db_range=None):
    idx = op_band_window(curve, low, high, db_range)
    if idx.size < 2:
        raise StatisticalError(
            f"fewer than 2 points with OP in [{low:g}, {high:g}]; "
            "increase trials or widen the SNR grid"
        )
    sub = OpCurve(np.asarray(curve.snr_db)[idx], [curve.op[i] for i in idx], curve.order)
    return fit_diversity_slope(sub)
