"""Scenario configuration and statistical sampling of H and G."""
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import ConfigError
from .matrixkit import (
    HERMITIAN_TOL,
    correlated_columns,
    hermitian_eig,
    sample_complex_gaussian,
)

C_SIC = "C-SIC"
S_SIC = "S-SIC"
FDSAC = "FDSAC"
SIC_ORDERS = (C_SIC, S_SIC)
SCHEMES = (C_SIC, S_SIC, FDSAC)

REFERENCE_ALPHA = (0.1, 0.5, 1.0)
REFERENCE_R_EIGENVALUES = (1.0, 0.1, 0.05)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def normalize_scheme(name):
    """Map loose spellings (``csic``, ``c-sic``, ``fdsac``) onto canonical names."""
    key = str(name).replace("_", "").replace("-", "").upper()
    for canonical in SCHEMES:
        if canonical.replace("-", "") == key:
            return canonical
    raise ConfigError(f"unknown scheme {name!r}; expected one of {', '.join(SCHEMES)}")


@dataclass(frozen=True, eq=False)
class SystemConfig:
    """All scenario parameters. Powers are linear SNRs relative to unit noise.

    ``alpha_bw`` is the FDSAC communication bandwidth fraction; it is only
    read by FDSAC computations.
    """

    M: int
    N: int
    K: int
    L: int
    p_c: float
    p_s: float
    alpha: tuple
    R: np.ndarray = field(repr=False)
    sic_order: str = C_SIC
    alpha_bw: float = 0.5

    @classmethod
    def from_eigenvalues(cls, eigenvalues, **kwargs):
        """Build with ``R = diag(eigenvalues)``, i.e. the identity eigen-basis."""
        R = np.diag(np.asarray(eigenvalues, dtype=float)).astype(np.complex128)
        return cls(R=R, **kwargs)

    @cached_property
    def eig(self):
        return hermitian_eig(self.R)

    @property
    def eigenvalues(self):
        return self.eig.eigenvalues

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {
            "M": self.M,
            "N": self.N,
            "K": self.K,
            "L": self.L,
            "p_c": self.p_c,
            "p_s": self.p_s,
            "alpha": list(self.alpha),
            "R_eigenvalues": [float(x) for x in self.eigenvalues],
            "sic_order": self.sic_order,
            "alpha_bw": self.alpha_bw,
        }


def reference_config(pc_db=10.0, ps_db=0.0, sic_order=C_SIC, alpha_bw=0.5):
    """The evaluation scenario: M=N=K=3, L=4, alpha=(0.1, 0.5, 1), R eigs (1, 0.1, 0.05)."""
    return SystemConfig.from_eigenvalues(
        REFERENCE_R_EIGENVALUES,
        M=3,
        N=3,
        K=3,
        L=4,
        p_c=float(db_to_linear(pc_db)),
        p_s=float(db_to_linear(ps_db)),
        alpha=REFERENCE_ALPHA,
        sic_order=sic_order,
        alpha_bw=alpha_bw,
    )


def validate_config(cfg):
    """Return `cfg` unchanged, or raise ConfigError naming every violated constraint."""
    errs = []
    for name in ("M", "N", "K", "L"):
        v = getattr(cfg, name)
        if not isinstance(v, (int, np.integer)) or v < 1:
            errs.append(f"{name} >= 1 violated: {name}={v!r}")
    if errs:
        raise ConfigError("; ".join(errs))
    M, N, K, L = cfg.M, cfg.N, cfg.K, cfg.L
    if M < N:
        errs.append(f"M >= N violated: M={M}, N={N}")
    if M < K:
        errs.append(f"M >= K violated: M={M}, K={K}")
    if L < M:
        errs.append(f"L >= M violated: L={L}, M={M}")
    if L < N:
        errs.append(f"L >= N violated: L={L}, N={N}")
    alpha = np.asarray(cfg.alpha, dtype=float)
    if alpha.shape != (K,):
        errs.append(f"len(alpha) == K violated: len(alpha)={alpha.size}, K={K}")
    elif not np.all(alpha > 0) or not np.all(np.isfinite(alpha)):
        bad = [i + 1 for i, a in enumerate(alpha) if not (a > 0 and np.isfinite(a))]
        errs.append(f"alpha_k > 0 violated: k={bad}")
    if not (cfg.p_c >= 0 and np.isfinite(cfg.p_c)):
        errs.append(f"p_c >= 0 violated: p_c={cfg.p_c}")
    if not (cfg.p_s >= 0 and np.isfinite(cfg.p_s)):
        errs.append(f"p_s >= 0 violated: p_s={cfg.p_s}")
    if cfg.sic_order not in SIC_ORDERS:
        errs.append(f"sic_order in {SIC_ORDERS} violated: sic_order={cfg.sic_order!r}")
    if not 0.0 <= cfg.alpha_bw <= 1.0:
        errs.append(f"0 <= alpha_bw <= 1 violated: alpha_bw={cfg.alpha_bw}")
    R = np.asarray(cfg.R)
    if R.shape != (N, N):
        errs.append(f"R is N x N violated: shape={R.shape}, N={N}")
    elif not np.all(np.isfinite(R)):
        errs.append("R finite violated")
    elif np.max(np.abs(R - R.conj().T)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(R))):
        errs.append("R Hermitian violated")
    elif cfg.eigenvalues.min() <= 0:
        errs.append(f"R > 0 violated: min eigenvalue={cfg.eigenvalues.min():.3g}")
    if errs:
        raise ConfigError("; ".join(errs))
    return cfg


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of H with columns sorted so that ||h_1|| <= ... <= ||h_K||.

    ``alpha`` and ``user_index`` follow the columns through the sort.
    """

    H: np.ndarray
    column_norms: np.ndarray
    alpha: np.ndarray
    user_index: np.ndarray


@dataclass(frozen=True)
class TargetResponse:
    G: np.ndarray


def sample_channel(cfg, rng):
    alpha = np.asarray(cfg.alpha, dtype=float)
    H = sample_complex_gaussian(cfg.M, cfg.K, rng) * np.sqrt(alpha)
    norms = np.linalg.norm(H, axis=0)
    # stable sort: equal norms keep their original user order
    order = np.argsort(norms, kind="stable")
    return ChannelRealization(
        H=H[:, order], column_norms=norms[order], alpha=alpha[order], user_index=order
    )


def sample_channel_block(cfg, rng, count):
    """Unsorted stack of ``count`` channel matrices, shape (count, M, K).

    Sum rates are invariant to user order, so the batch path skips the sort.
    One ``standard_normal`` call fills the block so that a shorter block is
    a prefix of a longer one drawn from the same stream.
    """
    x = rng.standard_normal((count, cfg.M, cfg.K, 2))
    Z = (x[..., 0] + 1j * x[..., 1]) * np.sqrt(0.5)
    return Z * np.sqrt(np.asarray(cfg.alpha, dtype=float))


def sample_target_response(cfg, rng):
    return TargetResponse(G=correlated_columns(cfg.R, cfg.M, rng))
