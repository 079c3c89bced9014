import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import digamma

from isac_sic_lab.comms import (
    comm_gap,
    digamma_int,
    echo_plus_noise,
    ecr_asymptote,
    fdsac_sum_cr,
    mmse_sic_sinrs,
    rates_from_gram_eigs,
    sum_cr_csic,
    sum_cr_ssic,
)
from isac_sic_lab.errors import StructuralError
from isac_sic_lab.matrixkit import sample_complex_gaussian
from isac_sic_lab.model import C_SIC, FDSAC, S_SIC, SystemConfig
from isac_sic_lab.sensing import design_sensing

from .oracles import empirical_cov


@settings(max_examples=100, deadline=None)
@given(m=st.integers(1, 6), k=st.integers(1, 6), seed=st.integers(0, 2**31),
       pdb=st.floats(-20, 40))
def test_chain_identity(m, k, seed, pdb):
    k = min(k, m)
    H = sample_complex_gaussian(m, k, np.random.default_rng(seed))
    p = 10 ** (pdb / 10)
    gam = mmse_sic_sinrs(H, p)
    ref = np.log2(np.linalg.det(np.eye(m) + p * H @ H.conj().T).real)
    assert abs(np.sum(np.log2(1 + gam)) - ref) <= 1e-8
    assert sum_cr_csic(H, p) == pytest.approx(ref, abs=1e-8)


def test_sinr_single_user(rng):
    H = sample_complex_gaussian(3, 1, rng)
    assert mmse_sic_sinrs(H, 4.0)[0] == pytest.approx(4.0 * np.linalg.norm(H) ** 2)


def test_ssic_rate(rng):
    H = sample_complex_gaussian(3, 2, rng)
    r = sum_cr_ssic(H, 10.0, [1.0, 1.0])
    assert r.sum_cr == pytest.approx(sum_cr_csic(H, 10.0))
    r = sum_cr_ssic(H, 10.0, [2.0, 2.0, 2.0])
    assert r.sum_cr == pytest.approx(sum_cr_csic(H, 5.0))
    assert r.sum_cr < sum_cr_csic(H, 10.0)
    with pytest.raises(StructuralError):
        sum_cr_ssic(H, 10.0, [0.5])


def test_fdsac_rate(rng):
    H = sample_complex_gaussian(3, 3, rng)
    assert fdsac_sum_cr(H, 10.0, 1.0) == pytest.approx(sum_cr_csic(H, 10.0))
    assert fdsac_sum_cr(H, 10.0, 0.0) == 0.0
    assert fdsac_sum_cr(H, 10.0, 0.5) == pytest.approx(0.5 * sum_cr_csic(H, 20.0))


def test_channel_checks(rng):
    with pytest.raises(StructuralError):
        mmse_sic_sinrs(sample_complex_gaussian(2, 3, rng), 1.0)
    with pytest.raises(StructuralError):
        sum_cr_csic(sample_complex_gaussian(3, 2, rng), -1.0)


@pytest.mark.parametrize("scheme", [C_SIC, S_SIC, FDSAC])
def test_rates_from_gram_eigs_match_direct(scheme):
    rng = np.random.default_rng(2)
    Hs = [sample_complex_gaussian(3, 3, rng) for _ in range(20)]
    eigs = np.array([np.linalg.eigvalsh(H.conj().T @ H)[::-1] for H in Hs])
    rho = np.array([2.0, 2.0, 2.0, 3.0])
    fast = rates_from_gram_eigs(eigs, 7.0, scheme, rho, 0.4)
    for H, f in zip(Hs, fast):
        if scheme == C_SIC:
            ref = sum_cr_csic(H, 7.0)
        elif scheme == S_SIC:
            ref = sum_cr_ssic(H, 7.0, rho).sum_cr
        else:
            ref = fdsac_sum_cr(H, 7.0, 0.4)
        assert f == pytest.approx(ref, abs=1e-10)


def test_digamma_int():
    for n in range(1, 12):
        assert digamma_int(n) == pytest.approx(digamma(n), abs=1e-14)
    with pytest.raises(StructuralError):
        digamma_int(0)


def test_ecr_offset_reference(ref_cfg):
    # -(1/K) sum_k [log2 alpha_k + psi(M - k + 1) / ln 2]
    expected = -np.mean([math.log2(a) + digamma(3 - k) / math.log(2)
                         for k, a in enumerate(ref_cfg.alpha)])
    a = ecr_asymptote(ref_cfg, order=C_SIC)
    assert a.slope == 3
    assert a.offset == pytest.approx(expected, abs=1e-12)
    assert a.offset == pytest.approx(1.0711430, abs=1e-6)


def test_ecr_offset_single_antenna():
    cfg = SystemConfig.from_eigenvalues([1.0], M=1, N=1, K=1, L=1, p_c=1, p_s=1, alpha=(1.0,))
    # E[log2 |h|^2] = psi(1) / ln 2 = -gamma / ln 2
    assert ecr_asymptote(cfg, order=C_SIC).offset == pytest.approx(0.5772156649 / math.log(2))


def test_ecr_offset_ssic_and_gap(ref_cfg):
    d = design_sensing(ref_cfg, S_SIC)
    s = ecr_asymptote(ref_cfg, d.slot_noise, S_SIC)
    c = ecr_asymptote(ref_cfg, order=C_SIC)
    assert s.offset - c.offset == pytest.approx(1.0)
    assert comm_gap(ref_cfg, d.slot_noise) == pytest.approx(3.0)
    with pytest.raises(StructuralError):
        ecr_asymptote(ref_cfg, order="X")


def test_echo_plus_noise_covariance(ref_cfg):
    d = design_sensing(ref_cfg.replace(p_s=3.0), S_SIC)
    for l in (0, 3):
        a = echo_plus_noise(ref_cfg, d.S[:, l], 100_000, np.random.default_rng(l))
        C = empirical_cov(a)
        target = d.slot_noise[l] * np.eye(ref_cfg.M)
        assert np.linalg.norm(C - target) / np.linalg.norm(target) < 0.05
