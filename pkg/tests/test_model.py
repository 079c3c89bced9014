import numpy as np
import pytest

from isac_sic_lab.errors import ConfigError
from isac_sic_lab.model import (
    C_SIC,
    FDSAC,
    S_SIC,
    SystemConfig,
    db_to_linear,
    normalize_scheme,
    reference_config,
    sample_channel,
    sample_channel_block,
    sample_target_response,
    validate_config,
)


def test_reference_config(ref_cfg):
    assert (ref_cfg.M, ref_cfg.N, ref_cfg.K, ref_cfg.L) == (3, 3, 3, 4)
    assert ref_cfg.p_c == pytest.approx(10.0)
    assert ref_cfg.p_s == pytest.approx(1.0)
    np.testing.assert_allclose(ref_cfg.eigenvalues, [1.0, 0.1, 0.05])
    assert validate_config(ref_cfg) is ref_cfg


def test_db_to_linear():
    assert db_to_linear(0) == 1.0
    assert db_to_linear(30) == pytest.approx(1000.0)
    np.testing.assert_allclose(db_to_linear(np.array([-10, 10])), [0.1, 10])


def test_normalize_scheme():
    assert normalize_scheme("c-sic") == C_SIC
    assert normalize_scheme("ssic") == S_SIC
    assert normalize_scheme("fdsac") == FDSAC
    with pytest.raises(ConfigError, match="tdma"):
        normalize_scheme("tdma")


@pytest.mark.parametrize(
    "change, fragment",
    [
        (dict(K=4, alpha=(1, 1, 1, 1)), "M >= K violated: M=3, K=4"),
        (dict(L=2), "L >= M violated"),
        (dict(alpha=(0.1, 0.0, 1.0)), "alpha_k > 0 violated: k=[2]"),
        (dict(alpha=(0.1, 0.5)), "len(alpha) == K violated"),
        (dict(p_c=-1.0), "p_c >= 0 violated"),
        (dict(p_s=float("nan")), "p_s >= 0 violated"),
        (dict(sic_order="X"), "sic_order"),
        (dict(alpha_bw=1.5), "alpha_bw"),
        (dict(R=np.diag([1.0, -0.1, 0.05]).astype(complex)), "R > 0 violated"),
        (dict(R=np.eye(2, dtype=complex)), "R is N x N violated"),
    ],
)
def test_validate_names_violation(ref_cfg, change, fragment):
    with pytest.raises(ConfigError) as exc:
        validate_config(ref_cfg.replace(**change))
    assert fragment in str(exc.value)


def test_validate_reports_every_violation(ref_cfg):
    with pytest.raises(ConfigError) as exc:
        validate_config(ref_cfg.replace(p_c=-1.0, p_s=-1.0))
    assert "p_c" in str(exc.value) and "p_s" in str(exc.value)


def test_non_diagonal_R_eigenvalues():
    U, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)) + 0j)
    R = U @ np.diag([2.0, 0.5, 0.25]) @ U.conj().T
    cfg = SystemConfig(M=3, N=3, K=2, L=4, p_c=1, p_s=1, alpha=(1, 1), R=R)
    np.testing.assert_allclose(cfg.eigenvalues, [2.0, 0.5, 0.25], atol=1e-12)
    assert cfg.as_dict()["R_eigenvalues"][0] == pytest.approx(2.0)


def test_sample_channel_sorted_and_tracks_alpha(ref_cfg):
    rng = np.random.default_rng(5)
    for _ in range(50):
        ch = sample_channel(ref_cfg, rng)
        assert np.all(np.diff(ch.column_norms) >= 0)
        np.testing.assert_allclose(np.linalg.norm(ch.H, axis=0), ch.column_norms)
        np.testing.assert_array_equal(ch.alpha, np.asarray(ref_cfg.alpha)[ch.user_index])


def test_channel_column_powers(ref_cfg):
    H = sample_channel_block(ref_cfg, np.random.default_rng(6), 100_000)
    power = np.mean(np.abs(H) ** 2, axis=(0, 1))
    np.testing.assert_allclose(power, ref_cfg.alpha, rtol=0.02)


def test_channel_block_prefix_property(ref_cfg):
    a = sample_channel_block(ref_cfg, np.random.default_rng(7), 10)
    b = sample_channel_block(ref_cfg, np.random.default_rng(7), 25)
    np.testing.assert_array_equal(a, b[:10])


def test_target_response_covariance(ref_cfg):
    rng = np.random.default_rng(8)
    G = np.concatenate([sample_target_response(ref_cfg, rng).G for _ in range(20_000)], axis=1)
    C = G @ G.conj().T / G.shape[1]
    assert np.linalg.norm(C - ref_cfg.R) / np.linalg.norm(ref_cfg.R) < 0.03
