import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from swiptbeam.model import (LinkGains, SolveOutcome, SolveStatus, SystemConfig,
                             dbm_to_mw, db_to_linear, load_config, mw_to_dbm,
                             received_power, sinr, verify_solution)
from swiptbeam.channels import generate_channels
from swiptbeam.beamformers import zf_weights

from conftest import make_config


class TestUnits:
    def test_dbm_definitions(self):
        assert dbm_to_mw(-40.0) == pytest.approx(1e-4, rel=1e-12)
        assert dbm_to_mw(0.0) == pytest.approx(1.0, rel=1e-12)
        assert dbm_to_mw(-30.0) == pytest.approx(1e-3, rel=1e-12)

    @given(st.floats(min_value=-100.0, max_value=50.0))
    def test_round_trip(self, x):
        assert mw_to_dbm(dbm_to_mw(x)) == pytest.approx(x, rel=1e-12, abs=1e-12)

    def test_nonpositive_mw_rejected(self):
        with pytest.raises(ValueError):
            mw_to_dbm(0.0)
        with pytest.raises(ValueError):
            mw_to_dbm(-1.0)

    def test_db_ratio(self):
        assert db_to_linear(10.0) == pytest.approx(10.0)
        assert db_to_linear(20.0) == pytest.approx(100.0)


class TestReceivedPower:
    def test_identity_gains(self):
        G = np.eye(2)
        out = received_power(G, np.array([1.0, 1.0]), 1e-4)
        assert out == pytest.approx([1.0001, 1.0001])

    def test_zero_power(self):
        G = np.ones((3, 3))
        out = received_power(G, np.zeros(3), 1e-4)
        assert out == pytest.approx([1e-4] * 3)

    def test_direct_arithmetic(self):
        G = np.array([[1.0, 0.5], [0.25, 1.0]])
        out = received_power(G, np.array([2.0, 4.0]), 1e-4)
        assert out == pytest.approx([4.0001, 4.5001])

    def test_affine_in_power(self, rng):
        G = rng.uniform(0, 1, (3, 3))
        P = rng.uniform(0, 2, 3)
        base = received_power(G, P, 1e-4) - 1e-4
        doubled = received_power(G, 2 * P, 1e-4) - 1e-4
        np.testing.assert_allclose(doubled, 2 * base, rtol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            received_power(np.eye(2), np.ones(3), 1e-4)


class TestSinr:
    def test_single_user(self):
        cfg = make_config(K=1)
        out = sinr(np.array([[1.0]]), np.array([1.0]), np.array([1.0]), cfg)
        assert out[0] == pytest.approx(5000.0)

    def test_zero_power(self):
        cfg = make_config(K=2)
        out = sinr(np.eye(2), np.zeros(2), np.full(2, 0.5), cfg)
        np.testing.assert_allclose(out, 0.0)

    def test_two_user_identity(self):
        cfg = make_config(K=2)
        out = sinr(np.eye(2), np.ones(2), np.full(2, 0.5), cfg)
        expected = 0.5 / (0.5 * 1e-4 + 1e-4)
        np.testing.assert_allclose(out, expected, rtol=1e-12)

    def test_rho_zero_rejected(self):
        cfg = make_config(K=1)
        with pytest.raises(ValueError):
            sinr(np.array([[1.0]]), np.array([1.0]), np.array([0.0]), cfg)

    def test_monotone_in_power_and_rho(self, rng):
        cfg = make_config(K=3, gamma_db=10.0)
        G = rng.uniform(0, 1e-5, (3, 3)) + np.diag(rng.uniform(1e-5, 1e-4, 3))
        P = rng.uniform(0.1, 10.0, 3)
        rho = rng.uniform(0.2, 0.8, 3)
        base = sinr(G, P, rho, cfg)
        for i in range(3):
            Pup = P.copy()
            Pup[i] *= 1.3
            assert sinr(G, Pup, rho, cfg)[i] >= base[i]
            rup = rho.copy()
            rup[i] = min(1.0, rup[i] + 0.1)
            assert sinr(G, P, rup, cfg)[i] >= base[i]


class TestVerifySolution:
    def test_zero_power_infeasible(self, config2, channels2):
        res = verify_solution(config2, channels2, zf_weights(channels2),
                              np.zeros(2), np.full(2, 0.5))
        assert not res.feasible
        assert np.all(res.eh_slack < 0)

    def test_slack_vector_shape(self, config2, channels2):
        res = verify_solution(config2, channels2, zf_weights(channels2),
                              np.ones(2), np.full(2, 0.5))
        assert res.as_vector().shape == (10,)

    def test_caps_included_when_configured(self, channels2):
        cfg = make_config(K=2, p_max_mw=5.0)
        res = verify_solution(cfg, channels2, zf_weights(channels2),
                              np.array([1.0, 10.0]), np.full(2, 0.5))
        assert res.cap_slack is not None
        assert res.cap_slack[1] < 0


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            make_config(K=0)
        with pytest.raises(ValueError):
            SystemConfig(n_users=2, sinr_threshold=-1.0, eh_threshold_mw=1e-3)
        with pytest.raises(ValueError):
            SystemConfig(n_users=2, sinr_threshold=1.0, eh_threshold_mw=1e-3, delta=0.0)

    def test_scalar_broadcast(self):
        cfg = make_config(K=3, gamma_db=10.0)
        assert cfg.sinr_threshold.shape == (3,)

    def test_load_config(self, tmp_path):
        payload = {"K": 2, "sigma2_dbm": -40, "sigmaC2_dbm": -40, "gamma_db": [10, 20],
                   "lambda_dbm": -30, "delta": 5, "direct_variance": 1e-5, "seed": 9}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(payload))
        cfg, seed = load_config(path)
        assert seed == 9
        assert cfg.n_users == 2
        np.testing.assert_allclose(cfg.sinr_threshold, [10.0, 100.0])
        assert cfg.noise_mw == pytest.approx(1e-4)
        np.testing.assert_allclose(cfg.eh_threshold_mw, 1e-3)

    def test_p_max_optional(self, tmp_path):
        payload = {"K": 1, "gamma_db": 10, "lambda_dbm": -30, "p_max_dbm": 0.0}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(payload))
        cfg, _ = load_config(path)
        np.testing.assert_allclose(cfg.p_max_mw, [1.0])


class TestOutcomeInvariants:
    def test_total_power_consistency(self):
        with pytest.raises(ValueError):
            SolveOutcome(P=np.array([1.0, 2.0]), rho=np.full(2, 0.5), total_power=5.0,
                         feasible=True, status=SolveStatus.OPTIMAL,
                         residuals=np.zeros(1))

    def test_gains_validation(self):
        with pytest.raises(ValueError):
            LinkGains(G=np.array([[1.0, -0.1], [0.0, 1.0]]))
