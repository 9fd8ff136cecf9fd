import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from swiptbeam.channels import generate_channels
from swiptbeam.model import SystemConfig, db_to_linear, dbm_to_mw

settings.register_profile(
    "ci", max_examples=50, derandomize=True, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


def make_config(K=2, gamma_db=10.0, lambda_dbm=-30.0, delta=5.0, **kw) -> SystemConfig:
    return SystemConfig(
        n_users=K,
        sinr_threshold=db_to_linear(gamma_db),
        eh_threshold_mw=dbm_to_mw(lambda_dbm),
        delta=delta,
        **kw,
    )


@pytest.fixture
def config2() -> SystemConfig:
    return make_config(K=2)


@pytest.fixture
def channels2(config2):
    return generate_channels(config2, 7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
