import numpy as np
import pytest
from scipy import stats

from swiptbeam.channels import dump_channels, generate_channels, load_channels

from conftest import make_config


def collect_entries(K, n_sets, delta=5.0, base_seed=0):
    cfg = make_config(K=K, delta=delta)
    direct, cross = [], []
    for s in range(n_sets):
        ch = generate_channels(cfg, base_seed + s)
        for i in range(K):
            for j in range(K):
                (direct if i == j else cross).append(ch.h[i, j])
    return np.concatenate(direct), np.concatenate(cross)


class TestDistribution:
    def test_direct_variance(self):
        # ~1.3e5 direct draws
        direct, _ = collect_entries(K=8, n_sets=2000)
        mean_sq = np.mean(np.abs(direct) ** 2)
        assert mean_sq == pytest.approx(1e-5, rel=0.03)

    def test_cross_variance_delta5(self):
        _, cross = collect_entries(K=4, n_sets=800, delta=5.0)
        mean_sq = np.mean(np.abs(cross) ** 2)
        assert mean_sq == pytest.approx(2e-6, rel=0.03)

    def test_component_variance_chi2(self):
        # real and imaginary parts each carry half the link variance
        direct, _ = collect_entries(K=8, n_sets=1600)
        for part in (direct.real, direct.imag):
            n = part.size
            stat = n * np.var(part) / (1e-5 / 2)
            lo, hi = stats.chi2.ppf([0.005, 0.995], df=n - 1)
            assert lo < stat < hi

    def test_cross_seed_independence(self):
        cfg = make_config(K=4)
        a = np.concatenate([generate_channels(cfg, s).h.ravel() for s in range(0, 160)])
        b = np.concatenate([generate_channels(cfg, s).h.ravel() for s in range(1, 161)])
        n = min(a.size, b.size)
        corr = np.corrcoef(a[:n].real, b[:n].real)[0, 1]
        assert abs(corr) < 0.05


class TestDeterminism:
    def test_same_seed_bit_identical(self, config2):
        a = generate_channels(config2, 3)
        b = generate_channels(config2, 3)
        assert np.array_equal(a.h, b.h)

    def test_different_seed_differs(self, config2):
        a = generate_channels(config2, 3)
        b = generate_channels(config2, 4)
        assert not np.array_equal(a.h, b.h)

    def test_negative_seed_rejected(self, config2):
        with pytest.raises(ValueError):
            generate_channels(config2, -1)


class TestDumpLoad:
    def test_round_trip(self, config2, tmp_path):
        ch = generate_channels(config2, 11)
        path = tmp_path / "ch.txt"
        dump_channels(ch, path)
        loaded = load_channels(path)
        assert loaded.seed == ch.seed
        np.testing.assert_array_equal(loaded.h, ch.h)

    def test_header_format(self, config2, tmp_path):
        ch = generate_channels(config2, 11)
        path = tmp_path / "ch.txt"
        dump_channels(ch, path)
        first = path.read_text().splitlines()[0]
        assert first == "K 2 seed 11"

    def test_malformed_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("K 2\n0 0\n")
        with pytest.raises(ValueError):
            load_channels(path)
