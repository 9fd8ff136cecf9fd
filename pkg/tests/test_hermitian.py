import numpy as np
import pytest

from swiptbeam.conic.hermitian import (embed_hermitian, extract_hermitian,
                                       numeric_rank, principal_eigvec)


def random_hermitian(rng, n):
    H = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (H + H.conj().T) / 2


class TestEmbedding:
    def test_identity(self):
        E = embed_hermitian(np.eye(2, dtype=complex))
        np.testing.assert_array_equal(E, np.eye(4))
        assert np.trace(E) == pytest.approx(2 * np.trace(np.eye(2)).real)

    def test_pauli_y_analogue(self):
        H = np.array([[0.0, -1j], [1j, 0.0]])
        E = embed_hermitian(H)
        vals = np.sort(np.linalg.eigvalsh(E))
        np.testing.assert_allclose(vals, [-1.0, -1.0, 1.0, 1.0], atol=1e-12)

    def test_rank_one_doubles(self, rng):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v = v / np.linalg.norm(v)
        E = embed_hermitian(np.outer(v, v.conj()))
        vals = np.linalg.eigvalsh(E)
        assert np.sum(vals > 1e-9 * vals[-1]) == 2

    def test_round_trip(self, rng):
        for n in (1, 2, 5):
            H = random_hermitian(rng, n)
            np.testing.assert_allclose(extract_hermitian(embed_hermitian(H)), H, atol=1e-13)

    def test_linearity_and_trace(self, rng):
        H1 = random_hermitian(rng, 3)
        H2 = random_hermitian(rng, 3)
        np.testing.assert_allclose(
            embed_hermitian(2 * H1 + 3 * H2),
            2 * embed_hermitian(H1) + 3 * embed_hermitian(H2), atol=1e-12)
        assert np.trace(embed_hermitian(H1)) == pytest.approx(2 * np.trace(H1).real)

    def test_psd_iff(self, rng):
        H = random_hermitian(rng, 3)
        H = H @ H.conj().T  # PSD
        assert np.min(np.linalg.eigvalsh(embed_hermitian(H))) >= -1e-12

    def test_non_hermitian_rejected(self, rng):
        M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        with pytest.raises(ValueError):
            embed_hermitian(M)

    def test_trace_inner_product_halved(self, rng):
        # the identity the SDP builder leans on
        A = random_hermitian(rng, 3)
        B = random_hermitian(rng, 3)
        lhs = np.sum(embed_hermitian(A) * embed_hermitian(B))
        assert lhs == pytest.approx(2 * np.trace(A @ B).real, rel=1e-12)


class TestPrincipalEigvec:
    def test_diagonal(self):
        lam, v = principal_eigvec(np.diag([3.0, 1.0]).astype(complex))
        assert lam == pytest.approx(3.0)
        np.testing.assert_allclose(v, [1.0, 0.0], atol=1e-12)

    def test_rank_one(self, rng):
        u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        u = u / np.linalg.norm(u)
        lam, v = principal_eigvec(np.outer(u, u.conj()))
        assert lam == pytest.approx(1.0, rel=1e-12)
        # v equals u up to a unit phase
        assert abs(v @ u.conj()) == pytest.approx(1.0, rel=1e-10)
        # largest component is real nonnegative (phase convention)
        k = np.argmax(np.abs(v))
        assert abs(v[k].imag) < 1e-12
        assert v[k].real >= 0

    def test_residual_reconstruction(self, rng):
        H = random_hermitian(rng, 5)
        W = H @ H.conj().T
        lam, v = principal_eigvec(W)
        vals = np.linalg.eigvalsh(W)
        assert np.linalg.norm(W @ v - lam * v) <= 1e-9 * vals[-1]
        resid = np.linalg.norm(W - lam * np.outer(v, v.conj()), "fro")
        assert resid == pytest.approx(np.sqrt(np.sum(vals[:-1] ** 2)), rel=1e-9)


class TestNumericRank:
    def test_zero_matrix(self):
        assert numeric_rank(np.zeros((3, 3), dtype=complex)) == 0

    def test_jitter_absorbed(self, rng):
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        v = v / np.linalg.norm(v)
        W = np.outer(v, v.conj()) + 1e-9 * np.eye(3)
        assert numeric_rank(W, 1e-6) == 1

    def test_above_threshold(self):
        assert numeric_rank(np.diag([1.0, 1e-3]).astype(complex), 1e-6) == 2
