"""NT-scaling identities and backend equivalence for the cone kernels."""

import numpy as np
import pytest

from swiptbeam.conic.cones import PSD, ConeLayout, NonNeg, RotatedSOC, smat, svec
from swiptbeam.conic.kernels import available_backends, get_backend
from swiptbeam.conic.kernels.pure import MODE_W, MODE_WINV, MODE_WINVT, MODE_WT

LAYOUTS = [
    ConeLayout([NonNeg(5)]),
    ConeLayout([RotatedSOC(3)]),
    ConeLayout([RotatedSOC(6)]),
    ConeLayout([PSD(3)]),
    ConeLayout([NonNeg(3), RotatedSOC(4), PSD(4), RotatedSOC(3)]),
]


def interior_point(layout, rng):
    """Random strictly interior point of the cone product."""
    v = np.empty(layout.n)
    for k, kind in enumerate(layout.kinds):
        o, d = layout.offs[k], layout.dims[k]
        if kind == 0:
            v[o:o + d] = rng.uniform(0.5, 2.0, d)
        elif kind == 1:
            tail = rng.standard_normal(d - 2)
            u1 = rng.uniform(0.5, 2.0)
            u2 = (tail @ tail) / (2 * u1) * rng.uniform(1.5, 3.0) + rng.uniform(0.1, 1.0)
            v[o] = u1
            v[o + 1] = u2
            v[o + 2:o + d] = tail
        else:
            s = layout.sides[k]
            M = rng.standard_normal((s, s))
            v[o:o + d] = svec(M @ M.T + 0.5 * np.eye(s))
    return v


@pytest.mark.parametrize("layout", LAYOUTS)
def test_nt_scaling_identities(layout, rng):
    kern = get_backend("pure")
    x = interior_point(layout, rng)
    z = interior_point(layout, rng)
    work = kern.workspace(layout)
    lam = kern.compute_scaling(layout, x, z, work)
    assert lam is not None
    # defining property: lambda = W^T z = W^{-1} x
    np.testing.assert_allclose(kern.apply_w(layout, work, z, MODE_WT), lam, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(kern.apply_w(layout, work, x, MODE_WINV), lam, rtol=1e-9, atol=1e-12)
    # H z = x with H = W W^T
    Hz = kern.apply_w(layout, work, kern.apply_w(layout, work, z, MODE_WT), MODE_W)
    np.testing.assert_allclose(Hz, x, rtol=1e-9, atol=1e-12)
    # inverse consistency
    u = rng.standard_normal(layout.n)
    round_trip = kern.apply_w(layout, work, kern.apply_w(layout, work, u, MODE_W), MODE_WINV)
    np.testing.assert_allclose(round_trip, u, rtol=1e-9, atol=1e-12)
    round_trip_t = kern.apply_w(layout, work, kern.apply_w(layout, work, u, MODE_WT), MODE_WINVT)
    np.testing.assert_allclose(round_trip_t, u, rtol=1e-9, atol=1e-12)
    # <x, z> = <lambda, lambda>
    assert x @ z == pytest.approx(lam @ lam, rel=1e-10)


@pytest.mark.parametrize("layout", LAYOUTS)
def test_jordan_identities(layout, rng):
    kern = get_backend("pure")
    e = layout.identity
    u = interior_point(layout, rng)
    np.testing.assert_allclose(kern.jordan_mul(layout, e, u), u, rtol=1e-12, atol=1e-14)
    d = rng.standard_normal(layout.n)
    y = kern.jordan_solve(layout, u, d)
    np.testing.assert_allclose(kern.jordan_mul(layout, u, y), d, rtol=1e-9, atol=1e-11)
    # degree = <e, e> for nonneg/psd parts plus 2 per rotated cone
    assert e @ e <= layout.degree + 1e-12


@pytest.mark.parametrize("layout", LAYOUTS)
def test_max_step_boundary(layout, rng):
    kern = get_backend("pure")
    v = interior_point(layout, rng)
    dv = rng.standard_normal(layout.n)
    alpha = kern.max_step(layout, v, dv)
    if np.isinf(alpha):
        for t in (1.0, 10.0, 1000.0):
            assert kern.membership_margin(layout, v + t * dv) >= -1e-9
    else:
        assert kern.membership_margin(layout, v + 0.999 * alpha * dv) >= -1e-9 * max(1, alpha)
        assert kern.membership_margin(layout, v + 1.01 * alpha * dv + 1e-9 * dv) <= 1e-6
    # bisection oracle agreement
    if np.isfinite(alpha):
        lo, hi = 0.0, alpha * 2 + 1.0
        for _ in range(60):
            mid = (lo + hi) / 2
            if kern.membership_margin(layout, v + mid * dv) >= 0:
                lo = mid
            else:
                hi = mid
        assert lo == pytest.approx(alpha, rel=1e-6, abs=1e-9)


@pytest.mark.skipif("cython" not in available_backends(),
                    reason="compiled kernels not built")
@pytest.mark.parametrize("layout", LAYOUTS)
def test_backend_equivalence(layout, rng):
    pure = get_backend("pure")
    comp = get_backend("cython")
    x = interior_point(layout, rng)
    z = interior_point(layout, rng)
    wp = pure.workspace(layout)
    wc = comp.workspace(layout)
    lam_p = pure.compute_scaling(layout, x, z, wp)
    lam_c = comp.compute_scaling(layout, x, z, wc)
    np.testing.assert_allclose(lam_c, lam_p, rtol=1e-10, atol=1e-13)
    u = rng.standard_normal(layout.n)
    for mode in (MODE_W, MODE_WT, MODE_WINV, MODE_WINVT):
        np.testing.assert_allclose(
            comp.apply_w(layout, wc, u, mode), pure.apply_w(layout, wp, u, mode),
            rtol=1e-9, atol=1e-12)
    A = np.random.default_rng(0).standard_normal((4, layout.n))
    np.testing.assert_allclose(comp.build_aw(layout, wc, A), pure.build_aw(layout, wp, A),
                               rtol=1e-9, atol=1e-12)
    d = np.random.default_rng(1).standard_normal(layout.n)
    np.testing.assert_allclose(comp.jordan_mul(layout, lam_c, d),
                               pure.jordan_mul(layout, lam_p, d), rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(comp.jordan_solve(layout, lam_c, d),
                               pure.jordan_solve(layout, lam_p, d), rtol=1e-9, atol=1e-12)
    assert comp.max_step(layout, x, d) == pytest.approx(
        pure.max_step(layout, x, d), rel=1e-9, abs=1e-12)


def test_svec_trace_inner_product(rng):
    A = rng.standard_normal((4, 4))
    A = A + A.T
    B = rng.standard_normal((4, 4))
    B = B + B.T
    assert svec(A) @ svec(B) == pytest.approx(np.trace(A @ B), rel=1e-12)
    np.testing.assert_allclose(smat(svec(A), 4), A, atol=1e-14)
