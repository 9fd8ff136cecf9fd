"""Pure-NumPy cone kernels (reference backend).

The solver's per-iteration work factors through this small API so a
compiled twin (``_core``) can be swapped in at import time:

* ``compute_scaling``  Nesterov-Todd scaling point per block
* ``apply_w``          multiply by W / W^T / W^{-1} / W^{-T}
* ``build_aw``         rows (W^T a_i) for the Schur complement (AW)(AW)^T
* ``jordan_mul`` / ``jordan_solve``  Jordan-algebra products per block
* ``max_step``         step to the cone boundary from an interior point
* ``membership_margin`` smallest block margin (for validation)

Rotated cones are handled natively through the orthogonal rotation
T: (u, v, z) -> ((u+v)/sqrt2, (u-v)/sqrt2, z) that maps them onto the
standard quadratic cone; T is its own inverse and transpose.
"""

from __future__ import annotations

import numpy as np

from ..cones import (KIND_NONNEG, KIND_PSD, KIND_RSOC, ConeLayout, _svec_indices)

BACKEND_NAME = "pure"

MODE_W = 0
MODE_WT = 1
MODE_WINV = 2
MODE_WINVT = 3

_SQRT2 = np.sqrt(2.0)


# ---------------------------------------------------------------------------
# helpers

def _rot(u: np.ndarray) -> np.ndarray:
    """Apply the rotated-cone <-> quadratic-cone change of basis."""
    out = u.copy()
    out[0] = (u[0] + u[1]) / _SQRT2
    out[1] = (u[0] - u[1]) / _SQRT2
    return out


def _smat_one(v: np.ndarray, side: int) -> np.ndarray:
    iu, ju, scale = _svec_indices(side)
    M = np.zeros((side, side))
    vals = v / scale
    M[iu, ju] = vals
    M[ju, iu] = vals
    return M


def _svec_one(M: np.ndarray) -> np.ndarray:
    side = M.shape[0]
    iu, ju, scale = _svec_indices(side)
    return M[iu, ju] * scale


def _soc_w_matrices(xs: np.ndarray, zs: np.ndarray):
    """NT scaling for a standard quadratic cone block, as dense (W, W^{-1})."""
    d = xs.shape[0]
    # factored form avoids cancellation when the block is near the boundary
    xn = np.linalg.norm(xs[1:])
    zn = np.linalg.norm(zs[1:])
    a2 = (xs[0] - xn) * (xs[0] + xn)
    b2 = (zs[0] - zn) * (zs[0] + zn)
    if a2 <= 0.0 or b2 <= 0.0 or xs[0] <= 0.0 or zs[0] <= 0.0:
        return None
    a, b = np.sqrt(a2), np.sqrt(b2)
    xh = xs / a
    zh = zs / b
    gamma2 = (1.0 + xh @ zh) / 2.0
    if gamma2 <= 0.0:
        return None
    gamma = np.sqrt(gamma2)
    wb = xh.copy()
    wb[0] += zh[0]
    wb[1:] -= zh[1:]
    wb /= 2.0 * gamma
    # V = [[w0, wr^T], [wr, I + wr wr^T / (1 + w0)]], V^{-1} = J V J
    w0 = wb[0]
    wr = wb[1:]
    V = np.empty((d, d))
    V[0, 0] = w0
    V[0, 1:] = wr
    V[1:, 0] = wr
    V[1:, 1:] = np.eye(d - 1) + np.outer(wr, wr) / (1.0 + w0)
    Vinv = V.copy()
    Vinv[0, 1:] = -wr
    Vinv[1:, 0] = -wr
    sqrt_eta = np.sqrt(np.sqrt(a2 / b2))
    return sqrt_eta * V, Vinv / sqrt_eta


# ---------------------------------------------------------------------------
# kernel API

def workspace(layout: ConeLayout) -> np.ndarray:
    return np.empty(layout.wsize)


def compute_scaling(layout: ConeLayout, x: np.ndarray, z: np.ndarray,
                    work: np.ndarray) -> np.ndarray | None:
    """Fill the scaling workspace; returns the scaled point lambda or None
    if either iterate is not interior."""
    lam = np.empty(layout.n)
    for k, kind in enumerate(layout.kinds):
        o, d, wo = layout.offs[k], layout.dims[k], layout.woffs[k]
        xb = x[o:o + d]
        zb = z[o:o + d]
        if kind == KIND_NONNEG:
            if np.any(xb <= 0.0) or np.any(zb <= 0.0):
                return None
            work[wo:wo + d] = np.sqrt(xb / zb)
            lam[o:o + d] = np.sqrt(xb * zb)
        elif kind == KIND_RSOC:
            got = _soc_w_matrices(_rot(xb), _rot(zb))
            if got is None:
                return None
            Ws, Wsinv = got
            # conjugate by the rotation once so later applies are plain matvecs
            T = np.eye(d)
            T[0, 0] = T[0, 1] = T[1, 0] = 1.0 / _SQRT2
            T[1, 1] = -1.0 / _SQRT2
            Wf = T @ Ws @ T
            Wfinv = T @ Wsinv @ T
            work[wo:wo + d * d] = Wf.ravel()
            work[wo + d * d:wo + 2 * d * d] = Wfinv.ravel()
            lam[o:o + d] = Wf @ zb
        else:
            s = layout.sides[k]
            X = _smat_one(xb, s)
            Z = _smat_one(zb, s)
            try:
                Lx = np.linalg.cholesky(X)
                Lz = np.linalg.cholesky(Z)
            except np.linalg.LinAlgError:
                return None
            U, sig, Vt = np.linalg.svd(Lz.T @ Lx)
            if sig[-1] <= 0.0:
                return None
            sqrt_sig = np.sqrt(sig)
            R = (Lx @ Vt.T) / sqrt_sig
            Rinv = ((U / sqrt_sig).T) @ Lz.T
            work[wo:wo + s * s] = R.ravel()
            work[wo + s * s:wo + 2 * s * s] = Rinv.ravel()
            work[wo + 2 * s * s:wo + 2 * s * s + s] = sig
            lam_mat = np.zeros((s, s))
            np.fill_diagonal(lam_mat, sig)
            lam[o:o + d] = _svec_one(lam_mat)
    return lam


def apply_w(layout: ConeLayout, work: np.ndarray, u: np.ndarray, mode: int) -> np.ndarray:
    out = np.empty_like(u)
    for k, kind in enumerate(layout.kinds):
        o, d, wo = layout.offs[k], layout.dims[k], layout.woffs[k]
        ub = u[o:o + d]
        if kind == KIND_NONNEG:
            w = work[wo:wo + d]
            if mode in (MODE_W, MODE_WT):
                out[o:o + d] = ub * w
            else:
                out[o:o + d] = ub / w
        elif kind == KIND_RSOC:
            if mode in (MODE_W, MODE_WT):
                Wf = work[wo:wo + d * d].reshape(d, d)
            else:
                Wf = work[wo + d * d:wo + 2 * d * d].reshape(d, d)
            out[o:o + d] = Wf @ ub
        else:
            s = layout.sides[k]
            R = work[wo:wo + s * s].reshape(s, s)
            Rinv = work[wo + s * s:wo + 2 * s * s].reshape(s, s)
            M = _smat_one(ub, s)
            if mode == MODE_W:
                res = R @ M @ R.T
            elif mode == MODE_WT:
                res = R.T @ M @ R
            elif mode == MODE_WINV:
                res = Rinv @ M @ Rinv.T
            else:
                res = Rinv.T @ M @ Rinv
            out[o:o + d] = _svec_one(res)
    return out


def build_aw(layout: ConeLayout, work: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Rows (W^T a_i) of the scaled constraint matrix."""
    m = A.shape[0]
    AW = np.empty_like(A)
    for k, kind in enumerate(layout.kinds):
        o, d, wo = layout.offs[k], layout.dims[k], layout.woffs[k]
        Ab = A[:, o:o + d]
        if kind == KIND_NONNEG:
            AW[:, o:o + d] = Ab * work[wo:wo + d]
        elif kind == KIND_RSOC:
            Wf = work[wo:wo + d * d].reshape(d, d)
            AW[:, o:o + d] = Ab @ Wf
        else:
            s = layout.sides[k]
            R = work[wo:wo + s * s].reshape(s, s)
            iu, ju, scale = _svec_indices(s)
            vals = Ab / scale
            Mb = np.zeros((m, s, s))
            Mb[:, iu, ju] = vals
            Mb[:, ju, iu] = vals
            res = np.matmul(R.T, np.matmul(Mb, R))
            AW[:, o:o + d] = res[:, iu, ju] * scale
    return AW


def jordan_mul(layout: ConeLayout, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.empty_like(u)
    for k, kind in enumerate(layout.kinds):
        o, d = layout.offs[k], layout.dims[k]
        ub = u[o:o + d]
        vb = v[o:o + d]
        if kind == KIND_NONNEG:
            out[o:o + d] = ub * vb
        elif kind == KIND_RSOC:
            us, vs = _rot(ub), _rot(vb)
            res = np.empty(d)
            res[0] = us @ vs
            res[1:] = us[0] * vs[1:] + vs[0] * us[1:]
            out[o:o + d] = _rot(res)
        else:
            s = layout.sides[k]
            U = _smat_one(ub, s)
            V = _smat_one(vb, s)
            out[o:o + d] = _svec_one((U @ V + V @ U) / 2.0)
    return out


def jordan_solve(layout: ConeLayout, lam: np.ndarray, d_vec: np.ndarray) -> np.ndarray:
    """Solve lam o y = d blockwise (lam interior)."""
    out = np.empty_like(d_vec)
    for k, kind in enumerate(layout.kinds):
        o, d = layout.offs[k], layout.dims[k]
        lb = lam[o:o + d]
        db = d_vec[o:o + d]
        if kind == KIND_NONNEG:
            out[o:o + d] = db / lb
        elif kind == KIND_RSOC:
            ls, ds = _rot(lb), _rot(db)
            det = ls[0] * ls[0] - ls[1:] @ ls[1:]
            y = np.empty(d)
            y[0] = (ls[0] * ds[0] - ls[1:] @ ds[1:]) / det
            y[1:] = (ds[1:] - y[0] * ls[1:]) / ls[0]
            out[o:o + d] = _rot(y)
        else:
            s = layout.sides[k]
            L = _smat_one(lb, s)
            D = _smat_one(db, s)
            # Sylvester solve (L Y + Y L)/2 = D in the eigenbasis of L;
            # on the solver path L is diagonal already
            vals, vecs = np.linalg.eigh(L)
            Dt = vecs.T @ D @ vecs
            denom = (vals[:, None] + vals[None, :]) / 2.0
            out[o:o + d] = _svec_one(vecs @ (Dt / denom) @ vecs.T)
    return out


def max_step(layout: ConeLayout, v: np.ndarray, dv: np.ndarray) -> float:
    """sup { alpha >= 0 : v + alpha dv in K } for interior v (inf -> large)."""
    alpha = np.inf
    for k, kind in enumerate(layout.kinds):
        o, d = layout.offs[k], layout.dims[k]
        vb = v[o:o + d]
        db = dv[o:o + d]
        if kind == KIND_NONNEG:
            neg = db < 0.0
            if np.any(neg):
                alpha = min(alpha, np.min(-vb[neg] / db[neg]))
        elif kind == KIND_RSOC:
            vs, ds = _rot(vb), _rot(db)
            c2 = ds[0] * ds[0] - ds[1:] @ ds[1:]
            c1 = 2.0 * (vs[0] * ds[0] - vs[1:] @ ds[1:])
            c0 = vs[0] * vs[0] - vs[1:] @ vs[1:]
            root = _smallest_positive_root(c2, c1, c0)
            if root is not None:
                alpha = min(alpha, root)
            # head can also cap the step when the quadratic stays positive
            if ds[0] < 0.0:
                alpha = min(alpha, -vs[0] / ds[0])
        else:
            s = layout.sides[k]
            V = _smat_one(vb, s)
            D = _smat_one(db, s)
            try:
                L = np.linalg.cholesky(V)
            except np.linalg.LinAlgError:
                return 0.0
            Linv_D = np.linalg.solve(L, D)
            M = np.linalg.solve(L, Linv_D.T)
            lam_min = np.linalg.eigvalsh((M + M.T) / 2.0)[0]
            if lam_min < 0.0:
                alpha = min(alpha, -1.0 / lam_min)
    return float(alpha)


def _smallest_positive_root(c2: float, c1: float, c0: float) -> float | None:
    """Smallest positive root of c2 a^2 + c1 a + c0 with c0 > 0, else None."""
    if c2 == 0.0:
        if c1 < 0.0:
            return -c0 / c1
        return None
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0.0:
        return None
    sq = np.sqrt(disc)
    q = -(c1 + np.copysign(sq, c1)) / 2.0
    roots = []
    if c2 != 0.0:
        roots.append(q / c2)
    if q != 0.0:
        roots.append(c0 / q)
    pos = [r for r in roots if r > 0.0]
    return min(pos) if pos else None


def membership_margin(layout: ConeLayout, u: np.ndarray) -> float:
    """Smallest signed distance-like margin across blocks (>= 0 means in K)."""
    margin = np.inf
    for k, kind in enumerate(layout.kinds):
        o, d = layout.offs[k], layout.dims[k]
        ub = u[o:o + d]
        if kind == KIND_NONNEG:
            margin = min(margin, float(np.min(ub)))
        elif kind == KIND_RSOC:
            us = _rot(ub)
            margin = min(margin, float(us[0] - np.linalg.norm(us[1:])))
        else:
            s = layout.sides[k]
            vals = np.linalg.eigvalsh(_smat_one(ub, s))
            margin = min(margin, float(vals[0]))
    return float(margin)
