"""Complex Hermitian <-> real symmetric embedding and spectral utilities.

The embedding [[Re, -Im], [Im, Re]] is linear, doubles the trace, maps
complex PSD matrices onto real PSD matrices of the structured subspace,
and doubles ranks; it lets the real-cone solver handle the lifted
complex matrix variables.
"""

from __future__ import annotations

import numpy as np

__all__ = ["embed_hermitian", "extract_hermitian", "principal_eigvec", "numeric_rank"]

_HERM_TOL = 1e-10


def _check_hermitian(H: np.ndarray, tol: float) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - H.conj().T)) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return H


def embed_hermitian(H: np.ndarray, *, tol: float = _HERM_TOL) -> np.ndarray:
    """Real symmetric 2Kx2K embedding [[Re, -Im], [Im, Re]] of Hermitian H."""
    H = _check_hermitian(H, tol)
    re, im = H.real, H.imag
    top = np.hstack([re, -im])
    bot = np.hstack([im, re])
    return np.vstack([top, bot])


def extract_hermitian(X: np.ndarray) -> np.ndarray:
    """Inverse of :func:`embed_hermitian`.

    Projects onto the embedded subspace first (average of X and its
    conjugation by the symplectic rotation), so slightly-off solver
    output maps to the nearest Hermitian matrix; exact round trip for
    exact embeddings.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] % 2:
        raise ValueError("expected a square matrix of even side")
    K = X.shape[0] // 2
    A = X[:K, :K]
    B = X[:K, K:]
    C = X[K:, :K]
    D = X[K:, K:]
    # J-average projection: [[ (A+D)/2, (B-C)/2 ], [ (C-B)/2, (A+D)/2 ]]
    H = (A + D) / 2.0 + 1j * (C - B) / 2.0
    return (H + H.conj().T) / 2.0


def principal_eigvec(W: np.ndarray, *, tol: float = _HERM_TOL) -> tuple[float, np.ndarray]:
    """Largest eigenpair of a Hermitian PSD matrix.

    The eigenvector phase is fixed so its largest-magnitude component is
    real nonnegative, making the output deterministic.
    """
    W = _check_hermitian(W, tol)
    vals, vecs = np.linalg.eigh((W + W.conj().T) / 2.0)
    lam = float(vals[-1])
    v = vecs[:, -1]
    k = int(np.argmax(np.abs(v)))
    if np.abs(v[k]) > 0:
        v = v * (v[k].conjugate() / np.abs(v[k]))
    return lam, v


def numeric_rank(W: np.ndarray, tol_ratio: float = 1e-6) -> int:
    """Count of eigenvalues above tol_ratio times the largest; 0 for zero W."""
    W = _check_hermitian(W, _HERM_TOL)
    vals = np.linalg.eigvalsh((W + W.conj().T) / 2.0)
    lam_max = float(vals[-1]) if vals.size else 0.0
    if lam_max <= 0.0:
        return 0
    return int(np.sum(vals > tol_ratio * lam_max))
