"""Fixed/structured transmit beamformer families.

All constructors return unit-norm weights with the global phase rotated
so that h_{i,i}^T w_i is real nonnegative, which makes outputs
deterministic and regression-friendly (objective values are invariant
to the per-user phase).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BeamformerWeights, ChannelSet, LinkGains, Scheme

__all__ = [
    "DegenerateChannelError",
    "MrtZfCoefficients",
    "zf_weights",
    "mrt_weights",
    "rzf_weights",
    "mrt_zf_weights",
    "link_gains",
    "interference_null_directions",
]

# relative singular-value cutoff for the interference pseudo-inverse
_RANK_CUTOFF = 1e-12


class DegenerateChannelError(RuntimeError):
    """Raised when a channel draw does not admit the requested construction."""


@dataclass(frozen=True)
class MrtZfCoefficients:
    """Per-user mixing coefficients of the hybrid beamformer."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be equal-length vectors")
        if np.any(x < 0) or np.any(y < 0):
            raise ValueError("mixing coefficients must be nonnegative")
        if np.any(x + y <= 0):
            raise ValueError("x_i + y_i must be positive for every user")
        x, y = x.copy(), y.copy()
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


def _fix_phase(w: np.ndarray, h_direct: np.ndarray) -> np.ndarray:
    ip = h_direct @ w
    mag = abs(ip)
    if mag > 0:
        w = w * (ip.conjugate() / mag)
    return w


def interference_null_directions(channels: ChannelSet) -> np.ndarray:
    """Unnormalized ZF directions r_i = (I - F_i) h*_{i,i}.

    F_i is the orthogonal projector onto the row space of the stacked
    cross-channel matrix H_i = [h_{j,i}^T]_{j != i}; full row rank is
    required (holds with probability 1 for Rayleigh draws).
    """
    K = channels.n_users
    h = channels.h
    out = np.empty((K, K), dtype=complex)
    for i in range(K):
        target = h[i, i].conj()
        if K == 1:
            out[i] = target
            continue
        Hi = np.vstack([h[j, i] for j in range(K) if j != i])
        _, s, vh = np.linalg.svd(Hi, full_matrices=False)
        if s[0] == 0.0:
            raise DegenerateChannelError(f"cross-channel matrix for user {i} is zero")
        rank = int(np.sum(s > _RANK_CUTOFF * s[0]))
        if rank < K - 1:
            raise DegenerateChannelError(f"cross-channel matrix for user {i} is rank-deficient")
        vr = vh[:rank]  # rows span the row space of Hi
        out[i] = target - vr.conj().T @ (vr @ target)
    return out


def zf_weights(channels: ChannelSet) -> BeamformerWeights:
    """Zero-forcing weights: w_i = (I - F_i) h*_{i,i} normalized."""
    K = channels.n_users
    directions = interference_null_directions(channels)
    w = np.empty((K, K), dtype=complex)
    for i in range(K):
        norm = np.linalg.norm(directions[i])
        if norm <= _RANK_CUTOFF * np.linalg.norm(channels.h[i, i]) or norm == 0.0:
            raise DegenerateChannelError(f"projected direct channel vanishes for user {i}")
        w[i] = _fix_phase(directions[i] / norm, channels.h[i, i])
    return BeamformerWeights(w=w, scheme=Scheme.ZF)


def mrt_weights(channels: ChannelSet) -> BeamformerWeights:
    """Matched-filter weights: w_i = h*_{i,i} / ||h_{i,i}||."""
    K = channels.n_users
    w = np.empty((K, K), dtype=complex)
    for i in range(K):
        norm = np.linalg.norm(channels.h[i, i])
        if norm == 0.0:
            raise DegenerateChannelError(f"direct channel for user {i} is zero")
        w[i] = _fix_phase(channels.h[i, i].conj() / norm, channels.h[i, i])
    return BeamformerWeights(w=w, scheme=Scheme.MRT)


def rzf_weights(channels: ChannelSet, eta: float = 1.0) -> BeamformerWeights:
    """Regularized ZF: w_i = (G_i G_i^H + eta I)^{-1} h*_{i,i} normalized.

    G_i stacks all channels leaving transmitter i; eta > 0 keeps the
    system matrix positive definite for any draw.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    K = channels.n_users
    h = channels.h
    w = np.empty((K, K), dtype=complex)
    eye = np.eye(K)
    for i in range(K):
        Gi = h[:, i, :]  # rows h_{j,i}^T
        A = Gi @ Gi.conj().T + eta * eye
        sol = np.linalg.solve(A, h[i, i].conj())
        norm = np.linalg.norm(sol)
        if norm == 0.0:
            raise DegenerateChannelError(f"regularized solve vanished for user {i}")
        w[i] = _fix_phase(sol / norm, h[i, i])
    return BeamformerWeights(w=w, scheme=Scheme.RZF, aux={"eta": float(eta)})


def mrt_zf_weights(channels: ChannelSet, coeffs: MrtZfCoefficients) -> BeamformerWeights:
    """Hybrid weights: normalize sqrt(x_i) h*_{i,i} + sqrt(y_i) (I - F_i) h*_{i,i}.

    y_i = 0 reproduces the MRT direction, x_i = 0 the ZF direction.
    """
    K = channels.n_users
    if coeffs.x.shape != (K,):
        raise ValueError("coefficient length must match the user count")
    zf_dirs = interference_null_directions(channels)
    w = np.empty((K, K), dtype=complex)
    for i in range(K):
        vec = np.sqrt(coeffs.x[i]) * channels.h[i, i].conj() + np.sqrt(coeffs.y[i]) * zf_dirs[i]
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise DegenerateChannelError(f"hybrid direction vanishes for user {i}")
        w[i] = _fix_phase(vec / norm, channels.h[i, i])
    return BeamformerWeights(
        w=w, scheme=Scheme.MRT_ZF,
        aux={"x": coeffs.x.copy(), "y": coeffs.y.copy()},
    )


def link_gains(channels: ChannelSet, weights: BeamformerWeights) -> LinkGains:
    """G[i, j] = |h_{i,j}^T w_j|^2."""
    K = channels.n_users
    if weights.w.shape != (K, K):
        raise ValueError("weights do not match the channel dimension")
    # inner product without conjugation: h^T w
    prods = np.einsum("ijk,jk->ij", channels.h, weights.w)
    return LinkGains(G=np.abs(prods) ** 2)
