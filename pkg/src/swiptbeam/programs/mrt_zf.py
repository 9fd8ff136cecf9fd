"""Two-stage hybrid MRT-ZF design.

Stage 1 optimizes the per-user mixing coefficients through the relaxed
convex program in (x, y, s, z, rho, P^r): the link gains and the
transmit power are linear in (x, y, s) because the ZF component drops
out of every cross gain, and s_i = sqrt(x_i y_i) relaxes to the rotated
cone x_i y_i >= s_i^2.  Stage 2 normalizes the resulting directions and
re-solves the fixed-weight program for a feasible allocation; if that
certifies infeasible, closed-form ZF is the fallback, so the returned
outcome is always feasible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..beamformers import MrtZfCoefficients, interference_null_directions, mrt_zf_weights
from ..conic import ProblemBuilder, SolverStatus, solve_conic
from ..model import (BeamformerWeights, ChannelSet, SolveOutcome, SolveStatus,
                     SystemConfig)
from . import fixed_weight as fixed_weight_mod
from .closed_form import solve_zf_closed_form
from .support import PIPELINE_OPTS, canonical_config, effective_eh_threshold

__all__ = ["MrtZfVarMap", "MrtZfData", "MrtZfResult", "build_mrt_zf_relaxation",
           "solve_mrt_zf"]


@dataclass(frozen=True)
class MrtZfVarMap:
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    z: np.ndarray
    rho: np.ndarray
    p_recv: np.ndarray


@dataclass(frozen=True)
class MrtZfData:
    """Channel functionals driving the relaxation.

    Q[i, j] = |h_{i,j}^T h*_{j,j}|; q[i] = h_{i,i}^T (I - F_i) h*_{i,i}
    (real nonnegative since the projector is Hermitian idempotent);
    direct_norm[i] = ||h_{i,i}||.
    """

    Q: np.ndarray
    q: np.ndarray
    direct_norm: np.ndarray


@dataclass(frozen=True)
class MrtZfResult:
    outcome: SolveOutcome
    coeffs: MrtZfCoefficients | None
    weights: BeamformerWeights | None
    stage1_objective: float
    zf_fallback_used: bool


def mrt_zf_data(channels: ChannelSet) -> MrtZfData:
    K = channels.n_users
    h = channels.h
    zf_dirs = interference_null_directions(channels)
    Q = np.empty((K, K))
    q = np.empty(K)
    norms = np.empty(K)
    for i in range(K):
        for j in range(K):
            Q[i, j] = abs(h[i, j] @ h[j, j].conj())
        q[i] = max(float((h[i, i] @ zf_dirs[i]).real), 0.0)
        norms[i] = np.linalg.norm(h[i, i])
    return MrtZfData(Q=Q, q=q, direct_norm=norms)


def build_mrt_zf_relaxation(config: SystemConfig, channels: ChannelSet):
    """Stage-1 conic program; returns (problem, var map, channel data).

    Internally the mixing variables are expressed against unit-norm MRT
    and ZF directions, so they carry mW units (x_hat = x ||h_ii||^2,
    y_hat = y q, s_hat = s ||h_ii|| sqrt(q)); this is the rotated-cone
    preserving rescaling that keeps the data within a few decades.  The
    var map indices refer to the normalized basis.
    """
    data = mrt_zf_data(channels)
    K = config.n_users
    gamma = config.sinr_threshold
    lam = effective_eh_threshold(config)
    sigma2 = config.noise_mw
    sigmaC2 = config.conversion_noise_mw

    n = data.direct_norm                    # ||h_ii||
    mzf = np.sqrt(data.q)                   # ||(I - F_i) h*_ii||
    cosct = np.divide(mzf, n, out=np.zeros_like(n), where=n > 0)
    Qn = data.Q / np.where(n > 0, n, 1.0)[None, :]   # |h_ij^T hhat*_jj|

    bld = ProblemBuilder()
    s_idx = bld.add_nonneg(K)
    x_idx = np.empty(K, dtype=int)
    y_idx = np.empty(K, dtype=int)
    w3_idx = np.empty(K, dtype=int)
    z_idx = np.empty(K, dtype=int)
    rho_idx = np.empty(K, dtype=int)
    w1_idx = np.empty(K, dtype=int)
    pr_idx = np.empty(K, dtype=int)
    w2_idx = np.empty(K, dtype=int)
    for i in range(K):
        u, v, zz = bld.add_rsoc(1)  # 2 x_i y_i >= w3_i^2, w3_i = sqrt(2) s_i
        x_idx[i], y_idx[i], w3_idx[i] = u, v, zz[0]
    for i in range(K):
        u, v, zz = bld.add_rsoc(1)  # 2 z_i rho_i >= 2 gamma_i sigma_C^2
        z_idx[i], rho_idx[i], w1_idx[i] = u, v, zz[0]
    for i in range(K):
        u, v, zz = bld.add_rsoc(1)  # 2 P^r_i rhobar_i >= 2 lambda_i
        pr_idx[i], w2_idx[i] = u, zz[0]
        bld.add_eq({int(rho_idx[i]): 1.0, int(v): 1.0}, 1.0)

    # total power: P_i = x_i + y_i + 2 s_i cos(theta_i) in the normalized basis
    for i in range(K):
        bld.set_objective([int(x_idx[i]), int(y_idx[i]), int(s_idx[i])],
                          [1.0, 1.0, 2.0 * float(cosct[i])])

    for i in range(K):
        # direct gain G_ii = x_i n_i^2 + y_i q_i + 2 s_i n_i m_i
        gii = {int(x_idx[i]): float(n[i] ** 2), int(y_idx[i]): float(data.q[i]),
               int(s_idx[i]): 2.0 * float(n[i] * mzf[i])}
        # P^r_i = sum_{j != i} x_j Qn_ij^2 + G_ii + sigma^2
        row = {int(pr_idx[i]): 1.0}
        for j in range(K):
            if j != i:
                row[int(x_idx[j])] = row.get(int(x_idx[j]), 0.0) - float(Qn[i, j] ** 2)
        for idx, val in gii.items():
            row[idx] = row.get(idx, 0.0) - val
        bld.add_eq(row, sigma2)
        # z_i + gamma_i sum_{j != i} x_j Qn_ij^2 - G_ii = -gamma_i sigma^2
        row = {int(z_idx[i]): 1.0}
        for j in range(K):
            if j != i:
                row[int(x_idx[j])] = row.get(int(x_idx[j]), 0.0) + float(gamma[i] * Qn[i, j] ** 2)
        for idx, val in gii.items():
            row[idx] = row.get(idx, 0.0) - val
        bld.add_eq(row, -float(gamma[i] * sigma2))
        bld.add_eq({int(w1_idx[i]): 1.0}, float(np.sqrt(2.0 * gamma[i] * sigmaC2)))
        bld.add_eq({int(w2_idx[i]): 1.0}, float(np.sqrt(2.0 * lam[i])))
        bld.add_eq({int(w3_idx[i]): 1.0, int(s_idx[i]): -np.sqrt(2.0)}, 0.0)

    vm = MrtZfVarMap(x=x_idx, y=y_idx, s=s_idx, z=z_idx, rho=rho_idx, p_recv=pr_idx)
    return bld.build(), vm, data


def solve_mrt_zf(config: SystemConfig, channels: ChannelSet, *, kernels=None) -> MrtZfResult:
    t0 = time.perf_counter()
    K = config.n_users
    cfg_c, unit = canonical_config(config)
    problem, vm, data = build_mrt_zf_relaxation(cfg_c, channels)
    sol = solve_conic(problem, kernels=kernels, **PIPELINE_OPTS)
    if sol.status != SolverStatus.OPTIMAL:
        # the relaxation contains pure ZF, which is always feasible, so
        # anything but Optimal is a numerical failure
        outcome = SolveOutcome(P=np.zeros(K), rho=np.full(K, 0.5), total_power=np.nan,
                               feasible=False, status=SolveStatus.NUMERICAL_FAILURE,
                               residuals=np.full(1, np.nan),
                               wall_time=time.perf_counter() - t0)
        return MrtZfResult(outcome=outcome, coeffs=None, weights=None,
                           stage1_objective=np.nan, zf_fallback_used=False)

    # back to mW and the unnormalized-direction basis for the weights
    n2 = np.maximum(data.direct_norm ** 2, 1e-300)
    q_safe = np.maximum(data.q, 1e-300)
    x = unit * np.maximum(sol.primal[vm.x], 0.0) / n2
    y = unit * np.maximum(sol.primal[vm.y], 0.0) / q_safe
    stage1_objective = unit * float(sol.primal_objective)

    degenerate = x + y <= 0.0
    if np.any(degenerate):
        zf = solve_zf_closed_form(config, channels)
        outcome_t = time.perf_counter() - t0
        outcome = _retimed(zf.outcome, outcome_t)
        return MrtZfResult(outcome=outcome, coeffs=None, weights=zf.weights,
                           stage1_objective=stage1_objective, zf_fallback_used=True)

    coeffs = MrtZfCoefficients(x=x, y=y)
    weights = mrt_zf_weights(channels, coeffs)
    stage2 = fixed_weight_mod.solve_fixed_weight(config, channels, weights, kernels=kernels)
    if stage2.outcome.status == SolveStatus.OPTIMAL:
        outcome = _retimed(stage2.outcome, time.perf_counter() - t0)
        return MrtZfResult(outcome=outcome, coeffs=coeffs, weights=weights,
                           stage1_objective=stage1_objective, zf_fallback_used=False)

    zf = solve_zf_closed_form(config, channels)
    outcome = _retimed(zf.outcome, time.perf_counter() - t0)
    return MrtZfResult(outcome=outcome, coeffs=coeffs, weights=zf.weights,
                       stage1_objective=stage1_objective, zf_fallback_used=True)


def _retimed(outcome: SolveOutcome, wall_time: float) -> SolveOutcome:
    return SolveOutcome(P=outcome.P, rho=outcome.rho, total_power=outcome.total_power,
                        feasible=outcome.feasible, status=outcome.status,
                        residuals=outcome.residuals, wall_time=wall_time)
