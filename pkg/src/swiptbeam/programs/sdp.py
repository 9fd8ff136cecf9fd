"""Joint beamforming via the lifted semidefinite relaxation.

Lifting v_i v_i^H to Hermitian PSD matrix variables turns the joint
design into a convex program; the complex blocks ride through the
solver in the real symmetric embedding (trace doubling compensated).
The 2x2 constraint matrices of the reformulated SINR/EH rows have a
fixed off-diagonal, so they reduce exactly to rotated-cone rows with
two nonnegative principal minors; only the lifted blocks use the PSD
cone, keeping the KKT systems small.

Extraction follows the relaxation-recovery recipe: rank-1 blocks give
the beamformer directly via the principal eigenvector; otherwise the
eigenvector directions are repaired by the fixed-weight program, with
closed-form ZF as the (flagged) last resort.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..conic import ProblemBuilder, SolverStatus, solve_conic, svec
from ..conic.hermitian import embed_hermitian, extract_hermitian, numeric_rank, principal_eigvec
from ..model import (BeamformerWeights, ChannelSet, Scheme, SolveOutcome,
                     SolveStatus, SystemConfig, verify_solution)
from .closed_form import solve_zf_closed_form
from .fixed_weight import solve_fixed_weight
from .support import PIPELINE_OPTS, canonical_config, effective_eh_threshold

__all__ = ["SdpSolution", "SdpVarMap", "OptimalResult", "build_sdp",
           "solve_sdp_relaxation", "solve_optimal"]

RANK_TOL_RATIO = 1e-6


@dataclass(frozen=True)
class SdpVarMap:
    W_blocks: tuple  # per-user svec index ranges (real embedded)
    t: np.ndarray
    rho: np.ndarray
    rho_bar: np.ndarray
    p_recv: np.ndarray
    side: int


@dataclass(frozen=True)
class SdpSolution:
    W: tuple  # complex Hermitian PSD K x K matrices
    rho: np.ndarray
    objective: float
    ranks: np.ndarray


@dataclass(frozen=True)
class OptimalResult:
    outcome: SolveOutcome
    weights: BeamformerWeights | None
    sdp: SdpSolution | None
    solver_status: SolverStatus
    rank_repair_used: bool = False
    zf_fallback_used: bool = False


def build_sdp(config: SystemConfig, channels: ChannelSet):
    """Conic IR of the rank-relaxed joint design problem."""
    K = config.n_users
    h = channels.h
    gamma = config.sinr_threshold
    lam = effective_eh_threshold(config)
    sigma2 = config.noise_mw
    sigmaC = float(np.sqrt(config.conversion_noise_mw))
    side = 2 * K

    # coefficient rows: <svec(embed(M_ij))/2, svec(embed(W_j))> = trace(M_ij W_j)
    coef = np.empty((K, K, side * (side + 1) // 2))
    for i in range(K):
        for j in range(K):
            M = np.outer(h[i, j].conj(), h[i, j])
            coef[i, j] = svec(embed_hermitian(M)) / 2.0

    bld = ProblemBuilder()
    W_blocks = tuple(bld.add_psd(side) for _ in range(K))
    t_idx = np.empty(K, dtype=int)
    rho_idx = np.empty(K, dtype=int)
    rho_bar_idx = np.empty(K, dtype=int)
    pr_idx = np.empty(K, dtype=int)
    c1_idx = np.empty(K, dtype=int)
    c2_idx = np.empty(K, dtype=int)
    for i in range(K):
        u, v, zz = bld.add_rsoc(1)  # 2 t_i rho_i >= 2 sigma_C^2
        t_idx[i], rho_idx[i], c1_idx[i] = u, v, zz[0]
    for i in range(K):
        u, v, zz = bld.add_rsoc(1)  # 2 P^r_i rhobar_i >= 2 lambda_i
        pr_idx[i], rho_bar_idx[i], c2_idx[i] = u, v, zz[0]
    cap_idx = bld.add_nonneg(K) if config.p_max_mw is not None else None

    # objective: sum_i trace(W_i) (complex trace = embedded trace / 2)
    diag_half = svec(np.eye(side)) / 2.0
    for blk in W_blocks:
        bld.set_objective(blk, diag_half)

    for i in range(K):
        # t_i - (1/gamma_i) tr(M_ii W_i) + sum_{j != i} tr(M_ij W_j) = -sigma^2
        row = {int(t_idx[i]): 1.0}
        for j in range(K):
            sign = -1.0 / gamma[i] if j == i else 1.0
            blk = W_blocks[j]
            vals = sign * coef[i, j]
            for k in np.flatnonzero(vals):
                row[int(blk[k])] = row.get(int(blk[k]), 0.0) + float(vals[k])
        bld.add_eq(row, -sigma2)
        # P^r_i - sum_j tr(M_ij W_j) = sigma^2
        row = {int(pr_idx[i]): 1.0}
        for j in range(K):
            blk = W_blocks[j]
            vals = coef[i, j]
            for k in np.flatnonzero(vals):
                row[int(blk[k])] = row.get(int(blk[k]), 0.0) - float(vals[k])
        bld.add_eq(row, sigma2)
        bld.add_eq({int(rho_idx[i]): 1.0, int(rho_bar_idx[i]): 1.0}, 1.0)
        bld.add_eq({int(c1_idx[i]): 1.0}, np.sqrt(2.0) * sigmaC)
        bld.add_eq({int(c2_idx[i]): 1.0}, float(np.sqrt(2.0 * lam[i])))
        if cap_idx is not None:
            row = {int(cap_idx[i]): 1.0}
            blk = W_blocks[i]
            for k in np.flatnonzero(diag_half):
                row[int(blk[k])] = float(diag_half[k])
            bld.add_eq(row, float(config.p_max_mw[i]))

    problem = bld.build()
    vm = SdpVarMap(W_blocks=W_blocks, t=t_idx, rho=rho_idx, rho_bar=rho_bar_idx,
                   p_recv=pr_idx, side=side)
    return problem, vm


def _extract_blocks(sol_primal: np.ndarray, vm: SdpVarMap) -> list[np.ndarray]:
    from ..conic import smat

    out = []
    for blk in vm.W_blocks:
        X = smat(sol_primal[blk], vm.side)
        out.append(extract_hermitian(X))
    return out


def solve_sdp_relaxation(config: SystemConfig, channels: ChannelSet, *, kernels=None):
    """Solve the relaxation; returns (SdpSolution | None, ConicSolution).

    Solved in canonical power units (exact scaling covariance); the
    returned lifted blocks are rescaled back to mW.
    """
    cfg_c, unit = canonical_config(config)
    problem, vm = build_sdp(cfg_c, channels)
    sol = solve_conic(problem, kernels=kernels, **PIPELINE_OPTS)
    if sol.status != SolverStatus.OPTIMAL:
        return None, sol
    W = [unit * Wi for Wi in _extract_blocks(sol.primal, vm)]
    rho = np.clip(sol.primal[vm.rho], 0.0, 1.0)
    ranks = np.array([numeric_rank(Wi, RANK_TOL_RATIO) for Wi in W])
    objective = float(sum(np.trace(Wi).real for Wi in W))
    return SdpSolution(W=tuple(W), rho=rho, objective=objective, ranks=ranks), sol


def solve_optimal(config: SystemConfig, channels: ChannelSet, *, kernels=None) -> OptimalResult:
    """Joint design: relaxation, eigenvector extraction, feasibility repair."""
    t0 = time.perf_counter()
    K = config.n_users
    sdp, sol = solve_sdp_relaxation(config, channels, kernels=kernels)
    if sdp is None:
        outcome = SolveOutcome(P=np.zeros(K), rho=np.full(K, 0.5), total_power=np.nan,
                               feasible=False, status=SolveStatus.NUMERICAL_FAILURE,
                               residuals=np.full(1, np.nan),
                               wall_time=time.perf_counter() - t0)
        return OptimalResult(outcome=outcome, weights=None, sdp=None,
                             solver_status=sol.status)

    P = np.empty(K)
    wvecs = np.empty((K, K), dtype=complex)
    for i, Wi in enumerate(sdp.W):
        lam_max, v = principal_eigvec(Wi)
        P[i] = max(float(np.trace(Wi).real), 0.0)
        wvecs[i] = v
    weights = BeamformerWeights(w=wvecs, scheme=Scheme.OPTIMAL)

    if np.all(sdp.ranks <= 1):
        residuals = verify_solution(config, channels, weights, P, sdp.rho)
        outcome = SolveOutcome(P=P, rho=sdp.rho.copy(), total_power=float(np.sum(P)),
                               feasible=True, status=SolveStatus.OPTIMAL,
                               residuals=residuals.as_vector(),
                               wall_time=time.perf_counter() - t0)
        return OptimalResult(outcome=outcome, weights=weights, sdp=sdp,
                             solver_status=sol.status)

    # higher-rank blocks: repair the eigenvector directions by re-solving the
    # power/splitting program with the extracted weights
    repaired = solve_fixed_weight(config, channels, weights, kernels=kernels)
    if repaired.outcome.status == SolveStatus.OPTIMAL:
        outcome = SolveOutcome(P=repaired.outcome.P, rho=repaired.outcome.rho,
                               total_power=repaired.outcome.total_power, feasible=True,
                               status=SolveStatus.OPTIMAL,
                               residuals=repaired.outcome.residuals,
                               wall_time=time.perf_counter() - t0)
        return OptimalResult(outcome=outcome, weights=weights, sdp=sdp,
                             solver_status=sol.status, rank_repair_used=True)

    zf = solve_zf_closed_form(config, channels)
    outcome = SolveOutcome(P=zf.outcome.P, rho=zf.outcome.rho,
                           total_power=zf.outcome.total_power,
                           feasible=zf.outcome.feasible, status=zf.outcome.status,
                           residuals=zf.outcome.residuals,
                           wall_time=time.perf_counter() - t0)
    return OptimalResult(outcome=outcome, weights=zf.weights, sdp=sdp,
                         solver_status=sol.status, rank_repair_used=True,
                         zf_fallback_used=True)
