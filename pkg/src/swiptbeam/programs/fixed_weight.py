"""Optimal power allocation and splitting for any fixed beamformer.

The convex program in (P, z, rho, P^r) uses two rotated-cone rows per
user:

    z_i rho_i >= gamma_i sigma_C^2      (SINR, after the z substitution)
    (1 - rho_i) P^r_i >= lambda_i       (EH)

with the linear coupling z_i + gamma_i P^r_i = (1+gamma_i) G_ii P_i and
the received-power definition.  ``rho_fixed`` pins every rho_i (the
LP_rho comparison scheme); per-transmitter caps add slack variables.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..beamformers import link_gains
from ..conic import ConicProblem, ProblemBuilder, SolverStatus, solve_conic
from ..model import (BeamformerWeights, ChannelSet, LinkGains, SolveOutcome,
                     SolveStatus, SystemConfig, verify_solution)
from .support import (PIPELINE_OPTS, canonical_config, effective_eh_threshold,
                      gains_residuals, infeasible_outcome_fields)

__all__ = ["SocpVarMap", "FixedWeightResult", "build_fixed_weight_socp", "solve_fixed_weight"]


@dataclass(frozen=True)
class SocpVarMap:
    P: np.ndarray
    z: np.ndarray
    rho: np.ndarray
    p_recv: np.ndarray


@dataclass(frozen=True)
class FixedWeightResult:
    outcome: SolveOutcome
    solver_status: SolverStatus
    solver_iterations: int


def build_fixed_weight_socp(config: SystemConfig, gains: LinkGains | np.ndarray,
                            *, rho_fixed: float | None = None
                            ) -> tuple[ConicProblem, SocpVarMap]:
    G = gains.G if isinstance(gains, LinkGains) else np.asarray(gains, dtype=float)
    K = config.n_users
    gamma = config.sinr_threshold
    lam = effective_eh_threshold(config)
    sigma2 = config.noise_mw
    sigmaC2 = config.conversion_noise_mw

    bld = ProblemBuilder()
    has_caps = config.p_max_mw is not None
    P_idx = bld.add_nonneg(K)
    cap_idx = bld.add_nonneg(K) if has_caps else None
    z_idx = np.empty(K, dtype=int)
    rho_idx = np.empty(K, dtype=int)
    pr_idx = np.empty(K, dtype=int)
    w1_idx = np.empty(K, dtype=int)
    w2_idx = np.empty(K, dtype=int)
    for i in range(K):
        u, v, zz = bld.add_rsoc(1)  # 2 z_i rho_i >= w1_i^2
        z_idx[i], rho_idx[i], w1_idx[i] = u, v, zz[0]
    for i in range(K):
        u, v, zz = bld.add_rsoc(1)  # 2 P^r_i rhobar_i >= w2_i^2
        pr_idx[i], w2_idx[i] = u, zz[0]
        rhobar = v
        bld.add_eq({int(rho_idx[i]): 1.0, int(rhobar): 1.0}, 1.0)

    bld.set_objective(P_idx, np.ones(K))
    for i in range(K):
        # z_i + gamma_i P^r_i - (1+gamma_i) G_ii P_i = 0
        bld.add_eq({int(z_idx[i]): 1.0, int(pr_idx[i]): float(gamma[i]),
                    int(P_idx[i]): -float((1.0 + gamma[i]) * G[i, i])}, 0.0)
        # P^r_i - sum_j G_ij P_j = sigma^2
        row = {int(pr_idx[i]): 1.0}
        for j in range(K):
            if G[i, j] != 0.0:
                row[int(P_idx[j])] = row.get(int(P_idx[j]), 0.0) - float(G[i, j])
        bld.add_eq(row, sigma2)
        bld.add_eq({int(w1_idx[i]): 1.0}, float(np.sqrt(2.0 * gamma[i] * sigmaC2)))
        bld.add_eq({int(w2_idx[i]): 1.0}, float(np.sqrt(2.0 * lam[i])))
        if has_caps:
            bld.add_eq({int(P_idx[i]): 1.0, int(cap_idx[i]): 1.0},
                       float(config.p_max_mw[i]))
        if rho_fixed is not None:
            bld.add_eq({int(rho_idx[i]): 1.0}, float(rho_fixed))

    problem = bld.build()
    return problem, SocpVarMap(P=P_idx, z=z_idx, rho=rho_idx, p_recv=pr_idx)


def outcome_from_socp(config: SystemConfig, G: np.ndarray, sol, vm: SocpVarMap,
                      wall_time: float, residual_fn=None) -> SolveOutcome:
    """Map a conic solution of the fixed-weight program back to (P, rho)."""
    if sol.status == SolverStatus.OPTIMAL:
        P = np.maximum(sol.primal[vm.P], 0.0)
        rho = np.clip(sol.primal[vm.rho], 0.0, 1.0)
        residuals = residual_fn(P, rho) if residual_fn is not None \
            else gains_residuals(G, P, rho, config)
        return SolveOutcome(P=P, rho=rho, total_power=float(np.sum(P)), feasible=True,
                            status=SolveStatus.OPTIMAL, residuals=residuals,
                            wall_time=wall_time)
    if sol.status == SolverStatus.PRIMAL_INFEASIBLE:
        return SolveOutcome(**infeasible_outcome_fields(config, G), wall_time=wall_time)
    K = config.n_users
    return SolveOutcome(P=np.zeros(K), rho=np.full(K, 0.5), total_power=np.nan,
                        feasible=False, status=SolveStatus.NUMERICAL_FAILURE,
                        residuals=np.full(1, np.nan), wall_time=wall_time)


def solve_fixed_weight(config: SystemConfig, channels: ChannelSet,
                       weights: BeamformerWeights, *, rho_fixed: float | None = None,
                       kernels=None) -> FixedWeightResult:
    t0 = time.perf_counter()
    G = link_gains(channels, weights).G
    # canonical power units make the pipeline exactly scaling-covariant
    cfg_c, unit = canonical_config(config)
    problem, vm = build_fixed_weight_socp(cfg_c, G, rho_fixed=rho_fixed)
    sol = solve_conic(problem, kernels=kernels, **PIPELINE_OPTS)
    if sol.status == SolverStatus.OPTIMAL:
        sol = _rescale_primal(sol, vm, unit)

    def residual_fn(P, rho):
        return verify_solution(config, channels, weights, P, rho).as_vector()

    outcome = outcome_from_socp(config, G, sol, vm, time.perf_counter() - t0,
                                residual_fn=residual_fn)
    return FixedWeightResult(outcome=outcome, solver_status=sol.status,
                             solver_iterations=sol.iterations)


def _rescale_primal(sol, vm: SocpVarMap, unit: float):
    from dataclasses import replace as _dc_replace

    primal = sol.primal.copy()
    primal[vm.P] *= unit
    primal[vm.p_recv] *= unit
    primal[vm.z] *= unit
    return _dc_replace(sol, primal=primal)
