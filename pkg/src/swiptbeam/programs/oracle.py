"""Brute-force verification oracle for the fixed-weight problem.

Independent of the conic machinery on purpose: feasibility of a power
vector reduces to interval checks once rho is eliminated,

    z_i = (1+gamma_i) G_ii P_i - gamma_i P^r_i > 0
    gamma_i sigma_C^2 / z_i <= 1 - lambda_i / P^r_i,

so the oracle only needs a grid sweep plus deterministic local
refinement.  Limited to K <= 3 (grid dimensionality).  Infeasibility
verdicts are subject to the grid/cap coverage caveat: the search only
certifies emptiness inside [0, p_hi]^K.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..model import LinkGains, SolveOutcome, SolveStatus, SystemConfig
from .support import effective_eh_threshold, gains_residuals, infeasible_outcome_fields

__all__ = ["oracle_fixed_weight"]


def _feasible_mask(G, gamma, lam, sigma2, sigmaC2, P, p_max=None):
    """Vectorized feasibility of candidate rows P[..., K]."""
    pr = P @ G.T + sigma2
    z = (1.0 + gamma) * np.diag(G) * P - gamma * pr
    ok = np.all(z > 0.0, axis=-1) & np.all(pr > lam, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = gamma * sigmaC2 / z
        rhs = 1.0 - lam / pr
        ok &= np.all((lhs <= rhs) | ~np.isfinite(lhs), axis=-1)
        ok &= np.all(np.isfinite(lhs) | (z <= 0), axis=-1)
    if p_max is not None:
        ok &= np.all(P <= p_max, axis=-1)
    return ok


def _rho_midpoint(G, gamma, lam, sigma2, sigmaC2, P):
    pr = P @ G.T + sigma2
    z = (1.0 + gamma) * np.diag(G) * P - gamma * pr
    lo = gamma * sigmaC2 / z
    hi = 1.0 - lam / pr
    return np.clip((lo + hi) / 2.0, 0.0, 1.0)


def _bisect_single_user(gain, gamma, lam, sigma2, sigmaC2, p_hi, p_max):
    def ok(p):
        pr = gain * p + sigma2
        z = gain * p - gamma * sigma2
        if z <= 0.0 or pr <= lam:
            return False
        return gamma * sigmaC2 / z <= 1.0 - lam / pr

    cap = p_hi if p_max is None else min(p_hi, p_max)
    hi = sigma2 / gain if gain > 0 else 1.0
    while not ok(hi):
        hi *= 2.0
        if hi > cap:
            return None
    lo = 0.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def oracle_fixed_weight(config: SystemConfig, gains: LinkGains | np.ndarray,
                        grid_points: int = 400, p_hi_mw: float = 1e3) -> SolveOutcome:
    G = gains.G if isinstance(gains, LinkGains) else np.asarray(gains, dtype=float)
    K = config.n_users
    if K > 3:
        raise ValueError("oracle grid search supports K <= 3")
    gamma = config.sinr_threshold
    lam = effective_eh_threshold(config)
    sigma2 = config.noise_mw
    sigmaC2 = config.conversion_noise_mw
    p_max = config.p_max_mw
    diag = np.diag(G)

    offdiag = G - np.diag(diag)
    if np.max(np.abs(offdiag)) <= 1e-14 * max(np.max(diag), 1e-300):
        P = np.empty(K)
        for i in range(K):
            cap = None if p_max is None else float(p_max[i])
            opt = _bisect_single_user(float(diag[i]), float(gamma[i]), float(lam[i]),
                                      sigma2, sigmaC2, p_hi_mw, cap)
            if opt is None:
                return SolveOutcome(**infeasible_outcome_fields(config, G))
            P[i] = opt
    else:
        P = _coupled_search(G, gamma, lam, sigma2, sigmaC2, grid_points, p_hi_mw, p_max)
        if P is None:
            return SolveOutcome(**infeasible_outcome_fields(config, G))

    rho = _rho_midpoint(G, gamma, lam, sigma2, sigmaC2, P)
    return SolveOutcome(P=P, rho=rho, total_power=float(np.sum(P)), feasible=True,
                        status=SolveStatus.OPTIMAL,
                        residuals=gains_residuals(G, P, rho, config))


def _coupled_search(G, gamma, lam, sigma2, sigmaC2, grid_points, p_hi, p_max):
    K = G.shape[0]
    axis = np.concatenate([[0.0], np.geomspace(sigma2, p_hi, grid_points - 1)])
    best = None
    best_val = np.inf
    # sweep the first axis in chunks to bound memory at K = 3
    tail_grids = np.meshgrid(*([axis] * (K - 1)), indexing="ij")
    tail = np.stack([g.ravel() for g in tail_grids], axis=-1)
    for p0 in axis:
        cand = np.concatenate([np.full((tail.shape[0], 1), p0), tail], axis=1)
        ok = _feasible_mask(G, gamma, lam, sigma2, sigmaC2, cand, p_max)
        if np.any(ok):
            sums = cand[ok].sum(axis=1)
            k = int(np.argmin(sums))
            if sums[k] < best_val:
                best_val = float(sums[k])
                best = cand[ok][k]
    if best is None:
        return None

    # contracting compass search (deterministic) down to ~1e-8 relative
    step = 0.5
    scale = np.maximum(best, sigma2)
    moves = [np.array(m) for m in itertools.product((-1.0, 0.0, 1.0), repeat=K)]
    for _ in range(60):
        improved = False
        for mv in moves:
            cand = np.maximum(best + mv * step * scale, 0.0)
            if np.sum(cand) >= best_val:
                continue
            if _feasible_mask(G, gamma, lam, sigma2, sigmaC2, cand[None, :], p_max)[0]:
                best = cand
                best_val = float(np.sum(cand))
                improved = True
        if not improved:
            step *= 0.6
            if step < 1e-9:
                break
        scale = np.maximum(best, sigma2)
    return best
