"""Shared plumbing for the solution pipelines."""

from __future__ import annotations

import numpy as np

from ..model import SolveStatus, SystemConfig

# Pipelines solve tighter than the solver defaults: lower-bound comparisons
# at -1e-6 relative slack on mW-scale objectives need absolute gaps well
# below 1e-8, and the rank test needs trailing eigenvalues ~1e-9.
PIPELINE_OPTS = {"gap_tol": 1e-10, "feas_tol": 1e-9, "max_iter": 200,
                 "record_history": False}


def effective_eh_threshold(config: SystemConfig) -> np.ndarray:
    """EH threshold seen by the optimization, folding in the optional
    conversion-efficiency flag: zeta (1-rho) P^r >= lambda is the same
    constraint as (1-rho) P^r >= lambda / zeta."""
    lam = config.eh_threshold_mw
    if config.eh_includes_efficiency:
        lam = lam / config.conversion_efficiency
    return lam


# canonical unit of the reference operating point (sigma^2 = sigma_C^2 =
# -40 dBm, lambda = -30 dBm); anchoring here keeps canonical problems at the
# data scale the solver tolerances are tuned for
_REF_UNIT = (1e-4 + 1e-4 + 1e-3) / 3.0


def canonical_power_unit(config: SystemConfig) -> float:
    """Covariant power unit: scaling (sigma^2, sigma_C^2, lambda) by c scales
    the unit by c, so pipelines solving in canonical units satisfy the
    scaling-covariance law by construction."""
    lam = effective_eh_threshold(config)
    raw = float((config.noise_mw + config.conversion_noise_mw + np.mean(lam)) / 3.0)
    return raw / _REF_UNIT


def canonical_config(config: SystemConfig) -> tuple[SystemConfig, float]:
    """Rescale all powers so the canonical unit is 1; returns (config, unit)."""
    from dataclasses import replace

    u = canonical_power_unit(config)
    scaled = replace(
        config,
        noise_mw=config.noise_mw / u,
        conversion_noise_mw=config.conversion_noise_mw / u,
        eh_threshold_mw=config.eh_threshold_mw / u,
        p_max_mw=None if config.p_max_mw is None else config.p_max_mw / u,
    )
    return scaled, u


def gains_residuals(G: np.ndarray, P: np.ndarray, rho: np.ndarray,
                    config: SystemConfig) -> np.ndarray:
    """Constraint slack vector evaluated directly at the link-gain level."""
    pr = G @ P + config.noise_mw
    direct = np.diag(G) * P
    interf = G @ P - direct
    rho_safe = np.maximum(rho, 0.0)
    denom = rho_safe * (config.noise_mw + interf) + config.conversion_noise_mw
    gamma_val = rho_safe * direct / denom
    eff = np.where(config.eh_includes_efficiency, config.conversion_efficiency, 1.0)
    parts = [gamma_val - config.sinr_threshold,
             eff * (1.0 - rho) * pr - config.eh_threshold_mw,
             P.copy(), rho.copy(), 1.0 - rho]
    if config.p_max_mw is not None:
        parts.append(config.p_max_mw - P)
    return np.concatenate(parts)


def infeasible_outcome_fields(config: SystemConfig, G: np.ndarray) -> dict:
    K = config.n_users
    P = np.zeros(K)
    rho = np.full(K, 0.5)
    return {
        "P": P, "rho": rho, "total_power": np.inf, "feasible": False,
        "status": SolveStatus.INFEASIBLE,
        "residuals": gains_residuals(G, P, rho, config),
    }
