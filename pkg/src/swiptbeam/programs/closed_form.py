"""Closed-form optimum under zero-forcing weights.

With interference nulled the program decouples per user; the optimal
x = G_ii P_i + sigma^2 is the larger root of

    x^2 - (alpha + beta + lambda) x + alpha lambda = 0,
    alpha = (gamma + 1) sigma^2,  beta = gamma sigma_C^2,

at which both the SINR and EH constraints are binding.  A feasible
solution always exists (the discriminant is (alpha+beta-lambda)^2
+ 4 beta lambda > 0), so this scheme never reports infeasible unless a
per-transmitter cap cuts the optimum off.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..beamformers import link_gains, zf_weights
from ..model import (BeamformerWeights, ChannelSet, SolveOutcome, SolveStatus,
                     SystemConfig, verify_solution)
from .support import effective_eh_threshold, gains_residuals

__all__ = ["ClosedFormIntermediates", "ZfClosedFormResult", "solve_zf_closed_form",
           "closed_form_from_gains"]


@dataclass(frozen=True)
class ClosedFormIntermediates:
    alpha: np.ndarray
    beta: np.ndarray
    x_star: np.ndarray
    x1: np.ndarray
    x2: np.ndarray


@dataclass(frozen=True)
class ZfClosedFormResult:
    outcome: SolveOutcome
    intermediates: ClosedFormIntermediates
    weights: BeamformerWeights


def closed_form_from_gains(config: SystemConfig, direct_gains: np.ndarray
                           ) -> tuple[np.ndarray, np.ndarray, ClosedFormIntermediates]:
    """(P*, rho*, intermediates) for given diagonal link gains."""
    gamma = config.sinr_threshold
    lam = effective_eh_threshold(config)
    sigma2 = config.noise_mw
    alpha = (gamma + 1.0) * sigma2
    beta = gamma * config.conversion_noise_mw
    s = alpha + beta + lam
    disc = s * s - 4.0 * lam * alpha
    x2 = (s + np.sqrt(disc)) / 2.0
    x1 = alpha * lam / x2  # product of roots, numerically stable small root
    P = (x2 - sigma2) / direct_gains
    rho = beta / (x2 - alpha)
    inter = ClosedFormIntermediates(alpha=alpha, beta=beta, x_star=x2.copy(), x1=x1, x2=x2)
    return P, rho, inter


def solve_zf_closed_form(config: SystemConfig, channels: ChannelSet) -> ZfClosedFormResult:
    t0 = time.perf_counter()
    weights = zf_weights(channels)
    G = link_gains(channels, weights).G
    P, rho, inter = closed_form_from_gains(config, np.diag(G))

    if config.p_max_mw is not None and np.any(P > config.p_max_mw * (1 + 1e-12)):
        outcome = SolveOutcome(
            P=P, rho=rho, total_power=np.inf, feasible=False,
            status=SolveStatus.INFEASIBLE,
            residuals=gains_residuals(G, P, rho, config),
            wall_time=time.perf_counter() - t0)
        return ZfClosedFormResult(outcome=outcome, intermediates=inter, weights=weights)

    residuals = verify_solution(config, channels, weights, P, rho)
    outcome = SolveOutcome(
        P=P, rho=rho, total_power=float(np.sum(P)), feasible=True,
        status=SolveStatus.OPTIMAL, residuals=residuals.as_vector(),
        wall_time=time.perf_counter() - t0)
    return ZfClosedFormResult(outcome=outcome, intermediates=inter, weights=weights)
