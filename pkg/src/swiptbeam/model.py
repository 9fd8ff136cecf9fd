"""Domain types, unit conversions and constraint evaluation.

All powers are held in linear mW internally; dBm/dB appear only at I/O
boundaries (config files, CLI flags).  Every type is immutable after
construction and every function is pure, so everything here is safe to
use from concurrent workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

__all__ = [
    "dbm_to_mw",
    "mw_to_dbm",
    "db_to_linear",
    "linear_to_db",
    "SystemConfig",
    "ChannelSet",
    "Scheme",
    "BeamformerWeights",
    "LinkGains",
    "SolveStatus",
    "SolveOutcome",
    "ConstraintResiduals",
    "received_power",
    "sinr",
    "verify_solution",
    "load_config",
]


# ---------------------------------------------------------------------------
# unit conversions

def dbm_to_mw(x):
    """Convert dBm to linear mW: mW = 10^(dBm/10)."""
    return np.power(10.0, np.asarray(x, dtype=float) / 10.0)[()]


def mw_to_dbm(x):
    """Convert linear mW to dBm.  Raises for nonpositive input."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("mw_to_dbm requires strictly positive mW input")
    return (10.0 * np.log10(arr))[()]


def db_to_linear(x):
    """Convert a dB ratio (e.g. an SINR threshold) to linear scale."""
    return np.power(10.0, np.asarray(x, dtype=float) / 10.0)[()]


def linear_to_db(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("linear_to_db requires strictly positive input")
    return (10.0 * np.log10(arr))[()]


def _user_vector(value, n_users: int, name: str) -> np.ndarray:
    vec = np.asarray(value, dtype=float)
    if vec.ndim == 0:
        vec = np.full(n_users, float(vec))
    if vec.shape != (n_users,):
        raise ValueError(f"{name} must be a scalar or a length-{n_users} vector")
    vec = vec.copy()
    vec.setflags(write=False)
    return vec


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class SystemConfig:
    """Scenario parameters, all in linear units (mW for powers).

    ``n_users`` is both the number of transmitter/receiver pairs and the
    number of antennas per transmitter (symmetric topology).  Cross-link
    channel variance is ``direct_variance / delta``.
    """

    n_users: int
    sinr_threshold: np.ndarray  # linear, per user
    eh_threshold_mw: np.ndarray  # per user
    noise_mw: float = 1e-4
    conversion_noise_mw: float = 1e-4
    conversion_efficiency: np.ndarray = 1.0
    delta: float = 5.0
    direct_variance: float = 1e-5
    p_max_mw: np.ndarray | None = None
    eh_includes_efficiency: bool = False

    def __post_init__(self):
        if int(self.n_users) < 1:
            raise ValueError("n_users must be >= 1")
        object.__setattr__(self, "n_users", int(self.n_users))
        K = self.n_users
        for name in ("sinr_threshold", "eh_threshold_mw", "conversion_efficiency"):
            object.__setattr__(self, name, _user_vector(getattr(self, name), K, name))
        if self.noise_mw <= 0 or self.conversion_noise_mw <= 0:
            raise ValueError("noise powers must be positive")
        if np.any(self.sinr_threshold <= 0):
            raise ValueError("SINR thresholds must be positive")
        if np.any(self.eh_threshold_mw <= 0):
            raise ValueError("EH thresholds must be positive")
        eff = self.conversion_efficiency
        if np.any(eff <= 0) or np.any(eff > 1):
            raise ValueError("conversion efficiencies must lie in (0, 1]")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.direct_variance <= 0:
            raise ValueError("direct_variance must be positive")
        if self.p_max_mw is not None:
            object.__setattr__(self, "p_max_mw", _user_vector(self.p_max_mw, K, "p_max_mw"))
            if np.any(self.p_max_mw <= 0):
                raise ValueError("p_max_mw entries must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        """Build from the documented config-file keys (dB/dBm at this boundary)."""
        K = int(data["K"])
        cfg = cls(
            n_users=K,
            sinr_threshold=db_to_linear(data.get("gamma_db", 10.0)),
            eh_threshold_mw=dbm_to_mw(data.get("lambda_dbm", -30.0)),
            noise_mw=float(dbm_to_mw(data.get("sigma2_dbm", -40.0))),
            conversion_noise_mw=float(dbm_to_mw(data.get("sigmaC2_dbm", -40.0))),
            conversion_efficiency=data.get("zeta", 1.0),
            delta=float(data.get("delta", 5.0)),
            direct_variance=float(data.get("direct_variance", 1e-5)),
            p_max_mw=dbm_to_mw(data["p_max_dbm"]) if "p_max_dbm" in data else None,
            eh_includes_efficiency=bool(data.get("eh_includes_zeta", False)),
        )
        return cfg


def load_config(path) -> tuple[SystemConfig, int]:
    """Load a JSON config file; returns (config, seed)."""
    data = json.loads(Path(path).read_text())
    return SystemConfig.from_dict(data), int(data.get("seed", 0))


@dataclass(frozen=True)
class ChannelSet:
    """K x K grid of complex channel vectors; ``h[i, j]`` is the S_j -> D_i link."""

    h: np.ndarray  # complex, shape (K, K, K)
    seed: int

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        if h.ndim != 3 or h.shape[0] != h.shape[1] or h.shape[0] != h.shape[2]:
            raise ValueError("channel grid must have shape (K, K, K)")
        if not np.all(np.isfinite(h.view(float))):
            raise ValueError("channel entries must be finite")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def n_users(self) -> int:
        return self.h.shape[0]


class Scheme(str, Enum):
    ZF = "zf"
    MRT = "mrt"
    RZF = "rzf"
    MRT_ZF = "mrt_zf"
    OPTIMAL = "optimal"
    LP_RHO_HALF = "lp_rho_half"


@dataclass(frozen=True)
class BeamformerWeights:
    """K unit-norm transmit weight vectors, row ``w[i]`` for transmitter i."""

    w: np.ndarray  # complex, shape (K, K)
    scheme: Scheme
    aux: dict | None = None

    def __post_init__(self):
        w = np.asarray(self.w, dtype=complex)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must form a (K, K) array")
        norms = np.linalg.norm(w, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise ValueError("weight vectors must be unit-norm within 1e-10")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class LinkGains:
    """G[i, j] = |h_{i,j}^T w_j|^2, nonnegative."""

    G: np.ndarray

    def __post_init__(self):
        G = np.asarray(self.G, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError("link gains must form a (K, K) array")
        if not np.all(np.isfinite(G)):
            raise ValueError("link gains must be finite")
        if np.any(G < 0):
            raise ValueError("link gains must be nonnegative")
        G = G.copy()
        G.setflags(write=False)
        object.__setattr__(self, "G", G)


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class SolveOutcome:
    """Per-user transmit powers and splitting ratios with feasibility evidence."""

    P: np.ndarray
    rho: np.ndarray
    total_power: float
    feasible: bool
    status: SolveStatus
    residuals: np.ndarray
    wall_time: float = 0.0

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float).copy()
        rho = np.asarray(self.rho, dtype=float).copy()
        P.setflags(write=False)
        rho.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "rho", rho)
        res = np.asarray(self.residuals, dtype=float).copy()
        res.setflags(write=False)
        object.__setattr__(self, "residuals", res)
        if self.feasible:
            total = float(np.sum(P))
            if abs(total - self.total_power) > 1e-9 * max(1.0, abs(total)):
                raise ValueError("total_power must equal sum(P) for feasible outcomes")


# ---------------------------------------------------------------------------
# evaluators

def _gains_array(gains) -> np.ndarray:
    return gains.G if isinstance(gains, LinkGains) else np.asarray(gains, dtype=float)


def received_power(gains, P, noise_mw: float) -> np.ndarray:
    """Total received power per user: P^r_i = sum_j G_ij P_j + sigma^2."""
    G = _gains_array(gains)
    P = np.asarray(P, dtype=float)
    if P.shape != (G.shape[0],):
        raise ValueError("power vector length must match the gain matrix")
    return G @ P + noise_mw


def sinr(gains, P, rho, config: SystemConfig) -> np.ndarray:
    """Post-split SINR per user.

    Gamma_i = rho_i G_ii P_i / (rho_i (sigma^2 + interference_i) + sigma_C^2),
    which requires rho_i > 0.
    """
    G = _gains_array(gains)
    P = np.asarray(P, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if P.shape != (G.shape[0],) or rho.shape != P.shape:
        raise ValueError("P and rho must be length-K vectors")
    if np.any(rho <= 0):
        raise ValueError("sinr requires rho_i > 0 (conversion noise term divides by rho)")
    total = G @ P
    direct = np.diag(G) * P
    interference = total - direct
    denom = rho * (config.noise_mw + interference) + config.conversion_noise_mw
    return rho * direct / denom


@dataclass(frozen=True)
class ConstraintResiduals:
    """Signed constraint slacks; nonnegative (within tolerance) means satisfied."""

    sinr_slack: np.ndarray
    eh_slack: np.ndarray
    power_slack: np.ndarray
    rho_lower_slack: np.ndarray
    rho_upper_slack: np.ndarray
    cap_slack: np.ndarray | None
    sinr_scale: np.ndarray
    abs_tol: float
    rel_tol: float

    @property
    def feasible(self) -> bool:
        ok = np.all(self.sinr_slack >= -self.rel_tol * self.sinr_scale)
        for slack in (self.eh_slack, self.power_slack, self.rho_lower_slack, self.rho_upper_slack):
            ok = ok and np.all(slack >= -self.abs_tol)
        if self.cap_slack is not None:
            ok = ok and np.all(self.cap_slack >= -self.abs_tol)
        return bool(ok)

    def as_vector(self) -> np.ndarray:
        parts = [self.sinr_slack, self.eh_slack, self.power_slack,
                 self.rho_lower_slack, self.rho_upper_slack]
        if self.cap_slack is not None:
            parts.append(self.cap_slack)
        return np.concatenate(parts)


def verify_solution(config: SystemConfig, channels: ChannelSet, weights: BeamformerWeights,
                    P, rho, *, abs_tol: float = 1e-7, rel_tol: float = 1e-6) -> ConstraintResiduals:
    """Evaluate all constraint slacks of a candidate (P, rho) under given weights.

    Always returns slacks; tolerances split into absolute (mW-scale) and
    relative (SINR ratio scale) because sigma^2 = 1e-4 mW makes a single
    relative test brittle.
    """
    from .beamformers import link_gains  # local import to avoid a cycle

    G = link_gains(channels, weights).G
    P = np.asarray(P, dtype=float)
    rho = np.asarray(rho, dtype=float)
    pr = received_power(G, P, config.noise_mw)
    # rho = 0 gives zero decoded signal; evaluate the SINR limit directly
    rho_safe = np.maximum(rho, 0.0)
    total = G @ P
    direct = np.diag(G) * P
    denom = rho_safe * (config.noise_mw + (total - direct)) + config.conversion_noise_mw
    gamma_val = rho_safe * direct / denom
    eh_gain = np.where(config.eh_includes_efficiency, config.conversion_efficiency, 1.0)
    cap = None
    if config.p_max_mw is not None:
        cap = config.p_max_mw - P
    return ConstraintResiduals(
        sinr_slack=gamma_val - config.sinr_threshold,
        eh_slack=eh_gain * (1.0 - rho) * pr - config.eh_threshold_mw,
        power_slack=P.copy(),
        rho_lower_slack=rho.copy(),
        rho_upper_slack=1.0 - rho,
        cap_slack=cap,
        sinr_scale=config.sinr_threshold.copy(),
        abs_tol=abs_tol,
        rel_tol=rel_tol,
    )
