"""Solution pipelines: closed-form ZF, fixed-weight SOCP, MRT-ZF, SDP, oracle."""

from .closed_form import (ClosedFormIntermediates, ZfClosedFormResult,
                          closed_form_from_gains, solve_zf_closed_form)
from .fixed_weight import (FixedWeightResult, SocpVarMap, build_fixed_weight_socp,
                           solve_fixed_weight)
from .mrt_zf import (MrtZfData, MrtZfResult, MrtZfVarMap, build_mrt_zf_relaxation,
                     solve_mrt_zf)
from .oracle import oracle_fixed_weight
from .sdp import (OptimalResult, SdpSolution, SdpVarMap, build_sdp,
                  solve_optimal, solve_sdp_relaxation)

__all__ = [
    "ClosedFormIntermediates",
    "ZfClosedFormResult",
    "closed_form_from_gains",
    "solve_zf_closed_form",
    "SocpVarMap",
    "FixedWeightResult",
    "build_fixed_weight_socp",
    "solve_fixed_weight",
    "MrtZfVarMap",
    "MrtZfData",
    "MrtZfResult",
    "build_mrt_zf_relaxation",
    "solve_mrt_zf",
    "oracle_fixed_weight",
    "SdpVarMap",
    "SdpSolution",
    "OptimalResult",
    "build_sdp",
    "solve_sdp_relaxation",
    "solve_optimal",
]
