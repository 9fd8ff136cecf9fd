"""Dense small-scale cone programming: IR, kernels, and the HSD solver."""

from .cones import PSD, ConeLayout, NonNeg, RotatedSOC, smat, svec, svec_dim
from .hermitian import embed_hermitian, extract_hermitian, numeric_rank, principal_eigvec
from .kernels import available_backends, default_backend, get_backend
from .problem import (ConicProblem, ConicSolution, ProblemBuilder,
                      ProblemValidationError, SolverStatus, dump_problem, load_problem)
from .solver import solve_conic

__all__ = [
    "NonNeg",
    "RotatedSOC",
    "PSD",
    "ConeLayout",
    "svec",
    "smat",
    "svec_dim",
    "ConicProblem",
    "ConicSolution",
    "ProblemBuilder",
    "ProblemValidationError",
    "SolverStatus",
    "dump_problem",
    "load_problem",
    "solve_conic",
    "embed_hermitian",
    "extract_hermitian",
    "principal_eigvec",
    "numeric_rank",
    "available_backends",
    "default_backend",
    "get_backend",
]
