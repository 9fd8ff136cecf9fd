"""Cone-program intermediate representation and a small builder.

Standard primal form:   min c^T v   s.t.  A v = b,  v in K,
where K is the ordered product of the cone blocks and the blocks
partition the variable range exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .cones import PSD, ConeLayout, NonNeg, RotatedSOC, svec_dim

__all__ = [
    "ConicProblem",
    "ConicSolution",
    "SolverStatus",
    "ProblemValidationError",
    "ProblemBuilder",
    "dump_problem",
    "load_problem",
]


class ProblemValidationError(ValueError):
    pass


class SolverStatus(str, Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE = "dual_infeasible"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class ConicProblem:
    c: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    cones: tuple

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        b = np.asarray(self.b, dtype=float)
        A = sp.csr_matrix(self.A, dtype=float)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "cones", tuple(self.cones))

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    @property
    def n_eq(self) -> int:
        return self.b.shape[0]

    def layout(self) -> ConeLayout:
        return ConeLayout(self.cones)

    def validate(self) -> ConeLayout:
        layout = self.layout()
        if layout.n != self.n_vars:
            raise ProblemValidationError(
                f"cone blocks cover {layout.n} variables, objective has {self.n_vars}")
        if self.A.shape != (self.n_eq, self.n_vars):
            raise ProblemValidationError(
                f"A has shape {self.A.shape}, expected ({self.n_eq}, {self.n_vars})")
        if not np.all(np.isfinite(self.c)) or not np.all(np.isfinite(self.b)):
            raise ProblemValidationError("objective and rhs must be finite")
        if self.A.nnz and not np.all(np.isfinite(self.A.data)):
            raise ProblemValidationError("constraint matrix must be finite")
        return layout


@dataclass(frozen=True)
class ConicSolution:
    primal: np.ndarray
    dual_eq: np.ndarray
    dual_cone: np.ndarray
    status: SolverStatus
    gap: float
    iterations: int
    primal_objective: float
    dual_objective: float
    primal_residual: float
    dual_residual: float
    certificate: np.ndarray | None = None
    history: tuple = field(default=())


class ProblemBuilder:
    """Incremental builder keeping cone blocks consecutive by construction."""

    def __init__(self):
        self._cones = []
        self._n = 0
        self._obj = {}
        self._rows = []  # list of (coeff dict, rhs)

    def add_nonneg(self, count: int) -> np.ndarray:
        idx = np.arange(self._n, self._n + count)
        self._cones.append(NonNeg(count))
        self._n += count
        return idx

    def add_rsoc(self, norm_len: int = 1) -> tuple[int, int, np.ndarray]:
        """One rotated cone 2uv >= ||z||^2; returns (u, v, z indices)."""
        dim = 2 + norm_len
        u = self._n
        v = self._n + 1
        z = np.arange(self._n + 2, self._n + dim)
        self._cones.append(RotatedSOC(dim))
        self._n += dim
        return u, v, z

    def add_psd(self, side: int) -> np.ndarray:
        d = svec_dim(side)
        idx = np.arange(self._n, self._n + d)
        self._cones.append(PSD(side))
        self._n += d
        return idx

    def add_eq(self, coeffs: dict, rhs: float) -> int:
        self._rows.append(({int(k): float(v) for k, v in coeffs.items()}, float(rhs)))
        return len(self._rows) - 1

    def add_eq_dense(self, idx: np.ndarray, vals: np.ndarray, rhs: float,
                     extra: dict | None = None) -> int:
        row = {int(i): float(v) for i, v in zip(np.atleast_1d(idx), np.atleast_1d(vals))}
        if extra:
            for k, v in extra.items():
                row[int(k)] = row.get(int(k), 0.0) + float(v)
        return self.add_eq(row, rhs)

    def set_objective(self, idx, vals) -> None:
        for i, v in zip(np.atleast_1d(idx), np.atleast_1d(vals)):
            self._obj[int(i)] = self._obj.get(int(i), 0.0) + float(v)

    def build(self) -> ConicProblem:
        c = np.zeros(self._n)
        for i, v in self._obj.items():
            c[i] = v
        m = len(self._rows)
        rows, cols, vals = [], [], []
        b = np.zeros(m)
        for r, (coeffs, rhs) in enumerate(self._rows):
            b[r] = rhs
            for i, v in coeffs.items():
                if v != 0.0:
                    rows.append(r)
                    cols.append(i)
                    vals.append(v)
        A = sp.csr_matrix((vals, (rows, cols)), shape=(m, self._n))
        return ConicProblem(c=c, A=A, b=b, cones=tuple(self._cones))


# ---------------------------------------------------------------------------
# sparse-triplet text dump (cross-solver debugging aid)

def dump_problem(problem: ConicProblem, path) -> None:
    """Write the IR in a line-oriented triplet format.

    Lines: ``dims n m``; ``cone nonneg <size>`` / ``cone rsoc <dim>`` /
    ``cone psd <side>`` in block order; ``c <j> <val>`` for nonzero
    objective entries; ``A <i> <j> <val>`` triplets; ``b <i> <val>``.
    """
    lines = [f"dims {problem.n_vars} {problem.n_eq}"]
    for cone in problem.cones:
        if isinstance(cone, NonNeg):
            lines.append(f"cone nonneg {cone.size}")
        elif isinstance(cone, RotatedSOC):
            lines.append(f"cone rsoc {cone.dim}")
        else:
            lines.append(f"cone psd {cone.side}")
    for j in np.flatnonzero(problem.c):
        lines.append(f"c {j} {problem.c[j]:.17g}")
    coo = problem.A.tocoo()
    for i, j, v in zip(coo.row, coo.col, coo.data):
        lines.append(f"A {i} {j} {v:.17g}")
    for i in np.flatnonzero(problem.b):
        lines.append(f"b {i} {problem.b[i]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_problem(path) -> ConicProblem:
    lines = Path(path).read_text().strip().splitlines()
    tokens = [line.split() for line in lines]
    if tokens[0][0] != "dims":
        raise ProblemValidationError("dump must start with a dims line")
    n, m = int(tokens[0][1]), int(tokens[0][2])
    cones = []
    c = np.zeros(n)
    b = np.zeros(m)
    rows, cols, vals = [], [], []
    for tok in tokens[1:]:
        if tok[0] == "cone":
            if tok[1] == "nonneg":
                cones.append(NonNeg(int(tok[2])))
            elif tok[1] == "rsoc":
                cones.append(RotatedSOC(int(tok[2])))
            elif tok[1] == "psd":
                cones.append(PSD(int(tok[2])))
            else:
                raise ProblemValidationError(f"unknown cone kind {tok[1]}")
        elif tok[0] == "c":
            c[int(tok[1])] = float(tok[2])
        elif tok[0] == "A":
            rows.append(int(tok[1]))
            cols.append(int(tok[2]))
            vals.append(float(tok[3]))
        elif tok[0] == "b":
            b[int(tok[1])] = float(tok[2])
        else:
            raise ProblemValidationError(f"unknown record {tok[0]}")
    A = sp.csr_matrix((vals, (rows, cols)), shape=(m, n))
    return ConicProblem(c=c, A=A, b=b, cones=tuple(cones))
