"""Cone block definitions and the packed layout consumed by the kernels.

Variables of a problem are partitioned into consecutive cone blocks:

* ``NonNeg(size)``          -- elementwise x >= 0
* ``RotatedSOC(dim)``       -- (u, v, z): 2 u v >= ||z||^2, u, v >= 0
* ``PSD(side)``             -- svec of a real symmetric PSD matrix

PSD blocks are stored in scaled svec form (off-diagonals times sqrt(2))
so that the packed inner product equals the matrix trace inner product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "NonNeg",
    "RotatedSOC",
    "PSD",
    "ConeLayout",
    "svec",
    "smat",
    "svec_dim",
    "KIND_NONNEG",
    "KIND_RSOC",
    "KIND_PSD",
]

KIND_NONNEG = 0
KIND_RSOC = 1
KIND_PSD = 2


@dataclass(frozen=True)
class NonNeg:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("NonNeg size must be >= 1")


@dataclass(frozen=True)
class RotatedSOC:
    dim: int  # total block length: u, v and dim-2 norm components

    def __post_init__(self):
        if self.dim < 3:
            raise ValueError("RotatedSOC dim must be >= 3")


@dataclass(frozen=True)
class PSD:
    side: int

    def __post_init__(self):
        if self.side < 1:
            raise ValueError("PSD side must be >= 1")


def svec_dim(side: int) -> int:
    return side * (side + 1) // 2


@lru_cache(maxsize=None)
def _svec_indices(side: int):
    iu, ju, scale = [], [], []
    for j in range(side):
        for i in range(j + 1):
            iu.append(i)
            ju.append(j)
            scale.append(1.0 if i == j else np.sqrt(2.0))
    return (np.asarray(iu, dtype=np.intp), np.asarray(ju, dtype=np.intp),
            np.asarray(scale, dtype=float))


def svec(M: np.ndarray) -> np.ndarray:
    """Pack a symmetric matrix into scaled upper-triangle order."""
    side = M.shape[0]
    iu, ju, scale = _svec_indices(side)
    return M[iu, ju] * scale


def smat(v: np.ndarray, side: int) -> np.ndarray:
    """Inverse of :func:`svec`."""
    iu, ju, scale = _svec_indices(side)
    M = np.zeros((side, side), dtype=float)
    vals = v / scale
    M[iu, ju] = vals
    M[ju, iu] = vals
    return M


class ConeLayout:
    """Packed description of a cone product, precomputed for the kernels.

    Scaling workspace sizes per block:
      nonneg(d): d            (w = sqrt(x/z))
      rsoc(d):   2 d^2        (dense W and W^{-1}, symmetric)
      psd(s):    2 s^2 + s    (R, R^{-1}, lambda diagonal)
    """

    def __init__(self, cones):
        kinds, offs, dims, sides, woffs = [], [], [], [], []
        off = 0
        woff = 0
        degree = 0
        for cone in cones:
            if isinstance(cone, NonNeg):
                kinds.append(KIND_NONNEG)
                dims.append(cone.size)
                sides.append(0)
                wsize = cone.size
                degree += cone.size
            elif isinstance(cone, RotatedSOC):
                kinds.append(KIND_RSOC)
                dims.append(cone.dim)
                sides.append(0)
                wsize = 2 * cone.dim * cone.dim
                degree += 2
            elif isinstance(cone, PSD):
                kinds.append(KIND_PSD)
                dims.append(svec_dim(cone.side))
                sides.append(cone.side)
                wsize = 2 * cone.side * cone.side + cone.side
                degree += cone.side
            else:
                raise TypeError(f"unknown cone block: {cone!r}")
            offs.append(off)
            woffs.append(woff)
            off += dims[-1]
            woff += wsize
        self.cones = tuple(cones)
        self.kinds = np.asarray(kinds, dtype=np.int32)
        self.offs = np.asarray(offs, dtype=np.int32)
        self.dims = np.asarray(dims, dtype=np.int32)
        self.sides = np.asarray(sides, dtype=np.int32)
        self.woffs = np.asarray(woffs, dtype=np.int32)
        self.wsize = woff
        self.n = off
        self.degree = degree
        self.identity = self._identity()
        self.identity.setflags(write=False)

    def _identity(self) -> np.ndarray:
        e = np.zeros(self.n)
        for k, kind in enumerate(self.kinds):
            o, d = self.offs[k], self.dims[k]
            if kind == KIND_NONNEG:
                e[o:o + d] = 1.0
            elif kind == KIND_RSOC:
                e[o] = 1.0 / np.sqrt(2.0)
                e[o + 1] = 1.0 / np.sqrt(2.0)
            else:
                s = self.sides[k]
                iu, ju, _ = _svec_indices(s)
                block = np.zeros(d)
                block[np.flatnonzero(iu == ju)] = 1.0
                e[o:o + d] = block
        return e

    def block(self, k: int, v: np.ndarray) -> np.ndarray:
        o, d = self.offs[k], self.dims[k]
        return v[o:o + d]
