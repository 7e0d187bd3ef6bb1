"""Exhaustive search for splittings of boolean idempotents.

The hot loop lives in a compiled extension when it is available and in an
equivalent pure-Python module otherwise. Setting ``SPLITCAT_PURE_PYTHON=1``
forces the pure-Python kernel.
"""
from __future__ import annotations

import os

import numpy as np

from .. import _boolsearch_py
from ..errors import NotIdempotent, ShapeMismatch
from ..matcat import BOOLEAN, FREL, MatMorphism, MatTheory
from ..theory import Splitting

if os.environ.get("SPLITCAT_PURE_PYTHON") == "1":
    _kernel, BACKEND = _boolsearch_py, "python"
else:
    try:
        from .. import _boolsearch as _kernel
        BACKEND = "cython"
    except ImportError:  # extension not built
        _kernel, BACKEND = _boolsearch_py, "python"

KERNELS = {"python": _boolsearch_py}
if BACKEND == "cython":
    KERNELS["cython"] = _kernel


def to_rows(a: np.ndarray) -> list[int]:
    a = np.asarray(a, dtype=bool)
    ncols = a.shape[1]
    return [sum(1 << (ncols - 1 - j) for j in range(ncols) if row[j]) for row in a]


def from_rows(rows: list[int], ncols: int) -> np.ndarray:
    out = np.zeros((len(rows), ncols), dtype=bool)
    for i, r in enumerate(rows):
        for j in range(ncols):
            out[i, j] = bool(r >> (ncols - 1 - j) & 1)
    return out


def search_splitting_bool(p, b_max: int, backend: str | None = None) -> Splitting | None:
    """First boolean ``(m, e)`` with ``e o m = id_b`` and ``m o e = p``, for ``b = 0..b_max``.

    Candidates are visited with ``b`` ascending, then ``m`` and ``e`` in
    lexicographic row-major order with true ordered before false. Returns ``None`` if nothing splits ``p``
    within the bound.
    """
    t = MatTheory(FREL)
    if not isinstance(p, MatMorphism):
        p = t.mat(np.asarray(p).astype(bool))
    if p.semiring.kind != BOOLEAN:
        raise ShapeMismatch("boolean matrix required")
    if p.dom != p.cod:
        raise ShapeMismatch("p must be square")
    if not t.approx_eq(t.compose(p, p), p):
        raise NotIdempotent("p o p != p")
    if b_max < 0:
        raise ValueError("b_max must be >= 0")
    kernel = KERNELS[backend] if backend else _kernel
    n = p.dom
    rows = to_rows(p.entries)
    for b in range(b_max + 1):
        hit = kernel.search_fixed_b(rows, n, b)
        if hit is not None:
            m_rows, e_rows = hit
            m = t.mat(from_rows(m_rows, b).reshape(n, b))
            e = t.mat(from_rows(e_rows, n).reshape(b, n))
            return Splitting(m, e)
    return None
