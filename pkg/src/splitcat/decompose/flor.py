"""Rank-one decomposition of nonnegative idempotent matrices.

A nonnegative idempotent ``P`` is a sum ``sum_i u_i v_i`` of nonnegative
rank-one idempotents with ``v_i u_j = delta_ij``. The *core* of pair ``i`` is
the set of indices where both ``u_i`` and ``v_i`` are positive. Cores are
disjoint, they are exactly the indices with ``P[c, c] > 0``, and ``P``
restricted to them is block diagonal with one strictly positive block per
pair. For any core index ``c`` of pair ``i`` the column ``P[:, c]`` is a
multiple of ``u_i`` and the row ``P[c, :]`` a multiple of ``v_i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from ..errors import NotIdempotent, NumericalFailure, ShapeMismatch
from ..matcat import NONNEG_REAL, MatMorphism
from ..theory import DEFAULT_TOL, check_tol, max_abs


@dataclass
class FlorDecomposition:
    pairs: list[tuple[np.ndarray, np.ndarray]]

    def __len__(self):
        return len(self.pairs)

    def components(self) -> list[np.ndarray]:
        """The rank-one idempotents ``z_i = u_i v_i``."""
        return [np.outer(u, v) for u, v in self.pairs]

    def reconstruct(self) -> np.ndarray:
        zs = self.components()
        return sum(zs) if zs else None

    def biorthogonality_residual(self) -> float:
        k = len(self.pairs)
        if not k:
            return 0.0
        us = np.array([u for u, _ in self.pairs])
        vs = np.array([v for _, v in self.pairs])
        g = vs @ us.T
        return max_abs(g - np.eye(k))


def _as_array(p) -> np.ndarray:
    if isinstance(p, MatMorphism):
        if p.semiring.kind != NONNEG_REAL:
            raise ShapeMismatch("Flor decomposition needs a nonnegative real matrix")
        return np.asarray(p.entries, dtype=float)
    return np.asarray(p, dtype=float)


def flor_decompose(p, tol: float = DEFAULT_TOL) -> FlorDecomposition:
    """Split a nonnegative idempotent into biorthogonal rank-one idempotents."""
    tol = check_tol(tol)
    a = _as_array(p)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"square matrix required, got shape {a.shape}")
    if np.any(a < 0):
        raise ValueError("entries must be nonnegative")
    n = a.shape[0]
    scale = max(1.0, max_abs(a))
    if max_abs(a @ a - a) > tol * scale:
        raise NotIdempotent("P @ P != P")
    if n == 0:
        return FlorDecomposition([])

    thr = tol * scale
    core = np.flatnonzero(np.diag(a) > thr)
    adj = (a[np.ix_(core, core)] > thr)
    ncomp, labels = connected_components(adj, directed=True, connection="weak")
    pairs = []
    for c in range(ncomp):
        rep = core[np.flatnonzero(labels == c)[0]]
        u = a[:, rep].copy()
        v = a[rep, :] / a[rep, rep]
        s = u.sum()
        pairs.append((u / s, v * s))

    rank = int(np.linalg.matrix_rank(a, tol=tol * scale)) if n else 0
    out = FlorDecomposition(pairs)
    if len(pairs) != rank:
        raise NumericalFailure(f"found {len(pairs)} rank-one parts for a rank-{rank} matrix")
    recon = out.reconstruct() if pairs else np.zeros_like(a)
    if out.biorthogonality_residual() > 10 * tol or max_abs(recon - a) > 10 * tol * scale:
        raise NumericalFailure("rank-one parts failed verification")
    return out


def random_flor_instance(n: int, k: int, rng: np.random.Generator) -> tuple[np.ndarray, FlorDecomposition]:
    """A planted nonnegative idempotent of rank ``k`` on ``n`` points.

    Indices are split into ``k`` nonempty cores, a set where only the ``v_i``
    may be positive, a set where only the ``u_i`` may be positive, and a
    remainder that stays zero; the indices are then shuffled.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    perm = rng.permutation(n)
    n_core = int(rng.integers(k, n + 1)) if k else 0
    core_idx = perm[:n_core]
    rest = perm[n_core:]
    # split core indices into k nonempty groups
    if k:
        cuts = np.sort(rng.choice(np.arange(1, n_core), size=k - 1, replace=False)) if k > 1 else []
        groups = np.split(core_idx, cuts)
    else:
        groups = []
    labels = rng.integers(0, 3, size=rest.size)
    f_only, g_only = rest[labels == 0], rest[labels == 1]
    pairs = []
    for grp in groups:
        u = np.zeros(n)
        v = np.zeros(n)
        u[grp] = rng.uniform(0.2, 1.0, size=grp.size)
        v[grp] = rng.uniform(0.2, 1.0, size=grp.size)
        u[g_only] = rng.uniform(0.0, 1.0, size=g_only.size) * (rng.random(g_only.size) < 0.5)
        v[f_only] = rng.uniform(0.0, 1.0, size=f_only.size) * (rng.random(f_only.size) < 0.5)
        v /= v @ u
        s = u.sum()
        pairs.append((u / s, v * s))
    dec = FlorDecomposition(pairs)
    p = dec.reconstruct() if pairs else np.zeros((n, n))
    return p, dec
