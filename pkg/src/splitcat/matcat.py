"""Matrix theories over the boolean and nonnegative-real semirings.

``FRel`` (boolean matrices, finite relations) is possibilistic and exact;
``Class`` (nonnegative real matrices) is probabilistic and compared within a
tolerance. Matrices are stored one column per input, so ``entries[b, a]`` is
the weight of ``a -> b`` and composition is the ordinary matrix product.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MismatchedTheory, NotPossibilistic, ShapeMismatch
from .theory import DEFAULT_TOL, DisjointEmbeddingData, Theory, check_tol, max_abs

BOOLEAN = "boolean"
NONNEG_REAL = "nonneg-real"


@dataclass(frozen=True)
class SemiringSpec:
    kind: str

    def __post_init__(self):
        if self.kind not in (BOOLEAN, NONNEG_REAL):
            raise ValueError(f"unknown semiring {self.kind!r}")

    @property
    def dtype(self):
        return np.bool_ if self.kind == BOOLEAN else np.float64

    @property
    def zero(self):
        return self.dtype(0)

    @property
    def one(self):
        return self.dtype(1)

    def add(self, x, y):
        return np.logical_or(x, y) if self.kind == BOOLEAN else np.add(x, y)

    def mul(self, x, y):
        return np.logical_and(x, y) if self.kind == BOOLEAN else np.multiply(x, y)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind == BOOLEAN:
            return (a.astype(np.int64) @ b.astype(np.int64)) > 0
        return a @ b


@dataclass(frozen=True, eq=False)
class MatMorphism:
    """A ``cod x dom`` matrix over a semiring."""

    entries: np.ndarray
    semiring: SemiringSpec

    def __post_init__(self):
        a = np.array(self.entries, dtype=self.semiring.dtype, copy=True)
        if a.ndim != 2:
            raise ShapeMismatch(f"matrix must be 2-d, got shape {a.shape}")
        if self.semiring.kind == NONNEG_REAL:
            if not np.all(np.isfinite(a)):
                raise ValueError("entries must be finite")
            if np.any(a < 0):
                raise ValueError("nonnegative-real entries must be >= 0")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dom(self) -> int:
        return self.entries.shape[1]

    @property
    def cod(self) -> int:
        return self.entries.shape[0]

    def __repr__(self):
        return f"MatMorphism({self.semiring.kind}, {self.dom}->{self.cod}, {self.entries.astype(float).tolist()})"

    def grid(self) -> str:
        """0/1 (or numeric) grid rendering, one matrix row per line."""
        if self.semiring.kind == BOOLEAN:
            return "\n".join(" ".join("1" if x else "0" for x in row) for row in self.entries)
        return "\n".join(" ".join(f"{x:.6g}" for x in row) for row in self.entries)


class MatTheory(Theory):
    """``Mat_R`` for the two supported semirings; objects are naturals."""

    def __init__(self, semiring: SemiringSpec):
        self.semiring = semiring
        self.name = "FRel" if semiring.kind == BOOLEAN else "Class"
        self.exact = semiring.kind == BOOLEAN
        self.idempotent_sum = semiring.kind == BOOLEAN
        self.cancellative = semiring.kind == NONNEG_REAL
        self.has_adjoint = True

    def __repr__(self):
        return f"MatTheory({self.semiring.kind})"

    def mat(self, entries) -> MatMorphism:
        return MatMorphism(np.asarray(entries), self.semiring)

    @property
    def unit(self) -> int:
        return 1

    def check_morphism(self, f) -> None:
        if not isinstance(f, MatMorphism) or f.semiring != self.semiring:
            raise MismatchedTheory(f"{f!r} is not a morphism of {self.name}")

    def identity(self, n: int) -> MatMorphism:
        return self.mat(np.eye(n, dtype=self.semiring.dtype))

    def compose(self, g: MatMorphism, f: MatMorphism) -> MatMorphism:
        if g.dom != f.cod:
            raise ShapeMismatch(f"cannot compose {g.dom}<-{g.cod} after {f.dom}->{f.cod}")
        return self.mat(self.semiring.matmul(g.entries, f.entries))

    def add(self, f: MatMorphism, g: MatMorphism) -> MatMorphism:
        if f.entries.shape != g.entries.shape:
            raise ShapeMismatch("sum of non-parallel matrices")
        return self.mat(self.semiring.add(f.entries, g.entries))

    def zero(self, dom: int, cod: int) -> MatMorphism:
        return self.mat(np.zeros((cod, dom), dtype=self.semiring.dtype))

    def scale(self, s, f: MatMorphism) -> MatMorphism:
        if self.semiring.kind == BOOLEAN:
            return f if bool(s) else self.zero(f.dom, f.cod)
        return self.mat(float(s) * f.entries)

    def subtract(self, f: MatMorphism, g: MatMorphism, tol: float = DEFAULT_TOL) -> MatMorphism:
        if self.semiring.kind == BOOLEAN:
            raise NotPossibilistic("boolean addition is not cancellative")
        d = f.entries - g.entries
        if np.any(d < -tol):
            raise ValueError("difference has negative entries")
        return self.mat(np.clip(d, 0.0, None))

    def discard(self, n: int) -> MatMorphism:
        return self.mat(np.ones((1, n), dtype=self.semiring.dtype))

    def tensor_obj(self, a: int, b: int) -> int:
        return a * b

    def tensor(self, f: MatMorphism, g: MatMorphism) -> MatMorphism:
        return self.mat(np.kron(f.entries, g.entries))

    def adjoint(self, f: MatMorphism) -> MatMorphism:
        # relational converse / transpose
        return self.mat(f.entries.T)

    def distance(self, f: MatMorphism, g: MatMorphism) -> float:
        if f.entries.shape != g.entries.shape:
            return float("inf")
        if self.semiring.kind == BOOLEAN:
            return float(np.count_nonzero(f.entries != g.entries) > 0)
        return max_abs(f.entries - g.entries)

    def is_subcausal(self, f: MatMorphism, tol: float = DEFAULT_TOL) -> bool:
        if self.semiring.kind == BOOLEAN:
            return True
        return bool(np.all(f.entries.sum(axis=0) <= 1 + tol))

    def random_object(self, rng: np.random.Generator) -> int:
        return int(rng.integers(1, 4))

    def random_morphism(self, rng: np.random.Generator, dom: int, cod: int) -> MatMorphism:
        if self.semiring.kind == BOOLEAN:
            return self.mat(rng.integers(0, 2, size=(cod, dom)).astype(bool))
        return self.mat(rng.uniform(0.0, 1.0, size=(cod, dom)))

    def random_causal(self, rng: np.random.Generator, dom: int, cod: int) -> MatMorphism:
        """Stochastic matrix (Class) or total relation (FRel)."""
        if self.semiring.kind == BOOLEAN:
            a = rng.integers(0, 2, size=(cod, dom)).astype(bool)
            for c in range(dom):
                if not a[:, c].any():
                    a[rng.integers(cod), c] = True
            return self.mat(a)
        a = rng.uniform(0.0, 1.0, size=(cod, dom))
        return self.mat(a / a.sum(axis=0, keepdims=True))

    def disjoint_embedding(self, objs) -> DisjointEmbeddingData:
        # the direct sum is a genuine biproduct here
        parts = tuple(int(n) for n in objs)
        total = sum(parts)
        inj, proj = [], []
        off = 0
        for n in parts:
            k = np.zeros((total, n), dtype=self.semiring.dtype)
            k[off:off + n, :] = np.eye(n, dtype=self.semiring.dtype)
            inj.append(self.mat(k))
            proj.append(self.mat(k.T))
            off += n
        pinch = self.sum([self.compose(k, p) for k, p in zip(inj, proj)], total, total)
        return DisjointEmbeddingData(parts, total, tuple(inj), tuple(proj), pinch)

    def state(self, n: int, support) -> MatMorphism:
        """Column vector ``n`` -> with ones (or given weights) on ``support``."""
        v = np.zeros((n, 1), dtype=self.semiring.dtype)
        for i in support:
            v[i, 0] = self.semiring.one
        return self.mat(v)

    def effect(self, n: int, support) -> MatMorphism:
        return self.mat(self.state(n, support).entries.T)


FREL = SemiringSpec(BOOLEAN)
CLASS = SemiringSpec(NONNEG_REAL)


def instantiate_mat_theory(s: SemiringSpec | str) -> MatTheory:
    if isinstance(s, str):
        s = SemiringSpec(s)
    return MatTheory(s)


def frel() -> MatTheory:
    return MatTheory(FREL)


def class_theory() -> MatTheory:
    return MatTheory(CLASS)


def perfectly_distinguishable_pair(theory: MatTheory, n: int) -> Optional[tuple]:
    """States ``a0, a1`` on ``n`` with effects distinguishing them and summing to discard.

    Returns ``None`` when ``n <= 1``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n <= 1:
        return None
    a0 = theory.state(n, [0])
    a1 = theory.state(n, [1])
    e0 = theory.effect(n, [0] + list(range(2, n)))
    e1 = theory.effect(n, [1])
    return a0, a1, e0, e1


def counterexample_idempotent(theory: MatTheory, a0: MatMorphism, a1: MatMorphism,
                              e1: MatMorphism) -> MatMorphism:
    """``a0 o discard + a1 o e1``: a causal idempotent that never splits."""
    if not theory.idempotent_sum:
        raise NotPossibilistic(f"{theory.name} does not have idempotent addition")
    one = theory.identity(1)
    if not theory.approx_eq(theory.compose(e1, a1), one):
        raise ValueError("effect must accept a1")
    if not theory.approx_eq(theory.compose(e1, a0), theory.zero(1, 1)):
        raise ValueError("effect must reject a0")
    n = a0.cod
    return theory.add(theory.compose(a0, theory.discard(n)), theory.compose(a1, e1))
