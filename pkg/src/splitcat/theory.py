"""Abstract process theories and theory-independent predicates.

A theory bundles objects, morphisms and the structure every construction in
this package programs against: composition, the commutative-monoid sum on
homsets, an optional strict tensor, discarding, and an optional adjoint.
Coherence isomorphisms are identities because tensors of objects are
strictified (``A (x) I == A`` on the nose).
"""
from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import NotEndomorphism, Unsupported

DEFAULT_TOL = 1e-9


def check_tol(tol: float) -> float:
    tol = float(tol)
    if not tol >= 0:
        raise ValueError(f"tolerance must be nonnegative, got {tol}")
    return tol


class Theory(abc.ABC):
    """Interface implemented by every concrete and derived theory."""

    name: str = "theory"
    #: approximate equality degenerates to exact equality
    exact: bool = False
    #: f + g = f + h implies g = h
    cancellative: bool = False
    #: addition is idempotent (possibilistic theories)
    idempotent_sum: bool = False
    has_tensor: bool = True
    has_adjoint: bool = False

    @property
    @abc.abstractmethod
    def unit(self) -> Any:
        """The distinguished object I."""

    @abc.abstractmethod
    def identity(self, obj): ...

    @abc.abstractmethod
    def compose(self, g, f):
        """Return ``g o f`` (apply ``f`` first)."""

    @abc.abstractmethod
    def add(self, f, g): ...

    @abc.abstractmethod
    def zero(self, dom, cod): ...

    @abc.abstractmethod
    def scale(self, s, f):
        """Weight ``f`` by the scalar ``s`` (a number interpreted in I -> I)."""

    @abc.abstractmethod
    def discard(self, obj): ...

    @abc.abstractmethod
    def distance(self, f, g) -> float:
        """Entrywise max-norm distance between payloads of parallel morphisms."""

    @abc.abstractmethod
    def check_morphism(self, f) -> None:
        """Raise :class:`MismatchedTheory` unless ``f`` belongs to this theory."""

    def subtract(self, f, g, tol: float = DEFAULT_TOL):
        """``h`` with ``g + h == f``; only meaningful in cancellative theories."""
        raise Unsupported(f"{self.name} has no subtraction")

    def tensor_obj(self, a, b):
        raise Unsupported(f"{self.name} has no tensor")

    def tensor(self, f, g):
        raise Unsupported(f"{self.name} has no tensor")

    def adjoint(self, f):
        raise Unsupported(f"{self.name} has no adjoint")

    def is_subcausal(self, f, tol: float = DEFAULT_TOL) -> bool:
        raise Unsupported(f"no sub-causality decision rule for {self.name}")

    def random_object(self, rng: np.random.Generator):
        raise Unsupported(f"{self.name} cannot sample objects")

    def random_morphism(self, rng: np.random.Generator, dom, cod):
        raise Unsupported(f"{self.name} cannot sample morphisms")

    def disjoint_embedding(self, objs: Sequence) -> "DisjointEmbeddingData":
        raise Unsupported(f"{self.name} has no disjoint embeddings")

    # conveniences built from the primitives

    def approx_eq(self, f, g, tol: float = DEFAULT_TOL) -> bool:
        if f.dom != g.dom or f.cod != g.cod:
            return False
        d = self.distance(f, g)
        return d == 0 if self.exact else d <= tol

    def compose_all(self, *fs):
        """``compose_all(h, g, f) == h o g o f``."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self.compose(g, out)
        return out

    def sum(self, fs: Sequence, dom=None, cod=None):
        fs = list(fs)
        if not fs:
            if dom is None or cod is None:
                raise ValueError("empty sum needs explicit dom and cod")
            return self.zero(dom, cod)
        out = fs[0]
        for f in fs[1:]:
            out = self.add(out, f)
        return out


@dataclass(frozen=True)
class DisjointEmbeddingData:
    """Injections/projections into a common object, orthogonal but not complete.

    ``pinch`` is the idempotent ``sum_i inj_i o proj_i``.
    """

    parts: tuple
    target: Any
    injections: tuple
    projections: tuple
    pinch: Any


@dataclass(frozen=True)
class Splitting:
    """A pair with ``e o m == id`` splitting the idempotent ``m o e``."""

    m: Any
    e: Any


def is_causal(theory: Theory, f, tol: float = DEFAULT_TOL) -> bool:
    theory.check_morphism(f)
    lhs = theory.compose(theory.discard(f.cod), f)
    return theory.approx_eq(lhs, theory.discard(f.dom), check_tol(tol))


def is_idempotent(theory: Theory, p, tol: float = DEFAULT_TOL) -> bool:
    theory.check_morphism(p)
    if p.dom != p.cod:
        raise NotEndomorphism(f"{p.dom} -> {p.cod} is not an endomorphism")
    return theory.approx_eq(theory.compose(p, p), p, check_tol(tol))


def is_subcausal(theory: Theory, f, tol: float = DEFAULT_TOL) -> bool:
    theory.check_morphism(f)
    return theory.is_subcausal(f, check_tol(tol))


# ---------------------------------------------------------------------------
# law suite


@dataclass
class LawResult:
    name: str
    passed: bool
    max_residual: float
    checked: int

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark} {self.name:<28} n={self.checked:<4} max_residual={self.max_residual:.3e}"


@dataclass
class LawReport:
    theory: str
    seed: int
    samples: int
    results: list[LawResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> LawResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def names(self) -> list[str]:
        return [r.name for r in self.results]

    def to_dict(self) -> dict:
        return {
            "theory": self.theory,
            "seed": self.seed,
            "samples": self.samples,
            "ok": self.ok,
            "laws": [
                {"name": r.name, "passed": r.passed, "max_residual": r.max_residual, "checked": r.checked}
                for r in self.results
            ],
        }


class _LawRecorder:
    def __init__(self, theory: Theory, tol: float):
        self.theory = theory
        self.tol = tol
        self.acc: dict[str, list[float]] = {}

    def eq(self, name: str, f, g) -> None:
        t = self.theory
        if f.dom != g.dom or f.cod != g.cod:
            res = float("inf")
        else:
            res = float(t.distance(f, g))
        self.acc.setdefault(name, []).append(res)

    def results(self) -> list[LawResult]:
        out = []
        for name, vals in self.acc.items():
            worst = max(vals)
            passed = worst == 0 if self.theory.exact else worst <= self.tol
            out.append(LawResult(name, bool(passed), worst, len(vals)))
        return out


def check_theory_laws(theory: Theory, seed: int = 0, samples: int = 100,
                      tol: float = DEFAULT_TOL) -> LawReport:
    """Check the semi-additive monoidal laws on ``samples`` seeded random draws.

    Failures are reported, never raised.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    tol = check_tol(tol)
    rng = np.random.default_rng(seed)
    t = theory
    rec = _LawRecorder(t, tol)
    obj = lambda: t.random_object(rng)  # noqa: E731
    mor: Callable = lambda a, b: t.random_morphism(rng, a, b)  # noqa: E731

    rec.eq("discard(I) = id(I)", t.discard(t.unit), t.identity(t.unit))
    for _ in range(samples):
        A, B, C, D = obj(), obj(), obj(), obj()
        f, f2, f3 = mor(A, B), mor(A, B), mor(A, B)
        g, h = mor(B, C), mor(C, D)

        rec.eq("compose associative", t.compose(h, t.compose(g, f)), t.compose(t.compose(h, g), f))
        rec.eq("identity left", t.compose(t.identity(B), f), f)
        rec.eq("identity right", t.compose(f, t.identity(A)), f)
        rec.eq("sum commutative", t.add(f, f2), t.add(f2, f))
        rec.eq("sum associative", t.add(t.add(f, f2), f3), t.add(f, t.add(f2, f3)))
        rec.eq("sum unit", t.add(f, t.zero(A, B)), f)
        rec.eq("compose bilinear left", t.compose(g, t.add(f, f2)),
               t.add(t.compose(g, f), t.compose(g, f2)))
        g2 = mor(B, C)
        rec.eq("compose bilinear right", t.compose(t.add(g, g2), f),
               t.add(t.compose(g, f), t.compose(g2, f)))
        rec.eq("zero absorbs left", t.compose(t.zero(B, C), f), t.zero(A, C))
        rec.eq("zero absorbs right", t.compose(g, t.zero(A, B)), t.zero(A, C))
        if t.idempotent_sum:
            rec.eq("sum idempotent", t.add(f, f), f)

        if t.has_tensor:
            k = mor(C, D)
            rec.eq("discard multiplicative",
                   t.discard(t.tensor_obj(A, C)), t.tensor(t.discard(A), t.discard(C)))
            rec.eq("tensor bilinear left", t.tensor(k, t.add(f, f2)),
                   t.add(t.tensor(k, f), t.tensor(k, f2)))
            rec.eq("tensor bilinear right", t.tensor(t.add(f, f2), k),
                   t.add(t.tensor(f, k), t.tensor(f2, k)))
            rec.eq("tensor zero", t.tensor(f, t.zero(C, D)), t.zero(t.tensor_obj(A, C), t.tensor_obj(B, D)))
            # (g (x) h') o (f (x) k') == (g o f) (x) (h' o k')
            E = obj()
            k1 = mor(E, C)
            rec.eq("tensor interchange", t.compose(t.tensor(g, h), t.tensor(f, k1)),
                   t.tensor(t.compose(g, f), t.compose(h, k1)))
            rec.eq("tensor unit", t.tensor(f, t.identity(t.unit)), f)

        if t.has_adjoint:
            rec.eq("adjoint involutive", t.adjoint(t.adjoint(f)), f)
            rec.eq("adjoint reverses compose", t.adjoint(t.compose(g, f)),
                   t.compose(t.adjoint(f), t.adjoint(g)))
            rec.eq("adjoint additive", t.adjoint(t.add(f, f2)), t.add(t.adjoint(f), t.adjoint(f2)))

    return LawReport(t.name, seed, samples, rec.results())


def max_abs(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0



__all__ = [
    "DEFAULT_TOL",
    "Theory",
    "DisjointEmbeddingData",
    "Splitting",
    "LawReport",
    "LawResult",
    "is_causal",
    "is_idempotent",
    "is_subcausal",
    "check_theory_laws",
    "check_tol",
]
