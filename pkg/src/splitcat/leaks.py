"""Leaks, broadcasting maps and decoherence idempotents from Frobenius structures.

A leak on ``A`` is a morphism ``l : A -> A (x) L`` for which discarding the
environment ``L`` undoes it: ``(id_A (x) discard_L) o l = id_A``. The
environment is always the right tensor factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import (MismatchedTheory, NotCausalIdempotent, NotIdempotent, NotSpecial,
                     ShapeMismatch, Unsupported)
from .matcat import MatMorphism, MatTheory
from .quant import (QUANT, Channel, QuantTheory, kraus_from_choi, pure_embed, system,
                    validate_channel)
from .theory import DEFAULT_TOL, Theory, check_tol, is_idempotent, max_abs


def theory_of(f) -> Theory:
    """The concrete theory a payload belongs to."""
    if isinstance(f, Channel):
        return QUANT
    if isinstance(f, MatMorphism):
        return MatTheory(f.semiring)
    raise MismatchedTheory(f"no theory for {type(f).__name__}")


@dataclass
class LeakCandidate:
    l: Any
    system: Any
    env: Any
    theory: Optional[Theory] = field(default=None, repr=False)

    def __post_init__(self):
        if self.theory is None:
            self.theory = theory_of(self.l)
        t = self.theory
        if isinstance(t, QuantTheory):
            self.system, self.env = system(self.system), system(self.env)
        if self.l.dom != self.system or self.l.cod != t.tensor_obj(self.system, self.env):
            raise ShapeMismatch(f"leak must have shape {self.system} -> {self.system} (x) {self.env}")


def counit_composite(lc: LeakCandidate):
    """``(id_A (x) discard_L) o l``."""
    t = lc.theory
    return t.compose(t.tensor(t.identity(lc.system), t.discard(lc.env)), lc.l)


def left_counit_composite(lc: LeakCandidate):
    """``(discard_A (x) id_L) o l``; only typed as an endomorphism when ``L = A``."""
    t = lc.theory
    return t.compose(t.tensor(t.discard(lc.system), t.identity(lc.env)), lc.l)


def is_leak(lc: LeakCandidate, tol: float = DEFAULT_TOL) -> bool:
    t = lc.theory
    return t.approx_eq(counit_composite(lc), t.identity(lc.system), check_tol(tol))


def has_left_counit(lc: LeakCandidate, tol: float = DEFAULT_TOL) -> bool:
    t = lc.theory
    if lc.env != lc.system:
        return False
    return t.approx_eq(left_counit_composite(lc), t.identity(lc.system), check_tol(tol))


def idempotent_from_leakage(lc: LeakCandidate, tol: float = DEFAULT_TOL):
    """``iota = (id (x) discard) o l``, required to be idempotent."""
    iota = counit_composite(lc)
    if not is_idempotent(lc.theory, iota, tol):
        raise NotIdempotent("the leaked process is not idempotent")
    return iota


def leak_from_idempotent_trivial(p, tol: float = DEFAULT_TOL) -> LeakCandidate:
    """The leak ``p : A -> A (x) I`` with trivial environment."""
    t = theory_of(p)
    if not is_idempotent(t, p, tol):
        raise NotIdempotent("p o p != p")
    return LeakCandidate(p, p.dom, t.unit, t)


def stinespring_leak(p: Channel, tol: float = DEFAULT_TOL) -> LeakCandidate:
    """Leak ``X -> V X V^dagger`` with ``V = sum_i K_i (x) |i>`` from a minimal Kraus set of ``p``."""
    tol = check_tol(tol)
    QUANT.check_morphism(p)
    if p.dom != p.cod or not p.dom.is_simple:
        raise NotCausalIdempotent("need an endomorphism of a single-block system")
    val = validate_channel(p, max(tol, 1e-12))
    if not (val.cp and val.tp) or not is_idempotent(QUANT, p, max(tol, 1e-12)):
        raise NotCausalIdempotent("p must be a completely positive causal idempotent")
    d = p.dom.dims[0]
    ks = kraus_from_choi(p.choi, d, d, tol)
    r = len(ks)
    v = np.zeros((d * r, d), dtype=complex)
    for i, k in enumerate(ks):
        v[i::r, :] = k  # row a * r + i holds K_i[a, :]
    return LeakCandidate(pure_embed(v), p.dom, system(r), QUANT)


def leak_residuals(p, lc: LeakCandidate) -> dict[str, float]:
    """Distances for ``(id (x) discard) o l = p`` and ``p o ((id (x) discard) o l) o p = p``."""
    t = lc.theory
    iota = counit_composite(lc)
    return {
        "counit composite = p": t.distance(iota, p),
        "p o iota o p = p": t.distance(t.compose_all(p, iota, p), p),
    }


def broadcasting_map(theory: Theory, n: int) -> LeakCandidate:
    """Copy map ``i -> (i, i)`` on ``n`` points for the classical theories."""
    if isinstance(theory, QuantTheory):
        raise Unsupported("quantum systems admit no broadcasting map (only constant leaks)")
    if not isinstance(theory, MatTheory):
        raise Unsupported(f"no broadcasting map in {theory.name}")
    if n < 1:
        raise ValueError("n must be >= 1")
    a = np.zeros((n * n, n), dtype=theory.semiring.dtype)
    for i in range(n):
        a[i * n + i, i] = theory.semiring.one
    return LeakCandidate(theory.mat(a), n, n, theory)


def tensor_idempotent_residual(theory: Theory, iota_a, iota_b, iota_ab) -> float:
    """Distance between ``iota_{A (x) B}`` and ``iota_A (x) iota_B`` for one instance."""
    return float(theory.distance(iota_ab, theory.tensor(iota_a, iota_b)))


# ---------------------------------------------------------------------------
# Frobenius structures


@dataclass
class FrobeniusStructure:
    """A comultiplication ``delta : C^d -> C^d (x) C^d`` given as a ``d^2 x d`` matrix."""

    delta: np.ndarray
    dim: int
    frobenius_ok: Optional[bool] = None
    special_ok: Optional[bool] = None

    def __post_init__(self):
        self.delta = np.asarray(self.delta, dtype=complex)
        self.dim = int(self.dim)
        if self.delta.shape != (self.dim ** 2, self.dim):
            raise ShapeMismatch(f"delta must be {self.dim ** 2}x{self.dim}, got {self.delta.shape}")


def copy_structure(d: int) -> FrobeniusStructure:
    """``|i> -> |ii>``, the classical copy comultiplication."""
    delta = np.zeros((d * d, d))
    for i in range(d):
        delta[i * d + i, i] = 1
    return FrobeniusStructure(delta, d)


def pair_of_pants(n: int, normalized: bool = True) -> FrobeniusStructure:
    """Matrix-algebra comultiplication on ``C^{n^2}``: ``E_il -> sum_j E_ij (x) E_jl``.

    The normalized version is scaled by ``1/sqrt(n)`` so that it is special.
    """
    d = n * n
    delta = np.zeros((d * d, d))
    c = 1 / np.sqrt(n) if normalized else 1.0
    for i in range(n):
        for l in range(n):
            for j in range(n):
                delta[(i * n + j) * d + (j * n + l), i * n + l] = c
    return FrobeniusStructure(delta, d)


@dataclass
class FrobeniusReport:
    coassoc: float
    frobenius_law: float
    special: float
    tol: float

    @property
    def coassoc_ok(self) -> bool:
        return self.coassoc <= self.tol

    @property
    def frobenius_ok(self) -> bool:
        return self.frobenius_law <= self.tol

    @property
    def special_ok(self) -> bool:
        return self.special <= self.tol

    @property
    def ok(self) -> bool:
        return self.coassoc_ok and self.frobenius_ok and self.special_ok

    def to_dict(self) -> dict:
        return {
            "coassoc": {"residual": self.coassoc, "passed": self.coassoc_ok},
            "frobenius_law": {"residual": self.frobenius_law, "passed": self.frobenius_ok},
            "special": {"residual": self.special, "passed": self.special_ok},
        }


def verify_frobenius(fs: FrobeniusStructure, tol: float = DEFAULT_TOL) -> FrobeniusReport:
    tol = check_tol(tol)
    d = fs.dim
    delta = fs.delta
    if delta.shape != (d * d, d):
        raise ShapeMismatch("delta has the wrong shape")
    eye = np.eye(d)
    dag = delta.conj().T
    coassoc = max_abs(np.kron(delta, eye) @ delta - np.kron(eye, delta) @ delta)
    frob = max_abs(np.kron(eye, dag) @ np.kron(delta, eye) - np.kron(dag, eye) @ np.kron(eye, delta))
    special = max_abs(dag @ delta - eye)
    rep = FrobeniusReport(coassoc, frob, special, tol)
    fs.frobenius_ok = rep.coassoc_ok and rep.frobenius_ok
    fs.special_ok = rep.special_ok
    return rep


def decoherence_idempotent(fs: FrobeniusStructure, tol: float = DEFAULT_TOL) -> Channel:
    """``X -> Tr_1(delta X delta^dagger)``: discard the left copy after comultiplying."""
    rep = verify_frobenius(fs, tol)
    if not rep.special_ok:
        raise NotSpecial(f"delta^dagger delta != id (residual {rep.special:.3e})")
    d = system(fs.dim)
    t = QUANT
    return t.compose(t.tensor(t.discard(d), t.identity(d)), pure_embed(fs.delta))


__all__ = [
    "FrobeniusReport",
    "FrobeniusStructure",
    "LeakCandidate",
    "broadcasting_map",
    "copy_structure",
    "counit_composite",
    "decoherence_idempotent",
    "has_left_counit",
    "idempotent_from_leakage",
    "is_leak",
    "leak_from_idempotent_trivial",
    "leak_residuals",
    "left_counit_composite",
    "pair_of_pants",
    "stinespring_leak",
    "tensor_idempotent_residual",
    "theory_of",
    "verify_frobenius",
]
