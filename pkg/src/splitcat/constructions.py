"""Biproduct completion and Karoubi envelope over any :class:`Theory`.

Both constructions are themselves theories, so the law suite and the generic
predicates apply to them unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import (
    MismatchedTheory,
    NotEndomorphism,
    NotIdempotent,
    NotInHom,
    PreconditionFailed,
    ShapeMismatch,
    Unsupported,
    BadState,
    ZeroIdempotent,
)
from .theory import (
    DEFAULT_TOL,
    DisjointEmbeddingData,
    Splitting,
    Theory,
    check_tol,
    is_causal,
    is_idempotent,
)

# ---------------------------------------------------------------------------
# biproduct completion


@dataclass(frozen=True)
class BiprodObject:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __len__(self):
        return len(self.parts)

    def __str__(self):
        return "<" + ", ".join(map(str, self.parts)) + ">"


@dataclass(frozen=True, eq=False)
class BiprodMorphism:
    """Matrix of base morphisms; ``entries[j][i]`` maps part ``i`` of dom to part ``j`` of cod."""

    dom: BiprodObject
    cod: BiprodObject
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        if len(rows) != len(self.cod) or any(len(r) != len(self.dom) for r in rows):
            raise ShapeMismatch(f"{len(rows)}-row matrix for {self.dom} -> {self.cod}")
        for j, row in enumerate(rows):
            for i, f in enumerate(row):
                if f.dom != self.dom.parts[i] or f.cod != self.cod.parts[j]:
                    raise ShapeMismatch(f"entry ({j},{i}) has type {f.dom} -> {f.cod}")
        object.__setattr__(self, "entries", rows)

    def __repr__(self):
        return f"BiprodMorphism({self.dom} -> {self.cod})"


class BiprodTheory(Theory):
    """The free biproduct completion ``C^(+)`` of a semi-additive theory."""

    def __init__(self, base: Theory):
        self.base = base
        self.name = f"{base.name}^+"
        self.exact = base.exact
        self.cancellative = base.cancellative
        self.idempotent_sum = base.idempotent_sum
        self.has_tensor = base.has_tensor
        self.has_adjoint = base.has_adjoint

    @property
    def unit(self) -> BiprodObject:
        return BiprodObject((self.base.unit,))

    def obj(self, *parts) -> BiprodObject:
        return BiprodObject(parts)

    def embed(self, f) -> BiprodMorphism:
        """``A -> <A>`` on morphisms."""
        return BiprodMorphism(BiprodObject((f.dom,)), BiprodObject((f.cod,)), ((f,),))

    def check_morphism(self, f) -> None:
        if not isinstance(f, BiprodMorphism):
            raise MismatchedTheory(f"{f!r} is not a matrix of morphisms")
        for row in f.entries:
            for e in row:
                self.base.check_morphism(e)

    def matrix(self, dom: BiprodObject, cod: BiprodObject, entries) -> BiprodMorphism:
        return BiprodMorphism(dom, cod, entries)

    def identity(self, obj: BiprodObject) -> BiprodMorphism:
        b = self.base
        rows = [[b.identity(a) if i == j else b.zero(a, c) for i, a in enumerate(obj.parts)]
                for j, c in enumerate(obj.parts)]
        return BiprodMorphism(obj, obj, rows)

    def compose(self, g: BiprodMorphism, f: BiprodMorphism) -> BiprodMorphism:
        if g.dom != f.cod:
            raise ShapeMismatch(f"cannot compose {f.dom}->{f.cod} with {g.dom}->{g.cod}")
        b = self.base
        rows = []
        for k, c in enumerate(g.cod.parts):
            row = []
            for i, a in enumerate(f.dom.parts):
                terms = [b.compose(g.entries[k][j], f.entries[j][i]) for j in range(len(f.cod))]
                row.append(b.sum(terms, a, c))
            rows.append(row)
        return BiprodMorphism(f.dom, g.cod, rows)

    def add(self, f: BiprodMorphism, g: BiprodMorphism) -> BiprodMorphism:
        if f.dom != g.dom or f.cod != g.cod:
            raise ShapeMismatch("sum of non-parallel matrices")
        rows = [[self.base.add(x, y) for x, y in zip(rf, rg)] for rf, rg in zip(f.entries, g.entries)]
        return BiprodMorphism(f.dom, f.cod, rows)

    def zero(self, dom: BiprodObject, cod: BiprodObject) -> BiprodMorphism:
        rows = [[self.base.zero(a, c) for a in dom.parts] for c in cod.parts]
        return BiprodMorphism(dom, cod, rows)

    def scale(self, s, f: BiprodMorphism) -> BiprodMorphism:
        rows = [[self.base.scale(s, e) for e in row] for row in f.entries]
        return BiprodMorphism(f.dom, f.cod, rows)

    def discard(self, obj: BiprodObject) -> BiprodMorphism:
        return BiprodMorphism(obj, self.unit, [[self.base.discard(a) for a in obj.parts]])

    def injection(self, obj: BiprodObject, i: int) -> BiprodMorphism:
        src = BiprodObject((obj.parts[i],))
        b = self.base
        rows = [[b.identity(a) if j == i else b.zero(obj.parts[i], a)] for j, a in enumerate(obj.parts)]
        return BiprodMorphism(src, obj, rows)

    def projection(self, obj: BiprodObject, i: int) -> BiprodMorphism:
        tgt = BiprodObject((obj.parts[i],))
        b = self.base
        row = [b.identity(a) if j == i else b.zero(a, obj.parts[i]) for j, a in enumerate(obj.parts)]
        return BiprodMorphism(obj, tgt, [row])

    def tensor_obj(self, a: BiprodObject, b: BiprodObject) -> BiprodObject:
        return BiprodObject(tuple(self.base.tensor_obj(x, y) for x in a.parts for y in b.parts))

    def tensor(self, f: BiprodMorphism, g: BiprodMorphism) -> BiprodMorphism:
        t = self.base.tensor
        rows = [[t(f.entries[j][i], g.entries[l][k])
                 for i in range(len(f.dom)) for k in range(len(g.dom))]
                for j in range(len(f.cod)) for l in range(len(g.cod))]
        return BiprodMorphism(self.tensor_obj(f.dom, g.dom), self.tensor_obj(f.cod, g.cod), rows)

    def adjoint(self, f: BiprodMorphism) -> BiprodMorphism:
        rows = [[self.base.adjoint(f.entries[j][i]) for j in range(len(f.cod))] for i in range(len(f.dom))]
        return BiprodMorphism(f.cod, f.dom, rows)

    def distance(self, f: BiprodMorphism, g: BiprodMorphism) -> float:
        if f.dom != g.dom or f.cod != g.cod:
            return float("inf")
        ds = [self.base.distance(x, y) for rf, rg in zip(f.entries, g.entries) for x, y in zip(rf, rg)]
        return max(ds, default=0.0)

    def random_object(self, rng: np.random.Generator) -> BiprodObject:
        n = int(rng.integers(0, 3))
        return BiprodObject(tuple(self.base.random_object(rng) for _ in range(n)))

    def random_morphism(self, rng: np.random.Generator, dom: BiprodObject, cod: BiprodObject) -> BiprodMorphism:
        rows = [[self.base.random_morphism(rng, a, c) for a in dom.parts] for c in cod.parts]
        return BiprodMorphism(dom, cod, rows)


def biprod_theory(base: Theory) -> BiprodTheory:
    return BiprodTheory(base)


# ---------------------------------------------------------------------------
# Karoubi envelope


@dataclass(frozen=True, eq=False)
class KaroubiObject:
    base: Any
    idem: Any
    causal: bool = False

    def __eq__(self, other):
        if not isinstance(other, KaroubiObject):
            return NotImplemented
        # objects are compared by identity of the idempotent payload
        return self.base == other.base and (self.idem is other.idem or _same_payload(self.idem, other.idem))

    def __hash__(self):
        return hash(self.base)

    def __repr__(self):
        return f"KaroubiObject({self.base}, causal={self.causal})"


def _same_payload(f, g) -> bool:
    for attr in ("superop", "entries"):
        if hasattr(f, attr) and hasattr(g, attr):
            a, b = getattr(f, attr), getattr(g, attr)
            if isinstance(a, np.ndarray):
                return a.shape == b.shape and bool(np.array_equal(a, b))
            return a is b
    return f is g


@dataclass(frozen=True, eq=False)
class KaroubiMorphism:
    dom: KaroubiObject
    cod: KaroubiObject
    f: Any

    def __repr__(self):
        return f"KaroubiMorphism({self.dom} -> {self.cod})"


class KaroubiTheory(Theory):
    """``Split(C)``: objects are idempotents, morphisms satisfy ``f = q o f o p``.

    With ``causal_only=True`` this is the causal subtheory on causal idempotents.
    """

    def __init__(self, base: Theory, causal_only: bool = False, tol: float = DEFAULT_TOL):
        self.base = base
        self.causal_only = causal_only
        self.tol = check_tol(tol)
        self.name = f"Split{'_causal' if causal_only else ''}({base.name})"
        self.exact = base.exact
        self.cancellative = base.cancellative
        self.idempotent_sum = base.idempotent_sum
        self.has_tensor = base.has_tensor
        self.has_adjoint = False

    # objects and morphisms

    def object(self, base_obj, idem) -> KaroubiObject:
        b = self.base
        b.check_morphism(idem)
        if idem.dom != base_obj or idem.cod != base_obj:
            raise NotEndomorphism(f"idempotent is not an endomorphism of {base_obj}")
        if not is_idempotent(b, idem, self.tol):
            raise NotIdempotent("p o p != p")
        causal = is_causal(b, idem, self.tol)
        if self.causal_only and not causal:
            raise NotIdempotent("causal subtheory requires a causal idempotent")
        return KaroubiObject(base_obj, idem, causal)

    def embed(self, base_obj) -> KaroubiObject:
        """``A -> (A, id)``."""
        return KaroubiObject(base_obj, self.base.identity(base_obj), True)

    def hom(self, dom: KaroubiObject, cod: KaroubiObject, f) -> KaroubiMorphism:
        """Admit ``f`` if ``f ~ q o f o p`` and store the projected representative."""
        b = self.base
        b.check_morphism(f)
        if f.dom != dom.base or f.cod != cod.base:
            raise ShapeMismatch(f"{f.dom} -> {f.cod} does not match {dom.base} -> {cod.base}")
        snapped = b.compose_all(cod.idem, f, dom.idem)
        if not b.approx_eq(snapped, f, self.tol):
            raise NotInHom(f"f differs from q o f o p by {b.distance(snapped, f):.3e}")
        return KaroubiMorphism(dom, cod, snapped)

    @property
    def unit(self) -> KaroubiObject:
        return self.embed(self.base.unit)

    def check_morphism(self, f) -> None:
        if not isinstance(f, KaroubiMorphism):
            raise MismatchedTheory(f"{f!r} is not a Karoubi morphism")
        self.base.check_morphism(f.f)

    def identity(self, obj: KaroubiObject) -> KaroubiMorphism:
        return KaroubiMorphism(obj, obj, obj.idem)

    def compose(self, g: KaroubiMorphism, f: KaroubiMorphism) -> KaroubiMorphism:
        if g.dom.base != f.cod.base:
            raise ShapeMismatch("composition of non-matching Karoubi morphisms")
        return KaroubiMorphism(f.dom, g.cod, self.base.compose(g.f, f.f))

    def add(self, f: KaroubiMorphism, g: KaroubiMorphism) -> KaroubiMorphism:
        return KaroubiMorphism(f.dom, f.cod, self.base.add(f.f, g.f))

    def zero(self, dom: KaroubiObject, cod: KaroubiObject) -> KaroubiMorphism:
        return KaroubiMorphism(dom, cod, self.base.zero(dom.base, cod.base))

    def scale(self, s, f: KaroubiMorphism) -> KaroubiMorphism:
        return KaroubiMorphism(f.dom, f.cod, self.base.scale(s, f.f))

    def discard(self, obj: KaroubiObject) -> KaroubiMorphism:
        b = self.base
        return KaroubiMorphism(obj, self.unit, b.compose(b.discard(obj.base), obj.idem))

    def tensor_obj(self, a: KaroubiObject, c: KaroubiObject) -> KaroubiObject:
        b = self.base
        return KaroubiObject(b.tensor_obj(a.base, c.base), b.tensor(a.idem, c.idem), a.causal and c.causal)

    def tensor(self, f: KaroubiMorphism, g: KaroubiMorphism) -> KaroubiMorphism:
        return KaroubiMorphism(self.tensor_obj(f.dom, g.dom), self.tensor_obj(f.cod, g.cod),
                               self.base.tensor(f.f, g.f))

    def distance(self, f: KaroubiMorphism, g: KaroubiMorphism) -> float:
        return self.base.distance(f.f, g.f)

    def approx_eq(self, f, g, tol: float = DEFAULT_TOL) -> bool:
        if f.dom.base != g.dom.base or f.cod.base != g.cod.base:
            return False
        d = self.distance(f, g)
        return d == 0 if self.exact else d <= tol

    def is_subcausal(self, f, tol: float = DEFAULT_TOL) -> bool:
        raise Unsupported("no sub-causality rule in the Karoubi envelope")


def karoubi_theory(base: Theory, causal_only: bool = False, tol: float = DEFAULT_TOL) -> KaroubiTheory:
    return KaroubiTheory(base, causal_only, tol)


# ---------------------------------------------------------------------------
# biproducts in Split(C) from disjoint embeddings


@dataclass
class KaroubiBiproduct:
    obj: KaroubiObject
    injections: list
    projections: list
    embedding: DisjointEmbeddingData

    def __iter__(self):
        return iter((self.obj, self.injections, self.projections))


def karoubi_biproduct(base: Theory, objs: Sequence[KaroubiObject], emb: DisjointEmbeddingData | None = None,
                      tol: float = DEFAULT_TOL) -> KaroubiBiproduct:
    """Biproduct of ``(A_i, p_i)`` carried by ``(A, sum_i k_i o p_i o pi_i)``."""
    b = base
    if emb is None:
        emb = b.disjoint_embedding([o.base for o in objs])
    if len(emb.parts) != len(objs) or any(p != o.base for p, o in zip(emb.parts, objs)):
        raise ShapeMismatch("disjoint embedding parts do not match the objects")
    terms = [b.compose_all(k, o.idem, pi) for k, o, pi in zip(emb.injections, objs, emb.projections)]
    q = b.sum(terms, emb.target, emb.target)
    causal = is_causal(b, q, tol)
    obj = KaroubiObject(emb.target, q, causal)
    inj = [KaroubiMorphism(o, obj, b.compose(k, o.idem)) for k, o in zip(emb.injections, objs)]
    proj = [KaroubiMorphism(obj, o, b.compose(o.idem, pi)) for pi, o in zip(emb.projections, objs)]
    return KaroubiBiproduct(obj, inj, proj, emb)


def biproduct_residuals(base: Theory, bp: KaroubiBiproduct) -> dict[str, float]:
    """Residuals of ``proj_i o inj_j = delta_ij id`` and ``sum inj_i o proj_i = id``."""
    b = base
    out = {}
    objs = [i.dom for i in bp.injections]
    for i, pi in enumerate(bp.projections):
        for j, kj in enumerate(bp.injections):
            lhs = b.compose(pi.f, kj.f)
            rhs = objs[i].idem if i == j else b.zero(objs[j].base, objs[i].base)
            out[f"proj{i} o inj{j}"] = b.distance(lhs, rhs)
    total = b.sum([b.compose(k.f, p.f) for k, p in zip(bp.injections, bp.projections)],
                  bp.obj.base, bp.obj.base)
    out["sum inj o proj = id"] = b.distance(total, bp.obj.idem)
    for n, k in enumerate(bp.injections):
        out[f"inj{n} in hom"] = b.distance(b.compose_all(bp.obj.idem, k.f, k.dom.idem), k.f)
    return out


# ---------------------------------------------------------------------------
# the comparison functor C^(+) -> Split(C)


class ComparisonFunctor:
    """Sends ``<A_1..A_n>`` to the biproduct of the ``(A_i, id)`` in ``Split(C)``."""

    def __init__(self, base: Theory, tol: float = DEFAULT_TOL):
        self.base = base
        self.tol = check_tol(tol)
        self.source = BiprodTheory(base)
        self.target = KaroubiTheory(base, tol=tol)
        self._cache: dict = {}

    def embedding(self, obj: BiprodObject) -> DisjointEmbeddingData:
        key = obj.parts
        if key not in self._cache:
            self._cache[key] = self.base.disjoint_embedding(obj.parts)
        return self._cache[key]

    def on_object(self, obj: BiprodObject) -> KaroubiObject:
        emb = self.embedding(obj)
        ks = [self.target.embed(a) for a in obj.parts]
        return karoubi_biproduct(self.base, ks, emb, self.tol).obj

    def on_morphism(self, m: BiprodMorphism) -> KaroubiMorphism:
        b = self.base
        ed, ec = self.embedding(m.dom), self.embedding(m.cod)
        terms = [b.compose_all(ec.injections[j], m.entries[j][i], ed.projections[i])
                 for j in range(len(m.cod)) for i in range(len(m.dom))]
        f = b.sum(terms, ed.target, ec.target)
        return KaroubiMorphism(self.on_object(m.dom), self.on_object(m.cod), f)

    def __call__(self, m):
        return self.on_object(m) if isinstance(m, BiprodObject) else self.on_morphism(m)

    def unfold(self, f: KaroubiMorphism, dom: BiprodObject, cod: BiprodObject) -> BiprodMorphism:
        """Recover the matrix ``pi_j o f o k_i`` of a morphism between images of F."""
        b = self.base
        ed, ec = self.embedding(dom), self.embedding(cod)
        rows = [[b.compose_all(ec.projections[j], f.f, ed.injections[i]) for i in range(len(dom))]
                for j in range(len(cod))]
        return BiprodMorphism(dom, cod, rows)


def functor_F(base: Theory, m, tol: float = DEFAULT_TOL):
    return ComparisonFunctor(base, tol)(m)


def functor_residuals(F: ComparisonFunctor, f: BiprodMorphism, g: BiprodMorphism,
                      h: BiprodMorphism) -> dict[str, float]:
    """Distances for F on ``g o f``, ``f + h``, identities, discarding and the fullness round trip.

    ``f`` and ``h`` must be parallel and ``g`` composable after ``f``.
    """
    src, tgt, b = F.source, F.target, F.base
    out = {
        "composition": tgt.distance(F(src.compose(g, f)), tgt.compose(F(g), F(f))),
        "sum": tgt.distance(F(src.add(f, h)), tgt.add(F(f), F(h))),
        "identity": max(tgt.distance(F(src.identity(x)), tgt.identity(F(x))) for x in (f.dom, f.cod)),
    }
    # F sends the row of discards to discarding on the image object
    fd = F(src.discard(f.dom))
    out["discard"] = b.distance(fd.f, b.compose(b.discard(F(f.dom).base), F(f.dom).idem))
    out["fullness round trip"] = src.distance(F.unfold(F(f), f.dom, f.cod), f)
    return out


# ---------------------------------------------------------------------------
# splitting transfer and sub-causal repair


def karoubi_iso_check(theory: Theory, p, q, tol: float = DEFAULT_TOL) -> bool:
    """``(A, p) ~= (A, q)`` in ``Split(C)``: ``p o q == q`` and ``q o p == p``."""
    for x in (p, q):
        if x.dom != x.cod:
            raise NotEndomorphism(f"{x.dom} -> {x.cod} is not an endomorphism")
    if p.dom != q.dom:
        raise NotEndomorphism("idempotents live on different objects")
    t = theory
    return t.approx_eq(t.compose(p, q), q, tol) and t.approx_eq(t.compose(q, p), p, tol)


def splitting_transfer(theory: Theory, q_split: Splitting, p, tol: float = DEFAULT_TOL) -> Splitting:
    """From a splitting ``(m, e)`` of ``q`` with ``Im p = Im q`` build ``(m, e o p)`` splitting ``p``."""
    t = theory
    m, e = q_split.m, q_split.e
    q = t.compose(m, e)
    if not karoubi_iso_check(t, p, q, tol):
        raise PreconditionFailed("p o q != q or q o p != p")
    e2 = t.compose(e, p)
    if not t.approx_eq(t.compose(e2, m), t.identity(m.dom), tol):
        raise PreconditionFailed("(e o p) o m != id")
    if not t.approx_eq(t.compose(m, e2), p, tol):
        raise PreconditionFailed("m o (e o p) != p")
    return Splitting(m, e2)


def causalize_subcausal(theory: Theory, p, a, tol: float = DEFAULT_TOL):
    """Turn a non-zero sub-causal idempotent into the causal ``p + p o a o x``.

    ``x = discard - discard o p`` must be an effect of the theory (checked via
    sub-causality) and ``a`` must satisfy ``discard o p o a == 1``.
    """
    t = theory
    tol = check_tol(tol)
    if not t.cancellative:
        raise Unsupported(f"{t.name} is not flagged cancellative")
    if p.dom != p.cod:
        raise NotEndomorphism("p must be an endomorphism")
    if t.approx_eq(p, t.zero(p.dom, p.cod), tol):
        raise ZeroIdempotent("p is zero")
    if not is_idempotent(t, p, tol):
        raise NotIdempotent("p o p != p")
    if not t.is_subcausal(p, tol):
        raise PreconditionFailed("p is not sub-causal")
    dp = t.compose(t.discard(p.cod), p)
    weight = t.compose(dp, a)
    if not t.approx_eq(weight, t.identity(t.unit), tol):
        raise BadState(f"discard o p o a = {_scalar_value(weight)} != 1")
    x = t.subtract(t.discard(p.dom), dp, tol)
    return t.add(p, t.compose_all(p, a, x))


def _scalar_value(s) -> complex:
    for attr in ("superop", "entries"):
        if hasattr(s, attr):
            return complex(np.asarray(getattr(s, attr)).reshape(-1)[0])
    return complex("nan")
