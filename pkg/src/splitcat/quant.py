"""Completely positive maps between direct sums of matrix algebras.

An object is a :class:`CompositeSystem` ``[d1, ..., dk]`` standing for
``M_d1 (+) ... (+) M_dk``; a single entry is an ordinary quantum system.
A :class:`Channel` stores its superoperator in coordinates where a
block-diagonal operator is vectorized block by block, row-major inside each
block. In these coordinates composition is a matrix product, the
Hilbert-Schmidt adjoint is the conjugate transpose and ``vec(A X B)`` is
``kron(A, B.T) @ vec(X)``.

The Choi matrix of a channel is taken of its pinch extension to the full
matrix algebras, ``J = sum_ij E_ij (x) Phi(pinch(E_ij))`` with row index
``i * D_out + k``; complete positivity is positivity of ``J`` and trace
preservation is ``Tr_out J == I``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import MismatchedTheory, ShapeMismatch
from .theory import DEFAULT_TOL, DisjointEmbeddingData, Theory, check_tol, max_abs


@dataclass(frozen=True)
class CompositeSystem:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("a system needs at least one block")
        if any(d < 1 for d in dims):
            raise ValueError(f"block dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        """Number of superoperator coordinates, ``sum d_i**2``."""
        return sum(d * d for d in self.dims)

    @property
    def hilbert_dim(self) -> int:
        return sum(self.dims)

    @property
    def is_simple(self) -> bool:
        return len(self.dims) == 1

    def coord_offsets(self) -> list[int]:
        out, off = [], 0
        for d in self.dims:
            out.append(off)
            off += d * d
        return out

    def row_offsets(self) -> list[int]:
        out, off = [], 0
        for d in self.dims:
            out.append(off)
            off += d
        return out

    def __repr__(self):
        return f"CompositeSystem({list(self.dims)})"

    def __str__(self):
        return "[" + ",".join(map(str, self.dims)) + "]"


def system(dims) -> CompositeSystem:
    if isinstance(dims, CompositeSystem):
        return dims
    if isinstance(dims, (int, np.integer)):
        return CompositeSystem((int(dims),))
    return CompositeSystem(tuple(dims))


UNIT = CompositeSystem((1,))


# ---------------------------------------------------------------------------
# coordinates


def to_coords(sys: CompositeSystem, x) -> np.ndarray:
    """Vectorize an operator given as block list or full block-diagonal matrix."""
    if isinstance(x, (list, tuple)):
        blocks = [np.asarray(b, dtype=complex) for b in x]
    else:
        x = np.asarray(x, dtype=complex)
        if sys.is_simple:
            blocks = [x]
        else:
            offs = sys.row_offsets()
            blocks = [x[o:o + d, o:o + d] for o, d in zip(offs, sys.dims)]
    if len(blocks) != len(sys.dims) or any(b.shape != (d, d) for b, d in zip(blocks, sys.dims)):
        raise ShapeMismatch(f"operator does not fit system {sys}")
    return np.concatenate([b.reshape(-1) for b in blocks])


def from_coords(sys: CompositeSystem, v: np.ndarray) -> list[np.ndarray]:
    v = np.asarray(v)
    if v.shape != (sys.n,):
        raise ShapeMismatch(f"coordinate vector of length {v.shape} for system {sys}")
    return [v[o:o + d * d].reshape(d, d) for o, d in zip(sys.coord_offsets(), sys.dims)]


def block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    off = 0
    for b in blocks:
        d = b.shape[0]
        out[off:off + d, off:off + d] = b
        off += d
    return out


@lru_cache(maxsize=256)
def _tensor_perm(dims1: tuple, dims2: tuple) -> np.ndarray:
    """Map from tensor-system coordinates to positions in ``kron(v1, v2)``."""
    s1, s2 = CompositeSystem(dims1), CompositeSystem(dims2)
    n2 = s2.n
    off1, off2 = s1.coord_offsets(), s2.coord_offsets()
    perm = []
    for i, d in enumerate(dims1):
        for j, e in enumerate(dims2):
            # entry ((a,c),(b,dd)) of a block of X_i (x) Y_j, row-major over (a*e+c, b*e+dd)
            a, c, b, dd = np.meshgrid(np.arange(d), np.arange(e), np.arange(d), np.arange(e), indexing="ij")
            src = (off1[i] + a * d + b) * n2 + off2[j] + c * e + dd
            perm.append(src.reshape(-1))
    out = np.concatenate(perm)
    out.setflags(write=False)
    return out


def tensor_system(a: CompositeSystem, b: CompositeSystem) -> CompositeSystem:
    return CompositeSystem(tuple(d * e for d in a.dims for e in b.dims))


# ---------------------------------------------------------------------------
# channels


@dataclass(frozen=True, eq=False)
class Channel:
    """Linear map between direct sums of matrix algebras (CP/TP are checked, not assumed)."""

    dom: CompositeSystem
    cod: CompositeSystem
    superop: np.ndarray

    def __post_init__(self):
        dom, cod = system(self.dom), system(self.cod)
        s = np.array(self.superop, dtype=complex, copy=True)
        if s.shape != (cod.n, dom.n):
            raise ShapeMismatch(f"superoperator shape {s.shape} does not match {dom} -> {cod}")
        s.setflags(write=False)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "superop", s)

    def __repr__(self):
        return f"Channel({self.dom} -> {self.cod})"

    def __call__(self, x):
        """Apply to an operator; returns the full block-diagonal output matrix."""
        out = from_coords(self.cod, self.superop @ to_coords(self.dom, x))
        return out[0] if self.cod.is_simple else block_diag(out)

    def __matmul__(self, other: "Channel") -> "Channel":
        return QUANT.compose(self, other)

    def __add__(self, other: "Channel") -> "Channel":
        return QUANT.add(self, other)

    @cached_property
    def choi(self) -> np.ndarray:
        return _choi_of_superop(self.dom, self.cod, self.superop)


def _full_index(sys: CompositeSystem):
    """For each coordinate, its (row, col) in the full ``D x D`` matrix."""
    rows, cols = [], []
    for o, d in zip(sys.row_offsets(), sys.dims):
        r, c = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        rows.append(o + r.reshape(-1))
        cols.append(o + c.reshape(-1))
    return np.concatenate(rows), np.concatenate(cols)


def _choi_of_superop(dom: CompositeSystem, cod: CompositeSystem, s: np.ndarray) -> np.ndarray:
    di, do = dom.hilbert_dim, cod.hilbert_dim
    ri, ci = _full_index(dom)
    ro, co = _full_index(cod)
    j = np.zeros((di * do, di * do), dtype=complex)
    # J[i*do + k, j*do + l] = Phi(E_ij)[k, l]
    rr = ri[None, :] * do + ro[:, None]
    cc = ci[None, :] * do + co[:, None]
    j[rr, cc] = s
    return j


def superop_from_choi(dom, cod, choi, tol: float = 1e-12) -> np.ndarray:
    """Inverse of the Choi map; rejects matrices not compatible with the block structure."""
    dom, cod = system(dom), system(cod)
    di, do = dom.hilbert_dim, cod.hilbert_dim
    choi = np.asarray(choi, dtype=complex)
    if choi.shape != (di * do, di * do):
        raise ShapeMismatch(f"Choi matrix shape {choi.shape} does not match {dom} -> {cod}")
    ri, ci = _full_index(dom)
    ro, co = _full_index(cod)
    rr = ri[None, :] * do + ro[:, None]
    cc = ci[None, :] * do + co[:, None]
    s = choi[rr, cc]
    if max_abs(_choi_of_superop(dom, cod, s) - choi) > tol * max(1.0, max_abs(choi)):
        raise ShapeMismatch("Choi matrix has entries outside the block structure")
    return s


def kraus_superop(k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=complex)
    return np.kron(k, k.conj())


def channel_from_kraus(ks: Iterable, dom=None, cod=None) -> Channel:
    """Channel ``X -> sum_k K X K^dagger`` between single-block systems."""
    ks = [np.atleast_2d(np.asarray(k, dtype=complex)) for k in ks]
    if dom is None or cod is None:
        if not ks:
            raise ShapeMismatch("empty Kraus set needs explicit dom and cod")
        cod_d, dom_d = ks[0].shape
        dom = dom if dom is not None else dom_d
        cod = cod if cod is not None else cod_d
    dom, cod = system(dom), system(cod)
    if not (dom.is_simple and cod.is_simple):
        raise ShapeMismatch("Kraus sets describe single-block systems only")
    shape = (cod.dims[0], dom.dims[0])
    s = np.zeros((cod.n, dom.n), dtype=complex)
    for k in ks:
        if k.shape != shape:
            raise ShapeMismatch(f"Kraus operator of shape {k.shape}, expected {shape}")
        s += kraus_superop(k)
    return Channel(dom, cod, s)


def kraus_from_choi(choi: np.ndarray, din: int, dout: int, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Kraus operators from the eigendecomposition of a PSD Choi matrix.

    Eigenvalues below ``tol * max_eigenvalue`` are dropped; operators are
    returned by decreasing eigenvalue.
    """
    w, v = np.linalg.eigh((choi + choi.conj().T) / 2)
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    top = max(w[0], 0.0) if w.size else 0.0
    out = []
    for lam, vec in zip(w, v.T):
        if top == 0 or lam <= tol * top:
            break
        out.append(np.sqrt(lam) * vec.reshape(din, dout).T)
    return out


class ChannelValidation(NamedTuple):
    cp: bool
    tp: bool
    subcausal: bool


def _out_partial_trace(c: Channel) -> np.ndarray:
    di, do = c.dom.hilbert_dim, c.cod.hilbert_dim
    return np.einsum("ikjk->ij", c.choi.reshape(di, do, di, do))


def validate_channel(c: Channel, tol: float = DEFAULT_TOL) -> ChannelValidation:
    tol = check_tol(tol)
    j = c.choi
    herm = (j + j.conj().T) / 2
    cp = max_abs(j - herm) <= tol and np.linalg.eigvalsh(herm)[0] >= -tol
    t = _out_partial_trace(c)
    eye = np.eye(t.shape[0])
    tp = max_abs(t - eye) <= tol
    th = (t + t.conj().T) / 2
    sub = max_abs(t - th) <= tol and np.linalg.eigvalsh(th)[-1] <= 1 + tol
    return ChannelValidation(bool(cp), bool(tp), bool(sub))


def adjoint(c: Channel) -> Channel:
    """Hilbert-Schmidt adjoint; the adjoint of a trace-preserving map is unital."""
    return Channel(c.cod, c.dom, c.superop.conj().T)


# ---------------------------------------------------------------------------
# pure maps


@dataclass(frozen=True, eq=False)
class PureMap:
    """Linear map up to a global phase."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(np.atleast_2d(self.matrix), dtype=complex, copy=True)
        if m.ndim != 2:
            raise ShapeMismatch("pure map must be a matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self):
        return self.matrix.shape

    def phase_equal(self, other: "PureMap", tol: float = DEFAULT_TOL) -> bool:
        a, b = self.matrix, other.matrix
        if a.shape != b.shape:
            return False
        ip = np.vdot(b, a)
        if abs(ip) == 0:
            return max_abs(a) <= tol and max_abs(b) <= tol
        return max_abs(a - (ip / abs(ip)) * b) <= tol


def pure_embed(f) -> Channel:
    """``X -> f X f^dagger``; phase-equivalent maps give identical channels."""
    m = f.matrix if isinstance(f, PureMap) else np.atleast_2d(np.asarray(f, dtype=complex))
    return channel_from_kraus([m], m.shape[1], m.shape[0])


class EnvironmentCheck(NamedTuple):
    discard_eq: bool
    gram_eq: bool
    consistent: bool


def environment_axiom_check(f, g, tol: float = DEFAULT_TOL) -> EnvironmentCheck:
    """Compare ``discard o f == discard o g`` against ``f^dagger f == g^dagger g``.

    The discard side is evaluated through the channel category, the Gram side
    on the matrices, so ``consistent`` is a genuine cross-check.
    """
    tol = check_tol(tol)
    fm = f.matrix if isinstance(f, PureMap) else np.asarray(f, dtype=complex)
    gm = g.matrix if isinstance(g, PureMap) else np.asarray(g, dtype=complex)
    if fm.ndim != 2 or gm.ndim != 2 or fm.shape[1] != gm.shape[1]:
        raise ShapeMismatch(f"pure maps of shapes {fm.shape} and {gm.shape} have different inputs")
    # the outputs may differ in size: both sides are traced out to I
    lhs = QUANT.compose(QUANT.discard(fm.shape[0]), pure_embed(fm))
    rhs = QUANT.compose(QUANT.discard(gm.shape[0]), pure_embed(gm))
    discard_eq = QUANT.distance(lhs, rhs) <= tol
    gram_eq = max_abs(fm.conj().T @ fm - gm.conj().T @ gm) <= tol
    return EnvironmentCheck(bool(discard_eq), bool(gram_eq), bool(discard_eq == gram_eq))


# ---------------------------------------------------------------------------
# the theory


def _block_isometry(dims: Sequence[int], i: int) -> np.ndarray:
    total = sum(dims)
    off = sum(dims[:i])
    v = np.zeros((total, dims[i]), dtype=complex)
    v[off:off + dims[i], :] = np.eye(dims[i])
    return v


def _embedding_channel(src: CompositeSystem, total: int, row_off: int) -> Channel:
    """Place the blocks of ``src`` on the diagonal of ``M_total`` starting at ``row_off``."""
    tgt = CompositeSystem((total,))
    s = np.zeros((tgt.n, src.n), dtype=complex)
    for co, o, d in zip(src.coord_offsets(), src.row_offsets(), src.dims):
        v = np.zeros((total, d), dtype=complex)
        v[row_off + o:row_off + o + d, :] = np.eye(d)
        s[:, co:co + d * d] = kraus_superop(v)
    return Channel(src, tgt, s)


class QuantTheory(Theory):
    """CP maps between finite direct sums of matrix algebras (Quant inside CStar)."""

    name = "Quant"
    cancellative = True
    has_adjoint = True

    def __init__(self, max_block: int = 3, max_blocks: int = 2):
        self.max_block = max_block
        self.max_blocks = max_blocks

    @property
    def unit(self) -> CompositeSystem:
        return UNIT

    def check_morphism(self, f) -> None:
        if not isinstance(f, Channel):
            raise MismatchedTheory(f"{f!r} is not a channel")
        if f.superop.shape != (f.cod.n, f.dom.n):
            raise MismatchedTheory("payload shape inconsistent with dom/cod")

    def identity(self, obj) -> Channel:
        obj = system(obj)
        return Channel(obj, obj, np.eye(obj.n))

    def compose(self, g: Channel, f: Channel) -> Channel:
        if g.dom != f.cod:
            raise ShapeMismatch(f"cannot compose {f.dom}->{f.cod} with {g.dom}->{g.cod}")
        return Channel(f.dom, g.cod, g.superop @ f.superop)

    def add(self, f: Channel, g: Channel) -> Channel:
        if f.dom != g.dom or f.cod != g.cod:
            raise ShapeMismatch("sum of non-parallel channels")
        return Channel(f.dom, f.cod, f.superop + g.superop)

    def subtract(self, f: Channel, g: Channel, tol: float = DEFAULT_TOL) -> Channel:
        if f.dom != g.dom or f.cod != g.cod:
            raise ShapeMismatch("difference of non-parallel channels")
        return Channel(f.dom, f.cod, f.superop - g.superop)

    def zero(self, dom, cod) -> Channel:
        dom, cod = system(dom), system(cod)
        return Channel(dom, cod, np.zeros((cod.n, dom.n)))

    def scale(self, s, f: Channel) -> Channel:
        return Channel(f.dom, f.cod, float(s) * f.superop)

    def discard(self, obj) -> Channel:
        obj = system(obj)
        row = to_coords(obj, [np.eye(d) for d in obj.dims])
        return Channel(obj, UNIT, row[None, :])

    def tensor_obj(self, a, b) -> CompositeSystem:
        return tensor_system(system(a), system(b))

    def tensor(self, f: Channel, g: Channel) -> Channel:
        pd = _tensor_perm(f.dom.dims, g.dom.dims)
        pc = _tensor_perm(f.cod.dims, g.cod.dims)
        s = np.kron(f.superop, g.superop)[np.ix_(pc, pd)]
        return Channel(tensor_system(f.dom, g.dom), tensor_system(f.cod, g.cod), s)

    def adjoint(self, f: Channel) -> Channel:
        return adjoint(f)

    def distance(self, f: Channel, g: Channel) -> float:
        if f.superop.shape != g.superop.shape:
            return float("inf")
        return max_abs(f.superop - g.superop)

    def is_subcausal(self, f: Channel, tol: float = DEFAULT_TOL) -> bool:
        return validate_channel(f, tol).subcausal

    def random_object(self, rng: np.random.Generator) -> CompositeSystem:
        k = int(rng.integers(1, self.max_blocks + 1))
        return CompositeSystem(tuple(int(x) for x in rng.integers(1, self.max_block + 1, size=k)))

    def random_morphism(self, rng: np.random.Generator, dom, cod, causal: bool = False,
                        kraus_rank: int = 2) -> Channel:
        """Random CP map: a Gaussian Kraus set for every (input, output) block pair.

        With ``causal=True`` the Kraus sets are jointly normalized to be trace
        preserving on each input block.
        """
        dom, cod = system(dom), system(cod)
        s = np.zeros((cod.n, dom.n), dtype=complex)
        # with causal=True the stacked Kraus rows must span each input block
        rank = max(kraus_rank, -(-max(dom.dims) // sum(cod.dims))) if causal else kraus_rank
        for ci, (co_i, d) in enumerate(zip(dom.coord_offsets(), dom.dims)):
            ks = []
            for co_o, e in zip(cod.coord_offsets(), cod.dims):
                g = rng.normal(size=(rank, e, d)) + 1j * rng.normal(size=(rank, e, d))
                ks.append((co_o, e, g / np.sqrt(2 * e * d)))
            if causal:
                gram = sum(np.einsum("kji,kjl->il", k.conj(), k) for _, _, k in ks)
                w, v = np.linalg.eigh(gram)
                inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
                ks = [(co_o, e, k @ inv_sqrt) for co_o, e, k in ks]
            for co_o, e, k in ks:
                for kk in k:
                    s[co_o:co_o + e * e, co_i:co_i + d * d] += kraus_superop(kk)
        return Channel(dom, cod, s)

    def disjoint_embedding(self, objs) -> DisjointEmbeddingData:
        systems = tuple(system(o) for o in objs)
        if not systems:
            return DisjointEmbeddingData((), UNIT, (), (), self.zero(UNIT, UNIT))
        total = sum(s.hilbert_dim for s in systems)
        inj, proj = [], []
        off = 0
        for s in systems:
            k = _embedding_channel(s, total, off)
            inj.append(k)
            proj.append(adjoint(k))
            off += s.hilbert_dim
        target = CompositeSystem((total,))
        pinch = self.sum([self.compose(k, p) for k, p in zip(inj, proj)])
        return DisjointEmbeddingData(systems, target, tuple(inj), tuple(proj), pinch)

    def state(self, rho, obj=None) -> Channel:
        """The state ``I -> obj`` preparing the (possibly unnormalized) operator ``rho``."""
        if obj is None:
            obj = system(np.asarray(rho).shape[0])
        obj = system(obj)
        return Channel(UNIT, obj, to_coords(obj, rho)[:, None])

    def effect(self, e, obj=None) -> Channel:
        """The effect ``X -> Tr(e X)``."""
        if obj is None:
            obj = system(np.asarray(e).shape[0])
        obj = system(obj)
        # Tr(e X) = sum_ij e_ji X_ij
        if isinstance(e, (list, tuple)):
            row = to_coords(obj, [np.asarray(b).T for b in e])
        else:
            row = to_coords(obj, np.asarray(e).T)
        return Channel(obj, UNIT, row[None, :])


QUANT = QuantTheory()


def instantiate_quant_theory(max_block: int = 3, max_blocks: int = 2) -> QuantTheory:
    return QuantTheory(max_block=max_block, max_blocks=max_blocks)


def disjoint_embedding(dims) -> DisjointEmbeddingData:
    """Hilbert-space direct sum ``[d1], ..., [dn] -> [sum d]`` with pinching idempotent."""
    dims = [int(d) for d in dims]
    if not dims:
        raise ValueError("dims must be nonempty")
    return QUANT.disjoint_embedding([CompositeSystem((d,)) for d in dims])


# ---------------------------------------------------------------------------
# stock channels


def dephasing(d: int = 2) -> Channel:
    ks = []
    for i in range(d):
        k = np.zeros((d, d))
        k[i, i] = 1
        ks.append(k)
    return channel_from_kraus(ks, d, d)


def unitary_channel(u) -> Channel:
    return pure_embed(np.asarray(u, dtype=complex))


def replacement_channel(sigma) -> Channel:
    """``X -> Tr(X) sigma``."""
    sigma = np.asarray(sigma, dtype=complex)
    d = sigma.shape[0]
    return QUANT.compose(QUANT.state(sigma), QUANT.discard(d))


def transpose_map(d: int = 2) -> Channel:
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1
    return Channel(system(d), system(d), s)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def random_isometry(dout: int, din: int, rng: np.random.Generator) -> np.ndarray:
    return random_unitary(dout, rng)[:, :din]


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
