"""Block decomposition of trace-preserving idempotent channels.

The image of a CPTP idempotent ``p`` on ``M_d`` is, in a suitable unitary
frame, ``0_T (+) sum_k M_{a_k} (x) tau_k`` where ``T`` is the transient
subspace. The engine recovers that frame numerically:

1. the fixed space of ``p`` is read off the null space of ``superop - 1``;
2. ``omega = p(I/d)`` has full support on the recurrent subspace, and
   compressing the fixed space by ``omega^{-1/2}`` turns it into a unital
   *-subalgebra ``sum_k M_{a_k} (x) 1`` of operators on that subspace;
3. a random central element separates the blocks, a random element of each
   block yields the ``a_k`` eigenspaces, and a generic element glues those
   eigenspaces into matrix units;
4. ``tau_k`` is the normalized partial trace of ``omega`` over the ``A`` factor.

Every decomposition is verified before it is returned; if verification
fails the random choices are redrawn.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import (EmptySpec, NotCPTP, NotEndomorphism, NotIdempotent, NumericalFailure,
                      ShapeMismatch, Unsupported)
from ..quant import (QUANT, Channel, CompositeSystem, random_density, random_unitary, system,
                     validate_channel)
from ..theory import DEFAULT_TOL, Splitting, check_tol, is_causal, max_abs

MAX_ATTEMPTS = 6


# ---------------------------------------------------------------------------
# linear-algebra helpers


def _null_space(a: np.ndarray, tol: float) -> np.ndarray:
    """Columns spanning the near-null space; threshold relative to the top singular value."""
    if a.size == 0:
        return np.eye(a.shape[1], dtype=a.dtype)
    _, s, vh = np.linalg.svd(a)
    top = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(top, 1.0)))
    return vh[rank:].conj().T


def _herm_to_real(h: np.ndarray) -> np.ndarray:
    return np.concatenate([h.real.reshape(-1), h.imag.reshape(-1)])


def _real_to_herm(v: np.ndarray, d: int) -> np.ndarray:
    n = d * d
    h = v[:n].reshape(d, d) + 1j * v[n:].reshape(d, d)
    return (h + h.conj().T) / 2


def _hermitian_basis(mats: Sequence[np.ndarray], dim: int, d: int) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal Hermitian basis of a †-closed span of ``dim`` matrices."""
    if dim == 0:
        return []
    cols = []
    for x in mats:
        cols.append(_herm_to_real((x + x.conj().T) / 2))
        cols.append(_herm_to_real((x - x.conj().T) / 2j))
    u, _, _ = np.linalg.svd(np.array(cols).T, full_matrices=False)
    return [_real_to_herm(u[:, i], d) for i in range(dim)]


def _psd_sqrt_inv(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v / np.sqrt(w)) @ v.conj().T


def _split_clusters(vals: np.ndarray, k: int) -> list[np.ndarray] | None:
    """Split sorted ``vals`` at its ``k-1`` largest gaps; None if the split is not clean."""
    if k == 1:
        spread = vals[-1] - vals[0] if vals.size else 0.0
        return [np.arange(vals.size)] if spread <= 1e-6 * max(1.0, np.abs(vals).max()) else None
    gaps = np.diff(vals)
    if gaps.size < k - 1:
        return None
    cut = np.sort(np.argsort(gaps)[::-1][:k - 1])
    chosen = gaps[cut]
    rest = np.delete(gaps, cut)
    worst_rest = rest.max() if rest.size else 0.0
    if chosen.min() <= 1e3 * worst_rest or chosen.min() < 1e-8:
        return None
    bounds = [0, *(cut + 1), vals.size]
    return [np.arange(bounds[i], bounds[i + 1]) for i in range(k)]


# ---------------------------------------------------------------------------
# fixed points


def _require_simple_endo(c: Channel) -> int:
    if c.dom != c.cod:
        raise NotEndomorphism(f"{c.dom} -> {c.cod} is not an endomorphism")
    if not c.dom.is_simple:
        raise Unsupported("only single-block systems [d] are supported")
    return c.dom.dims[0]


def fixed_point_space(c: Channel, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal Hermitian basis of ``{X : c(X) = X}``."""
    tol = check_tol(tol)
    d = _require_simple_endo(c)
    ns = _null_space(c.superop - np.eye(d * d), tol)
    mats = [ns[:, i].reshape(d, d) for i in range(ns.shape[1])]
    return _hermitian_basis(mats, len(mats), d)


# ---------------------------------------------------------------------------
# result types


@dataclass
class Block:
    dimA: int
    dimB: int
    tau: np.ndarray
    rank_tau: int

    def label(self) -> str:
        if self.dimB == 1:
            return f"{self.dimA}⊗(τ=1)"
        spec = ", ".join(f"{x:.4g}" for x in np.linalg.eigvalsh(self.tau)[::-1])
        return f"{self.dimA}⊗(τ spectrum [{spec}])"


@dataclass
class BlockDecomposition:
    """``H = sum_k A_k (x) B_k (+) T`` with splitters for every block.

    ``basis`` is a unitary whose columns list the ``A_k (x) B_k`` frames
    (index ``i * dimB + beta``) followed by the transient subspace ``T``.
    ``m`` and ``e`` are the combined splitting through ``[a_1, ..., a_K]``.
    """

    d: int
    blocks: list[Block]
    basis: np.ndarray
    splitters: list[Splitting]
    m: Channel
    e: Channel
    q: Channel
    transient_dim: int
    residuals: dict = field(default_factory=dict)

    @property
    def splitting(self) -> Splitting:
        return Splitting(self.m, self.e)

    def dims_a(self) -> list[int]:
        return [b.dimA for b in self.blocks]

    def summary(self) -> str:
        s = f"{len(self.blocks)} block{'s' if len(self.blocks) != 1 else ''}: "
        s += ", ".join(b.label() for b in self.blocks)
        if self.transient_dim:
            s += f" (transient dim {self.transient_dim})"
        return s


@dataclass
class ReportLine:
    name: str
    passed: bool
    residual: float


@dataclass
class DecompositionReport:
    lines: list[ReportLine]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.lines)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.lines), default=0.0)

    def __getitem__(self, name: str) -> ReportLine:
        for r in self.lines:
            if r.name == name:
                return r
        raise KeyError(name)

    def residuals(self) -> dict[str, float]:
        return {r.name: r.residual for r in self.lines}


# ---------------------------------------------------------------------------
# channels from frames


def _m_superop(v: np.ndarray, a: int, tau: np.ndarray) -> np.ndarray:
    """Superoperator of ``M -> V (M (x) tau) V^dagger``, ``V`` of shape ``d x (a b)``."""
    b = tau.shape[0]
    d = v.shape[0]
    vr = v.reshape(d, a, b)
    # out[x, y] = sum V[x, i, beta] M[i, j] tau[beta, gamma] conj(V[y, j, gamma])
    s = np.einsum("xib,bc,yjc->xyij", vr, tau, vr.conj())
    return s.reshape(d * d, a * a)


def _e_superop(v: np.ndarray, a: int, b: int) -> np.ndarray:
    """Superoperator of ``X -> Tr_B(V^dagger X V)``."""
    d = v.shape[0]
    vr = v.reshape(d, a, b)
    # out[i, j] = sum_beta conj(V[x, i, beta]) X[x, y] V[y, j, beta]
    s = np.einsum("xib,yjb->ijxy", vr.conj(), vr)
    return s.reshape(a * a, d * d)


def assemble_decomposition(d: int, frames: Sequence[np.ndarray], dims_a: Sequence[int],
                           taus: Sequence[np.ndarray], transient: np.ndarray | None = None,
                           ) -> BlockDecomposition:
    """Build splitters and ``q`` from block frames ``V_k`` and states ``tau_k``.

    Whatever the frames leave uncovered is treated as transient: its trace is
    routed into the first block as the maximally mixed state, which keeps the
    combined ``e`` (and hence ``q``) trace preserving.
    """
    if not frames:
        raise EmptySpec("no blocks")
    cols = np.hstack(list(frames))
    if transient is None:
        _, s, vh = np.linalg.svd(cols.conj().T)
        rank = int(np.sum(s > 1e-10))
        transient = vh[rank:].conj().T
    basis = np.hstack([cols, transient]) if transient.size else cols
    p_t = transient @ transient.conj().T if transient.size else np.zeros((d, d))

    blocks, splitters, ms, es = [], [], [], []
    for k, (v, a, tau) in enumerate(zip(frames, dims_a, taus)):
        tau = np.asarray(tau, dtype=complex)
        b = tau.shape[0]
        ms_k = _m_superop(v, a, tau)
        es_k = _e_superop(v, a, b)
        if k == 0 and transient.size:
            sigma = np.eye(a).reshape(-1) / a
            es_k = es_k + np.outer(sigma, p_t.T.reshape(-1))
        mk = Channel(system(a), system(d), ms_k)
        ek = Channel(system(d), system(a), es_k)
        rank = int(np.sum(np.linalg.eigvalsh(tau) > 1e-10))
        blocks.append(Block(a, b, tau, rank))
        splitters.append(Splitting(mk, ek))
        ms.append(ms_k)
        es.append(es_k)
    mid = CompositeSystem(tuple(dims_a))
    m = Channel(mid, system(d), np.hstack(ms))
    e = Channel(system(d), mid, np.vstack(es))
    q = QUANT.compose(m, e)
    return BlockDecomposition(d, blocks, basis, splitters, m, e, q, int(transient.shape[1]))


# ---------------------------------------------------------------------------
# verification


def verify_decomposition(p: Channel, dec: BlockDecomposition, tol: float = DEFAULT_TOL,
                         ) -> DecompositionReport:
    """Check every splitting identity; failures are reported, not raised."""
    tol = check_tol(tol)
    t = QUANT
    lines = []

    def add(name, res):
        lines.append(ReportLine(name, bool(res <= tol), float(res)))

    if dec.q.dom != p.dom:
        raise ShapeMismatch("decomposition lives on a different system")
    em = max((t.distance(t.compose(s.e, s.m), t.identity(s.m.dom)) for s in dec.splitters), default=0.0)
    add("e_k o m_k = id", em)
    disc = max((t.distance(t.compose(t.discard(s.m.cod), s.m), t.discard(s.m.dom))
                for s in dec.splitters), default=0.0)
    add("m_k causal", disc)
    projs = [t.compose(s.m, s.e) for s in dec.splitters]
    orth = 0.0
    for j, pj in enumerate(projs):
        for k, pk in enumerate(projs):
            if j != k:
                orth = max(orth, max_abs(t.compose(pj, pk).superop))
    add("p_j o p_k = 0", orth)
    q = t.sum(projs)
    add("q = sum m_k o e_k", t.distance(q, dec.q))
    add("q idempotent", t.distance(t.compose(q, q), q))
    add("q causal", t.distance(t.compose(t.discard(q.cod), q), t.discard(q.dom)))
    add("p o q = q", t.distance(t.compose(p, q), q))
    add("q o p = p", t.distance(t.compose(q, p), p))
    e2 = t.compose(dec.e, p)
    split_res = max(t.distance(t.compose(e2, dec.m), t.identity(dec.m.dom)),
                    t.distance(t.compose(dec.m, e2), p))
    add("transferred splitting of p", split_res)
    return DecompositionReport(lines)


# ---------------------------------------------------------------------------
# the engine


def _block_frames(p: Channel, d: int, tol: float, rng: np.random.Generator):
    fix = fixed_point_space(p, tol)
    omega = p(np.eye(d) / d)
    omega = (omega + omega.conj().T) / 2
    w, vecs = np.linalg.eigh(omega)
    keep = w > tol * max(w.max(), 1e-300)
    rec = vecs[:, keep]
    transient = vecs[:, ~keep]
    r = rec.shape[1]
    om_r = rec.conj().T @ omega @ rec
    s = _psd_sqrt_inv(om_r)
    alg = [s @ rec.conj().T @ f @ rec @ s for f in fix]
    alg = _hermitian_basis(alg, len(alg), r)

    # centre: real combinations commuting with the whole algebra
    n = len(alg)
    rows = []
    for x in alg:
        rows.append(np.array([_herm_to_real(1j * (y @ x - x @ y)) for y in alg]).T)
    comm = np.vstack(rows)
    cen = _null_space(comm, max(tol, 1e-10))
    k = cen.shape[1]
    if k == 0:
        raise NumericalFailure("algebra has trivial centre")
    centre = [sum(c * y for c, y in zip(cen[:, i], alg)) for i in range(k)]
    z = sum(g * c for g, c in zip(rng.normal(size=k), centre))
    zw, zv = np.linalg.eigh(z)
    groups = _split_clusters(zw, k)
    if groups is None:
        return None

    frames, dims_a = [], []
    for g in groups:
        qk = zv[:, g]
        rk = qk.shape[1]
        sub = [qk.conj().T @ y @ qk for y in alg]
        sub_basis = _hermitian_basis(sub, min(len(sub), rk * rk), rk)
        # dimension of the compressed algebra
        mat = np.array([_herm_to_real(y) for y in sub]).T
        sv = np.linalg.svd(mat, compute_uv=False)
        dim = int(np.sum(sv > max(tol, 1e-10) * max(sv[0], 1.0)))
        a = int(round(np.sqrt(dim)))
        if a * a != dim or rk % a:
            return None
        b = rk // a
        sub_basis = sub_basis[:dim]
        h = sum(c * y for c, y in zip(rng.normal(size=dim), sub_basis))
        hw, hv = np.linalg.eigh(h)
        eig = [hv[:, i * b:(i + 1) * b] for i in range(a)]
        scale = max(1.0, np.abs(hw).max())
        for i in range(a):
            chunk = hw[i * b:(i + 1) * b]
            if chunk[-1] - chunk[0] > 1e-7 * scale:
                return None
            if i and chunk[0] - hw[i * b - 1] < 1e-5 * scale:
                return None
        gen = sum(c * y for c, y in zip(rng.normal(size=dim) + 1j * rng.normal(size=dim), sub_basis))
        cols = []
        for i in range(a):
            ti = eig[i].conj().T @ gen @ eig[0]
            u, sv_t, vh = np.linalg.svd(ti)
            if sv_t.min() < 1e-6 * max(1.0, sv_t.max()):
                return None
            cols.append(eig[i] @ (u @ vh))
        frame = np.hstack(cols)
        frames.append(rec @ qk @ frame)
        dims_a.append(a)
    return frames, dims_a, omega, transient


def _tau_of(v: np.ndarray, a: int, omega: np.ndarray) -> np.ndarray:
    b = v.shape[1] // a
    x = (v.conj().T @ omega @ v).reshape(a, b, a, b)
    tau = np.einsum("ibic->bc", x)
    tau = (tau + tau.conj().T) / 2
    return tau / np.trace(tau).real


def _sort_key(block_info):
    a, tau = block_info[1], block_info[2]
    spec = tuple(-x for x in np.round(np.linalg.eigvalsh(tau)[::-1], 9))
    return (-a, -tau.shape[0], spec)


def decompose_cptp_idempotent(p: Channel, tol: float = DEFAULT_TOL, seed: int = 0,
                              ) -> BlockDecomposition:
    """Split a CPTP idempotent on ``[d]`` into its blocks ``M_a (x) tau``."""
    tol = check_tol(tol)
    QUANT.check_morphism(p)
    d = _require_simple_endo(p)
    val = validate_channel(p, max(tol, 1e-12))
    if not (val.cp and val.tp):
        raise NotCPTP(f"channel is not CPTP (cp={val.cp}, tp={val.tp})")
    if QUANT.distance(QUANT.compose(p, p), p) > max(tol, 1e-12):
        raise NotIdempotent("p o p != p")

    seeds = np.random.SeedSequence(seed).spawn(MAX_ATTEMPTS)
    best = None
    for ss in seeds:
        rng = np.random.default_rng(ss)
        got = _block_frames(p, d, tol, rng)
        if got is None:
            continue
        frames, dims_a, omega, transient = got
        info = sorted(((v, a, _tau_of(v, a, omega)) for v, a in zip(frames, dims_a)), key=_sort_key)
        dec = assemble_decomposition(d, [x[0] for x in info], [x[1] for x in info],
                                     [x[2] for x in info], transient)
        rep = verify_decomposition(p, dec, max(tol, 1e-12))
        dec.residuals = rep.residuals()
        if rep.ok:
            return dec
        if best is None or rep.max_residual < best[1]:
            best = (dec, rep.max_residual)
    if best is not None and best[1] <= 10 * tol:
        return best[0]
    raise NumericalFailure("block decomposition failed verification after "
                           f"{MAX_ATTEMPTS} attempts")


# ---------------------------------------------------------------------------
# planted instances


def random_idempotent_instance(spec: Sequence[tuple[int, int]], seed: int = 0, rotate: bool = True,
                               ) -> tuple[Channel, BlockDecomposition]:
    """A CPTP idempotent with a known decomposition.

    ``p(X) = U [sum_k V_k (Tr_B(V_k^dagger U^dagger X U V_k) (x) tau_k) V_k^dagger] U^dagger``
    where the ``V_k`` embed ``C^a (x) C^b`` consecutively. ``tau_k`` are
    random full-rank states kept away from singular; pass ``rotate=False``
    for ``U = 1``.
    """
    spec = [(int(a), int(b)) for a, b in spec]
    if not spec:
        raise EmptySpec("spec must list at least one block")
    if any(a < 1 or b < 1 for a, b in spec):
        raise ValueError("block dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    d = sum(a * b for a, b in spec)
    u = random_unitary(d, rng) if rotate else np.eye(d, dtype=complex)
    frames, taus = [], []
    off = 0
    for a, b in spec:
        v = np.zeros((d, a * b), dtype=complex)
        v[off:off + a * b, :] = np.eye(a * b)
        off += a * b
        frames.append(u @ v)
        tau = 0.5 * random_density(b, rng) + 0.5 * np.eye(b) / b if b > 1 else np.ones((1, 1))
        taus.append(tau.astype(complex))
    info = sorted(zip(frames, [a for a, _ in spec], taus), key=_sort_key)
    dec = assemble_decomposition(d, [x[0] for x in info], [x[1] for x in info], [x[2] for x in info],
                                 np.zeros((d, 0), dtype=complex))
    return dec.q, dec
