"""JSON formats for channels, matrices, Frobenius structures and decompositions.

Complex matrices are nested row-major lists of ``[re, im]`` pairs; plain
numbers are accepted as real entries on input. Systems are written as
``{"dims": [...]}``; a bare list or integer is accepted on input. A channel file names its
primary representation in ``"repr"`` (``choi``, ``kraus`` or ``superop``)
and may carry further representations, which are then cross-checked.
Output is written with sorted keys so equal inputs give identical bytes.
"""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

import numpy as np

from .decompose.cptp import BlockDecomposition, assemble_decomposition
from .errors import ConventionError, ParseError, ShapeMismatch
from .leaks import FrobeniusStructure
from .matcat import BOOLEAN, NONNEG_REAL, MatMorphism, SemiringSpec
from .quant import Channel, channel_from_kraus, superop_from_choi, system
from .theory import max_abs

REPRS = ("choi", "kraus", "superop")
CROSS_TOL = 1e-9


# ---------------------------------------------------------------------------
# matrices


def encode_matrix(a: np.ndarray) -> list:
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return [[[float(x.real), float(x.imag)] for x in row] for row in a]
    return [[[float(x), 0.0] for x in row] for row in a]


def decode_matrix(obj: Any, what: str = "matrix") -> np.ndarray:
    """Nested rows of numbers or ``[re, im]`` pairs -> complex array."""
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise ParseError(f"{what} must be a list of rows")
    rows = []
    for r in obj:
        row = []
        for x in r:
            if isinstance(x, bool):
                row.append(complex(int(x)))
            elif isinstance(x, (int, float)):
                row.append(complex(x))
            elif isinstance(x, list) and len(x) == 2 and all(isinstance(y, (int, float)) for y in x):
                row.append(complex(x[0], x[1]))
            else:
                raise ParseError(f"bad entry {x!r} in {what}")
        rows.append(row)
    if rows and len({len(r) for r in rows}) != 1:
        raise ShapeMismatch(f"{what} has ragged rows")
    return np.array(rows, dtype=complex).reshape(len(rows), len(rows[0]) if rows else 0)


def _load_json(src) -> dict:
    if isinstance(src, dict):
        return src
    text = src
    if isinstance(src, Path) or (isinstance(src, str) and not src.lstrip().startswith(("{", "["))
                                 and os.path.exists(src)):
        text = Path(src).read_text()
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("top-level JSON value must be an object")
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# channels and matrices


def channel_to_dict(c: Channel, repr: str = "superop") -> dict:
    if repr not in ("choi", "superop"):
        raise ValueError("channels are written as choi or superop")
    payload = c.choi if repr == "choi" else c.superop
    return {"dom": {"dims": list(c.dom.dims)}, "cod": {"dims": list(c.cod.dims)}, "repr": repr,
            repr: encode_matrix(payload)}


def matrix_to_dict(m: MatMorphism) -> dict:
    if m.semiring.kind == BOOLEAN:
        rows = [[int(x) for x in row] for row in m.entries]
    else:
        rows = [[float(x) for x in row] for row in m.entries]
    return {"semiring": m.semiring.kind, "matrix": rows}


def _dims(obj: dict, key: str):
    if key not in obj:
        raise ParseError(f"missing {key!r}")
    v = obj[key]
    if isinstance(v, dict):
        v = v.get("dims")
    if isinstance(v, int):
        v = [v]
    if not isinstance(v, list) or not v or not all(isinstance(x, int) and x >= 1 for x in v):
        raise ParseError(f"{key!r} must be a nonempty list of positive integers")
    return system(v)


def _parse_matcat(obj: dict) -> MatMorphism:
    kind = obj["semiring"]
    if kind not in (BOOLEAN, NONNEG_REAL):
        raise ParseError(f"unknown semiring {kind!r}")
    rows = obj.get("matrix")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("'matrix' must be a list of rows")
    if rows and len({len(r) for r in rows}) != 1:
        raise ShapeMismatch("matrix has ragged rows")
    try:
        a = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise ParseError("matrix entries must be numbers") from None
    if kind == BOOLEAN:
        if not np.all((a == 0) | (a == 1)):
            raise ParseError("boolean entries must be 0 or 1")
        a = a.astype(bool)
    elif np.any(a < 0):
        raise ParseError("nonnegative-real entries must be >= 0")
    return MatMorphism(a.reshape(len(rows), -1) if rows else a.reshape(0, 0), SemiringSpec(kind))


def parse_channel_file(src) -> Channel | MatMorphism:
    """Load a channel or a semiring matrix from a path, JSON text or dict."""
    obj = _load_json(src)
    if "semiring" in obj:
        return _parse_matcat(obj)
    if "repr" not in obj:
        raise ConventionError("channel file must state its representation in 'repr'")
    rep = obj["repr"]
    if rep not in REPRS:
        raise ConventionError(f"unknown representation {rep!r}; expected one of {REPRS}")
    dom, cod = _dims(obj, "dom"), _dims(obj, "cod")
    present = [r for r in REPRS if r in obj]
    if rep not in present:
        raise ParseError(f"representation {rep!r} declared but no payload given")

    supers = {}
    for r in present:
        if r == "superop":
            s = decode_matrix(obj[r], "superop")
            if s.shape != (cod.n, dom.n):
                raise ShapeMismatch(f"superop shape {s.shape}, expected {(cod.n, dom.n)}")
            supers[r] = s
        elif r == "choi":
            j = decode_matrix(obj[r], "choi")
            n = dom.hilbert_dim * cod.hilbert_dim
            if j.shape != (n, n):
                raise ShapeMismatch(f"choi shape {j.shape}, expected {(n, n)}")
            supers[r] = superop_from_choi(dom, cod, j)
        else:
            ks = obj[r]
            if not isinstance(ks, list):
                raise ParseError("'kraus' must be a list of matrices")
            if not (dom.is_simple and cod.is_simple):
                raise ShapeMismatch("Kraus payloads describe single-block systems only")
            mats = [decode_matrix(k, "kraus operator") for k in ks]
            for k in mats:
                if k.shape != (cod.dims[0], dom.dims[0]):
                    raise ShapeMismatch(f"Kraus operator shape {k.shape}, expected {(cod.dims[0], dom.dims[0])}")
            supers[r] = channel_from_kraus(mats, dom, cod).superop
    base = supers[rep]
    for r, s in supers.items():
        if max_abs(s - base) > CROSS_TOL:
            raise ShapeMismatch(f"{r!r} and {rep!r} payloads describe different maps")
    return Channel(dom, cod, base)


# ---------------------------------------------------------------------------
# Frobenius structures


def frobenius_to_dict(fs: FrobeniusStructure) -> dict:
    return {"dim": fs.dim, "delta": encode_matrix(fs.delta)}


def parse_frobenius(src) -> FrobeniusStructure:
    obj = _load_json(src)
    if "dim" not in obj or "delta" not in obj:
        raise ParseError("Frobenius file needs 'dim' and 'delta'")
    return FrobeniusStructure(decode_matrix(obj["delta"], "delta"), int(obj["dim"]))


# ---------------------------------------------------------------------------
# block decompositions


def decomposition_to_dict(dec: BlockDecomposition) -> dict:
    return {
        "d": dec.d,
        "blocks": [{"dimA": b.dimA, "dimB": b.dimB, "rank_tau": b.rank_tau, "tau": encode_matrix(b.tau)}
                   for b in dec.blocks],
        "transient_dim": dec.transient_dim,
        "basis": encode_matrix(dec.basis),
        "residuals": {k: float(v) for k, v in sorted(dec.residuals.items())},
    }


def parse_decomposition(src) -> BlockDecomposition:
    """Rebuild splitters and ``q`` from the basis, block sizes and states."""
    obj = _load_json(src)
    try:
        d = int(obj["d"])
        blocks = obj["blocks"]
        basis = decode_matrix(obj["basis"], "basis")
        tdim = int(obj.get("transient_dim", 0))
    except KeyError as exc:
        raise ParseError(f"decomposition missing {exc}") from None
    if basis.shape != (d, d):
        raise ShapeMismatch(f"basis shape {basis.shape}, expected {(d, d)}")
    frames, dims_a, taus = [], [], []
    off = 0
    for b in blocks:
        a, nb = int(b["dimA"]), int(b["dimB"])
        tau = decode_matrix(b["tau"], "tau")
        if tau.shape != (nb, nb):
            raise ShapeMismatch("tau does not match dimB")
        frames.append(basis[:, off:off + a * nb])
        off += a * nb
        dims_a.append(a)
        taus.append(tau)
    if off + tdim != d:
        raise ShapeMismatch("block sizes and transient dimension do not add up to d")
    dec = assemble_decomposition(d, frames, dims_a, taus, basis[:, off:])
    dec.residuals = {k: float(v) for k, v in obj.get("residuals", {}).items()}
    return dec


__all__ = [
    "channel_to_dict",
    "decode_matrix",
    "decomposition_to_dict",
    "dumps",
    "encode_matrix",
    "frobenius_to_dict",
    "matrix_to_dict",
    "parse_channel_file",
    "parse_decomposition",
    "parse_frobenius",
]
