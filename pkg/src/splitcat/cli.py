"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails or an operation
is refused, 2 for usage and parse errors, 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import serialize
from .constructions import (BiprodObject, ComparisonFunctor, KaroubiTheory, biproduct_residuals,
                            causalize_subcausal, functor_residuals, karoubi_biproduct)
from .decompose import (decompose_cptp_idempotent, flor_decompose, random_idempotent_instance,
                        search_splitting_bool, verify_decomposition)
from .errors import NumericalFailure, ParseError, ShapeMismatch, SplitcatError
from .leaks import (broadcasting_map, copy_structure, decoherence_idempotent,
                    has_left_counit, idempotent_from_leakage, is_leak, leak_from_idempotent_trivial,
                    leak_residuals, pair_of_pants, stinespring_leak, theory_of, verify_frobenius)
from .matcat import BOOLEAN, CLASS, FREL, MatMorphism, MatTheory
from .quant import QUANT, Channel, system, validate_channel
from .theory import DEFAULT_TOL, check_theory_laws, is_causal, is_idempotent

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(SplitcatError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Report:
    """Collects named pass/fail lines plus free-form data for one command."""

    def __init__(self, command: str):
        self.command = command
        self.lines: list[tuple[str, bool, float | None]] = []
        self.notes: list[str] = []
        self.data: dict = {}

    def check(self, name: str, passed: bool, residual: float | None = None) -> bool:
        self.lines.append((name, bool(passed), None if residual is None else float(residual)))
        return bool(passed)

    def note(self, text: str) -> None:
        self.notes.append(text)

    @property
    def ok(self) -> bool:
        return all(p for _, p, _ in self.lines)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "ok": self.ok,
            "checks": [{"name": n, "passed": p, "residual": r} for n, p, r in self.lines],
            "notes": self.notes,
            **self.data,
        }

    def render(self) -> str:
        out = list(self.notes)
        for n, p, r in self.lines:
            res = "" if r is None else f"  residual={r:.3e}"
            out.append(f"{'PASS' if p else 'FAIL'} {n}{res}")
        return "\n".join(out)


# ---------------------------------------------------------------------------
# input helpers


def _load_morphism(args) -> Channel | MatMorphism:
    if not getattr(args, "inp", None):
        raise UsageError("an input file (--in) is required")
    return serialize.parse_channel_file(Path(args.inp))


def _matrix_arg(text: str, kind: str) -> MatMorphism:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"cannot parse matrix {text!r}: {exc}") from None
    return serialize.parse_channel_file({"semiring": kind, "matrix": rows})


def _spawn(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args, rep: Report) -> None:
    f = _load_morphism(args)
    t = theory_of(f)
    tol = args.tol
    if isinstance(f, Channel):
        val = validate_channel(f, tol)
        rep.check("completely positive", val.cp)
        rep.check("trace preserving (causal)", val.tp)
        rep.check("sub-causal", val.subcausal)
    else:
        rep.check("causal", is_causal(t, f, tol))
        rep.check("sub-causal", t.is_subcausal(f, tol))
    endo = f.dom == f.cod
    rep.check("endomorphism", endo)
    if endo:
        rep.check("idempotent", is_idempotent(t, f, tol), t.distance(t.compose(f, f), f))
    if args.verify_decomposition:
        if not isinstance(f, Channel):
            raise UsageError("--verify-decomposition needs a channel")
        dec = serialize.parse_decomposition(Path(args.verify_decomposition))
        for line in verify_decomposition(f, dec, tol).lines:
            rep.check(line.name, line.passed, line.residual)


def _split_report(p: Channel, rep: Report, tol: float, seed: int):
    dec = decompose_cptp_idempotent(p, tol, seed=seed)
    rep.note(dec.summary())
    for line in verify_decomposition(p, dec, tol).lines:
        rep.check(line.name, line.passed, line.residual)
    rep.data["decomposition"] = serialize.decomposition_to_dict(dec)
    return dec


def cmd_split(args, rep: Report) -> None:
    p = _load_morphism(args)
    if not isinstance(p, Channel):
        raise UsageError("split needs a channel file")
    dec = _split_report(p, rep, args.tol, args.seed)
    if args.out:
        Path(args.out).write_text(serialize.dumps(serialize.decomposition_to_dict(dec)) + "\n")
    if args.q_out:
        Path(args.q_out).write_text(serialize.dumps(serialize.channel_to_dict(dec.q)) + "\n")


def cmd_flor(args, rep: Report) -> None:
    if args.p:
        m = _matrix_arg(args.p, CLASS.kind)
    else:
        m = _load_morphism(args)
    if not isinstance(m, MatMorphism):
        raise UsageError("flor needs a nonnegative matrix")
    dec = flor_decompose(m.entries.astype(float), args.tol)
    rep.note(f"{len(dec)} rank-one idempotent{'s' if len(dec) != 1 else ''}")
    for i, (u, v) in enumerate(dec.pairs):
        rep.note(f"u{i} = {np.round(u, 12).tolist()}  v{i} = {np.round(v, 12).tolist()}")
    a = m.entries.astype(float)
    rec = dec.reconstruct() if len(dec) else np.zeros_like(a)
    rep.check("v_i u_j = delta_ij", dec.biorthogonality_residual() <= args.tol, dec.biorthogonality_residual())
    res = float(np.max(np.abs(rec - a))) if a.size else 0.0
    rep.check("sum u_i v_i = P", res <= args.tol, res)
    rep.data["pairs"] = [{"u": u.tolist(), "v": v.tolist()} for u, v in dec.pairs]


def cmd_relsearch(args, rep: Report) -> None:
    p = _matrix_arg(args.p, BOOLEAN) if args.p else _load_morphism(args)
    if not isinstance(p, MatMorphism) or p.semiring.kind != BOOLEAN:
        raise UsageError("relsearch needs a boolean matrix")
    t = MatTheory(FREL)
    rep.check("idempotent", is_idempotent(t, p))
    rep.data["causal"] = is_causal(t, p)
    hit = search_splitting_bool(p, args.max)
    if hit is None:
        rep.note(f"no splitting up to dim {args.max}")
        rep.data["splitting"] = None
    else:
        b = hit.m.dom
        rep.note(f"splitting found at dim {b}")
        rep.note("m =\n" + hit.m.grid() if b else "m = (empty)")
        rep.note("e =\n" + hit.e.grid() if b else "e = (empty)")
        rep.check("e o m = id", t.approx_eq(t.compose(hit.e, hit.m), t.identity(b)))
        rep.check("m o e = p", t.approx_eq(t.compose(hit.m, hit.e), p))
        rep.data["splitting"] = {"dim": b, "m": serialize.matrix_to_dict(hit.m)["matrix"],
                                 "e": serialize.matrix_to_dict(hit.e)["matrix"]}


def _default_state(t, p):
    """A state ``a`` with ``discard o p o a = 1``, built from the uniform input."""
    n = p.dom
    if isinstance(p, Channel):
        d = n.dims[0]
        cands = [np.eye(d) / d] + [np.diag(np.eye(d)[i]) for i in range(d)]
        for rho in cands:
            w = np.trace(p(rho)).real
            if w > 1e-12:
                return QUANT.state(rho / w, n)
    else:
        cands = [np.full((n, 1), 1.0 / n)] + [np.eye(n)[:, [i]] for i in range(n)]
        for v in cands:
            w = float((p.entries @ v).sum())
            if w > 1e-12:
                return t.mat(v / w)
    raise UsageError("p annihilates every candidate state")


def cmd_causalize(args, rep: Report) -> None:
    p = _load_morphism(args)
    t = theory_of(p)
    if args.state:
        a = serialize.parse_channel_file(Path(args.state))
    else:
        a = _default_state(t, p)
    q = causalize_subcausal(t, p, a, args.tol)
    rep.check("q causal", is_causal(t, q, args.tol))
    rep.check("q idempotent", is_idempotent(t, q, args.tol))
    rep.check("p o q = q", t.approx_eq(t.compose(p, q), q, args.tol), t.distance(t.compose(p, q), q))
    rep.check("q o p = p", t.approx_eq(t.compose(q, p), p, args.tol), t.distance(t.compose(q, p), p))
    if isinstance(q, Channel):
        _split_report(q, rep, args.tol, args.seed)
    else:
        dec = flor_decompose(q.entries, args.tol)
        rep.note(f"{len(dec)} rank-one idempotents")


def cmd_leak(args, rep: Report) -> None:
    tol = args.tol
    if args.kind == "broadcast":
        th = {"frel": MatTheory(FREL), "class": MatTheory(CLASS), "quant": QUANT}[args.theory]
        lc = broadcasting_map(th, args.n)
        rep.check("right counit", is_leak(lc, tol))
        rep.check("left counit", has_left_counit(lc, tol))
        return
    p = _load_morphism(args)
    t = theory_of(p)
    if args.kind == "trivial":
        lc = leak_from_idempotent_trivial(p, tol)
        iota = idempotent_from_leakage(lc, tol)
        rep.check("round trip", t.approx_eq(iota, p, tol), t.distance(iota, p))
        return
    lc = stinespring_leak(p, tol)
    rep.note(f"environment dimension {lc.env.dims[0]}")
    rep.data["env_dim"] = lc.env.dims[0]
    for name, res in leak_residuals(p, lc).items():
        rep.check(name, res <= tol, res)


def cmd_frobenius(args, rep: Report) -> None:
    tol = args.tol
    if args.inp:
        fs = serialize.parse_frobenius(Path(args.inp))
    elif args.kind == "copy":
        fs = copy_structure(args.n)
    else:
        fs = pair_of_pants(args.n, normalized=not args.unnormalized)
    fr = verify_frobenius(fs, tol)
    rep.check("coassociative", fr.coassoc_ok, fr.coassoc)
    rep.check("Frobenius law", fr.frobenius_ok, fr.frobenius_law)
    rep.check("special", fr.special_ok, fr.special)
    if not fr.special_ok:
        return
    c = decoherence_idempotent(fs, tol)
    rep.check("decoherence causal", is_causal(QUANT, c, tol))
    rep.check("decoherence idempotent", is_idempotent(QUANT, c, tol))
    rep.check("decoherence self-adjoint", QUANT.approx_eq(QUANT.adjoint(c), c, tol))
    _split_report(c, rep, tol, args.seed)


def _random_spec(d: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    spec, left = [], d
    while left:
        a = int(rng.integers(1, left + 1))
        b = int(rng.integers(1, left // a + 1))
        spec.append((a, b))
        left -= a * b
    return spec


def cmd_demo_equiv(args, rep: Report) -> None:
    tol = args.tol
    try:
        dims = [int(x) for x in args.dims.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --dims {args.dims!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise UsageError("--dims needs positive integers")
    rngs = _spawn(args.seed, 4)

    # causal idempotents and their splittings
    ks = KaroubiTheory(QUANT, causal_only=True, tol=tol)
    objs = []
    for i, d in enumerate(dims):
        spec = _random_spec(d, rngs[0])
        p, _ = random_idempotent_instance(spec, seed=int(rngs[0].integers(2 ** 31)))
        objs.append(ks.object(system(d), p))
        dec = decompose_cptp_idempotent(p, tol, seed=args.seed)
        worst = verify_decomposition(p, dec, tol)
        rep.check(f"split idempotent {i} ({dec.summary()})", worst.ok, worst.max_residual)

    # biproduct of the idempotents inside Split(Quant)
    bp = karoubi_biproduct(QUANT, objs, tol=tol)
    res = biproduct_residuals(QUANT, bp)
    worst = max(res.values())
    rep.check("biproduct identities in Split", worst <= tol, worst)
    rep.check("biproduct idempotent causal", bp.obj.causal)

    # comparison functor on random matrices of channels
    F = ComparisonFunctor(QUANT, tol)
    src = F.source
    A = BiprodObject(tuple(system(d) for d in dims))
    acc: dict[str, float] = {}
    for _ in range(5):
        f = src.random_morphism(rngs[1], A, A)
        g = src.random_morphism(rngs[1], A, A)
        h = src.random_morphism(rngs[1], A, A)
        for k, v in functor_residuals(F, f, g, h).items():
            acc[k] = max(acc.get(k, 0.0), v)
    for k, v in acc.items():
        rep.check(f"F preserves {k}" if k != "fullness round trip" else "F fullness round trip", v <= tol, v)

    # law suite
    law = check_theory_laws(QUANT, seed=args.seed, samples=10, tol=tol)
    worst = max(r.max_residual for r in law.results)
    rep.check("Quant law suite", law.ok, worst)


def cmd_laws(args, rep: Report) -> None:
    theories = {"frel": MatTheory(FREL), "class": MatTheory(CLASS), "quant": QUANT}
    names = list(theories) if args.theory == "all" else [args.theory]
    rep.data["laws"] = {}
    for name in names:
        law = check_theory_laws(theories[name], seed=args.seed, samples=args.samples, tol=args.tol)
        for r in law.results:
            rep.check(f"{law.theory}: {r.name}", r.passed, r.max_residual)
        rep.data["laws"][name] = law.to_dict()


COMMANDS: dict[str, Callable] = {
    "check": cmd_check,
    "split": cmd_split,
    "flor": cmd_flor,
    "relsearch": cmd_relsearch,
    "causalize": cmd_causalize,
    "leak": cmd_leak,
    "frobenius": cmd_frobenius,
    "demo-equiv": cmd_demo_equiv,
    "laws": cmd_laws,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="comparison tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--max", type=int, default=4, help="search bound")

    parser = _Parser(prog="splitcat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("check", parents=[common], help="validate a channel or matrix")
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--verify-decomposition", dest="verify_decomposition")

    sp = sub.add_parser("split", parents=[common], help="decompose a CPTP idempotent")
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--out")
    sp.add_argument("--q-out", dest="q_out")

    sp = sub.add_parser("flor", parents=[common], help="rank-one decomposition of a nonnegative idempotent")
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--p")

    sp = sub.add_parser("relsearch", parents=[common], help="exhaustive boolean splitting search")
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--p")

    sp = sub.add_parser("causalize", parents=[common], help="repair a sub-causal idempotent, then split")
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--state")

    sp = sub.add_parser("leak", parents=[common], help="build and check leaks")
    sp.add_argument("--kind", choices=["stinespring", "trivial", "broadcast"], default="stinespring")
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--theory", choices=["frel", "class", "quant"], default="frel")
    sp.add_argument("--n", type=int, default=2)

    sp = sub.add_parser("frobenius", parents=[common], help="Frobenius checks and decoherence")
    sp.add_argument("--kind", choices=["copy", "pants"], default="copy")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--unnormalized", action="store_true")
    sp.add_argument("--in", dest="inp")

    sp = sub.add_parser("demo-equiv", parents=[common], help="seeded end-to-end equivalence demo")
    sp.add_argument("--dims", default="2,2")

    sp = sub.add_parser("laws", parents=[common], help="run the law suite")
    sp.add_argument("--theory", choices=["frel", "class", "quant", "all"], default="all")
    sp.add_argument("--samples", type=int, default=100)
    return parser


def run(argv: list[str], stdout=None) -> int:
    """Execute one command; the report goes to ``stdout`` and the exit code is returned."""
    out = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=out)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if not args.command:
        print(parser.format_usage().rstrip(), file=out)
        return EXIT_USAGE
    if args.tol < 0:
        print("usage error: --tol must be nonnegative", file=out)
        return EXIT_USAGE
    rep = Report(args.command)
    try:
        COMMANDS[args.command](args, rep)
        code = EXIT_OK if rep.ok else EXIT_FAIL
    except (UsageError, ParseError, ShapeMismatch, OSError) as exc:
        rep.note(f"error: {exc}")
        rep.data["error"] = type(exc).__name__
        code = EXIT_USAGE
    except NumericalFailure as exc:
        rep.note(f"numerical failure: {exc}")
        rep.data["error"] = type(exc).__name__
        code = EXIT_NUMERIC
    except SplitcatError as exc:
        rep.note(f"error: {exc}")
        rep.data["error"] = type(exc).__name__
        code = EXIT_FAIL
    rep.data["exit_code"] = code
    print(serialize.dumps(rep.to_dict()) if args.json else rep.render(), file=out)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))
