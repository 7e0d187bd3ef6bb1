"""Acceptance criteria, one test per criterion, each recorded as a PASS/FAIL summary line."""
import time

import numpy as np

from splitcat.constructions import (BiprodObject, ComparisonFunctor, KaroubiTheory, biproduct_residuals,
                                    causalize_subcausal, functor_residuals, karoubi_biproduct)
from splitcat.decompose import (decompose_cptp_idempotent, flor_decompose, random_flor_instance,
                                random_idempotent_instance, search_splitting_bool, verify_decomposition)
from splitcat.leaks import (copy_structure, decoherence_idempotent, idempotent_from_leakage,
                            leak_from_idempotent_trivial, leak_residuals, pair_of_pants, stinespring_leak,
                            verify_frobenius)
from splitcat.matcat import class_theory, frel
from splitcat.quant import (QUANT, channel_from_kraus, dephasing, environment_axiom_check, random_unitary,
                            system, validate_channel)
from splitcat.theory import check_theory_laws, is_causal, is_idempotent


def _random_spec(total, rng):
    """Blocks (dimA, dimB) with sum dimA * dimB <= total."""
    spec = []
    room = total
    while room >= 1 and (not spec or rng.random() < 0.6):
        a = int(rng.integers(1, min(3, room) + 1))
        b = int(rng.integers(1, room // a + 1))
        b = min(b, 3)
        spec.append((a, b))
        room -= a * b
    return spec


def test_1_dephasing_split(criterion):
    t0 = time.perf_counter()
    p = dephasing(2)
    dec = decompose_cptp_idempotent(p, 1e-9)
    rep = verify_decomposition(p, dec, 1e-9)
    dt = time.perf_counter() - t0
    ok = dec.dims_a() == [1, 1] and rep.ok and rep.max_residual <= 1e-9 and dt < 1.0
    criterion(1, "dephasing split", ok, f"blocks={dec.dims_a()} max_res={rep.max_residual:.1e} t={dt:.3f}s")
    assert ok


def test_2_planted_instances(criterion):
    rng = np.random.default_rng(2024)
    hits, worst, slowest = 0, 0.0, 0.0
    for i in range(50):
        spec = _random_spec(int(rng.integers(2, 13)), rng)
        p, _ = random_idempotent_instance(spec, seed=i)
        assert p.dom.hilbert_dim <= 12
        t0 = time.perf_counter()
        dec = decompose_cptp_idempotent(p, 1e-9, seed=i)
        slowest = max(slowest, time.perf_counter() - t0)
        rep = verify_decomposition(p, dec, 1e-8)
        worst = max(worst, rep["p o q = q"].residual, rep["q o p = p"].residual)
        hits += sorted(dec.dims_a()) == sorted(a for a, _ in spec)
    ok = hits == 50 and worst <= 1e-8 and slowest < 10.0
    criterion(2, "planted-instance oracle", ok, f"{hits}/50 worst={worst:.1e} slowest={slowest:.2f}s")
    assert ok


def test_3_qutrit_from_qubits(criterion):
    u = random_unitary(4, np.random.default_rng(3))
    pi = u @ np.diag([1.0, 1.0, 1.0, 0.0]) @ u.conj().T
    p = channel_from_kraus([pi])
    assert QUANT.is_subcausal(p) and not is_causal(QUANT, p)
    a = pi @ np.diag([1.0, 0, 0, 0]) @ pi
    q = causalize_subcausal(QUANT, p, QUANT.state(a / np.trace(a)))
    dec = decompose_cptp_idempotent(q, 1e-9)
    rep = verify_decomposition(q, dec, 1e-8)
    ok = dec.dims_a() == [3] and rep.ok
    criterion(3, "qutrit from qubits", ok, f"blocks={dec.summary()} max_res={rep.max_residual:.1e}")
    assert ok


def test_4_rel_counterexample(criterion):
    t = frel()
    p = t.mat([[1, 1], [0, 1]])
    t0 = time.perf_counter()
    found = search_splitting_bool(p, 4)
    dt = time.perf_counter() - t0
    ok = found is None and is_idempotent(t, p) and is_causal(t, p) and dt < 1.0
    criterion(4, "Rel counterexample", ok, f"t={dt:.4f}s")
    assert ok


def test_5_flor(criterion):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 11))
        p, _ = random_flor_instance(n, int(rng.integers(0, n + 1)), rng)
        fd = flor_decompose(p, 1e-9)
        recon = fd.reconstruct() if len(fd) else np.zeros_like(p)
        worst = max(worst, fd.biorthogonality_residual(), float(np.max(np.abs(recon - p))))
    small = flor_decompose(np.array([[1.0, 1.0], [0.0, 0.0]]))
    ok = worst <= 1e-9 and len(small) == 1
    criterion(5, "Flor decomposition", ok, f"worst={worst:.1e} pairs(2x2)={len(small)}")
    assert ok


def test_6_split_biproducts(criterion):
    kt = KaroubiTheory(QUANT)
    worst, causal = 0.0, True
    for i in range(20):
        rng = np.random.default_rng(600 + i)
        objs = []
        for j in range(2):
            spec = _random_spec(int(rng.integers(1, 4)), rng)
            p, _ = random_idempotent_instance(spec, seed=1000 * i + j)
            objs.append(kt.object(p.dom, p))
        bp = karoubi_biproduct(QUANT, objs)
        worst = max(worst, max(biproduct_residuals(QUANT, bp).values()))
        causal = causal and bp.obj.causal and is_causal(QUANT, bp.obj.idem, 1e-9)
    ok = worst <= 1e-9 and causal
    criterion(6, "biproducts in Split", ok, f"worst={worst:.1e} q causal={causal}")
    assert ok


def test_7_functor_F(criterion):
    F = ComparisonFunctor(QUANT)
    src = F.source
    worst = {}
    for i in range(20):
        rng = np.random.default_rng(700 + i)
        a = BiprodObject(tuple(system(int(rng.integers(1, 3))) for _ in range(2)))
        b = BiprodObject(tuple(system(int(rng.integers(1, 3))) for _ in range(2)))
        f, h = src.random_morphism(rng, a, b), src.random_morphism(rng, a, b)
        g = src.random_morphism(rng, b, a)
        for k, v in functor_residuals(F, f, g, h).items():
            worst[k] = max(worst.get(k, 0.0), v)
    ok = max(worst.values()) <= 1e-9
    criterion(7, "functor F", ok, " ".join(f"{k}={v:.1e}" for k, v in worst.items()))
    assert ok


def test_8_environment_axiom(criterion):
    agree = 0
    for i in range(100):
        rng = np.random.default_rng(800 + i)
        din, dout = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        f = rng.normal(size=(dout, din)) + 1j * rng.normal(size=(dout, din))
        if i % 2:
            g = random_unitary(dout, rng) @ f
        else:
            g = rng.normal(size=(dout, din)) + 1j * rng.normal(size=(dout, din))
        agree += environment_axiom_check(f, g, 1e-9).consistent
    ok = agree == 100
    criterion(8, "environment axiom", ok, f"{agree}/100 consistent")
    assert ok


def test_9_frobenius(criterion):
    worst, singletons = 0.0, True
    for n in range(1, 6):
        fs = copy_structure(n)
        rep = verify_frobenius(fs, 1e-10)
        worst = max(worst, rep.coassoc, rep.frobenius_law, rep.special)
        dec = decompose_cptp_idempotent(decoherence_idempotent(fs, 1e-10))
        singletons = singletons and dec.dims_a() == [1] * n and all(b.dimB == 1 for b in dec.blocks)
    pants = decompose_cptp_idempotent(decoherence_idempotent(pair_of_pants(2)))
    ok = worst <= 1e-10 and singletons and pants.dims_a() == [2]
    criterion(9, "Frobenius structures", ok, f"worst={worst:.1e} pants={pants.summary()}")
    assert ok


def test_10_leaks(criterion):
    worst, worst_trivial = 0.0, 0.0
    for i in range(20):
        rng = np.random.default_rng(1000 + i)
        spec = _random_spec(int(rng.integers(1, 5)), rng)
        p, _ = random_idempotent_instance(spec, seed=i)
        lc = stinespring_leak(p, 1e-9)
        worst = max(worst, max(leak_residuals(p, lc).values()))
        back = idempotent_from_leakage(leak_from_idempotent_trivial(p, 1e-9), 1e-9)
        worst_trivial = max(worst_trivial, QUANT.distance(back, p))
    ok = worst <= 1e-9 and worst_trivial <= 1e-12
    criterion(10, "leaks", ok, f"stinespring={worst:.1e} trivial={worst_trivial:.1e}")
    assert ok


def test_11_law_suite(criterion):
    t0 = time.perf_counter()
    reports = [check_theory_laws(t, seed=11, samples=100, tol=1e-9) for t in (frel(), class_theory(), QUANT)]
    dt = time.perf_counter() - t0
    ok = all(r.ok for r in reports) and dt < 30.0
    criterion(11, "law suite", ok, " ".join(f"{r.theory}={'ok' if r.ok else 'FAIL'}" for r in reports)
              + f" t={dt:.1f}s")
    assert ok
