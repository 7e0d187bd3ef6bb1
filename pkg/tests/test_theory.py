import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from splitcat import errors
from splitcat.matcat import class_theory, frel
from splitcat.quant import QUANT, channel_from_kraus, dephasing, system, unitary_channel
from splitcat.theory import check_theory_laws, check_tol, is_causal, is_idempotent, is_subcausal

X = np.array([[0, 1], [1, 0]])


def test_identity_channel_is_causal():
    assert is_causal(QUANT, QUANT.identity(2))


def test_class_state_is_causal():
    t = class_theory()
    assert is_causal(t, t.mat([[0.5], [0.5]]))


def test_projective_effect_is_not_causal():
    assert not is_causal(QUANT, QUANT.effect(np.diag([1.0, 0.0])))


def test_is_causal_rejects_foreign_payload():
    with pytest.raises(errors.MismatchedTheory):
        is_causal(QUANT, class_theory().identity(2))


def test_idempotent_examples():
    assert is_idempotent(QUANT, dephasing(2))
    assert is_idempotent(frel(), frel().mat([[1, 1], [0, 1]]))
    assert not is_idempotent(QUANT, unitary_channel(X))


def test_idempotent_needs_endomorphism():
    with pytest.raises(errors.NotEndomorphism):
        is_idempotent(QUANT, QUANT.discard(2))


def test_subcausal_examples():
    pi = channel_from_kraus([np.diag([1.0, 0.0])])
    assert is_subcausal(QUANT, pi)
    assert not is_subcausal(QUANT, QUANT.scale(2, QUANT.identity(2)))
    assert is_subcausal(frel(), frel().mat([[1, 1], [1, 1]]))
    assert is_subcausal(class_theory(), class_theory().mat([[0.3, 0.2], [0.6, 0.1]]))


def test_check_tol_rejects_negative():
    with pytest.raises(ValueError):
        check_tol(-1.0)


def test_class_laws_seed_7():
    rep = check_theory_laws(class_theory(), seed=7, samples=100)
    assert rep.ok, [r.line() for r in rep.results if not r.passed]


def test_frel_laws_seed_1_include_idempotent_sum():
    rep = check_theory_laws(frel(), seed=1, samples=100)
    assert rep.ok
    assert rep["sum idempotent"].passed
    assert rep["discard(I) = id(I)"].max_residual == 0


def test_quant_laws_seed_3():
    rep = check_theory_laws(QUANT, seed=3, samples=50)
    assert rep.ok, [r.line() for r in rep.results if not r.passed]
    assert "adjoint involutive" in rep.names()


def test_law_report_is_deterministic():
    a = check_theory_laws(class_theory(), seed=2, samples=5).to_dict()
    b = check_theory_laws(class_theory(), seed=2, samples=5).to_dict()
    assert a == b


def test_law_suite_needs_samples():
    with pytest.raises(ValueError):
        check_theory_laws(frel(), samples=0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_causal_closed_under_compose_and_tensor(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (system(int(rng.integers(1, 4))) for _ in range(3))
    f = QUANT.random_morphism(rng, a, b, causal=True)
    g = QUANT.random_morphism(rng, b, c, causal=True)
    assert is_causal(QUANT, QUANT.compose(g, f))
    assert is_causal(QUANT, QUANT.tensor(f, g))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 1.0))
def test_convex_mixture_of_causal_is_causal(seed, s):
    t = class_theory()
    rng = np.random.default_rng(seed)
    f, g = t.random_causal(rng, 3, 2), t.random_causal(rng, 3, 2)
    mix = t.add(t.scale(s, f), t.scale(1 - s, g))
    assert is_causal(t, mix)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_approx_eq_reflexive_symmetric_triangle(seed):
    t = class_theory()
    rng = np.random.default_rng(seed)
    f = t.random_morphism(rng, 2, 3)
    g = t.mat(f.entries + 4e-10)
    h = t.mat(g.entries + 4e-10)
    assert t.approx_eq(f, f)
    assert t.approx_eq(f, g) == t.approx_eq(g, f)
    assert t.distance(f, h) <= t.distance(f, g) + t.distance(g, h) + 2 * np.finfo(float).eps
