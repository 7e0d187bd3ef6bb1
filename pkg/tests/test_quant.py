import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import apply_kraus, choi_by_loops, random_cptp_kraus, superop_by_loops
from splitcat import errors
from splitcat.quant import (QUANT, Channel, PureMap, adjoint, block_diag, channel_from_kraus, dephasing,
                            disjoint_embedding, environment_axiom_check, kraus_from_choi, pure_embed,
                            random_isometry, random_unitary, superop_from_choi, system, transpose_map,
                            unitary_channel, validate_channel)
from splitcat.theory import is_causal, is_idempotent

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def test_tensor_of_systems():
    assert QUANT.tensor_obj(system(2), system(3)) == system(6)
    assert QUANT.tensor_obj(system([1, 1]), system([1, 1])) == system([1, 1, 1, 1])


def test_discard_on_two_blocks():
    rng = np.random.default_rng(0)
    rho = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    c = 0.7
    out = QUANT.discard(system([2, 1]))(block_diag([rho, np.array([[c]])]))
    assert np.isclose(out[0, 0], np.trace(rho) + c)


def test_dephasing_choi():
    p = channel_from_kraus([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert np.allclose(p.choi, np.diag([1, 0, 0, 1]))


def test_identity_choi_is_unnormalized_bell():
    c = channel_from_kraus([np.eye(2)])
    v = np.array([1, 0, 0, 1.0])
    assert np.allclose(c.choi, np.outer(v, v))
    assert np.allclose(c.superop, np.eye(4))


def test_empty_kraus_is_zero():
    c = channel_from_kraus([], 2, 3)
    assert np.all(c.superop == 0) and c.superop.shape == (9, 4)


def test_kraus_shape_mismatch():
    with pytest.raises(errors.ShapeMismatch):
        channel_from_kraus([np.eye(2), np.eye(3)])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_kraus_channel_matches_loop_oracles(seed, din, dout, r):
    rng = np.random.default_rng(seed)
    ks = [rng.normal(size=(dout, din)) + 1j * rng.normal(size=(dout, din)) for _ in range(r)]
    c = channel_from_kraus(ks)
    apply = lambda x: apply_kraus(ks, x)  # noqa: E731
    assert np.allclose(c.superop, superop_by_loops(apply, din, dout))
    assert np.allclose(c.choi, choi_by_loops(apply, din, dout))
    x = rng.normal(size=(din, din))
    assert np.allclose(c(x), apply(x))
    assert validate_channel(c).cp
    assert np.allclose(superop_from_choi(din, dout, c.choi), c.superop)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_tp_iff_kraus_completeness(seed, d):
    rng = np.random.default_rng(seed)
    ks = random_cptp_kraus(d, 2, rng)
    assert validate_channel(channel_from_kraus(ks)).tp
    assert not validate_channel(channel_from_kraus([1.1 * k for k in ks])).tp


def test_kraus_roundtrip_through_choi():
    rng = np.random.default_rng(4)
    ks = [rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)) for _ in range(3)]
    c = channel_from_kraus(ks)
    back = channel_from_kraus(kraus_from_choi(c.choi, 3, 2))
    assert len(kraus_from_choi(c.choi, 3, 2)) == 3
    assert QUANT.distance(c, back) < 1e-12


def test_validate_examples():
    assert validate_channel(dephasing(2)) == (True, True, True)
    t = transpose_map(2)
    assert np.allclose(t.choi, np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]))
    assert not validate_channel(t).cp
    half = QUANT.scale(0.5, QUANT.identity(2))
    assert validate_channel(half) == (True, False, True)


def test_validate_multiblock_uses_pinch():
    # the identity on M_1 (+) M_1 is CP even though it is not CP as a map on M_2
    assert validate_channel(QUANT.identity(system([1, 1]))) == (True, True, True)


def test_adjoint_examples():
    d = 3
    unit_map = adjoint(QUANT.discard(d))
    assert np.allclose(unit_map(np.array([[2.0]])), 2 * np.eye(d))
    assert QUANT.distance(adjoint(dephasing(2)), dephasing(2)) == 0
    u = random_unitary(2, np.random.default_rng(1))
    assert QUANT.distance(adjoint(unitary_channel(u)), unitary_channel(u.conj().T)) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_adjoint_hilbert_schmidt_duality(seed):
    rng = np.random.default_rng(seed)
    c = QUANT.random_morphism(rng, system(2), system(3))
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    y = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    lhs = np.trace(adjoint(c)(y).conj().T @ x)
    rhs = np.trace(y.conj().T @ c(x))
    assert np.isclose(lhs, rhs)
    tp = QUANT.random_morphism(rng, system(2), system(3), causal=True)
    assert np.allclose(adjoint(tp)(np.eye(3)), np.eye(2))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_adjoint_involutive_and_reverses(seed):
    rng = np.random.default_rng(seed)
    a, b, c = system(2), system([1, 2]), system(3)
    f, g = QUANT.random_morphism(rng, a, b), QUANT.random_morphism(rng, b, c)
    assert QUANT.distance(adjoint(adjoint(f)), f) == 0
    assert QUANT.distance(adjoint(QUANT.compose(g, f)), QUANT.compose(adjoint(f), adjoint(g))) < 1e-12


def test_pure_embed_examples():
    assert QUANT.distance(pure_embed(X), unitary_channel(X)) == 0
    ph = np.exp(0.73j)
    assert QUANT.distance(pure_embed(ph * np.eye(2)), pure_embed(np.eye(2))) < 1e-15
    assert PureMap(ph * np.eye(2)).phase_equal(PureMap(np.eye(2)))
    ket0 = np.array([[1.0], [0.0]])
    prep = pure_embed(ket0)
    assert np.allclose(prep(np.array([[1.0]])), np.diag([1.0, 0.0]))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_pure_embed_multiplicative(seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    g = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
    assert QUANT.distance(pure_embed(f @ g), QUANT.compose(pure_embed(f), pure_embed(g))) < 1e-9


def test_disjoint_embedding_two_three():
    emb = disjoint_embedding([2, 3])
    k0, k1 = emb.injections
    p0, p1 = emb.projections
    assert QUANT.distance(QUANT.compose(p0, k0), QUANT.identity(2)) < 1e-15
    assert QUANT.distance(QUANT.compose(p1, k0), QUANT.zero(2, 3)) == 0
    x = np.zeros((5, 5))
    x[0, 3] = 1
    assert np.allclose(emb.pinch(x), 0)
    assert QUANT.distance(emb.pinch, QUANT.identity(5)) > 0.5
    assert is_causal(QUANT, emb.pinch) and is_idempotent(QUANT, emb.pinch)
    assert all(is_causal(QUANT, k) for k in emb.injections)


def test_disjoint_embedding_needs_dims():
    with pytest.raises(ValueError):
        disjoint_embedding([])


def test_environment_examples():
    assert environment_axiom_check(np.eye(2), Z) == (True, True, True)
    assert environment_axiom_check(np.diag([1.0, 0]), np.diag([0, 1.0])) == (False, False, True)
    rng = np.random.default_rng(2)
    f = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    w = random_isometry(4, 2, rng)
    assert environment_axiom_check(f, w @ f) == (True, True, True)
    with pytest.raises(errors.ShapeMismatch):
        environment_axiom_check(np.eye(2), np.eye(3))
    assert environment_axiom_check(np.eye(2), 2 * np.eye(2)).consistent


def test_channel_shape_checked():
    with pytest.raises(errors.ShapeMismatch):
        Channel(system(2), system(2), np.eye(3))


def test_choi_outside_block_structure_rejected():
    j = np.ones((4, 4))
    with pytest.raises(errors.ShapeMismatch):
        superop_from_choi(system([1, 1]), system([1, 1]), j)
