import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import PAULI, dense_graph_state, dense_local, dense_z, random_invertible, random_state
from sloccgraph.errors import CapacityError, DimensionError, SingularOperatorError
from sloccgraph.graphs import Graph, empty_graph, path_graph, random_connected_graph
from sloccgraph.pauli import bits_from_str
from sloccgraph.state import (
    SloccOperator, StateVector, adjugate, apply_slocc, bilinear_form, build_graph_state, random_local, random_slocc,
    slocc_inverse, y_all, zbasis_vector,
)

Y = PAULI["Y"]


def test_single_vertex_graph_state():
    assert np.allclose(build_graph_state(empty_graph(1)).amp, np.array([1, 1]) / np.sqrt(2))


def test_two_path_graph_state():
    assert np.allclose(build_graph_state(path_graph(2)).amp, np.array([1, 1, 1, -1]) / 2)


def test_graph_state_matches_dense_oracle():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = random_connected_graph(rng, int(rng.integers(2, 8)))
        assert np.allclose(build_graph_state(g).amp, dense_graph_state(g.n, g.edges()), atol=1e-15)


def test_three_path_z_expectations():
    g = path_graph(3)
    psi = build_graph_state(g).amp
    for j in range(8):
        bits = [(j >> k) & 1 for k in range(3)]
        val = np.vdot(psi, dense_z(3, bits) @ psi)
        assert val == pytest.approx(1.0 if j == 0 else 0.0, abs=1e-15)


def test_zbasis_orthonormal():
    g = path_graph(3)
    vs = np.array([zbasis_vector(g, j).amp for j in range(8)])
    assert np.allclose(vs.conj() @ vs.T, np.eye(8), atol=1e-14)
    assert np.array_equal(zbasis_vector(g, 0).amp, build_graph_state(g).amp)


def test_zbasis_eigenvalue_signs():
    from sloccgraph.graphs import stabilizer_element
    from sloccgraph.pauli import pauli_dense
    g = path_graph(3)
    for j in range(8):
        v = zbasis_vector(g, j).amp
        for b in range(8):
            sign = (-1) ** bin(b & j).count("1")
            assert np.allclose(pauli_dense(stabilizer_element(g, b)) @ v, sign * v, atol=1e-14)


def test_capacity():
    with pytest.raises(CapacityError):
        build_graph_state(path_graph(5), limit=4)


def test_apply_identity_and_inverse():
    rng = np.random.default_rng(3)
    psi = StateVector(4, random_state(rng, 4))
    assert np.array_equal(apply_slocc(SloccOperator.identity(4), psi).amp, psi.amp)
    s = random_slocc(rng, 4)
    inv, _ = slocc_inverse(s)
    back = apply_slocc(inv, apply_slocc(s, psi)).amp
    assert np.linalg.norm(back - psi.amp) / np.linalg.norm(psi.amp) < 1e-12


def test_apply_matches_dense_kron():
    rng = np.random.default_rng(4)
    for n in range(1, 6):
        mats = [random_invertible(rng) for _ in range(n)]
        psi = random_state(rng, n)
        out = apply_slocc(SloccOperator(np.array(mats)), StateVector(n, psi)).amp
        assert np.allclose(out, dense_local(mats) @ psi)


def test_hadamard_like_column():
    m = np.array([[1, 2], [3, 4]], dtype=complex)
    out = apply_slocc(SloccOperator(m[None]), StateVector(1, [1, 0]))
    assert np.array_equal(out.amp, [1, 3])


def test_input_not_modified():
    psi = StateVector(2, [1, 0, 0, 0])
    apply_slocc(SloccOperator(np.array([[[0, 1], [1, 0]]] * 2)), psi)
    assert np.array_equal(psi.amp, [1, 0, 0, 0])
    with pytest.raises(ValueError):
        psi.amp[0] = 2


def test_dimension_errors():
    with pytest.raises(DimensionError):
        apply_slocc(SloccOperator.identity(2), StateVector(3, np.ones(8)))
    with pytest.raises(DimensionError):
        StateVector(2, np.ones(3))


def test_inverse_examples():
    inv, det = slocc_inverse(SloccOperator.identity(3))
    assert np.array_equal(inv.locals, SloccOperator.identity(3).locals) and det == 1
    inv, det = slocc_inverse(SloccOperator(np.array([np.diag([2, 0.5])])))
    assert np.allclose(inv.locals[0], np.diag([0.5, 2])) and det == pytest.approx(1)


def test_singular_rejected():
    with pytest.raises(SingularOperatorError) as err:
        SloccOperator(np.array([np.eye(2), [[1, 2], [2, 4]]]))
    assert err.value.site == 1


def test_adjugate_identity_random():
    rng = np.random.default_rng(8)
    for _ in range(200):
        m = random_local(rng)
        inv, det = slocc_inverse(SloccOperator(m[None]))
        ref = Y @ m.T @ Y
        assert np.max(np.abs(inv.locals[0] * det - ref)) < 1e-12
        assert np.max(np.abs(adjugate(m) - np.linalg.inv(m) * np.linalg.det(m))) < 1e-12


def test_bilinear_examples():
    assert bilinear_form(StateVector(1, [1, 0]), [PAULI["Z"]]) == 1
    assert bilinear_form(StateVector(1, [1, 0]), [Y]) == 0
    assert abs(bilinear_form(build_graph_state(path_graph(3)), [Y, Y, Y])) < 1e-15


@settings(max_examples=40)
@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_bilinear_transpose_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    psi = StateVector(n, random_state(rng, n))
    fs = [random_invertible(rng) if rng.random() < 0.7 else None for _ in range(n)]
    ft = [None if f is None else f.T for f in fs]
    a, b = bilinear_form(psi, fs), bilinear_form(psi, ft)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@settings(max_examples=40)
@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_bilinear_matches_dense(n, seed):
    rng = np.random.default_rng(seed)
    psi = random_state(rng, n)
    fs = [random_invertible(rng) for _ in range(n)]
    ref = psi @ dense_local(fs) @ psi
    assert bilinear_form(StateVector(n, psi), fs) == pytest.approx(ref, rel=1e-12)


def test_y_all_matches_dense():
    rng = np.random.default_rng(2)
    for n in range(1, 6):
        psi = random_state(rng, n)
        assert np.allclose(y_all(psi, n), dense_local([Y] * n) @ psi)


def test_random_local_condition_bound():
    rng = np.random.default_rng(0)
    assert max(np.linalg.cond(random_local(rng)) for _ in range(1000)) <= 20.0


def test_from_array_and_norm():
    psi = StateVector.from_array(np.arange(8.0))
    assert psi.n == 3 and psi.norm == pytest.approx(np.sqrt(140))
    assert psi.normalized().norm == pytest.approx(1.0)
    with pytest.raises(DimensionError):
        StateVector.from_array(np.ones(6))
    assert not StateVector(1, [np.nan, 0]).is_finite()
    assert Graph(1, (0,)).n == 1 and bits_from_str("1") == 1
