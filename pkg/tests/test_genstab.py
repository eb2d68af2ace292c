import numpy as np
import pytest

from _oracles import dense_graph_state, dense_stabilizer, dense_word
from sloccgraph.errors import CapacityError, DimensionError, FactorizationError
from sloccgraph.genstab import (
    factor_separable, general_stabilizer_element, projector_stabilizer_element, projector_sum, verify_stabilizes,
)
from sloccgraph.graphs import empty_graph, path_graph, random_connected_graph, star_graph
from sloccgraph.pauli import bits_from_str
from sloccgraph.state import SloccOperator, StateVector, apply_slocc, build_graph_state, random_slocc


def test_single_vertex():
    g = empty_graph(1)
    assert np.allclose(projector_stabilizer_element(g, 0).dense(), np.eye(2))
    assert np.allclose(projector_stabilizer_element(g, 1).dense(), [[0, 1], [1, 0]])


def test_three_path_all_elements():
    g = path_graph(3)
    op = projector_stabilizer_element(g, bits_from_str("111"))
    assert op.label == "-YXY" and op.residual < 1e-12
    assert np.allclose(op.dense(), dense_word("-YXY"))
    for i in range(8):
        bits = [(i >> k) & 1 for k in range(3)]
        assert np.allclose(projector_stabilizer_element(g, i).dense(), dense_stabilizer(3, g.edges(), bits))


def test_index_zero_is_identity():
    g = random_connected_graph(np.random.default_rng(0), 5)
    assert np.allclose(projector_sum(g, 0), np.eye(32))


def test_group_structure():
    g = star_graph(4)
    for a in range(16):
        for b in range(16):
            prod = projector_sum(g, a) @ projector_sum(g, b)
            assert np.allclose(prod, projector_sum(g, a ^ b))


def test_general_identity_reduces():
    g = path_graph(3)
    i = bits_from_str("101")
    gen = general_stabilizer_element(g, SloccOperator.identity(3), i)
    assert np.allclose(gen.dense(), projector_stabilizer_element(g, i).dense())


def test_general_fixes_image_and_is_non_hermitian():
    g = path_graph(3)
    s = random_slocc(np.random.default_rng(42), 3)
    psi = apply_slocc(s, build_graph_state(g))
    op = general_stabilizer_element(g, s, bits_from_str("110"))
    assert verify_stabilizes(psi, op) < 1e-9
    assert max(np.linalg.norm(t - t.conj().T) for t in op.factors) > 1e-3


def test_verify_stabilizes_examples():
    g = path_graph(4)
    psi = build_graph_state(g)
    assert verify_stabilizes(psi, projector_stabilizer_element(g, 5)) < 1e-12
    not_member = type(projector_stabilizer_element(g, 0))(np.array([np.diag([1, -1])] + [np.eye(2)] * 3))
    assert verify_stabilizes(psi, not_member) > 1 - 1e-12  # Z_0|g> is orthogonal to |g>
    with pytest.raises(DimensionError):
        verify_stabilizes(StateVector(2, np.ones(4)), not_member)


def test_sampled_large_fix_points():
    rng = np.random.default_rng(3)
    for n in (7, 8):
        g = random_connected_graph(rng, n)
        s = random_slocc(rng, n)
        psi = apply_slocc(s, build_graph_state(g))
        for i in rng.integers(0, 2 ** n, size=4):
            assert verify_stabilizes(psi, general_stabilizer_element(g, s, int(i), limit=6)) < 1e-9


def test_errors():
    with pytest.raises(CapacityError):
        projector_stabilizer_element(path_graph(5), 1, limit=4)
    with pytest.raises(ValueError):
        projector_sum(path_graph(3), 8)
    with pytest.raises(FactorizationError):
        factor_separable(np.diag([1, 0, 0, 1]), 2)  # I⊗I + Z⊗Z has operator-Schmidt rank 2
    with pytest.raises(DimensionError):
        general_stabilizer_element(path_graph(3), SloccOperator.identity(2), 1)


def test_dense_graph_oracle_consistency():
    g = path_graph(4)
    assert np.allclose(build_graph_state(g).amp, dense_graph_state(4, g.edges()))
