import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import PAULI, dense_word, identify_word, kron_all
from sloccgraph.errors import CapacityError, DimensionError
from sloccgraph.pauli import (
    PauliWord, bits_from_str, bits_to_str, pauli_dense, pauli_mul, pauli_site_label, pauli_support,
    symplectic_product,
)


@st.composite
def words(draw, n=None):
    n = draw(st.integers(1, 4)) if n is None else n
    letters = draw(st.text(alphabet="IXYZ", min_size=n, max_size=n))
    return PauliWord.from_letters(letters, phase=draw(st.integers(0, 3)))


@st.composite
def word_pairs(draw):
    n = draw(st.integers(1, 4))
    return draw(words(n)), draw(words(n))


# -- examples -----------------------------------------------------------------------

def test_product_of_path_generators():
    assert str(PauliWord.parse("XZI") * PauliWord.parse("ZXZ")) == "YYZ"


def test_identity_is_neutral():
    p = PauliWord.parse("-iXYZ")
    assert PauliWord.identity(3) * p == p == p * PauliWord.identity(3)


def test_five_path_all_generators():
    gens = ["XZIII", "ZXZII", "IZXZI", "IIZXZ", "IIIZX"]
    prod = PauliWord.identity(5)
    for g in gens:
        prod = prod * PauliWord.parse(g)
    assert str(prod) == "-YXXXY"
    assert prod.phase == 2


def test_site_labels():
    assert pauli_site_label(PauliWord.parse("-YXY"), 1) == "X"
    assert PauliWord.parse("-YXY").label(0) == "Y"
    assert all(pauli_site_label(PauliWord.identity(4), k) == "I" for k in range(4))
    assert pauli_site_label(PauliWord.parse("YXXYZ"), 4) == "Z"
    with pytest.raises(IndexError):
        pauli_site_label(PauliWord.parse("XX"), 2)


def test_support_and_weight():
    p = PauliWord.parse("YXXYZ")
    assert pauli_support(p) == {0, 1, 2, 3, 4} and p.weight == 5
    assert pauli_support(PauliWord.identity(3)) == frozenset() and PauliWord.identity(3).weight == 0
    assert pauli_support(PauliWord.parse("IIYII")) == {2}


def test_single_qubit_dense():
    assert np.array_equal(pauli_dense(PauliWord.parse("X")), [[0, 1], [1, 0]])
    assert np.array_equal(pauli_dense(PauliWord.parse("Y")), [[0, -1j], [1j, 0]])


def test_dense_matches_kronecker():
    assert np.array_equal(pauli_dense(PauliWord.parse("YYZ")), kron_all([PAULI["Y"], PAULI["Y"], PAULI["Z"]]))


def test_dense_capacity():
    with pytest.raises(CapacityError):
        pauli_dense(PauliWord.identity(5), limit=4)


def test_size_mismatch():
    with pytest.raises(DimensionError):
        pauli_mul(PauliWord.parse("X"), PauliWord.parse("XX"))


@pytest.mark.parametrize("text", ["X", "iY", "-ZZ", "-iXYZI", "IIII"])
def test_string_round_trip(text):
    assert str(PauliWord.parse(text)) == text


@pytest.mark.parametrize("text", ["", "-", "XQ", "+X", "i"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        PauliWord.parse(text)


def test_bitstring_convention():
    assert bits_from_str("110") == 0b011
    assert bits_to_str(0b011, 3) == "110"
    with pytest.raises(ValueError):
        bits_from_str("12")


# -- properties --------------------------------------------------------------------

@given(word_pairs())
def test_product_matches_dense_oracle(pair):
    a, b = pair
    letters, phase = identify_word(dense_word(str(a)) @ dense_word(str(b)), a.n)
    prod = a * b
    assert prod.letters() == letters
    assert prod.phase_value == pytest.approx(phase)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(words(n), words(n), words(n))))
def test_associative(triple):
    a, b, c = triple
    assert (a * b) * c == a * (b * c)


@given(words())
def test_square_is_real_identity(p):
    sq = p * p
    assert sq.x == 0 and sq.z == 0 and sq.phase in (0, 2)


@given(word_pairs())
def test_commutation_sign(pair):
    a, b = pair
    ab, ba = a * b, b * a
    assert ab.x == ba.x and ab.z == ba.z
    assert (ab.phase - ba.phase) % 4 == 2 * symplectic_product(a, b)


@given(words())
def test_transpose_sign(p):
    d = pauli_dense(p)
    assert np.array_equal(d.T, (-1) ** p.y_count * d)


@settings(max_examples=50)
@given(words())
def test_parse_round_trip(p):
    assert PauliWord.parse(str(p)) == p


def test_dense_faithful_exhaustive_two_qubits():
    ws = [PauliWord.from_letters("".join(t), phase=0) for t in itertools.product("IXYZ", repeat=2)]
    for a in ws:
        for b in ws:
            assert np.array_equal(pauli_dense(a * b), pauli_dense(a) @ pauli_dense(b))
