import itertools

import numpy as np
import pytest

from _oracles import PAULI, dense_local, dense_stabilizer, dense_word, identify_word, random_invertible, random_state
from sloccgraph.conditions import (
    DETS, ZERO, admissible_sizes, classify, condition_for_letters, condition_value, derive_condition,
    enumerate_support, profiles, scan, support_profile,
)
from sloccgraph.errors import CapacityError
from sloccgraph.graphs import complete_graph, cycle_graph, empty_graph, path_graph, random_connected_graph, star_graph
from sloccgraph.pauli import bits_from_str
from sloccgraph.state import StateVector, apply_slocc, build_graph_state, random_slocc, slocc_inverse

Y = PAULI["Y"]
PHASE_NAMES = {1: "1", 1j: "i", -1: "-1", -1j: "-i"}


def _bits(mask, n):
    return [(mask >> k) & 1 for k in range(n)]


def brute_force_groups(g):
    """All 4^n (b, j) pairs evaluated densely, bucketed by the support of Y_V σ_b Z_j."""
    n = g.n
    yv = dense_local([Y] * n)
    groups = {}
    for b in range(1 << n):
        sb = dense_stabilizer(n, g.edges(), _bits(b, n))
        for j in range(1 << n):
            zj = dense_local([PAULI["Z"] if (j >> k) & 1 else PAULI["I"] for k in range(n)])
            letters, phase = identify_word(yv @ sb @ zj, n)
            support = tuple(k for k, ch in enumerate(letters) if ch != "I")
            labels = "".join(letters[k] for k in support)
            alpha = complex(round(phase.real), round(phase.imag))
            groups.setdefault(support, set()).add((b, j, labels, PHASE_NAMES[alpha], DETS if j == 0 else ZERO))
    return groups


# -- examples -----------------------------------------------------------------------

def test_derive_support_empty():
    c = derive_condition(path_graph(3), bits_from_str("111"), bits_from_str("010"))
    assert c.support == () and c.rhs == ZERO


def test_derive_single_site_dets():
    c = derive_condition(path_graph(3), bits_from_str("110"), 0)
    assert c.support == (2,) and c.labels == "X" and c.rhs == DETS
    assert c.coeff == -1j  # psi^T (Y ⊗ Y ⊗ X̃) psi = -i det S


def test_derive_five_path_zero():
    c = derive_condition(path_graph(5), bits_from_str("11111"), bits_from_str("01111"))
    assert c.support == (4,) and c.labels == "Z" and c.rhs == ZERO


def test_three_path_site_two_group():
    grp = enumerate_support(path_graph(3), [2])
    assert [c.labels for c in grp.conditions] == ["X", "Y", "Z"]
    assert [c.rhs for c in grp.conditions] == [DETS, ZERO, ZERO]


def test_five_path_groups():
    g = path_graph(5)
    last = enumerate_support(g, [4])
    assert len(last.conditions) == 3 and all(c.rhs == ZERO for c in last.conditions)
    assert classify(last) == "II"
    mid = enumerate_support(g, [2])
    assert classify(mid) == "III"
    rhs = {c.labels: (c.rhs, c.coeff) for c in mid.conditions}
    assert rhs == {"X": (ZERO, 0), "Y": (DETS, 1), "Z": (ZERO, 0)}


def test_classify_parity():
    g = path_graph(3)
    assert all(enumerate_support(g, J).category == "I" for J in itertools.combinations(range(3), 2))


def test_scan_three_path():
    groups = scan(path_graph(3), 1)
    assert [grp.support for grp in groups] == [(), (0,), (1,), (2,)]
    assert groups[0].category == "I"
    singles = [c for grp in groups[1:] for c in grp.conditions]
    assert len(singles) == 9
    dets = {(c.support[0], c.labels, c.coeff) for c in singles if c.rhs == DETS}
    assert dets == {(0, "X", -1j), (1, "Z", -1j), (2, "X", -1j)}


def test_scan_single_vertex():
    groups = scan(empty_graph(1), 1)
    assert [grp.support for grp in groups] == [(), (0,)]


def test_scan_five_path_sizes():
    groups = scan(path_graph(5), 3)
    assert {len(grp.support) for grp in groups} == {0, 1, 3}
    assert admissible_sizes(5) == [1, 3, 5] and admissible_sizes(4) == [0, 2, 4]


def test_scan_capacity():
    with pytest.raises(CapacityError):
        scan(complete_graph(8), 8, cap=1000)
    with pytest.raises(CapacityError):
        enumerate_support(complete_graph(12), range(11), cap=4 ** 10)
    with pytest.raises(ValueError):
        scan(path_graph(3), 4)


def test_to_record_key_order():
    rec = enumerate_support(path_graph(3), [0]).to_record()
    assert list(rec) == ["support", "category", "conditions"]
    assert list(rec["conditions"][0])[:5] == ["b", "j", "labels", "alpha", "rhs"]


# -- brute-force oracle --------------------------------------------------------------

GRAPHS_SMALL = [empty_graph(1), path_graph(2), path_graph(3), complete_graph(3), empty_graph(3),
                path_graph(4), cycle_graph(4), star_graph(4), complete_graph(4)]


@pytest.mark.parametrize("g", GRAPHS_SMALL, ids=lambda g: g.to_graph6())
def test_enumeration_matches_brute_force(g):
    oracle = brute_force_groups(g)
    assert sum(len(v) for v in oracle.values()) == 4 ** g.n
    for m in range(g.n + 1):
        for J in itertools.combinations(range(g.n), m):
            grp = enumerate_support(g, J)
            got = {(c.b, c.j, c.labels, c.to_record()["alpha"], c.rhs) for c in grp.conditions}
            assert got == oracle.get(J, set())
            assert len(grp.conditions) == 3 ** m
            prof = support_profile(g, J)
            assert prof.category == grp.category
            assert np.array_equal(prof.target, grp.target())
            for c in grp.conditions:
                assert condition_for_letters(g, J, c.labels) == c


def test_profiles_match_enumeration_random():
    rng = np.random.default_rng(21)
    for _ in range(10):
        g = random_connected_graph(rng, int(rng.integers(5, 9)))
        sizes = admissible_sizes(g.n)[:2]
        for prof in profiles(g, sizes):
            grp = enumerate_support(g, prof.support)
            assert prof.category == grp.category and np.array_equal(prof.target, grp.target())


def test_single_site_structure():
    rng = np.random.default_rng(1)
    for _ in range(10):
        g = random_connected_graph(rng, int(rng.integers(3, 9)))
        for k in range(g.n):
            grp = enumerate_support(g, [k])
            assert sorted(c.labels for c in grp.conditions) == ["X", "Y", "Z"]
            assert sum(c.rhs == DETS for c in grp.conditions) <= 1


# -- properties ---------------------------------------------------------------------

def test_category_one_general_letters_dense_sweep():
    """Parity rule with arbitrary conjugated letters, evaluated with dense matrices (n ≤ 4)."""
    rng = np.random.default_rng(123)
    count = 0
    for n in range(1, 5):
        for m in range(n + 1):
            if (n - m) % 2 == 0:
                continue
            for J in itertools.combinations(range(n), m):
                for _ in range(40):
                    psi = random_state(rng, n)
                    mats, scale = [], np.vdot(psi, psi).real
                    for k in range(n):
                        if k in J:
                            t = random_invertible(rng)
                            p = PAULI["XYZ"[rng.integers(3)]]
                            mats.append(Y @ t @ p @ np.linalg.inv(t))
                            scale *= np.linalg.norm(t, 2) * np.linalg.norm(np.linalg.inv(t), 2)
                        else:
                            mats.append(Y)
                    val = psi @ dense_local(mats) @ psi
                    assert abs(val) < 1e-10 * scale
                    count += 1
    assert count > 500


def test_even_complement_is_not_trivially_zero():
    rng = np.random.default_rng(5)
    psi = random_state(rng, 3)
    val = psi @ dense_local([Y, Y, Y @ PAULI["X"]]) @ psi  # n - |J| = 2
    assert abs(val) > 1e-3


def test_images_satisfy_every_condition():
    rng = np.random.default_rng(17)
    for _ in range(12):
        g = random_connected_graph(rng, int(rng.integers(2, 7)))
        s = random_slocc(rng, g.n)
        psi = apply_slocc(s, build_graph_state(g))
        det = slocc_inverse(s)[1]
        scale = psi.norm ** 2 * np.prod([np.linalg.cond(m) for m in s.locals])
        for grp in scan(g, min(g.n, 3)):
            for c in grp.conditions:
                expected = det if c.rhs == DETS else 0
                assert abs(condition_value(psi, c, s.locals) - expected) < 1e-9 * scale


def test_category_two_independent_of_operator():
    g = path_graph(5)
    rng = np.random.default_rng(2)
    psi = apply_slocc(random_slocc(rng, 5), build_graph_state(g))
    grp = enumerate_support(g, [4])
    for _ in range(20):
        other = random_slocc(rng, 5)
        for c in grp.conditions:
            assert abs(condition_value(psi, c, other.locals)) < 1e-10


def test_condition_value_plain_letters_on_graph_state():
    g = path_graph(3)
    psi = build_graph_state(g)
    for grp in scan(g, 3):
        for c in grp.conditions:
            assert condition_value(psi, c) == pytest.approx(1 if c.rhs == DETS else 0, abs=1e-14)
    c = enumerate_support(g, [0]).conditions[0]
    assert condition_value(psi, c, letters=[PAULI["X"]]) == pytest.approx(1)
    assert StateVector(3, psi.amp).n == 3
