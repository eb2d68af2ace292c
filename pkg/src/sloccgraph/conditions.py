"""Stabilizer-derived bilinear conditions, grouped by support and classified.

For a graph ``g`` with stabilizer elements ``σ_b`` and ``Z_j`` (Z on the sites set
in ``j``), the word ``q = Y_V σ_b Z_j = i^p ⊗_k L_k`` gives the condition

    alpha · psi^T Y_V (⊗_{k in J} L̃_k) psi = rhs,      alpha = i^p,

where ``J`` is the support of ``q``, ``L̃_k = S_k L_k S_k^{-1}`` are the unknown
transformed letters and ``rhs`` is ``det S`` when ``j = 0`` and zero otherwise.
A state is an SLOCC image ``S|g>`` exactly when some ``S`` satisfies all of them.

Groups sharing a support are classified:

* Category I — ``n - |J|`` is odd: the bilinear form vanishes for every state
  and every choice of letters, so the group carries no information.
* Category III — otherwise, if some member has ``rhs = DetS``.
* Category II — otherwise; these hold for every SLOCC image regardless of ``S``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError
from .graphs import Graph, stabilizer_bits
from .pauli import PHASES, PauliWord, bits_to_str, mask_of, product_phase, sites_of
from .pauli import X as X_MAT
from .pauli import Y as Y_MAT
from .pauli import Z as Z_MAT
from .state import StateVector, bilinear_form

ENUMERATION_CAP = 10 ** 6
LETTER_ORDER = "XYZ"
PAULI_LETTERS = (X_MAT, Y_MAT, Z_MAT)
_PHASE_NAMES = ("1", "i", "-1", "-i")

ZERO = "Zero"
DETS = "DetS"


@dataclass(frozen=True)
class Condition:
    n: int
    b: int
    j: int
    q: PauliWord
    support: tuple[int, ...]
    labels: str
    rhs: str
    alpha_exp: int

    @property
    def alpha(self) -> complex:
        return PHASES[self.alpha_exp]

    @property
    def coeff(self) -> complex:
        """``c`` such that the condition reads ``psi^T Y_V L̃ psi = c · det S``."""
        return PHASES[(-self.alpha_exp) % 4] if self.rhs == DETS else 0j

    @property
    def letter_index(self) -> int:
        """Base-3 index of the letters (X=0, Y=1, Z=2; first support site most significant)."""
        idx = 0
        for ch in self.labels:
            idx = 3 * idx + LETTER_ORDER.index(ch)
        return idx

    def to_record(self) -> dict:
        return {
            "b": bits_to_str(self.b, self.n),
            "j": bits_to_str(self.j, self.n),
            "labels": self.labels,
            "alpha": _PHASE_NAMES[self.alpha_exp],
            "rhs": self.rhs,
            "coeff": _PHASE_NAMES[(-self.alpha_exp) % 4] if self.rhs == DETS else "0",
            "q": str(self.q),
        }


@dataclass(frozen=True)
class ConditionGroup:
    n: int
    support: tuple[int, ...]
    conditions: tuple[Condition, ...]
    category: str

    @property
    def size(self) -> int:
        return len(self.support)

    def target(self) -> np.ndarray:
        """Letter tensor ``T[L] = coeff`` of the group, indexed like :attr:`Condition.letter_index`."""
        t = np.zeros(3 ** self.size, dtype=complex)
        for c in self.conditions:
            t[c.letter_index] = c.coeff
        return t

    def to_record(self) -> dict:
        return {
            "support": list(self.support),
            "category": self.category,
            "conditions": [c.to_record() for c in self.conditions],
        }


def y_word(n: int) -> PauliWord:
    full = (1 << n) - 1
    return PauliWord(n, full, full, 0)


def derive_condition(g: Graph, b: int, j: int) -> Condition:
    """Build the condition for stabilizer selector ``b`` and Z-pattern ``j``."""
    n = g.n
    full = (1 << n) - 1
    if b & ~full or j & ~full or b < 0 or j < 0:
        raise ValueError("bit patterns extend beyond the vertex range")
    sx, sz, sp = stabilizer_bits(g, b)
    phase = sp + product_phase(full, full, sx, sz)
    x, z = full ^ sx, full ^ sz
    phase += product_phase(x, z, 0, j)
    q = PauliWord(n, x, z ^ j, phase)
    support = sites_of(q.x | q.z)
    labels = "".join(q.label(k) for k in support)
    return Condition(n, b, j, q, support, labels, DETS if j == 0 else ZERO, q.phase)


def _category(n: int, m: int, conditions: Iterable[Condition]) -> str:
    if (n - m) % 2 == 1:
        return "I"
    return "III" if any(c.rhs == DETS for c in conditions) else "II"


def enumerate_support(g: Graph, J: Iterable[int], cap: int = ENUMERATION_CAP) -> ConditionGroup:
    J = tuple(sorted(set(J)))
    if 4 ** len(J) > cap:
        raise CapacityError(f"support of size {len(J)} needs 4^{len(J)} combinations (cap {cap})")
    return _enumerate_cached(g, J)


@functools.lru_cache(maxsize=8192)
def _enumerate_cached(g: Graph, J: tuple[int, ...]) -> ConditionGroup:
    """All conditions whose support is exactly ``J``, without scanning all ``4^n`` pairs.

    Off ``J`` the letter of ``q`` must be ``I``: that forces ``b_k = 1`` and
    ``j_k = 1 ⊕ (A b)_k``.  On ``J`` the pair ``(b_k, j_k)`` maps bijectively to the
    letter ``(x, z) = (1 ⊕ b_k, 1 ⊕ (A b)_k ⊕ j_k)``, and pairs giving ``I`` are dropped.
    """
    n = g.n
    if any(not 0 <= k < n for k in J):
        raise IndexError(f"support {J} outside 0..{n - 1}")
    m = len(J)
    full = (1 << n) - 1
    jmask = mask_of(J)
    off = full & ~jmask
    conditions = []
    for bbits in itertools.product((0, 1), repeat=m):
        b = off | mask_of(k for k, bit in zip(J, bbits) if bit)
        ab = g.apply_adjacency(b)
        j_off = off & ~ab
        for jbits in itertools.product((0, 1), repeat=m):
            j = j_off | mask_of(k for k, bit in zip(J, jbits) if bit)
            z = full & ~(ab ^ j)
            x = full & ~b
            if any(not ((x >> k) & 1 or (z >> k) & 1) for k in J):
                continue
            conditions.append(derive_condition(g, b, j))
    conditions.sort(key=lambda c: c.letter_index)
    return ConditionGroup(n, J, tuple(conditions), _category(n, m, conditions))


@dataclass(frozen=True)
class GroupProfile:
    """Category and ``coeff`` pattern of a support, without materialising every member."""

    n: int
    support: tuple[int, ...]
    category: str
    target: np.ndarray

    @property
    def size(self) -> int:
        return len(self.support)


@functools.lru_cache(maxsize=65536)
def support_profile(g: Graph, J: tuple[int, ...]) -> GroupProfile:
    """Same category and target as ``enumerate_support(g, J)`` but visits only the
    ``2^|J|`` selectors with ``j = 0`` (the only members that can carry DetS)."""
    n = g.n
    J = tuple(sorted(J))
    m = len(J)
    full = (1 << n) - 1
    off = full & ~mask_of(J)
    target = np.zeros(3 ** m, dtype=complex)
    found = False
    for bbits in itertools.product((0, 1), repeat=m):
        b = off | mask_of(k for k, bit in zip(J, bbits) if bit)
        ab = g.apply_adjacency(b)
        if off & ~ab:
            continue
        if any(not (((b >> k) & 1) == 0 or ((ab >> k) & 1) == 0) for k in J):
            continue
        cond = derive_condition(g, b, 0)
        target[cond.letter_index] = cond.coeff
        found = True
    if (n - m) % 2 == 1:
        category = "I"
    else:
        category = "III" if found else "II"
    target.setflags(write=False)
    return GroupProfile(n, J, category, target)


def profiles(g: Graph, sizes: Sequence[int], cap: int = ENUMERATION_CAP) -> list[GroupProfile]:
    """Profiles for the support-∅ group and every support with a size in ``sizes``."""
    sizes = sorted(set(sizes) | {0})
    total = sum(math.comb(g.n, m) * 3 ** m for m in sizes)
    if total > cap:
        raise CapacityError(f"scan would enumerate {total} conditions (cap {cap})")
    return [support_profile(g, J) for m in sizes for J in itertools.combinations(range(g.n), m)]


def condition_for_letters(g: Graph, J: Sequence[int], labels: str) -> Condition:
    """The unique member of support ``J`` whose letters are ``labels``."""
    J = tuple(sorted(J))
    n = g.n
    full = (1 << n) - 1
    b = full & ~mask_of(J)
    for k, ch in zip(J, labels):
        if ch in "ZI":  # letter x-bit = 1 ⊕ b_k
            b |= 1 << k
    ab = g.apply_adjacency(b)
    j = 0
    for k in range(n):
        zbit = 1 if (k in J and labels[J.index(k)] in "YZ") else 0
        if (1 ^ ((ab >> k) & 1)) != zbit:
            j |= 1 << k
    return derive_condition(g, b, j)


def classify(group: ConditionGroup) -> str:
    return _category(group.n, group.size, group.conditions)


def admissible_sizes(n: int) -> list[int]:
    """Support sizes with ``n - |J|`` even, ascending."""
    return list(range(n % 2, n + 1, 2))


def scan(g: Graph, max_support: int, sizes: Sequence[int] | None = None,
         cap: int = ENUMERATION_CAP) -> list[ConditionGroup]:
    """Support-∅ group plus every parity-admissible support up to ``max_support``.

    The support-∅ group is always included (it is Category I when ``n`` is odd);
    results are ordered by ascending support size, then lexicographically.
    """
    n = g.n
    if max_support > n or max_support < 0:
        raise ValueError(f"max_support must lie in 0..{n}")
    if sizes is None:
        sizes = [m for m in admissible_sizes(n) if m <= max_support]
    sizes = sorted(set(sizes) | {0})
    total = sum(math.comb(n, m) * 3 ** m for m in sizes)
    if total > cap:
        raise CapacityError(f"scan would enumerate {total} conditions (cap {cap})")
    groups = []
    for m in sizes:
        for J in itertools.combinations(range(n), m):
            groups.append(enumerate_support(g, J, cap))
    return groups


# -- evaluation ----------------------------------------------------------------------

def transformed_letters(s_local: np.ndarray) -> list[np.ndarray]:
    """``[S X S^{-1}, S Y S^{-1}, S Z S^{-1}]`` for one site."""
    inv = np.linalg.inv(s_local)
    return [s_local @ p @ inv for p in PAULI_LETTERS]


def condition_value(psi: StateVector, cond: Condition, locals_: Sequence[np.ndarray] | None = None,
                    letters: Sequence[np.ndarray] | None = None) -> complex:
    """``alpha · psi^T Y_V (⊗ L̃_k) psi`` with letters from ``locals_`` (default: plain Paulis).

    ``letters`` may instead give the matrix substituted on each support site directly.
    """
    factors: list[np.ndarray | None] = [Y_MAT] * psi.n
    for pos, k in enumerate(cond.support):
        li = LETTER_ORDER.index(cond.labels[pos])
        if letters is not None:
            mat = letters[pos]
        elif locals_ is not None:
            mat = transformed_letters(locals_[k])[li]
        else:
            mat = PAULI_LETTERS[li]
        factors[k] = Y_MAT @ mat
    return cond.alpha * bilinear_form(psi, factors)
