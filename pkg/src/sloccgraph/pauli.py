"""Exact n-qubit Pauli algebra in binary symplectic form.

A :class:`PauliWord` stores an X bitset, a Z bitset (bit ``k`` = site ``k``)
and a global phase exponent so the operator is ``i**phase * P_0 ⊗ ... ⊗ P_{n-1}``.
The bit pair ``(1, 1)`` denotes the matrix ``Y`` itself; every phase lives in
``phase``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import CapacityError, DimensionError

MAX_SYMBOLIC_QUBITS = 64
DEFAULT_DENSE_LIMIT = 10

LETTERS = "IXZY"  # indexed by x + 2*z
_PHASE_PREFIX = ("", "i", "-", "-i")

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
MATRICES = {"I": I2, "X": X, "Y": Y, "Z": Z}
PHASES = (1, 1j, -1, -1j)


def dense_limit() -> int:
    """Dense-matrix qubit cap, overridable via ``SLOCCGRAPH_DENSE_LIMIT``."""
    value = os.environ.get("SLOCCGRAPH_DENSE_LIMIT")
    return int(value) if value else DEFAULT_DENSE_LIMIT


def bits_from_str(text: str) -> int:
    """Parse a site-ordered bitstring ("110" sets sites 0 and 1) into a mask."""
    mask = 0
    for k, ch in enumerate(text):
        if ch == "1":
            mask |= 1 << k
        elif ch != "0":
            raise ValueError(f"invalid bit {ch!r} at position {k} of {text!r}")
    return mask


def bits_to_str(mask: int, n: int) -> str:
    """Render a mask as a site-ordered bitstring of length ``n``."""
    return "".join("1" if (mask >> k) & 1 else "0" for k in range(n))


def mask_of(sites: Iterable[int]) -> int:
    mask = 0
    for k in sites:
        mask |= 1 << k
    return mask


def sites_of(mask: int) -> tuple[int, ...]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


@dataclass(frozen=True)
class PauliWord:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_SYMBOLIC_QUBITS:
            raise CapacityError(f"qubit count {self.n} outside 1..{MAX_SYMBOLIC_QUBITS}")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise DimensionError("bitsets extend beyond the qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- constructors -------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliWord":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_letters(cls, letters: dict[int, str] | str, n: int | None = None, phase: int = 0) -> "PauliWord":
        if isinstance(letters, str):
            n = len(letters) if n is None else n
            letters = dict(enumerate(letters))
        if n is None:
            raise ValueError("n is required when letters are given per site")
        x = z = 0
        for k, ch in letters.items():
            if ch not in LETTERS:
                raise ValueError(f"invalid Pauli letter {ch!r}")
            if ch in "XY":
                x |= 1 << k
            if ch in "ZY":
                z |= 1 << k
        return cls(n, x, z, phase)

    @classmethod
    def parse(cls, text: str) -> "PauliWord":
        """Inverse of ``str``: optional prefix "", "i", "-", "-i" then letters."""
        for phase, prefix in sorted(enumerate(_PHASE_PREFIX), key=lambda t: -len(t[1])):
            if prefix and text.startswith(prefix):
                body = text[len(prefix):]
                break
        else:
            phase, body = 0, text
        if not body or any(ch not in LETTERS for ch in body):
            raise ValueError(f"malformed Pauli word {text!r}")
        return cls.from_letters(body, phase=phase)

    # -- algebra ------------------------------------------------------
    def __mul__(self, other: "PauliWord") -> "PauliWord":
        return pauli_mul(self, other)

    def label(self, k: int) -> str:
        return pauli_site_label(self, k)

    @property
    def support(self) -> frozenset[int]:
        return pauli_support(self)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def phase_value(self) -> complex:
        return PHASES[self.phase]

    def letters(self) -> str:
        return "".join(LETTERS[((self.x >> k) & 1) + 2 * ((self.z >> k) & 1)] for k in range(self.n))

    def unsigned(self) -> "PauliWord":
        return PauliWord(self.n, self.x, self.z, 0)

    def dense(self) -> np.ndarray:
        return pauli_dense(self)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase] + self.letters()


def _check_same(a: PauliWord, b: PauliWord) -> None:
    if a.n != b.n:
        raise DimensionError(f"Pauli words act on {a.n} and {b.n} qubits")


def product_phase(ax: int, az: int, bx: int, bz: int) -> int:
    """Phase exponent picked up by multiplying phase-free words a·b."""
    ya, xa, za = ax & az, ax & ~az, az & ~ax
    yb, xb, zb = bx & bz, bx & ~bz, bz & ~bx
    plus = (ya & zb).bit_count() + (xa & yb).bit_count() + (za & xb).bit_count()
    minus = (ya & xb).bit_count() + (xa & zb).bit_count() + (za & yb).bit_count()
    return (plus - minus) % 4


def pauli_mul(a: PauliWord, b: PauliWord) -> PauliWord:
    """Exact operator product ``a·b`` with accumulated phase."""
    _check_same(a, b)
    phase = a.phase + b.phase + product_phase(a.x, a.z, b.x, b.z)
    return PauliWord(a.n, a.x ^ b.x, a.z ^ b.z, phase)


def symplectic_product(a: PauliWord, b: PauliWord) -> int:
    """0 when the words commute, 1 when they anticommute."""
    _check_same(a, b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1


def pauli_site_label(p: PauliWord, k: int) -> str:
    if not 0 <= k < p.n:
        raise IndexError(f"site {k} outside 0..{p.n - 1}")
    return LETTERS[((p.x >> k) & 1) + 2 * ((p.z >> k) & 1)]


def pauli_support(p: PauliWord) -> frozenset[int]:
    return frozenset(sites_of(p.x | p.z))


def pauli_dense(p: PauliWord, limit: int | None = None) -> np.ndarray:
    """Dense ``2^n × 2^n`` matrix in the qubit-0-most-significant ordering."""
    limit = dense_limit() if limit is None else limit
    if p.n > limit:
        raise CapacityError(f"dense Pauli matrix for n={p.n} exceeds limit {limit}")
    out = np.array([[PHASES[p.phase]]], dtype=complex)
    for k in range(p.n):
        out = np.kron(out, MATRICES[pauli_site_label(p, k)])
    return out
