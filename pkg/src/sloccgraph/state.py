"""Dense state vectors, graph states, local (SLOCC) operators and the transpose bilinear form.

Basis ordering: index bit ``n-1-k`` (qubit 0 is the most significant bit) holds
site ``k``'s computational-basis value, so dense operators are Kronecker products
taken in site order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import CapacityError, DimensionError, SingularOperatorError
from .graphs import Graph
from .pauli import sites_of

DEFAULT_STATE_DENSE_LIMIT = 12
SINGULARITY_THRESHOLD = 1e-12


def state_dense_limit() -> int:
    """Qubit cap for dense state vectors, overridable via ``SLOCCGRAPH_DENSE_LIMIT``."""
    value = os.environ.get("SLOCCGRAPH_DENSE_LIMIT")
    return int(value) if value else DEFAULT_STATE_DENSE_LIMIT


def _check_capacity(n: int, limit: int | None) -> None:
    limit = state_dense_limit() if limit is None else limit
    if n > limit:
        raise CapacityError(f"{n} qubits exceed the dense limit {limit}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """``2**n`` complex amplitudes; the array is read-only once wrapped."""

    n: int
    amp: np.ndarray

    def __post_init__(self) -> None:
        amp = np.array(self.amp, dtype=np.complex128).reshape(-1)
        if self.n < 1 or amp.shape[0] != 1 << self.n:
            raise DimensionError(f"expected {1 << max(self.n, 0)} amplitudes for n={self.n}, got {amp.shape[0]}")
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)

    @classmethod
    def from_array(cls, amp: np.ndarray) -> "StateVector":
        amp = np.asarray(amp).reshape(-1)
        n = int(amp.shape[0]).bit_length() - 1
        if n < 1 or amp.shape[0] != 1 << n:
            raise DimensionError(f"length {amp.shape[0]} is not a power of two >= 2")
        return cls(n, amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def normalized(self) -> "StateVector":
        return StateVector(self.n, self.amp / self.norm)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.amp)))


def as_local(m) -> np.ndarray:
    a = np.array(m, dtype=np.complex128)
    if a.shape != (2, 2):
        raise DimensionError(f"local matrix must be 2x2, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("local matrix has non-finite entries")
    return a


def is_invertible(m: np.ndarray) -> bool:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    rows = np.linalg.norm(m[0]) * np.linalg.norm(m[1])
    return bool(rows > 0 and abs(det) >= SINGULARITY_THRESHOLD * rows)


@dataclass(frozen=True, eq=False)
class SloccOperator:
    """Tensor product of ``n`` invertible 2×2 matrices, stored as an ``(n, 2, 2)`` array."""

    locals: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.locals, dtype=np.complex128)
        if arr.ndim != 3 or arr.shape[1:] != (2, 2) or arr.shape[0] < 1:
            raise DimensionError(f"locals must have shape (n, 2, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("local matrices have non-finite entries")
        for k in range(arr.shape[0]):
            if not is_invertible(arr[k]):
                raise SingularOperatorError(f"local matrix at site {k} is singular", site=k)
        arr.setflags(write=False)
        object.__setattr__(self, "locals", arr)

    @property
    def n(self) -> int:
        return self.locals.shape[0]

    @classmethod
    def identity(cls, n: int) -> "SloccOperator":
        return cls(np.tile(np.eye(2, dtype=complex), (n, 1, 1)))

    @property
    def det(self) -> complex:
        return complex(np.prod([local_det(m) for m in self.locals]))

    def dense(self, limit: int | None = None) -> np.ndarray:
        _check_capacity(self.n, limit)
        out = np.ones((1, 1), dtype=complex)
        for m in self.locals:
            out = np.kron(out, m)
        return out


def local_det(m: np.ndarray) -> complex:
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def adjugate(m: np.ndarray) -> np.ndarray:
    """``Y m^T Y``, i.e. the classical adjugate of a 2×2 matrix."""
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=np.complex128)


# -- construction ------------------------------------------------------------------

def build_graph_state(g: Graph, limit: int | None = None) -> StateVector:
    """``∏ CZ |+>^{⊗n}``: amplitudes ``2^{-n/2} (-1)^{Σ_edges x_a x_b}``."""
    _check_capacity(g.n, limit)
    edges = np.array(g.edges(), dtype=np.int64).reshape(-1, 2)
    signs = _kernels.graph_signs(g.n, edges)
    return StateVector(g.n, signs * 2.0 ** (-g.n / 2))


def zbasis_vector(g: Graph, j: int, limit: int | None = None) -> StateVector:
    """``Z_{j} |g>``: flips the sign of amplitudes with odd overlap with ``j``."""
    _check_capacity(g.n, limit)
    base = build_graph_state(g, limit)
    return StateVector(g.n, base.amp * z_signs(g.n, j))


def z_signs(n: int, mask: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    parity = np.zeros(1 << n, dtype=np.int64)
    for k in sites_of(mask):
        parity ^= (idx >> (n - 1 - k)) & 1
    return 1.0 - 2.0 * parity


# -- application ---------------------------------------------------------------------

def apply_factors(amp: np.ndarray, n: int, factors: Sequence[np.ndarray | None]) -> np.ndarray:
    """Apply per-site matrices (``None`` = identity) site by site."""
    if len(factors) != n:
        raise DimensionError(f"{len(factors)} factors for {n} qubits")
    out = np.asarray(amp, dtype=np.complex128)
    for k, m in enumerate(factors):
        if m is not None:
            out = _kernels.apply_site(out, n, k, m)
    return out


def apply_slocc(s: SloccOperator, psi: StateVector) -> StateVector:
    if s.n != psi.n:
        raise DimensionError(f"operator on {s.n} qubits applied to a {psi.n}-qubit state")
    return StateVector(psi.n, apply_factors(psi.amp, psi.n, list(s.locals)))


def slocc_inverse(s: SloccOperator) -> tuple[SloccOperator, complex]:
    """Per-site inverses via the adjugate (``S_k^{-1} det S_k = Y S_k^T Y``) and ``det S``."""
    inv = np.empty_like(s.locals)
    total = 1.0 + 0j
    for k, m in enumerate(s.locals):
        d = local_det(m)
        if not is_invertible(m):
            raise SingularOperatorError(f"local matrix at site {k} is singular", site=k)
        inv[k] = adjugate(m) / d
        total *= d
    return SloccOperator(inv), total


def bilinear_form(psi: StateVector, factors: Sequence[np.ndarray | None]) -> complex:
    """``psi^T (⊗ factors) psi`` with no complex conjugation."""
    if len(factors) != psi.n:
        raise DimensionError(f"{len(factors)} factors for {psi.n} qubits")
    phi = apply_factors(psi.amp, psi.n, factors)
    return complex(np.sum(psi.amp * phi))


def y_all(amp: np.ndarray, n: int) -> np.ndarray:
    """``Y^{⊗n}`` applied to a vector: ``(Y_V psi)[y] = (-i)^n (-1)^{|y|} psi[~y]``."""
    pop = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    return (-1j) ** n * (1.0 - 2.0 * (pop & 1)) * np.asarray(amp)[::-1]


def random_local(rng: np.random.Generator, max_cond: float = 20.0) -> np.ndarray:
    """Standard complex Gaussian 2×2 matrix, resampled until its condition number is ≤ ``max_cond``."""
    while True:
        a = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2.0)
        if np.linalg.cond(a) <= max_cond:
            return a


def random_slocc(rng: np.random.Generator, n: int, max_cond: float = 20.0) -> SloccOperator:
    return SloccOperator(np.array([random_local(rng, max_cond) for _ in range(n)]))

