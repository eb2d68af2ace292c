"""Separable stabilizers built from the Z-basis projectors of a graph state.

With ``v_j = Z_j |g>`` (an orthonormal basis), ``σ_i = Σ_j (-1)^{i·j} |v_j><v_j|``
reproduces the Pauli stabilizer element ``σ_i`` exactly.  Conjugating with a
local operator ``S`` gives ``S σ_i S^{-1} = ⊗_k S_k P_k S_k^{-1}``: a separable but
generally non-Hermitian, non-unitary operator that fixes ``S|g>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionError, FactorizationError
from .graphs import Graph, stabilizer_element
from .pauli import MATRICES, PHASES, PauliWord, pauli_dense, sites_of
from .state import SloccOperator, StateVector, apply_factors, build_graph_state, slocc_inverse

DENSE_LIMIT = 10
_PAULI_ORDER = "IXYZ"


@dataclass(frozen=True, eq=False)
class SeparableOperator:
    """``⊗_k factors[k]``; ``residual`` is the dense reconstruction residual when checked."""

    factors: np.ndarray
    residual: float | None = None
    phase: complex | None = None
    label: str | None = None

    @property
    def n(self) -> int:
        return self.factors.shape[0]

    def dense(self) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            raise CapacityError(f"dense operator for n={self.n} exceeds limit {DENSE_LIMIT}")
        out = np.ones((1, 1), dtype=complex)
        for f in self.factors:
            out = np.kron(out, f)
        return out

    def to_record(self) -> dict:
        return {
            "label": self.label,
            "factors": [[[[float(v.real) + 0.0, float(v.imag) + 0.0] for v in row] for row in f] for f in self.factors],
            "residual": self.residual,
            "phase": None if self.phase is None else [float(self.phase.real), float(self.phase.imag)],
        }


def _check_dense(n: int, limit: int | None) -> None:
    limit = DENSE_LIMIT if limit is None else min(limit, DENSE_LIMIT)
    if n > limit:
        raise CapacityError(f"dense projector sum for n={n} exceeds limit {limit}")


def _bit_reverse(mask: int, n: int) -> int:
    return sum(1 << (n - 1 - k) for k in sites_of(mask))


def zbasis_matrix(g: Graph) -> np.ndarray:
    """Columns ``v_j = Z_j |g>`` indexed by the site mask ``j``."""
    n = g.n
    amp = np.asarray(build_graph_state(g).amp.real)
    idx = np.arange(1 << n, dtype=np.uint64)
    cols = np.empty((1 << n, 1 << n))
    for j in range(1 << n):
        parity = np.bitwise_count(idx & np.uint64(_bit_reverse(j, n))) & 1
        cols[:, j] = amp * (1.0 - 2.0 * parity)
    return cols


def projector_sum(g: Graph, i: int, limit: int | None = None) -> np.ndarray:
    """Dense ``Σ_j (-1)^{i·j} |v_j><v_j|``."""
    _check_dense(g.n, limit)
    if i < 0 or i >> g.n:
        raise ValueError(f"index {i} outside 0..{(1 << g.n) - 1}")
    V = zbasis_matrix(g)
    j = np.arange(1 << g.n, dtype=np.uint64)
    signs = 1.0 - 2.0 * (np.bitwise_count(j & np.uint64(i)) & 1)
    return (V * signs) @ V.T


def factor_separable(op: np.ndarray, n: int, tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Split a dense product operator into 2×2 factors (global scale on factor 0).

    Each factor is the dominant operator-Schmidt component across the cut
    between site ``k`` and the rest; the returned residual is
    ``‖⊗factors - op‖ / ‖op‖``.
    """
    op = np.asarray(op, dtype=complex)
    norm = np.linalg.norm(op)
    if norm == 0:
        raise FactorizationError("cannot factor the zero operator")
    t = op.reshape((2,) * (2 * n))
    factors = []
    for k in range(n):
        moved = np.moveaxis(t, (k, n + k), (0, 1)).reshape(4, -1)
        u, s, _ = np.linalg.svd(moved, full_matrices=False)
        if s.size > 1 and s[1] > tol * s[0]:
            raise FactorizationError(f"operator is not a product across site {k} (ratio {s[1] / s[0]:.2e})")
        factors.append(u[:, 0].reshape(2, 2))
    kron = np.ones((1, 1), dtype=complex)
    for f in factors:
        kron = np.kron(kron, f)
    lam = np.vdot(kron, op) / np.vdot(kron, kron)
    factors[0] = factors[0] * lam
    out = np.array(factors)
    return out, float(np.linalg.norm(lam * kron - op) / norm)


def _snap_to_paulis(factors: np.ndarray, op: np.ndarray) -> tuple[np.ndarray, complex, str]:
    letters = []
    for f in factors:
        coeffs = [np.trace(MATRICES[p].conj().T @ f) / 2 for p in _PAULI_ORDER]
        letters.append(_PAULI_ORDER[int(np.argmax(np.abs(coeffs)))])
    kron = np.ones((1, 1), dtype=complex)
    for p in letters:
        kron = np.kron(kron, MATRICES[p])
    lam = complex(np.vdot(kron, op) / kron.shape[0])
    return np.array([MATRICES[p] for p in letters]), lam, "".join(letters)


def _phase_exponent(lam: complex, tol: float = 1e-10) -> int:
    for e, p in enumerate(PHASES):
        if abs(lam - p) <= tol:
            return e
    raise FactorizationError(f"global factor {lam} is not a fourth root of unity")


def projector_stabilizer_element(g: Graph, i: int, limit: int | None = None,
                                 tol: float = 1e-10) -> SeparableOperator:
    """Build ``σ_i`` from the projector sum, factor it, and check it against the
    symplectic stabilizer element (recorded relative phase must be ±1)."""
    n = g.n
    op = projector_sum(g, i, limit)
    raw, res_factor = factor_separable(op, n, tol)
    paulis, lam, letters = _snap_to_paulis(raw, op)
    e = _phase_exponent(lam, tol)
    factors = paulis.copy()
    factors[0] = factors[0] * PHASES[e]
    word = PauliWord.from_letters(letters, phase=e)
    reference = stabilizer_element(g, i)
    ref_dense = pauli_dense(reference, limit=DENSE_LIMIT)
    phase = complex(np.vdot(ref_dense, op) / ref_dense.shape[0])
    if min(abs(phase - 1), abs(phase + 1)) > tol:
        raise FactorizationError(f"projector element differs from {reference} by phase {phase}")
    kron = np.ones((1, 1), dtype=complex)
    for f in factors:
        kron = np.kron(kron, f)
    residual = max(res_factor,
                   float(np.linalg.norm(kron - op) / np.linalg.norm(op)),
                   float(np.linalg.norm(phase * ref_dense - op) / np.linalg.norm(op)))
    if residual > tol:
        raise FactorizationError(f"separable reconstruction residual {residual:.2e} exceeds {tol:.0e}")
    return SeparableOperator(factors, residual, phase, str(word))


def general_stabilizer_element(g: Graph, s: SloccOperator, i: int, limit: int | None = None,
                               tol: float = 1e-10) -> SeparableOperator:
    """Factors ``T_k = S_k P_k S_k^{-1}`` of ``S σ_i S^{-1}``; checked densely when ``n`` allows."""
    if s.n != g.n:
        raise DimensionError(f"operator on {s.n} qubits for a graph on {g.n} vertices")
    inv, _ = slocc_inverse(s)
    dense_ok = g.n <= (DENSE_LIMIT if limit is None else min(limit, DENSE_LIMIT))
    if dense_ok:
        base = projector_stabilizer_element(g, i, limit, tol)
        paulis, phase, label = base.factors, base.phase, base.label
    else:
        word = stabilizer_element(g, i)
        paulis = np.array([MATRICES[word.label(k)] for k in range(g.n)])
        paulis[0] = paulis[0] * word.phase_value
        phase, label = 1.0 + 0j, str(word)
    factors = np.einsum("kab,kbc,kcd->kad", s.locals, paulis, inv.locals)
    residual = None
    if dense_ok:
        sd = s.dense(limit=DENSE_LIMIT)
        sinv = inv.dense(limit=DENSE_LIMIT)
        target = sd @ projector_sum(g, i, limit) @ sinv
        kron = np.ones((1, 1), dtype=complex)
        for f in factors:
            kron = np.kron(kron, f)
        residual = float(np.linalg.norm(kron - target) / np.linalg.norm(target))
        if residual > tol:
            raise FactorizationError(f"conjugated factors miss the dense element by {residual:.2e}")
    return SeparableOperator(factors, residual, phase, label)


def verify_stabilizes(psi: StateVector, op: SeparableOperator) -> float:
    """``‖(⊗T_k) psi - psi‖ / ‖psi‖``."""
    if op.n != psi.n:
        raise DimensionError(f"operator on {op.n} qubits applied to a {psi.n}-qubit state")
    out = apply_factors(psi.amp, psi.n, list(op.factors))
    return float(np.linalg.norm(out - psi.amp) / np.linalg.norm(psi.amp))
