"""Staged decision procedure: is ``psi`` an SLOCC image ``S|g>`` of a graph state?

Pipeline (deterministic for a given seed):

1. **Zero-unknown checks** (:func:`reject_fast`).  Category II conditions hold for
   *every* ``S`` on an image, so they must hold at ``S = 1``; the support-∅
   condition contains no unknowns at all.  Each Category III group ``J`` also
   yields an ``S``-free invariant: with ``c_J[L] = psi^T Y_V L_J psi`` (plain
   Pauli letters) and target ``T_J`` (the group's ``coeff`` pattern),
   ``Σ_L c_J[L]^2 = det(S)^2 Σ_L T_J[L]^2`` because local conjugation acts on
   each letter triple by a complex orthogonal matrix.  All groups must agree
   on one nonzero ``det(S)^2``; a vanishing or inconsistent value is a witness.
2. **Numerical solve** of the Category III conditions, smallest supports
   first, by damped least squares from several starts.  The search runs on
   ``SL(2, C)`` per site (so ``Z̃^2 = X̃^2 = 1`` and ``{X̃, Z̃} = 0`` hold by
   construction) with ``det S`` pinned by the invariant above whenever it is
   available.
3. **Verification**: every candidate is rebuilt with :func:`reconstruct_local`
   and accepted only if :func:`verify_candidate` passes.  When no candidate
   verifies, larger supports are added (up to ``n``, where the conditions are
   complete) before reporting Inconclusive.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .conditions import (
    ENUMERATION_CAP, LETTER_ORDER, PAULI_LETTERS, ConditionGroup, GroupProfile, admissible_sizes,
    condition_for_letters, condition_value, derive_condition, enumerate_support, profiles,
)
from .errors import CapacityError, DimensionError, ReconstructionError, SingularOperatorError
from .graphs import Graph
from .pauli import X as X_MAT
from .pauli import Y as Y_MAT
from .pauli import Z as Z_MAT
from .pauli import bits_from_str, bits_to_str
from .state import SloccOperator, StateVector, apply_factors, build_graph_state, is_invertible, slocc_inverse, y_all

EQUIVALENT = "Equivalent"
NOT_EQUIVALENT = "NotEquivalent"
INCONCLUSIVE = "Inconclusive"

# sl(2, C) basis used for the per-site multiplicative updates.
_GENERATORS = np.array([Z_MAT, [[0, 1], [0, 0]], [[0, 0], [1, 0]]], dtype=complex)
_PAULI_STACK = np.array(PAULI_LETTERS)
# Pauli letter blocks: B[pair, letter] = (Y P_letter)[u, v] with pair = 2u + v.
_PAULI_BLOCK = np.stack([(Y_MAT @ p).reshape(4) for p in PAULI_LETTERS], axis=-1)
_CONVERGED = 1e-13  # absolute residual norm (state normalised) treated as an exact root


@dataclass
class SolveConfig:
    tol: float = 1e-9
    multistart: int = 32
    seed: int = 0
    max_support: int | None = None  # None: start with two smallest sizes and escalate
    max_iter: int = 100
    workers: int = 1
    cap: int = ENUMERATION_CAP

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.multistart < 1:
            raise ValueError("multistart must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


# -- moments -------------------------------------------------------------------------

class MomentTable:
    """Moment tensors ``W_J[(u_k, v_k)_k] = psi^T (Y_{V∖J} ⊗ ⊗_{k∈J} E_{u_k v_k}) psi``.

    Any condition on support ``J`` is the contraction of ``W_J`` with the blocks
    ``(Y L̃_k)[u, v]``; the tensors are computed once per support and cached.
    """

    def __init__(self, psi: StateVector):
        self.n = psi.n
        self.psi = psi
        self._amp = np.asarray(psi.amp)
        self._yall = y_all(self._amp, psi.n)
        self._cache: dict[tuple[int, ...], np.ndarray] = {}

    def tensor(self, J: Sequence[int]) -> np.ndarray:
        J = tuple(J)
        hit = self._cache.get(J)
        if hit is not None:
            return hit
        n, m = self.n, len(J)
        # Y on the complement of J equals Y_V followed by Y on J (Y^2 = 1).
        phi = apply_factors(self._yall, n, [Y_MAT if k in J else None for k in range(n)])
        rest = [k for k in range(n) if k not in J]
        order = list(J) + rest
        a = self._amp.reshape((2,) * n).transpose(order).reshape(1 << m, 1 << (n - m))
        b = phi.reshape((2,) * n).transpose(order).reshape(1 << m, 1 << (n - m))
        w = (a @ b.T).reshape((2,) * (2 * m))
        interleave = [ax for i in range(m) for ax in (i, m + i)]
        out = np.ascontiguousarray(w.transpose(interleave).reshape(4 ** m))
        self._cache[J] = out
        return out

    def stack(self, supports: Sequence[Sequence[int]]) -> np.ndarray:
        return np.array([self.tensor(J) for J in supports])

    def pauli_values(self, supports: Sequence[Sequence[int]]) -> np.ndarray:
        """``c_J[L] = psi^T Y_V L_J psi`` with plain letters, shape ``(G, 3**m)``."""
        if not supports:
            return np.zeros((0, 1), dtype=complex)
        sites = np.array(supports, dtype=np.int64).reshape(len(supports), -1)
        blocks = np.broadcast_to(_PAULI_BLOCK, (self.n, 4, 3))
        return _kernels.contract(self.stack(supports), blocks, sites)


# -- witnesses -------------------------------------------------------------------------

@dataclass
class Witness:
    """Machine-checkable reason why no SLOCC operator exists.

    kinds:
      ``condition_nonzero`` — a condition with no free unknowns (support-∅ with
      rhs Zero, or Category II at ``S = 1``) evaluates to ``value`` ≠ 0;
      ``tensor_vanishes`` — every plain-letter value of a Category III group is zero, so
      ``det S · T_J`` would have to vanish although ``T_J ≠ 0``;
      ``det_forced_zero`` — a Category III group's invariant vanishes, forcing ``det S = 0``;
      ``invariant_nonzero`` — a Category III group with zero target invariant has a nonzero one;
      ``invariant_mismatch`` — two Category III groups imply different ``det(S)^2``.
    """

    kind: str
    stage: str
    data: dict

    def to_record(self) -> dict:
        return {"kind": self.kind, "stage": self.stage, **self.data}


def _cx(z: complex) -> list[float]:
    return [float(np.real(z)) + 0.0, float(np.imag(z)) + 0.0]


def _from_cx(v) -> complex:
    return complex(v[0], v[1])


def _invariants(c: np.ndarray, targets: np.ndarray):
    """Per-group ``Σ c^2``, ``Σ |c|^2`` and ``Σ T^2``."""
    return np.sum(c * c, axis=1), np.sum(np.abs(c) ** 2, axis=1), np.sum(targets * targets, axis=1)


def _target(grp: ConditionGroup | GroupProfile) -> np.ndarray:
    return grp.target() if callable(grp.target) else grp.target


def _letters_of(index: int, m: int) -> str:
    out = []
    for _ in range(m):
        index, r = divmod(index, 3)
        out.append(LETTER_ORDER[r])
    return "".join(reversed(out))


def _witness_from_groups(moments: MomentTable, g: Graph, groups: Sequence[ConditionGroup | GroupProfile],
                         tol: float) -> Witness | None:
    scale = float(np.linalg.norm(moments.psi.amp)) ** 2
    zero_bound = tol * scale
    active = [grp for grp in groups if grp.category in ("II", "III")]
    # Category II (and support-∅ with rhs Zero) at S = 1: every letter pattern must vanish.
    for grp in active:
        if grp.category != "II":
            continue
        vals = moments.pauli_values([grp.support])[0]
        worst = int(np.argmax(np.abs(vals)))
        if abs(vals[worst]) > zero_bound:
            cond = condition_for_letters(g, grp.support, _letters_of(worst, grp.size))
            v = cond.alpha * vals[worst]
            return Witness("condition_nonzero", "zero_unknown", {
                "support": list(grp.support), "b": bits_to_str(cond.b, cond.n),
                "j": bits_to_str(cond.j, cond.n), "labels": cond.labels, "value": _cx(v),
                "bound": zero_bound})
    # Category III invariants.
    third = [grp for grp in active if grp.category == "III"]
    estimates = []
    for grp in third:
        c = moments.pauli_values([grp.support])
        qpsi, norm2, qg = (v[0] for v in _invariants(c, _target(grp)[None, :]))
        qpsi, norm2, qg = complex(qpsi), float(norm2), complex(qg)
        bound = tol * norm2 + zero_bound ** 2
        record = {"support": list(grp.support), "q_psi": _cx(qpsi), "q_target": _cx(qg),
                  "norm2": norm2, "bound": bound}
        if norm2 <= zero_bound ** 2:
            record["bound"] = zero_bound ** 2
            return Witness("tensor_vanishes", "invariant", record)
        if abs(qg) < 0.5:
            if abs(qpsi) > bound:
                return Witness("invariant_nonzero", "invariant", record)
            continue
        if abs(qpsi) <= bound:
            return Witness("det_forced_zero", "invariant", record)
        estimates.append((qpsi / qg, tol * norm2 / abs(qg) + zero_bound ** 2, record))
    for (e1, b1, r1), (e2, b2, r2) in itertools.combinations(estimates, 2):
        if abs(e1 - e2) > b1 + b2:
            return Witness("invariant_mismatch", "invariant", {
                "first": r1, "second": r2, "dets_sq": [_cx(e1), _cx(e2)], "bound": b1 + b2})
    return None


def reject_fast(psi: StateVector, g: Graph, tol: float = 1e-9, max_support: int | None = None,
                groups: Sequence[ConditionGroup] | None = None) -> Witness | None:
    """Checks needing no unknowns over the low-degree groups; returns a witness or None."""
    if psi.n != g.n:
        raise DimensionError(f"state has {psi.n} qubits, graph has {g.n} vertices")
    if groups is None:
        sizes = admissible_sizes(g.n)[:2] if max_support is None else \
            [m for m in admissible_sizes(g.n) if m <= max_support]
        groups = profiles(g, sizes)
    return _witness_from_groups(MomentTable(psi), g, groups, tol)


def check_witness(psi: StateVector, g: Graph, witness: Witness | dict, tol: float = 1e-9) -> bool:
    """Recompute a witness from scratch; True iff it still proves inequivalence."""
    rec = witness.to_record() if isinstance(witness, Witness) else dict(witness)
    kind = rec["kind"]
    moments = MomentTable(psi)
    scale = float(np.linalg.norm(psi.amp)) ** 2
    if kind == "condition_nonzero":
        cond = derive_condition(g, bits_from_str(rec["b"]), bits_from_str(rec["j"]))
        grp = enumerate_support(g, cond.support)
        if grp.category != "II" or list(cond.support) != rec["support"]:
            return False
        v = condition_value(psi, cond)
        return abs(v - _from_cx(rec["value"])) <= 1e-12 * scale and abs(v) > tol * scale

    def group_invariant(r):
        grp = enumerate_support(g, r["support"])
        if grp.category != "III":
            return None
        c = moments.pauli_values([grp.support])
        qpsi, norm2, qg = (v[0] for v in _invariants(c, grp.target()[None, :]))
        if abs(qpsi - _from_cx(r["q_psi"])) > 1e-12 * scale ** 2 or abs(qg - _from_cx(r["q_target"])) > 1e-12:
            return None
        return complex(qpsi), float(norm2), complex(qg)

    if kind == "tensor_vanishes":
        got = group_invariant(rec)
        return got is not None and got[1] <= (tol * scale) ** 2
    if kind in ("det_forced_zero", "invariant_nonzero"):
        got = group_invariant(rec)
        if got is None:
            return False
        qpsi, norm2, qg = got
        bound = tol * norm2 + (tol * scale) ** 2
        if kind == "det_forced_zero":
            return abs(qg) >= 0.5 and abs(qpsi) <= bound
        return abs(qg) < 0.5 and abs(qpsi) > bound
    if kind == "invariant_mismatch":
        first, second = group_invariant(rec["first"]), group_invariant(rec["second"])
        if first is None or second is None or abs(first[2]) < 0.5 or abs(second[2]) < 0.5:
            return False
        e1, e2 = first[0] / first[2], second[0] / second[2]
        bound = sum(tol * nm / abs(qg) + (tol * scale) ** 2 for _, nm, qg in (first, second))
        return abs(e1 - e2) > bound
    return False


# -- polynomial system -------------------------------------------------------------------

@dataclass
class SystemBlock:
    size: int
    sites: np.ndarray    # (G, m)
    moments: np.ndarray  # (G, 4**m)
    targets: np.ndarray  # (G, 3**m)


@dataclass
class PolynomialSystem:
    """Category III conditions as equations ``V_J(L̃) = det S · T_J``.

    ``V_J`` is multilinear of degree ``|J|`` in the per-site letter blocks; the
    unknowns are ``(Z̃_k, X̃_k)`` per site (``Ỹ_k = i X̃_k Z̃_k``) plus ``det S``.
    The moments belong to the normalised state.
    """

    n: int
    sizes: list[int]
    blocks: list[SystemBlock]
    groups: list
    dets_sq: complex | None = None
    dets_exact: complex | None = None
    norm: float = 1.0

    @property
    def n_equations(self) -> int:
        return sum(b.targets.size for b in self.blocks)

    @property
    def n_unknowns(self) -> int:
        return 6 * self.n + 1

    def degrees(self) -> list[int]:
        return sorted({b.size for b in self.blocks})

    def residual(self, ztilde: Sequence[np.ndarray], xtilde: Sequence[np.ndarray], dets: complex,
                 side: bool = True) -> np.ndarray:
        """Condition residuals ``V - det S · T``, then the side constraints
        ``Z̃^2 - 1``, ``X̃^2 - 1`` and ``{X̃, Z̃}`` per site when ``side`` is set."""
        zt = np.asarray(ztilde, dtype=complex)
        xt = np.asarray(xtilde, dtype=complex)
        yt = 1j * np.einsum("kab,kbc->kac", xt, zt)
        letters = np.stack([xt, yt, zt], axis=1)
        B = np.einsum("ab,klbc->kacl", Y_MAT, letters).reshape(self.n, 4, 3)
        parts = [(_kernels.contract(b.moments, B, b.sites) - dets * b.targets).reshape(-1) for b in self.blocks]
        if side:
            eye = np.eye(2)
            for k in range(self.n):
                parts.append((zt[k] @ zt[k] - eye).reshape(-1))
                parts.append((xt[k] @ xt[k] - eye).reshape(-1))
                parts.append((xt[k] @ zt[k] + zt[k] @ xt[k]).reshape(-1))
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)

    def summary(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "groups": len(self.groups),
            "equations": self.n_equations,
            "unknowns": self.n_unknowns,
            "degrees": self.degrees(),
            "dets_sq_estimate": None if self.dets_sq is None else _cx(self.dets_sq),
        }


def _dets_estimate(moments: MomentTable, groups: Sequence[ConditionGroup | GroupProfile]):
    """Mean ``det(S)^2`` over groups with nonzero target invariant; exact ``det S``
    when a support-∅ group carries rhs DetS."""
    estimates, exact = [], None
    for grp in groups:
        if grp.category != "III":
            continue
        c = moments.pauli_values([grp.support])
        t = _target(grp)
        if grp.size == 0:
            exact = complex(c[0, 0] / t[0])
        qg = complex(np.sum(t * t))
        if abs(qg) >= 0.5:
            estimates.append(complex(np.sum(c[0] * c[0])) / qg)
    return (complex(np.mean(estimates)) if estimates else None), exact


def assemble_system(psi: StateVector, g: Graph, groups: Sequence[ConditionGroup | GroupProfile],
                    moments: MomentTable | None = None) -> PolynomialSystem:
    if psi.n != g.n:
        raise DimensionError(f"state has {psi.n} qubits, graph has {g.n} vertices")
    norm = float(np.linalg.norm(psi.amp))
    if moments is None:
        moments = MomentTable(StateVector(psi.n, psi.amp / norm))
    third = [grp for grp in groups if grp.category == "III"]
    blocks = []
    for m in sorted({grp.size for grp in third}):
        sel = [grp for grp in third if grp.size == m]
        sites = np.array([grp.support for grp in sel], dtype=np.int64).reshape(len(sel), m)
        blocks.append(SystemBlock(m, sites, moments.stack([grp.support for grp in sel]),
                                  np.array([_target(grp) for grp in sel])))
    sq, exact = _dets_estimate(moments, third)
    sizes = sorted({grp.size for grp in groups})
    return PolynomialSystem(g.n, sizes, blocks, list(groups), sq, exact, norm)


# -- chart evaluation and damped least squares ------------------------------------------

def _letter_blocks(S: np.ndarray):
    """Blocks ``(Y L̃)`` and their derivatives along ``S ← exp(ε G_q) S`` (det S_k = 1)."""
    inv = np.empty_like(S)
    inv[:, 0, 0], inv[:, 1, 1] = S[:, 1, 1], S[:, 0, 0]
    inv[:, 0, 1], inv[:, 1, 0] = -S[:, 0, 1], -S[:, 1, 0]
    pt = np.einsum("kab,lbc,kcd->klad", S, _PAULI_STACK, inv)  # (n, 3, 2, 2)
    n = S.shape[0]
    B = np.einsum("ab,klbc->kacl", Y_MAT, pt).reshape(n, 4, 3)
    comm = (np.einsum("qab,klbc->kqlac", _GENERATORS, pt) - np.einsum("klab,qbc->kqlac", pt, _GENERATORS))
    dB = np.einsum("ab,kqlbc->kqacl", Y_MAT, comm).reshape(n, 3, 4, 3)
    return B, dB


def _chart_residual(system: PolynomialSystem, S: np.ndarray, d: complex, free_d: bool, jac: bool):
    B, dB = _letter_blocks(S) if jac else (_letter_blocks(S)[0], None)
    n = system.n
    npar = 3 * n + (1 if free_d else 0)
    rs, Js = [], []
    for blk in system.blocks:
        G, m = blk.sites.shape
        nl = 3 ** m
        if jac:
            V, D = _kernels.contract_jac(blk.moments, B, dB, blk.sites)
        else:
            V = _kernels.contract(blk.moments, B, blk.sites)
        rs.append((V - d * blk.targets).reshape(-1))
        if jac:
            Jb = np.zeros((G, nl, npar), dtype=complex)
            if m:
                gi = np.arange(G)[:, None, None, None]
                li = np.arange(nl)[None, None, None, :]
                cols = (3 * blk.sites[:, :, None] + np.arange(3)[None, None, :])[:, :, :, None]
                Jb[gi, li, cols] = D
            if free_d:
                Jb[:, :, -1] = -blk.targets
            Js.append(Jb.reshape(G * nl, npar))
    r = np.concatenate(rs)
    return (r, np.vstack(Js)) if jac else (r, None)


def _retract(S: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``S_k ← exp(Σ_q w_q G_q) S_k`` per site, renormalised to ``det = 1``.

    For traceless ``A``, ``exp(A) = cosh(μ) 1 + sinh(μ)/μ A`` with ``μ^2 = -det A``.
    """
    w = w.reshape(-1, 3)
    a = np.empty((w.shape[0], 2, 2), dtype=complex)
    a[:, 0, 0], a[:, 0, 1], a[:, 1, 0], a[:, 1, 1] = w[:, 0], w[:, 1], w[:, 2], -w[:, 0]
    mu = np.sqrt(w[:, 0] ** 2 + w[:, 1] * w[:, 2])
    small = np.abs(mu) < 1e-8
    safe = np.where(small, 1.0, mu)
    sinhc = np.where(small, 1.0 + mu * mu / 6.0, np.sinh(safe) / safe)
    e = np.cosh(mu)[:, None, None] * np.eye(2) + sinhc[:, None, None] * a
    out = np.einsum("kab,kbc->kac", e, S)
    det = out[:, 0, 0] * out[:, 1, 1] - out[:, 0, 1] * out[:, 1, 0]
    return out / np.sqrt(det)[:, None, None]


@dataclass
class StartResult:
    index: int
    S: np.ndarray
    dets: complex
    cost: float
    iterations: int


def _levenberg_marquardt(system: PolynomialSystem, S: np.ndarray, d: complex, free_d: bool,
                         max_iter: int) -> tuple[np.ndarray, complex, float, int]:
    r, Jm = _chart_residual(system, S, d, free_d, True)
    cost = float(np.vdot(r, r).real)
    lam = 1e-3
    it = 0
    for it in range(1, max_iter + 1):
        if cost < _CONVERGED ** 2:
            break
        A = Jm.conj().T @ Jm
        grad = Jm.conj().T @ r
        damp = np.diag(A).real + 1e-12
        while True:
            try:
                step = np.linalg.solve(A + lam * np.diag(damp), -grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                S_new = _retract(S, step[:3 * system.n])
                d_new = d + step[-1] if free_d else d
                r_new, _ = _chart_residual(system, S_new, d_new, free_d, False)
                c_new = float(np.vdot(r_new, r_new).real)
                if np.isfinite(c_new) and c_new < cost:
                    S, d = S_new, d_new
                    lam = max(lam / 3.0, 1e-12)
                    break
            lam *= 4.0
            if lam > 1e12:
                return S, d, cost, it
        old = cost
        r, Jm = _chart_residual(system, S, d, free_d, True)
        cost = float(np.vdot(r, r).real)
        if old - cost <= 1e-16 * old:
            break
    return S, d, cost, it


def _random_sl2(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2))
    det = a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
    return a / np.sqrt(det)[:, None, None]


# -- reconstruction and verification ---------------------------------------------------

def reconstruct_local(ztilde: np.ndarray, xtilde: np.ndarray, site: int | None = None) -> np.ndarray:
    """Rebuild ``S_k = [v+ | X̃ v+]`` from transformed letters (``v+``: +1 eigenvector of Z̃)."""
    zt = np.asarray(ztilde, dtype=complex)
    xt = np.asarray(xtilde, dtype=complex)
    if zt.shape != (2, 2) or xt.shape != (2, 2) or not (np.all(np.isfinite(zt)) and np.all(np.isfinite(xt))):
        raise ReconstructionError("transformed letters must be finite 2x2 matrices", site)
    z0 = zt - 0.5 * np.trace(zt) * np.eye(2)
    mu = np.sqrt(-(z0[0, 0] * z0[1, 1] - z0[0, 1] * z0[1, 0]))
    scale = max(np.linalg.norm(zt), 1e-300)
    if abs(mu) <= 1e-8 * scale:
        raise ReconstructionError("transformed Z block is defective (degenerate eigenvalues)", site)
    vals, vecs = np.linalg.eig(z0 / mu)
    v = vecs[:, int(np.argmin(np.abs(vals - 1.0)))]
    s = np.column_stack([v, xt @ v])
    if not is_invertible(s):
        raise ReconstructionError("transformed X block does not exchange the Z eigenvectors", site)
    return s


def _verify_details(psi: StateVector, gstate: StateVector, s: SloccOperator) -> tuple[float, complex]:
    inv, _ = slocc_inverse(s)
    phi = apply_factors(psi.amp, psi.n, list(inv.locals))
    gv = gstate.amp
    c = np.vdot(gv, phi) / np.vdot(gv, gv)
    denom = np.linalg.norm(phi)
    if denom == 0:
        return float("inf"), 0j
    return float(np.linalg.norm(phi - c * gv) / denom), complex(c)


def verify_candidate(psi: StateVector, g: Graph, s: SloccOperator, tol: float = 1e-9) -> tuple[bool, float]:
    """``r = min_c ‖S^{-1}psi - c g‖ / ‖S^{-1}psi‖``; accepted when ``r ≤ tol``."""
    if psi.n != g.n or s.n != g.n:
        raise DimensionError("state, graph and operator sizes differ")
    r, _ = _verify_details(psi, build_graph_state(g), s)
    return r <= tol, r


# -- verdicts --------------------------------------------------------------------------

@dataclass
class Verdict:
    outcome: str
    stage: str
    n: int
    operator: SloccOperator | None = None
    dets: complex | None = None
    verification_residual: float | None = None
    condition_residual: float | None = None
    witness: Witness | None = None
    summary: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return {EQUIVALENT: 0, NOT_EQUIVALENT: 1, INCONCLUSIVE: 2}[self.outcome]

    def certificate(self) -> dict:
        if self.outcome == EQUIVALENT:
            return {
                "locals": [[[_cx(v) for v in row] for row in m] for m in self.operator.locals],
                "detS": _cx(self.dets),
                "verification_residual": self.verification_residual,
                "max_condition_residual": self.condition_residual,
            }
        if self.outcome == NOT_EQUIVALENT:
            return {"witness": self.witness.to_record()}
        return {"summary": self.summary}

    def to_record(self) -> dict:
        return {"outcome": self.outcome, "stage": self.stage, "n": self.n, "certificate": self.certificate(),
                "search": self.summary if self.outcome != INCONCLUSIVE else None}


def _condition_residual(system: PolynomialSystem, s: SloccOperator, dets: complex, norm: float) -> float:
    """Max ``|V - det S · T|`` over the assembled conditions, relative to ``‖psi‖^2``."""
    letters = []
    for m in s.locals:
        inv = np.linalg.inv(m)
        letters.append([m @ p @ inv for p in PAULI_LETTERS])
    B = np.einsum("ab,klbc->kacl", Y_MAT, np.array(letters)).reshape(system.n, 4, 3)
    worst = 0.0
    for blk in system.blocks:
        V = _kernels.contract(blk.moments, B, blk.sites) * norm ** 2
        worst = max(worst, float(np.max(np.abs(V - dets * blk.targets))))
    return worst / norm ** 2


# -- the driver ------------------------------------------------------------------------

def _levels(n: int, cfg: SolveConfig) -> list[list[int]]:
    sizes = admissible_sizes(n)
    if cfg.max_support is not None:
        chosen = [m for m in sizes if m <= cfg.max_support]
        if not chosen:
            raise ValueError(f"max_support {cfg.max_support} admits no support size for n={n}")
        return [chosen]
    first = sizes[:2]
    levels = [first]
    for m in sizes[2:]:
        levels.append(levels[-1] + [m])
    return levels


def _fits_cap(n: int, sizes: Sequence[int], cap: int) -> bool:
    return sum(math.comb(n, m) * 3 ** m for m in set(sizes) | {0}) <= cap


def _run_start(system: PolynomialSystem, S0: np.ndarray, d0: complex, free_d: bool, index: int,
               max_iter: int) -> StartResult:
    S, d, cost, it = _levenberg_marquardt(system, S0, d0, free_d, max_iter)
    return StartResult(index, S, d, cost, it)


def _candidate(result: StartResult) -> SloccOperator | None:
    locals_ = []
    for k, s in enumerate(result.S):
        if not np.all(np.isfinite(s)):
            return None
        inv = np.linalg.inv(s)
        try:
            locals_.append(reconstruct_local(s @ Z_MAT @ inv, s @ X_MAT @ inv, site=k))
        except ReconstructionError:
            return None
    try:
        return SloccOperator(np.array(locals_))
    except (SingularOperatorError, ValueError):
        return None


def solve(psi: StateVector, g: Graph, cfg: SolveConfig | None = None) -> Verdict:
    cfg = cfg or SolveConfig()
    if psi.n != g.n:
        raise DimensionError(f"state has {psi.n} qubits, graph has {g.n} vertices")
    if not psi.is_finite():
        raise ValueError("state has non-finite amplitudes")
    norm = psi.norm
    if norm == 0:
        raise ValueError("state is the zero vector")
    n = g.n
    unit = StateVector(n, psi.amp / norm)
    moments = MomentTable(unit)
    gstate = build_graph_state(g)
    levels = _levels(n, cfg)
    if not _fits_cap(n, levels[0], cfg.cap):
        raise CapacityError(f"support sizes {levels[0]} exceed the enumeration cap {cfg.cap}")

    history = []
    warm: list[StartResult] = []
    best: StartResult | None = None
    system = None
    for level, sizes in enumerate(levels):
        if not _fits_cap(n, sizes, cfg.cap):
            break
        groups = profiles(g, sizes, cap=cfg.cap)
        witness = _witness_from_groups(moments, g, groups, cfg.tol)
        if witness is not None:
            return Verdict(NOT_EQUIVALENT, witness.stage, n, witness=witness,
                           summary={"levels": history + [{"sizes": sizes}]})
        system = assemble_system(unit, g, groups, moments)
        if not system.blocks:
            history.append({"sizes": sizes, "equations": 0})
            continue
        if system.dets_exact is not None:
            d_fixed, free_d, signs = system.dets_exact, False, (1,)
        elif system.dets_sq is not None:
            d_fixed, free_d, signs = complex(np.sqrt(system.dets_sq)), False, (1, -1)
        else:
            d_fixed, free_d, signs = 1.0 + 0j, True, (1, -1)
        seeds = np.random.SeedSequence(cfg.seed, spawn_key=(level,)).spawn(cfg.multistart)
        starts = []
        for idx in range(cfg.multistart):
            if level == 0 and idx == 0:
                S0 = np.tile(np.eye(2, dtype=complex), (n, 1, 1))
            elif idx < len(warm):
                S0 = warm[idx].S
            else:
                S0 = _random_sl2(np.random.default_rng(seeds[idx]), n)
            starts.append((S0, signs[idx % len(signs)] * d_fixed))
        converged: list[StartResult] = []
        found = None
        batch = cfg.workers
        pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
        try:
            for lo in range(0, len(starts), batch):
                chunk = list(range(lo, min(lo + batch, len(starts))))
                if pool is None:
                    results = [_run_start(system, *starts[i], free_d, i, cfg.max_iter) for i in chunk]
                else:
                    results = list(pool.map(
                        lambda i: _run_start(system, *starts[i], free_d, i, cfg.max_iter), chunk))
                for res in results:
                    if best is None or res.cost < best.cost:
                        best = res
                    cand = _candidate(res)
                    if cand is None:
                        continue
                    r, c = _verify_details(psi, gstate, cand)
                    if r <= cfg.tol:
                        found = (res, cand, r, c)
                        break
                    if res.cost < _CONVERGED ** 2:
                        converged.append(res)
                if found:
                    break
        finally:
            if pool is not None:
                pool.shutdown()
        history.append({"sizes": sizes, "equations": system.n_equations,
                        "starts": (found[0].index + 1) if found else len(starts),
                        "best_cost": None if best is None else best.cost})
        if found:
            res, cand, r, c = found
            locals_ = np.array(cand.locals)
            locals_[0] = locals_[0] * c
            op = SloccOperator(locals_)
            dets = op.det
            return Verdict(EQUIVALENT, "verify", n, operator=op, dets=dets, verification_residual=r,
                           condition_residual=_condition_residual(system, op, dets, norm),
                           summary={"levels": history, "start": res.index})
        warm = converged[:2]
    summary = {"levels": history, "best_cost": None if best is None else best.cost}
    if system is not None:
        summary["system"] = system.summary()
    return Verdict(INCONCLUSIVE, "solve", n, summary=summary)


def verify_certificate(psi: StateVector, g: Graph, record: dict, tol: float = 1e-9) -> Verdict:
    """Re-check an emitted verdict record without searching; returns the reproduced verdict."""
    outcome = record.get("outcome")
    cert = record.get("certificate") or {}
    if outcome == EQUIVALENT:
        locals_ = np.array([[[_from_cx(v) for v in row] for row in m] for m in cert["locals"]])
        op = SloccOperator(locals_)
        ok, r = verify_candidate(psi, g, op, tol)
        if ok:
            return Verdict(EQUIVALENT, "verify", g.n, operator=op, dets=op.det, verification_residual=r)
        return Verdict(INCONCLUSIVE, "verify", g.n, summary={"rejected_certificate": True, "residual": r})
    if outcome == NOT_EQUIVALENT:
        wrec = cert["witness"]
        if check_witness(psi, g, wrec, tol):
            data = {k: v for k, v in wrec.items() if k not in ("kind", "stage")}
            return Verdict(NOT_EQUIVALENT, wrec["stage"], g.n, witness=Witness(wrec["kind"], wrec["stage"], data))
        return Verdict(INCONCLUSIVE, "verify", g.n, summary={"rejected_witness": True})
    return Verdict(INCONCLUSIVE, "verify", g.n, summary={"nothing_to_check": True})
