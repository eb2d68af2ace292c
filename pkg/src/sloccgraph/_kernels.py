"""Hot loops, each with a numba implementation and a pure-numpy twin.

The numba path is used when numba imports and ``SLOCCGRAPH_NO_NUMBA`` is unset
(or "0"); otherwise every kernel falls back to vectorised numpy.  Both paths
produce the same numbers up to floating-point summation order, which the test
suite checks.  :func:`use_backend` switches at run time (benchmarks, tests).

Layouts shared by both paths:

* state vectors: length ``2**n``, qubit 0 is the most significant index bit;
* moment tensors: ``(G, 4**m)``, one row per support of size ``m``; the pair
  index of site ``i`` (row bit ``u``, column bit ``v`` → ``2u + v``) is digit ``i``
  in base 4, most significant first;
* letter blocks: ``B[k, pair, letter]`` with letters X, Y, Z in that order;
  contracted values are indexed by letters in base 3, first site most significant.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

NUMBA_ENV = "SLOCCGRAPH_NO_NUMBA"


def _numba_requested() -> bool:
    return HAVE_NUMBA and os.environ.get(NUMBA_ENV, "0").lower() in ("", "0", "false", "no")


# ----------------------------------------------------------------------------
# numpy implementations
# ----------------------------------------------------------------------------

def _np_graph_signs(n: int, edges: np.ndarray) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    parity = np.zeros(1 << n, dtype=np.int64)
    for a, b in edges:
        parity ^= ((idx >> (n - 1 - a)) & 1) & ((idx >> (n - 1 - b)) & 1)
    return 1.0 - 2.0 * parity


def _np_apply_site(amp: np.ndarray, n: int, k: int, m: np.ndarray) -> np.ndarray:
    t = amp.reshape(1 << k, 2, 1 << (n - k - 1))
    return np.einsum("ab,ibj->iaj", m, t).reshape(-1)


def _np_contract(W: np.ndarray, B: np.ndarray, sites: np.ndarray) -> np.ndarray:
    G, m = sites.shape
    T = W.reshape((G,) + (4,) * m)
    for i in range(m):
        T = np.einsum("Ga...,GaL->G...L", T, B[sites[:, i]])
    return T.reshape(G, 3 ** m)


def _np_contract_jac(W: np.ndarray, B: np.ndarray, dB: np.ndarray, sites: np.ndarray):
    G, m = sites.shape
    nq = dB.shape[1]
    V = _np_contract(W, B, sites)
    T0 = W.reshape((G,) + (4,) * m)
    D = np.empty((G, m, nq, 3 ** m), dtype=complex)
    for i in range(m):
        T = np.moveaxis(T0, 1 + i, 1)
        for j in range(m):
            if j != i:
                T = np.einsum("Gba...,GaL->Gb...L", T, B[sites[:, j]])
        U = np.einsum("Ga...,GqaL->GqL...", T, dB[sites[:, i]])
        D[:, i] = np.moveaxis(U, 2, 2 + i).reshape(G, nq, 3 ** m)
    return V, D


# ----------------------------------------------------------------------------
# numba implementations
# ----------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_graph_signs(n, edges):
        size = 1 << n
        out = np.empty(size, dtype=np.float64)
        for idx in range(size):
            parity = 0
            for e in range(edges.shape[0]):
                a = edges[e, 0]
                b = edges[e, 1]
                parity ^= ((idx >> (n - 1 - a)) & 1) & ((idx >> (n - 1 - b)) & 1)
            out[idx] = 1.0 - 2.0 * parity
        return out

    @njit(cache=True)
    def _nb_apply_site(amp, n, k, m):
        out = np.empty_like(amp)
        stride = 1 << (n - k - 1)
        block = stride << 1
        m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
        for base in range(0, amp.shape[0], block):
            for off in range(stride):
                i0 = base + off
                i1 = i0 + stride
                a0 = amp[i0]
                a1 = amp[i1]
                out[i0] = m00 * a0 + m01 * a1
                out[i1] = m10 * a0 + m11 * a1
        return out

    @njit(cache=True)
    def _nb_chain(w, mats, radix, m):
        # Contract the pair digits of w (site 0 most significant) one site at a
        # time with mats[i][pair, r] (r < radix[i]); output digits in site order.
        cur = w.copy()
        kept = 1
        rest = 1
        for _ in range(m):
            rest *= 4
        for i in range(m):
            rest //= 4
            ri = radix[i]
            new = np.zeros(rest * kept * ri, dtype=np.complex128)
            for p in range(4):
                for pr in range(rest):
                    base = (p * rest + pr) * kept
                    for lt in range(kept):
                        v = cur[base + lt]
                        if v == 0:
                            continue
                        o = (pr * kept + lt) * ri
                        for r in range(ri):
                            new[o + r] += v * mats[i, p, r]
            cur = new
            kept *= ri
        return cur

    @njit(cache=True)
    def _nb_contract(W, B, sites):
        G, m = sites.shape
        nl = 1
        for _ in range(m):
            nl *= 3
        out = np.empty((G, nl), dtype=np.complex128)
        mats = np.zeros((m, 4, 4), dtype=np.complex128)
        radix = np.full(m, 3, dtype=np.int64)
        for g in range(G):
            for i in range(m):
                mats[i, :, :3] = B[sites[g, i]]
            out[g] = _nb_chain(W[g], mats, radix, m)
        return out

    @njit(cache=True)
    def _nb_contract_jac(W, B, dB, sites):
        G, m = sites.shape
        nq = dB.shape[1]
        nl = 1
        for _ in range(m):
            nl *= 3
        V = np.empty((G, nl), dtype=np.complex128)
        D = np.zeros((G, m, nq, nl), dtype=np.complex128)
        mats = np.zeros((m, 4, 4), dtype=np.complex128)
        radix = np.full(m, 3, dtype=np.int64)
        eye = np.eye(4, dtype=np.complex128)
        for g in range(G):
            for i in range(m):
                mats[i, :, :3] = B[sites[g, i]]
            V[g] = _nb_chain(W[g], mats, radix, m)
            for i in range(m):
                saved = mats[i].copy()
                mats[i] = eye
                radix[i] = 4
                env = _nb_chain(W[g], mats, radix, m)
                mats[i] = saved
                radix[i] = 3
                lo = 1
                for _ in range(m - i - 1):
                    lo *= 3
                k = sites[g, i]
                for L in range(nl):
                    hi = L // (3 * lo)
                    li = (L // lo) % 3
                    low = L % lo
                    for q in range(nq):
                        acc = 0j
                        for p in range(4):
                            acc += env[(hi * 4 + p) * lo + low] * dB[k, q, p, li]
                        D[g, i, q, L] = acc
        return V, D


# ----------------------------------------------------------------------------
# dispatch
# ----------------------------------------------------------------------------

_IMPLS = {
    "numpy": {
        "graph_signs": _np_graph_signs,
        "apply_site": _np_apply_site,
        "contract": _np_contract,
        "contract_jac": _np_contract_jac,
    }
}
if HAVE_NUMBA:
    _IMPLS["numba"] = {
        "graph_signs": _nb_graph_signs,
        "apply_site": _nb_apply_site,
        "contract": _nb_contract,
        "contract_jac": _nb_contract_jac,
    }

BACKEND = "numba" if _numba_requested() else "numpy"


def use_backend(name: str) -> str:
    """Select "numba" or "numpy"; returns the previously active backend."""
    global BACKEND
    if name not in _IMPLS:
        raise ValueError(f"backend {name!r} unavailable (have {sorted(_IMPLS)})")
    previous, BACKEND = BACKEND, name
    return previous


def available_backends() -> list[str]:
    return sorted(_IMPLS)


def graph_signs(n: int, edges: np.ndarray) -> np.ndarray:
    """±1 amplitudes pattern ``(-1)^{Σ_edges x_a x_b}`` over all basis indices."""
    edges = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2)
    return _IMPLS[BACKEND]["graph_signs"](n, edges)


def apply_site(amp: np.ndarray, n: int, k: int, m: np.ndarray) -> np.ndarray:
    """Apply a 2×2 matrix to qubit ``k``; returns a new vector."""
    return _IMPLS[BACKEND]["apply_site"](
        np.ascontiguousarray(amp, dtype=np.complex128), n, k, np.ascontiguousarray(m, dtype=np.complex128))


def contract(W: np.ndarray, B: np.ndarray, sites: np.ndarray) -> np.ndarray:
    """Values ``Σ_pairs W[g] Π_i B[sites[g,i], pair_i, letter_i]`` → ``(G, 3**m)``."""
    return _IMPLS[BACKEND]["contract"](
        np.ascontiguousarray(W, dtype=np.complex128), np.ascontiguousarray(B, dtype=np.complex128),
        np.ascontiguousarray(sites, dtype=np.int64))


def contract_jac(W: np.ndarray, B: np.ndarray, dB: np.ndarray, sites: np.ndarray):
    """:func:`contract` plus its derivatives ``D[g, i, q, L]`` w.r.t. direction ``q`` of site ``i``."""
    return _IMPLS[BACKEND]["contract_jac"](
        np.ascontiguousarray(W, dtype=np.complex128), np.ascontiguousarray(B, dtype=np.complex128),
        np.ascontiguousarray(dB, dtype=np.complex128), np.ascontiguousarray(sites, dtype=np.int64))
