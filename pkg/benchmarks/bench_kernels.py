"""Time the numba kernels against their numpy twins.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--solve]

Each kernel is warmed up once per backend (so numba compilation is excluded),
then timed with ``timeit``; outputs of the two backends are compared before any
timing is reported.  ``--solve`` additionally times an end-to-end decision on a
batch of random SLOCC images with each backend.
"""

from __future__ import annotations

import argparse
import itertools
import sys
import time
import timeit

import numpy as np

from sloccgraph import _kernels
from sloccgraph.graphs import random_connected_graph
from sloccgraph.solver import SolveConfig, solve
from sloccgraph.state import apply_slocc, build_graph_state, random_slocc


def _cases(rng: np.random.Generator):
    n_state = 14
    amp = rng.standard_normal(1 << n_state) + 1j * rng.standard_normal(1 << n_state)
    m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    edges = np.array([(a, b) for a in range(n_state) for b in range(a + 1, n_state) if rng.random() < 0.4])

    n, size = 8, 4
    sites = np.array(list(itertools.combinations(range(n), size)), dtype=np.int64)
    W = rng.standard_normal((len(sites), 4 ** size)) + 1j * rng.standard_normal((len(sites), 4 ** size))
    B = rng.standard_normal((n, 4, 3)) + 1j * rng.standard_normal((n, 4, 3))
    dB = rng.standard_normal((n, 3, 4, 3)) + 1j * rng.standard_normal((n, 3, 4, 3))
    return [
        (f"graph_signs n={n_state}", _kernels.graph_signs, (n_state, edges)),
        (f"apply_site n={n_state}", _kernels.apply_site, (amp, n_state, n_state // 2, m)),
        (f"contract {len(sites)}x|J|={size}", _kernels.contract, (W, B, sites)),
        (f"contract_jac {len(sites)}x|J|={size}", _kernels.contract_jac, (W, B, dB, sites)),
    ]


def _max_diff(a, b) -> float:
    if isinstance(a, tuple):
        return max(_max_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def bench_kernels(repeat: int) -> None:
    backends = _kernels.available_backends()
    if "numba" not in backends:
        print("numba is not installed; only the numpy backend is available", file=sys.stderr)
    rng = np.random.default_rng(2024)
    print(f"{'kernel':<28}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}{'max|diff|':>12}")
    for name, fn, args in _cases(rng):
        times, outs = {}, {}
        for backend in backends:
            previous = _kernels.use_backend(backend)
            try:
                outs[backend] = fn(*args)  # warm-up / compile
                number = 3
                times[backend] = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number
            finally:
                _kernels.use_backend(previous)
        diff = _max_diff(outs["numpy"], outs["numba"]) if "numba" in outs else 0.0
        speed = times["numpy"] / times["numba"] if "numba" in times else 1.0
        print(f"{name:<28}" + "".join(f"{times[b] * 1e3:>12.3f}ms" for b in backends)
              + f"{speed:>9.1f}x{diff:>12.2e}")


def bench_solve(count: int) -> None:
    for backend in _kernels.available_backends():
        previous = _kernels.use_backend(backend)
        try:
            rng = np.random.default_rng(7)
            cases = []
            for _ in range(count):
                n = int(rng.integers(3, 9))
                g = random_connected_graph(rng, n)
                cases.append((apply_slocc(random_slocc(rng, n), build_graph_state(g)), g))
            solve(*cases[0])  # warm-up
            t0 = time.perf_counter()
            outcomes = [solve(psi, g, SolveConfig(seed=i)).outcome for i, (psi, g) in enumerate(cases)]
            dt = time.perf_counter() - t0
        finally:
            _kernels.use_backend(previous)
        print(f"solve x{count} [{backend}]: {dt:.2f}s, {outcomes.count('Equivalent')} Equivalent")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--solve", type=int, nargs="?", const=20, default=0,
                        help="also time COUNT end-to-end decisions per backend (default 20)")
    args = parser.parse_args()
    bench_kernels(args.repeat)
    if args.solve:
        bench_solve(args.solve)


if __name__ == "__main__":
    main()
