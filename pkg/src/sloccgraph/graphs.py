"""Simple undirected graphs, their stabilizer generators, and local complementation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import GraphParseError
from .pauli import MAX_SYMBOLIC_QUBITS, PauliWord, product_phase, sites_of


@dataclass(frozen=True)
class Graph:
    """Adjacency rows as bitsets: bit ``m`` of ``adj[k]`` is set iff {k, m} is an edge."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        if self.n > MAX_SYMBOLIC_QUBITS:
            raise ValueError(f"at most {MAX_SYMBOLIC_QUBITS} vertices are supported")
        if len(self.adj) != self.n:
            raise ValueError("adjacency has the wrong number of rows")
        object.__setattr__(self, "adj", tuple(int(r) for r in self.adj))
        full = (1 << self.n) - 1
        for k, row in enumerate(self.adj):
            if row & ~full or row < 0:
                raise ValueError(f"row {k} references a vertex outside 0..{self.n - 1}")
            if (row >> k) & 1:
                raise ValueError(f"self-loop at vertex {k}")
            for m in sites_of(row):
                if not (self.adj[m] >> k) & 1:
                    raise ValueError(f"adjacency is not symmetric at ({k}, {m})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for a, b in edges:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return cls(n, tuple(adj))

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in sites_of(self.adj[a]) if a < b]

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return sites_of(self.adj[v])

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return self.adj[v].bit_count()

    def is_connected(self) -> bool:
        seen, frontier = 1, 1
        while frontier:
            nxt = 0
            for v in sites_of(frontier):
                nxt |= self.adj[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.uint8)
        for u, v in self.edges():
            a[u, v] = a[v, u] = 1
        return a

    def apply_adjacency(self, b: int) -> int:
        """GF(2) product ``adj · b`` as a bitset."""
        out = 0
        for k in sites_of(b):
            out ^= self.adj[k]
        return out

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} outside 0..{self.n - 1}")

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.edges()]})

    def to_graph6(self) -> str:
        return emit_graph6(self)


# -- named families ----------------------------------------------------------

def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(k, k + 1) for k in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least three vertices")
    return Graph.from_edges(n, [(k, (k + 1) % n) for k in range(n)])


def star_graph(n: int, center: int = 0) -> Graph:
    return Graph.from_edges(n, [(center, k) for k in range(n) if k != center])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(a, b) for a in range(n) for b in range(a + 1, n)])


def empty_graph(n: int) -> Graph:
    return Graph(n, (0,) * n)


def random_connected_graph(rng: np.random.Generator, n: int) -> Graph:
    """Erdős–Rényi graph with a random edge density, resampled until connected."""
    while True:
        p = rng.uniform(0.3, 0.8)
        edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
        g = Graph.from_edges(n, edges)
        if g.is_connected():
            return g


# -- parsing -------------------------------------------------------------------

def parse_graph(text: str) -> Graph:
    """Parse the JSON edge-list schema or a graph6 string."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return _parse_json(stripped)
    return parse_graph6(stripped)


def _parse_json(text: str) -> Graph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise GraphParseError("graph JSON needs keys 'n' and 'edges'", 0)
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= MAX_SYMBOLIC_QUBITS:
        raise GraphParseError(f"'n' must be an integer in 1..{MAX_SYMBOLIC_QUBITS}", 0)
    if not isinstance(obj["edges"], list):
        raise GraphParseError("'edges' must be a list", 0)
    seen: set[tuple[int, int]] = set()
    for idx, edge in enumerate(obj["edges"]):
        if (not isinstance(edge, list) or len(edge) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in edge)):
            raise GraphParseError(f"edge #{idx} must be a pair of integers", idx)
        a, b = edge
        if a == b:
            raise GraphParseError(f"edge #{idx} is a self-loop at vertex {a}", idx)
        if not (0 <= a < n and 0 <= b < n):
            raise GraphParseError(f"edge #{idx} references a vertex outside 0..{n - 1}", idx)
        if a > b:
            raise GraphParseError(f"edge #{idx} must be written with a < b", idx)
        if (a, b) in seen:
            raise GraphParseError(f"edge #{idx} duplicates ({a}, {b})", idx)
        seen.add((a, b))
    return Graph.from_edges(n, sorted(seen))


_G6_HEADER = ">>graph6<<"


def parse_graph6(text: str) -> Graph:
    offset = 0
    if text.startswith(_G6_HEADER):
        text = text[len(_G6_HEADER):]
        offset = len(_G6_HEADER)
    if not text:
        raise GraphParseError("empty graph6 string", offset)
    for pos, ch in enumerate(text):
        if not 63 <= ord(ch) <= 126:
            raise GraphParseError(f"invalid graph6 character {ch!r}", offset + pos)
    data = [ord(ch) - 63 for ch in text]
    if data[0] <= 62:
        n, pos = data[0], 1
    elif len(data) >= 4 and data[1] <= 62:
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        pos = 4
    else:
        raise GraphParseError("unsupported graph6 size prefix", offset)
    if n < 1:
        raise GraphParseError("graph6 graph has no vertices", offset)
    if n > MAX_SYMBOLIC_QUBITS:
        raise GraphParseError(f"graph6 graph has {n} vertices (max {MAX_SYMBOLIC_QUBITS})", offset)
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    if len(data) - pos != need:
        raise GraphParseError(
            f"graph6 body has {len(data) - pos} characters, expected {need}", offset + min(len(data), pos + need))
    bits = []
    for v in data[pos:]:
        bits.extend((v >> s) & 1 for s in range(5, -1, -1))
    if any(bits[nbits:]):
        raise GraphParseError("nonzero graph6 padding bits", offset + len(data) - 1)
    edges = []
    idx = 0
    for j in range(1, n):
        for i in range(j):
            if bits[idx]:
                edges.append((i, j))
            idx += 1
    return Graph.from_edges(n, edges)


def emit_graph6(g: Graph) -> str:
    n = g.n
    if n <= 62:
        head = [n]
    else:
        head = [63, (n >> 12) & 63, (n >> 6) & 63, n & 63]
    bits = [(g.adj[i] >> j) & 1 for j in range(1, n) for i in range(j)]
    bits.extend([0] * (-len(bits) % 6))
    body = [int("".join(map(str, bits[k:k + 6])), 2) for k in range(0, len(bits), 6)]
    return "".join(chr(v + 63) for v in head + body)


# -- stabilizers -----------------------------------------------------------------

def stabilizer_generator(g: Graph, i: int) -> PauliWord:
    """The generator ``X_i Z_{N(i)}``."""
    g._check_vertex(i)
    return PauliWord(g.n, 1 << i, g.adj[i], 0)


def stabilizer_element(g: Graph, b: int) -> PauliWord:
    """Product of the generators selected by ``b``, multiplied in ascending vertex order."""
    if b < 0 or b >> g.n:
        raise ValueError("selector has bits outside the vertex range")
    return PauliWord(g.n, *stabilizer_bits(g, b))


def stabilizer_bits(g: Graph, b: int) -> tuple[int, int, int]:
    """``(x, z, phase)`` of :func:`stabilizer_element` computed on raw bitsets."""
    x = z = phase = 0
    for i in sites_of(b):
        gz = g.adj[i]
        phase += product_phase(x, z, 1 << i, gz)
        x ^= 1 << i
        z ^= gz
    return x, z, phase % 4


def local_complement(g: Graph, v: int) -> Graph:
    """Complement the subgraph induced on the neighbourhood of ``v``."""
    g._check_vertex(v)
    nb = g.adj[v]
    adj = list(g.adj)
    for u in sites_of(nb):
        adj[u] ^= nb & ~(1 << u)
    return Graph(g.n, tuple(adj))
