"""Undirected simple connected graphs, vertex weights, metrics and their text formats."""

from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, PreconditionError

METRIC_TOL = 1e-9


class Graph:
    """Immutable connected simple graph on vertices ``0..n-1``.

    Edges are stored as sorted pairs ``(u, v)`` with ``u < v``; ``adjacency[v]``
    is the ascending tuple of neighbours of ``v``.
    """

    __slots__ = ("n", "edges", "adjacency", "max_degree", "__dict__")

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        n = int(n)
        if n < 1:
            raise PreconditionError(f"graph needs at least one vertex, got n={n}")
        canon = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise PreconditionError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u}, {v}) out of range for n={n}")
            key = (u, v) if u < v else (v, u)
            if key in canon:
                raise PreconditionError(f"duplicate edge {key}")
            canon.add(key)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in canon:
            adj[u].append(v)
            adj[v].append(u)
        self.n = n
        self.edges = tuple(sorted(canon))
        self.adjacency = tuple(tuple(sorted(a)) for a in adj)
        self.max_degree = max((len(a) for a in adj), default=0)
        if not self._connected():
            raise PreconditionError("graph is disconnected")

    def _connected(self) -> bool:
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        return bool(seen.all())

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_set

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @cached_property
    def neighbor_table(self) -> np.ndarray:
        """``n x max_degree`` ascending neighbour table padded with -1."""
        table = np.full((self.n, max(self.max_degree, 1)), -1, dtype=np.int64)
        for v, nbrs in enumerate(self.adjacency):
            table[v, : len(nbrs)] = nbrs
        return table

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, max_degree={self.max_degree})"


def induced_components(g: Graph, vertices: Iterable[int]) -> list[list[int]]:
    """Connected components of the subgraph induced by ``vertices`` (sorted lists)."""
    members = set(vertices)
    seen: set[int] = set()
    comps = []
    for start in sorted(members):
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in g.adjacency[u]:
                if w in members and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def induced_subgraph(g: Graph, vertices: Sequence[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph relabelled to ``0..k-1``; returns it with the old labels.

    Raises PreconditionError if the induced subgraph is disconnected.
    """
    labels = sorted(set(vertices))
    index = {v: i for i, v in enumerate(labels)}
    edges = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    return Graph(len(labels), edges), labels


def bfs_distances(g: Graph, source: int, within: set[int] | None = None) -> dict[int, int]:
    """Hop distances from ``source``; restricted to ``within`` if given."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w not in dist and (within is None or w in within):
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def as_weights(g: Graph, s, *, require_positive_mass: bool = False) -> np.ndarray:
    """Validate a vertex weighting and return it as a float array of length n."""
    arr = np.asarray(s, dtype=float).reshape(-1)
    if arr.shape[0] != g.n:
        raise PreconditionError(f"weight vector has length {arr.shape[0]}, graph has {g.n} vertices")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("weights must be finite")
    if np.any(arr < 0):
        raise PreconditionError("weights must be non-negative")
    if require_positive_mass and not np.any(arr > 0):
        raise PreconditionError("weights are identically zero")
    return arr


@dataclass(frozen=True)
class Metric:
    """Symmetric non-negative distance table with zero diagonal."""

    d: np.ndarray
    origin: str = "explicit"
    weights: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise PreconditionError("metric must be a square table")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def check(self, tol: float = METRIC_TOL) -> None:
        """Raise PreconditionError unless the table is a semi-metric (up to ``tol``)."""
        d = self.d
        scale = max(1.0, float(d.max(initial=0.0)))
        if np.any(d < -tol * scale):
            raise PreconditionError("metric has negative entries")
        if np.any(np.abs(np.diag(d)) > tol * scale):
            raise PreconditionError("metric has a non-zero diagonal")
        if np.any(np.abs(d - d.T) > tol * scale):
            raise PreconditionError("metric is not symmetric")
        for w in range(self.n):
            via = d[:, w][:, None] + d[w, :][None, :]
            if np.any(d > via + tol * scale):
                raise PreconditionError(f"triangle inequality fails through vertex {w}")

    def pair_values(self) -> np.ndarray:
        """Distances over unordered pairs ``u < v`` in row-major order."""
        iu = np.triu_indices(self.n, 1)
        return self.d[iu]

    def diameter(self, members: Sequence[int] | None = None) -> float:
        if members is None:
            return float(self.d.max(initial=0.0))
        idx = np.asarray(members, dtype=np.int64)
        return float(self.d[np.ix_(idx, idx)].max(initial=0.0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        np.savetxt(buf, self.d, delimiter=",", fmt="%.17g")
        return buf.getvalue()


# ---------------------------------------------------------------- text formats

def _content_lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def parse_graph(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v`` (0-based, ``#`` comments)."""
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty graph file")
    head = lines[0].split()
    try:
        n, m = int(head[0]), int(head[1])
    except (IndexError, ValueError):
        raise ParseError(f"bad header line {lines[0]!r}; expected 'n m'") from None
    if len(head) != 2:
        raise ParseError(f"bad header line {lines[0]!r}; expected 'n m'")
    if len(lines) - 1 != m:
        raise ParseError(f"header declares {m} edges, found {len(lines) - 1}")
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"bad edge line {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(f"bad edge line {line!r}") from None
    return Graph(n, edges)


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())


def write_graph(g: Graph, path) -> None:
    Path(path).write_text(format_graph(g))


def parse_weights(text: str, n: int | None = None) -> np.ndarray:
    lines = _content_lines(text)
    try:
        vals = np.array([float(x) for x in lines], dtype=float)
    except ValueError as exc:
        raise ParseError(f"bad weight value: {exc}") from None
    if n is not None and len(vals) != n:
        raise ParseError(f"weight file has {len(vals)} entries, expected {n}")
    return vals


def format_weights(s) -> str:
    return "".join(f"{float(x):.17g}\n" for x in np.asarray(s, dtype=float))


def read_weights(path, n: int | None = None) -> np.ndarray:
    return parse_weights(Path(path).read_text(), n)


def write_weights(s, path) -> None:
    Path(path).write_text(format_weights(s))


# ------------------------------------------------------------ Laplacian forms

def laplacian_matrix(g: Graph):
    """Sparse ``D - A`` in CSR form."""
    import scipy.sparse as sp

    e = g.edge_array
    rows = np.concatenate([e[:, 0], e[:, 1], np.arange(g.n)])
    cols = np.concatenate([e[:, 1], e[:, 0], np.arange(g.n)])
    vals = np.concatenate([-np.ones(2 * g.m), g.degrees.astype(float)])
    return sp.csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))


def dirichlet_energy(g: Graph, f) -> float:
    """``sum over edges (f(u) - f(v))^2``."""
    f = np.asarray(f, dtype=float)
    e = g.edge_array
    if len(e) == 0:
        return 0.0
    diff = f[e[:, 0]] - f[e[:, 1]]
    return float(diff @ diff)


def rayleigh_quotient(g: Graph, f) -> float:
    """Edge energy of ``f`` over its centred squared norm.

    This upper-bounds the second Laplacian eigenvalue for every non-constant
    ``f``. A constant ``f`` has no direction orthogonal to the all-ones vector
    and yields ``math.inf``.
    """
    f = np.asarray(f, dtype=float).reshape(-1)
    if f.shape[0] != g.n:
        raise PreconditionError(f"vector has length {f.shape[0]}, graph has {g.n} vertices")
    centred = f - f.mean()
    denom = float(centred @ centred)
    if np.ptp(f) == 0.0 or denom == 0.0:
        return float("inf")
    return dirichlet_energy(g, f) / denom
