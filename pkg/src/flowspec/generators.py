"""Graph families used as experiment substrates."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .errors import PreconditionError
from .graph import Graph

FAMILIES = ("path", "cycle", "grid2d", "torus2d", "grid3d", "knn_random_points", "complete", "star")


def path(n: int) -> Graph:
    if n < 1:
        raise PreconditionError("path needs n >= 1")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise PreconditionError("cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def grid2d(m: int, m2: int | None = None) -> Graph:
    """``m x m2`` grid; vertex ``(i, j)`` has index ``i * m2 + j``."""
    m2 = m if m2 is None else m2
    if m < 2 or m2 < 2:
        raise PreconditionError("grid side must be >= 2")
    edges = []
    for i in range(m):
        for j in range(m2):
            v = i * m2 + j
            if j + 1 < m2:
                edges.append((v, v + 1))
            if i + 1 < m:
                edges.append((v, v + m2))
    return Graph(m * m2, edges)


def torus2d(m: int) -> Graph:
    if m < 3:
        raise PreconditionError("torus side must be >= 3")
    edges = []
    for i in range(m):
        for j in range(m):
            v = i * m + j
            edges.append((v, i * m + (j + 1) % m))
            edges.append((v, ((i + 1) % m) * m + j))
    return Graph(m * m, edges)


def grid3d(m: int) -> Graph:
    if m < 2:
        raise PreconditionError("grid side must be >= 2")
    edges = []

    def idx(i, j, k):
        return (i * m + j) * m + k

    for i in range(m):
        for j in range(m):
            for k in range(m):
                if i + 1 < m:
                    edges.append((idx(i, j, k), idx(i + 1, j, k)))
                if j + 1 < m:
                    edges.append((idx(i, j, k), idx(i, j + 1, k)))
                if k + 1 < m:
                    edges.append((idx(i, j, k), idx(i, j, k + 1)))
    return Graph(m ** 3, edges)


def complete(n: int) -> Graph:
    if n < 1:
        raise PreconditionError("complete graph needs n >= 1")
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(leaves: int) -> Graph:
    """``K_{1,leaves}`` with the centre at vertex 0."""
    if leaves < 1:
        raise PreconditionError("star needs at least one leaf")
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def knn_points(n: int, dim: int = 2, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.random((n, dim))


def knn_random_points(n: int, k: int, dim: int = 2, seed: int = 0) -> Graph:
    """Symmetrised k-nearest-neighbour graph of ``n`` uniform points in the unit cube."""
    if k < 1 or n < k + 1:
        raise PreconditionError(f"knn needs k >= 1 and n >= k+1 (got n={n}, k={k})")
    if dim < 1:
        raise PreconditionError("dimension must be >= 1")
    pts = knn_points(n, dim, seed)
    _, nbrs = cKDTree(pts).query(pts, k=k + 1)
    edges = set()
    for u in range(n):
        taken = 0
        for v in nbrs[u]:
            v = int(v)
            if v == u:
                continue
            edges.add((min(u, v), max(u, v)))
            taken += 1
            if taken == k:
                break
    try:
        return Graph(n, edges)
    except PreconditionError as exc:
        raise PreconditionError(f"knn graph (n={n}, k={k}, seed={seed}) is disconnected") from exc


def random_connected(n: int, edge_prob: float, seed: int) -> Graph:
    """Random spanning tree plus independent extra edges; used for test corpora."""
    rng = np.random.default_rng(seed)
    edges = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.add((u, v))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                edges.add((u, v))
    perm = rng.permutation(n)
    return Graph(n, [(int(perm[u]), int(perm[v])) for u, v in edges])


def generate(family: str, size: int, *, k: int = 3, dim: int = 2, seed: int = 0) -> Graph:
    """Build a member of ``family``; ``size`` is n, the side length, or the leaf count."""
    if family == "path":
        return path(size)
    if family == "cycle":
        return cycle(size)
    if family == "grid2d":
        return grid2d(size)
    if family == "torus2d":
        return torus2d(size)
    if family == "grid3d":
        return grid3d(size)
    if family == "knn_random_points":
        return knn_random_points(size, k, dim, seed)
    if family == "complete":
        return complete(size)
    if family == "star":
        return star(size)
    raise PreconditionError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
