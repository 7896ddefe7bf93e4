"""Hand-built and seeded flow fixtures shared by several test modules."""

from __future__ import annotations

import numpy as np

from flowspec.generators import grid2d
from flowspec.graph import Graph
from flowspec.integral import DemandGraph, IntegralFlow, shortest_path_flow


def grid_k22_flow() -> IntegralFlow:
    """Corners of grid2d(4) joined around the boundary: a vertex-disjoint K_{2,2}-flow."""
    g = grid2d(4)
    dem = DemandGraph({0: 0, 1: 3, 2: 15, 3: 12}, ((0, 1), (1, 2), (2, 3), (0, 3)),
                      (frozenset({0, 2}), frozenset({1, 3})))
    route = {(0, 1): (0, 1, 2, 3), (1, 2): (3, 7, 11, 15), (2, 3): (15, 14, 13, 12), (0, 3): (0, 4, 8, 12)}
    return IntegralFlow(g, dem, route)


def k6_in_grid() -> IntegralFlow:
    """Six terminals in grid2d(5), every pair on a deterministic shortest path."""
    terms = [0, 4, 12, 20, 24, 7]
    return shortest_path_flow(grid2d(5), DemandGraph({i: v for i, v in enumerate(terms)},
                                                     tuple((a, b) for a in range(6) for b in range(a + 1, 6))))


def _random_bipartite(rng):
    kind = rng.integers(3)
    if kind == 0:  # even cycle
        k = int(rng.integers(2, 5))
        left, right = list(range(k)), list(range(k, 2 * k))
        edges = [(left[i], right[i]) for i in range(k)] + [(left[(i + 1) % k], right[i]) for i in range(k)]
    elif kind == 1:  # K_{2,t}
        t = int(rng.integers(2, 5))
        left, right = [0, 1], list(range(2, 2 + t))
        edges = [(a, b) for a in left for b in right]
    else:  # K_{3,3} minus nothing, or K_{3,t}
        t = int(rng.integers(2, 4))
        left, right = [0, 1, 2], list(range(3, 3 + t))
        edges = [(a, b) for a in left for b in right]
    return left, right, sorted({(min(a, b), max(a, b)) for a, b in edges})


def random_intersection_free(seed: int) -> IntegralFlow:
    """Subdivide a random bipartite demand graph of min degree 2 inside a random host graph.

    Each demand edge becomes a private path, so paths of endpoint-disjoint
    demand edges never meet. Extra host edges and decoy vertices make the
    graph richer without touching the routing.
    """
    rng = np.random.default_rng(seed)
    left, right, dedges = _random_bipartite(rng)
    k = len(left) + len(right)
    n = k
    edges = set()
    routes = {}
    for a, b in dedges:
        inner = int(rng.integers(0, 4))
        path = [a] + list(range(n, n + inner)) + [b]
        n += inner
        edges.update((min(x, y), max(x, y)) for x, y in zip(path, path[1:]))
        routes[(a, b)] = tuple(path)
    decoys = int(rng.integers(0, 5))
    for d in range(n, n + decoys):
        edges.add((int(rng.integers(0, d)), d))
    n += decoys
    for _ in range(int(rng.integers(0, n))):
        x, y = (int(v) for v in rng.integers(0, n, 2))
        if x != y:
            edges.add((min(x, y), max(x, y)))
    perm = rng.permutation(n)
    g = Graph(n, [(int(perm[x]), int(perm[y])) for x, y in edges])
    dem = DemandGraph({i: int(perm[i]) for i in range(k)}, tuple(dedges),
                      (frozenset(left), frozenset(right)))
    route = {e: tuple(int(perm[v]) for v in p) for e, p in routes.items()}
    return IntegralFlow(g, dem, route)
