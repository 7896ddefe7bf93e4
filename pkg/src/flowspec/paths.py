"""Vertex-weighted shortest paths.

Path cost sums the weights of *every* vertex on the path, both endpoints
included, so ``d_s(u, v) = s(u) + s(v)`` for an edge whose endpoints have no
cheaper detour. The diagonal is fixed to ``d_s(u, u) = 0`` to keep ``d_s`` a
semi-metric, even though the vertex-sum formula would give ``s(u)``.

Internally distances are computed without the source weight (``D[u, v] =
d_s(u, v) - s(u)``), which turns vertex weights into directed edge weights
``w(a -> b) = s(b)`` and lets scipy's Dijkstra do the heavy lifting.

Shortest-path trees break ties deterministically: a vertex with positive
weight takes the smallest-index neighbour whose distance is tight. Zero-weight
vertices take the smallest-index tight neighbour that was attached in an
earlier breadth-first layer of the zero-weight plateau, which keeps the tree
acyclic when several tight neighbours sit at the same distance.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .graph import Graph, Metric, as_weights

TIGHT_RTOL = 1e-12


def _tol(dist):
    return TIGHT_RTOL * np.maximum(1.0, np.abs(dist))


@dataclass(frozen=True)
class ShortestPathTree:
    source: int
    dist: np.ndarray  # d_s(source, v), zero at the source
    pred: np.ndarray  # predecessor towards the source, -1 at the source

    def path_to(self, target: int) -> tuple[int, ...]:
        """Vertex sequence from the source to ``target``."""
        out = [int(target)]
        while out[-1] != self.source:
            out.append(int(self.pred[out[-1]]))
        return tuple(reversed(out))


def _assign_predecessors(g: Graph, s: np.ndarray, source: int, D: np.ndarray) -> np.ndarray:
    n = g.n
    pred = np.full(n, -1, dtype=np.int64)
    tol = _tol(D)
    zero_like = s <= tol
    assigned = np.zeros(n, dtype=bool)
    assigned[source] = True
    for v in range(n):
        if v == source or zero_like[v]:
            continue
        for w in g.adjacency[v]:
            if abs(D[w] + s[v] - D[v]) <= tol[v]:
                pred[v] = w
                break
        assigned[v] = True
    pending = [v for v in range(n) if not assigned[v]]
    while pending:
        layer = []
        for v in pending:
            for w in g.adjacency[v]:
                if assigned[w] and abs(D[w] + s[v] - D[v]) <= tol[v]:
                    layer.append((v, w))
                    break
        if not layer:
            raise RuntimeError("zero-weight plateau without a tight anchor")
        for v, w in layer:
            pred[v] = w
            assigned[v] = True
        pending = [v for v in pending if not assigned[v]]
    return pred


def _dijkstra_from(g: Graph, s: np.ndarray, source: int) -> np.ndarray:
    D = np.full(g.n, np.inf)
    D[source] = 0.0
    heap = [(0.0, source)]
    done = np.zeros(g.n, dtype=bool)
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for w in g.adjacency[u]:
            alt = du + s[w]
            if alt < D[w]:
                D[w] = alt
                heapq.heappush(heap, (alt, w))
    return D


def vertex_weighted_distances(g: Graph, s, source: int) -> ShortestPathTree:
    """Exact single-source distances under the vertex-sum cost, with a shortest-path tree."""
    s = as_weights(g, s)
    source = int(source)
    D = _dijkstra_from(g, s, source)
    pred = _assign_predecessors(g, s, source, D)
    dist = D + s[source]
    dist[source] = 0.0
    return ShortestPathTree(source, dist, pred)


def _edge_weight_matrix(g: Graph, s: np.ndarray):
    e = g.edge_array
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    # csr_matrix keeps explicit zeros from the COO triplets; csgraph treats them as edges.
    return sp.csr_matrix((s[cols], (rows, cols)), shape=(g.n, g.n))


def source_excluded_distances(g: Graph, s) -> np.ndarray:
    """``D[u, v] = d_s(u, v) - s(u)`` for all ordered pairs (``D[u, u] = 0``)."""
    s = as_weights(g, s)
    if g.m == 0:
        return np.zeros((g.n, g.n))
    return dijkstra(_edge_weight_matrix(g, s), directed=True)


def all_pairs_metric(g: Graph, s) -> Metric:
    """The semi-metric ``d_s`` as a full table."""
    s = as_weights(g, s)
    D = source_excluded_distances(g, s)
    d = D + s[:, None]
    np.fill_diagonal(d, 0.0)
    # D[u,v] + s(u) and D[v,u] + s(v) are the same path cost summed in a different order.
    d = np.minimum(d, d.T)
    return Metric(d, origin="vertex-weighted", weights=s.copy())


def hop_metric(g: Graph) -> Metric:
    """Unweighted shortest-path (edge count) metric."""
    D = source_excluded_distances(g, np.ones(g.n))
    return Metric(np.minimum(D, D.T), origin="explicit")


@dataclass(frozen=True)
class Routing:
    """All-pairs shortest-path routing: row ``u`` of ``pred`` is the tree rooted at ``u``.

    The unordered pair ``{u, v}`` with ``u < v`` is routed along the tree of ``u``.
    ``order[u]`` lists vertices so that every child precedes its parent.
    """

    D: np.ndarray
    pred: np.ndarray
    order: np.ndarray

    @property
    def n(self) -> int:
        return self.pred.shape[0]

    def path(self, u: int, v: int) -> tuple[int, ...]:
        if u > v:
            u, v = v, u
        out = [int(v)]
        row = self.pred[u]
        while out[-1] != u:
            out.append(int(row[out[-1]]))
        return tuple(reversed(out))

    def pair_distance_sum(self, s: np.ndarray) -> float:
        """``sum over u < v of d_s(u, v)`` for the weights the routing was built from."""
        n = self.n
        iu = np.triu_indices(n, 1)
        return float(self.D[iu].sum() + s @ (n - 1 - np.arange(n)))


def _pred_positive(g: Graph, s: np.ndarray, D: np.ndarray) -> np.ndarray:
    n = g.n
    E = np.ascontiguousarray(D.T)  # E[v, u] = D[u, v]
    target = E - s[:, None]
    tol = _tol(E)
    predT = np.full((n, n), -1, dtype=np.int32)
    table = g.neighbor_table
    # Descending scan so the smallest tight neighbour is written last.
    for j in range(table.shape[1] - 1, -1, -1):
        cand = table[:, j]
        valid = cand >= 0
        cc = np.where(valid, cand, 0)
        tight = np.abs(E[cc] - target) <= tol
        tight &= valid[:, None]
        np.copyto(predT, cc[:, None].astype(np.int32), where=tight)
    pred = np.ascontiguousarray(predT.T)
    np.fill_diagonal(pred, -1)
    return pred


def _depth_order(pred: np.ndarray) -> np.ndarray:
    """Per-row vertex order by decreasing tree depth (list ranking by pointer jumping)."""
    n = pred.shape[0]
    rows = np.arange(n)[:, None]
    anc = np.where(pred >= 0, pred, np.broadcast_to(rows, (n, n))).astype(np.int64)
    depth = (pred >= 0).astype(np.int64)
    for _ in range(int(np.ceil(np.log2(max(n, 2)))) + 1):
        depth = depth + depth[rows, anc]
        anc = anc[rows, anc]
    return np.argsort(-depth, axis=1, kind="stable")


def shortest_path_routing(g: Graph, cost) -> Routing:
    """Route every unordered pair along a deterministic shortest path under ``cost``."""
    cost = as_weights(g, cost)
    D = source_excluded_distances(g, cost)
    if g.n > 1 and cost.min() > _tol(D.max()):
        pred = _pred_positive(g, cost, D)
        order = np.argsort(-D, axis=1, kind="stable")
    else:
        pred = np.empty((g.n, g.n), dtype=np.int32)
        for u in range(g.n):
            pred[u] = _assign_predecessors(g, cost, u, D[u])
        order = _depth_order(pred)
    return Routing(D, pred, order)


def routing_congestion(routing: Routing) -> np.ndarray:
    """Vertex congestion of the unit all-pairs flow carried by ``routing``.

    ``c(x)`` counts the unordered pairs whose path contains ``x``, endpoints
    included; it equals the sum over sources ``u`` of the number of targets
    ``t > u`` in the subtree of ``x`` in ``u``'s tree.
    """
    n = routing.n
    if n == 1:
        return np.zeros(1)
    W = np.triu(np.ones((n, n)), 1).ravel()
    base = np.arange(n, dtype=np.int64) * n
    pred_flat = routing.pred.ravel().astype(np.int64)
    order = routing.order
    # The root of every row sorts last, so the first n-1 columns are non-roots.
    for k in range(n - 1):
        child = base + order[:, k]
        parent = base + pred_flat[child]
        W[parent] += W[child]
    return W.reshape(n, n).sum(axis=0)
