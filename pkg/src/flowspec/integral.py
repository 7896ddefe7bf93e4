"""Integral flows: randomized rounding, intersection numbers and minor extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .errors import InvariantViolation, PreconditionError
from .flows import FractionalFlow, check_path, con_norm, congestion
from .graph import Graph, bfs_distances

Pair = tuple[int, int]


def _canon(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class DemandGraph:
    """Demand vertices mapped injectively onto graph vertices, plus demand edges."""

    terminals: Mapping[int, int]
    demand_edges: tuple[Pair, ...]
    bipartition: tuple[frozenset, frozenset] | None = None

    def __post_init__(self):
        terms = {int(i): int(v) for i, v in self.terminals.items()}
        if len(set(terms.values())) != len(terms):
            raise PreconditionError("terminal map is not injective")
        edges = set()
        for a, b in self.demand_edges:
            a, b = int(a), int(b)
            if a == b:
                raise PreconditionError(f"demand edge ({a}, {b}) is a loop")
            if a not in terms or b not in terms:
                raise PreconditionError(f"demand edge ({a}, {b}) uses an unmapped demand vertex")
            edges.add(_canon(a, b))
        object.__setattr__(self, "terminals", terms)
        object.__setattr__(self, "demand_edges", tuple(sorted(edges)))
        if self.bipartition is not None:
            left, right = (frozenset(int(x) for x in side) for side in self.bipartition)
            if left & right:
                raise PreconditionError("bipartition sides overlap")
            for a, b in self.demand_edges:
                if not ((a in left and b in right) or (a in right and b in left)):
                    raise PreconditionError(f"demand edge ({a}, {b}) does not cross the bipartition")
            object.__setattr__(self, "bipartition", (left, right))

    @classmethod
    def complete(cls, vertices) -> "DemandGraph":
        vs = sorted(int(v) for v in vertices)
        return cls({v: v for v in vs}, tuple((a, b) for i, a in enumerate(vs) for b in vs[i + 1:]))

    @property
    def vertices(self) -> list[int]:
        return sorted(self.terminals)

    def neighbors(self, i: int) -> list[int]:
        out = []
        for a, b in self.demand_edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def degree(self, i: int) -> int:
        return len(self.neighbors(i))


@dataclass(frozen=True)
class IntegralFlow:
    """One simple path per demand edge ``(i, j)``, ``i < j``, from ``g(i)`` to ``g(j)``."""

    graph: Graph
    demands: DemandGraph
    route: Mapping[Pair, tuple[int, ...]]

    def __post_init__(self):
        clean = {}
        for (a, b), p in self.route.items():
            i, j = _canon(int(a), int(b))
            p = tuple(int(x) for x in p)
            src, dst = self.demands.terminals[i], self.demands.terminals[j]
            if p and p[0] != src:
                p = p[::-1]
            check_path(self.graph, p, src, dst)
            clean[(i, j)] = p
        if set(clean) != set(self.demands.demand_edges):
            raise PreconditionError("integral flow must route exactly the demand edges, once each")
        object.__setattr__(self, "route", clean)

    def congestion(self) -> np.ndarray:
        """Integer vertex congestion (number of paths through each vertex)."""
        c = np.zeros(self.graph.n, dtype=np.int64)
        for p in self.route.values():
            c[list(p)] += 1
        return c

    def con2_squared(self) -> int:
        c = self.congestion()
        return int(c @ c)

    def con2(self) -> float:
        return math.sqrt(self.con2_squared())

    def as_fractional(self) -> FractionalFlow:
        routes = {}
        for (i, j), p in self.route.items():
            u, v = self.demands.terminals[i], self.demands.terminals[j]
            routes[(u, v)] = {p: 1.0}
        return FractionalFlow(self.graph, routes)


def shortest_path_flow(g: Graph, demands: DemandGraph) -> IntegralFlow:
    """Route each demand edge on a deterministic hop-shortest path."""
    from .paths import vertex_weighted_distances

    ones = np.ones(g.n)
    trees = {}
    route = {}
    for i, j in demands.demand_edges:
        src, dst = demands.terminals[i], demands.terminals[j]
        if src not in trees:
            trees[src] = vertex_weighted_distances(g, ones, src)
        route[(i, j)] = trees[src].path_to(dst)
    return IntegralFlow(g, demands, route)


# ------------------------------------------------------------------ rounding

@dataclass
class RoundingResult:
    flow: IntegralFlow
    con2: float
    trial_values: list[float]
    fractional_con2: float
    fractional_con1: float

    @property
    def bound(self) -> float:
        """``con_2(F) + sqrt(con_1(F))`` for the fractional input."""
        return self.fractional_con2 + math.sqrt(self.fractional_con1)


def round_integral(flow: FractionalFlow, trials: int = 64, seed: int = 0) -> RoundingResult:
    """Pick one path per demand with probability equal to its flow; keep the best of ``trials``.

    Trial ``t`` draws from ``numpy.random.default_rng([seed, t])`` so results do
    not depend on evaluation order.
    """
    if trials < 1:
        raise PreconditionError("need at least one rounding trial")
    g = flow.graph
    pairs = flow.demands
    frac_c = congestion(flow)
    if not pairs:
        empty = IntegralFlow(g, DemandGraph({}, ()), {})
        return RoundingResult(empty, 0.0, [0.0] * trials, 0.0, 0.0)
    paths, probs, owner = [], [], []
    for d, pair in enumerate(pairs):
        for p, w in sorted(flow.routes[pair].items()):
            paths.append(p)
            probs.append(w)
            owner.append(d)
    owner = np.asarray(owner, dtype=np.int64)
    probs = np.asarray(probs, dtype=float)
    last = np.r_[np.flatnonzero(np.diff(owner)), len(owner) - 1].astype(np.int64)
    first = np.r_[0, last[:-1] + 1].astype(np.int64)
    # Within-demand cumulative mass, shifted so demand d occupies [d, d + 1).
    running = np.cumsum(probs)
    before = running[first] - probs[first]
    cum = owner + running - before[owner]
    lengths = [len(p) for p in paths]
    incidence = sp.csr_matrix(
        (np.ones(sum(lengths)), np.concatenate(paths), np.r_[0, np.cumsum(lengths)]),
        shape=(len(paths), g.n),
    )

    best_val, best_choice, values = math.inf, None, []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        r = np.arange(len(pairs)) + rng.random(len(pairs))
        choice = np.searchsorted(cum, r, side="right")
        choice = np.clip(choice, first, last)
        c = np.asarray(incidence[choice].sum(axis=0)).ravel()
        val = float(np.sqrt(c @ c))
        values.append(val)
        if val < best_val:
            best_val, best_choice = val, choice
    demands = DemandGraph.complete(range(g.n)) if _is_all_pairs(g, pairs) else DemandGraph(
        {v: v for pair in pairs for v in pair}, tuple(pairs))
    route = {pair: paths[int(k)] for pair, k in zip(pairs, best_choice)}
    return RoundingResult(
        flow=IntegralFlow(g, demands, route),
        con2=best_val,
        trial_values=values,
        fractional_con2=con_norm(frac_c, 2),
        fractional_con1=con_norm(frac_c, 1),
    )


def _is_all_pairs(g: Graph, pairs) -> bool:
    return len(pairs) == g.n * (g.n - 1) // 2


# ------------------------------------------------------------ intersections

def intersecting_pairs(flow: IntegralFlow) -> list[tuple[Pair, Pair]]:
    """Unordered pairs of endpoint-disjoint demand edges whose paths share a vertex."""
    edges = sorted(flow.route)
    k = len(edges)
    if k < 2:
        return []
    inc = np.zeros((k, flow.graph.n), dtype=np.int32)
    for a, e in enumerate(edges):
        inc[a, list(flow.route[e])] = 1
    overlap = inc @ inc.T > 0
    ends = np.array(edges)
    disjoint = ((ends[:, 0][:, None] != ends[:, 0][None, :]) & (ends[:, 0][:, None] != ends[:, 1][None, :])
                & (ends[:, 1][:, None] != ends[:, 0][None, :]) & (ends[:, 1][:, None] != ends[:, 1][None, :]))
    hit = np.argwhere(np.triu(overlap & disjoint, 1))
    return [(edges[a], edges[b]) for a, b in hit]


def intersection_number(flow: IntegralFlow) -> int:
    return len(intersecting_pairs(flow))


def check_intersection_bound(flow: IntegralFlow) -> tuple[int, int]:
    """Return ``(con_2^2, inter)`` after asserting ``con_2^2 >= inter`` in exact integers."""
    c2 = flow.con2_squared()
    inter = intersection_number(flow)
    if c2 < inter:
        raise InvariantViolation(f"con_2^2 = {c2} < inter = {inter}")
    return c2, inter


def restrict(flow: IntegralFlow, keep) -> IntegralFlow:
    """Restrict to demand edges with both endpoints in ``keep``."""
    keep = set(int(i) for i in keep)
    terms = {i: v for i, v in flow.demands.terminals.items() if i in keep}
    edges = tuple(e for e in flow.demands.demand_edges if e[0] in keep and e[1] in keep)
    bip = None
    if flow.demands.bipartition is not None:
        bip = tuple(frozenset(side & keep) for side in flow.demands.bipartition)
    dem = DemandGraph(terms, edges, bip)
    return IntegralFlow(flow.graph, dem, {e: flow.route[e] for e in edges})


def subsample_terminals(flow: IntegralFlow, p: float, seed: int = 0) -> IntegralFlow:
    """Keep each demand vertex independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p must lie in [0, 1], got {p}")
    verts = flow.demands.vertices
    rng = np.random.default_rng(seed)
    mask = rng.random(len(verts)) < p
    return restrict(flow, [v for v, keep in zip(verts, mask) if keep])


@dataclass
class SubsampleStats:
    p: float
    samples: list[int]
    base_inter: int

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    @property
    def std_error(self) -> float:
        return float(np.std(self.samples, ddof=1) / math.sqrt(len(self.samples)))

    @property
    def expected(self) -> float:
        return self.p ** 4 * self.base_inter

    @property
    def z_score(self) -> float:
        se = self.std_error
        return abs(self.mean - self.expected) / se if se > 0 else (0.0 if self.mean == self.expected else math.inf)


def subsample_experiment(flow: IntegralFlow, p: float, samples: int, seed: int = 0) -> SubsampleStats:
    """Monte-Carlo ``inter`` of terminal subsamples, sample ``i`` seeded by ``(seed, i)``."""
    pairs = intersecting_pairs(flow)
    verts = flow.demands.vertices
    pos = {v: k for k, v in enumerate(verts)}
    quads = np.array([[pos[a[0]], pos[a[1]], pos[b[0]], pos[b[1]]] for a, b in pairs], dtype=np.int64).reshape(-1, 4)
    out = []
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        mask = rng.random(len(verts)) < p
        out.append(int(mask[quads].all(axis=1).sum()))
    return SubsampleStats(p, out, len(pairs))


def greedy_terminal_removal(flow: IntegralFlow) -> list[tuple[int | None, int]]:
    """Repeatedly drop the terminal in the most intersecting pairs until none remain.

    Returns ``(removed terminal, inter after removal)`` steps, starting with
    ``(None, inter(flow))``. This traces an upper bound only.
    """
    current = flow
    trace = [(None, intersection_number(current))]
    while trace[-1][1] > 0:
        counts: dict[int, int] = {}
        for a, b in intersecting_pairs(current):
            for v in (*a, *b):
                counts[v] = counts.get(v, 0) + 1
        victim = max(sorted(counts), key=lambda v: counts[v])
        current = restrict(current, [v for v in current.demands.vertices if v != victim])
        trace.append((victim, intersection_number(current)))
    return trace


# ---------------------------------------------------------- minor extraction

@dataclass
class BranchDecomposition:
    branch_sets: dict[int, frozenset]
    witness_edges: dict[Pair, tuple[int, int]] = field(default_factory=dict)


def verify_minor(g: Graph, demands: DemandGraph, dec: BranchDecomposition) -> list[str]:
    """Independent minor check; returns a list of problems (empty when valid)."""
    problems = []
    sets = dec.branch_sets
    for i in demands.vertices:
        members = sets.get(i)
        if not members:
            problems.append(f"branch set {i} is empty")
            continue
        start = min(members)
        if set(bfs_distances(g, start, within=set(members))) != set(members):
            problems.append(f"branch set {i} is disconnected")
    keys = sorted(sets)
    for a_idx, a in enumerate(keys):
        for b in keys[a_idx + 1:]:
            if sets[a] & sets[b]:
                problems.append(f"branch sets {a} and {b} intersect")
    for i, j in demands.demand_edges:
        w = dec.witness_edges.get((i, j))
        if w is None:
            problems.append(f"no witness edge for demand edge ({i}, {j})")
            continue
        x, y = w
        if not g.has_edge(x, y):
            problems.append(f"witness ({x}, {y}) is not an edge")
        elif not ((x in sets.get(i, ()) and y in sets.get(j, ())) or (y in sets.get(i, ()) and x in sets.get(j, ()))):
            problems.append(f"witness ({x}, {y}) does not join branch sets {i} and {j}")
    return problems


def branch_set_diameters(g: Graph, dec: BranchDecomposition) -> dict[int, int]:
    """Diameter of each branch set measured in hops in the whole graph."""
    out = {}
    for i, members in dec.branch_sets.items():
        best = 0
        for x in members:
            dist = bfs_distances(g, x)
            best = max(best, max(dist[y] for y in members))
        out[i] = best
    return out


def extract_minor(flow: IntegralFlow) -> BranchDecomposition:
    """Branch sets of an H-minor from an intersection-free integral H-flow, H bipartite.

    Left-side branch sets are unions of path prefixes cut at the first vertex
    used by another left vertex's paths; right-side sets take what remains of
    their own paths.
    """
    g, dem = flow.graph, flow.demands
    inter = intersection_number(flow)
    if inter != 0:
        raise PreconditionError(f"flow has intersection number {inter}, expected 0")
    if dem.bipartition is None:
        raise PreconditionError("minor extraction needs a bipartite demand graph with its bipartition")
    left, right = dem.bipartition
    for i in dem.vertices:
        if dem.degree(i) < 2:
            raise PreconditionError(f"demand vertex {i} has degree {dem.degree(i)} < 2")

    # Orient every path from its left terminal to its right terminal.
    phi: dict[tuple[int, int], tuple[int, ...]] = {}
    for (a, b), p in flow.route.items():
        if a in left:
            phi[(a, b)] = p
        else:
            phi[(b, a)] = p[::-1]

    reach: dict[int, set] = {i: set() for i in dem.vertices}
    for (i, j), p in phi.items():
        reach[i].update(p)
        reach[j].update(p)

    prefix_len: dict[tuple[int, int], int] = {}
    branch: dict[int, set] = {}
    for i in sorted(left):
        others = set()
        for r in left:
            if r != i:
                others |= reach[r]
        members = set()
        for j in dem.neighbors(i):
            p = phi[(i, j)]
            t = next((k for k, v in enumerate(p) if v in others), len(p))
            prefix_len[(i, j)] = t
            members.update(p[:t])
        branch[i] = members
    claimed = set().union(*(branch[i] for i in left)) if left else set()
    for i in sorted(right):
        branch[i] = reach[i] - claimed

    witnesses = {}
    for (i, j), p in phi.items():
        t = prefix_len[(i, j)]
        if 0 < t < len(p):
            witnesses[_canon(i, j)] = (p[t - 1], p[t])
    dec = BranchDecomposition({i: frozenset(s) for i, s in branch.items()}, witnesses)
    problems = verify_minor(g, dem, dec)
    if problems:
        raise InvariantViolation("minor extraction produced an invalid decomposition: " + "; ".join(problems))
    return dec


# ---------------------------------------------------------------- text format

def format_integral_flow(flow: IntegralFlow) -> str:
    return "".join(f"{i} {j} : {' '.join(map(str, p))}\n" for (i, j), p in sorted(flow.route.items()))


def parse_integral_flow(text: str, g: Graph, demands: DemandGraph | None = None) -> IntegralFlow:
    from .errors import ParseError

    route = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        try:
            i, j = (int(x) for x in head.split())
            path = tuple(int(x) for x in tail.split())
        except ValueError:
            raise ParseError(f"bad flow line {raw!r}") from None
        if not sep:
            raise ParseError(f"bad flow line {raw!r}")
        route[_canon(i, j)] = path
    if demands is None:
        demands = DemandGraph({v: v for e in route for v in e}, tuple(route))
    return IntegralFlow(g, demands, route)


def format_branch_decomposition(dec: BranchDecomposition) -> str:
    lines = [f"{i} : {' '.join(map(str, sorted(s)))}" for i, s in sorted(dec.branch_sets.items())]
    lines += [f"witness {i} {j} : {a} {b}" for (i, j), (a, b) in sorted(dec.witness_edges.items())]
    return "\n".join(lines) + "\n"
