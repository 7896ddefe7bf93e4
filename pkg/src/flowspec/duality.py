"""Minimum 2-congestion all-pairs flow and its dual vertex weighting.

The flow side minimises ``con_2(F)`` over unit all-pairs flows; the metric side
maximises ``lambda_s`` over non-negative weights. Any feasible pair satisfies
``lambda_s <= con_2(F)``, and the two optima coincide.

The solver is Frank-Wolfe on ``con_2(F)^2``. Its gradient with respect to the
weight of a path is twice the summed congestion along the path, so the linear
minimisation step routes every pair on a shortest path under vertex costs
``c``. Those same costs, normalised, are the candidate weights: ``s = c/||c||``
evaluates ``lambda_s`` from the distances the step already computed, and
``||c|| - lambda_s`` is exactly the Frank-Wolfe gap.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvariantViolation, PreconditionError
from .flows import FractionalFlow
from .graph import Graph
from .paths import Routing, routing_congestion, shortest_path_routing

log = logging.getLogger(__name__)

MODULE_VERSION = "flow-duality/1"
KEEP_ROUTES_MAX_N = 256
WEAK_DUALITY_TOL = 1e-9


@dataclass
class RoutingMixture:
    """Convex combination of all-pairs shortest-path routings.

    ``preds[k]`` is the predecessor table of routing ``k`` (``None`` if route
    storage was switched off) and ``congestions[k]`` its congestion profile.
    """

    n: int
    preds: list
    congestions: list
    weights: np.ndarray

    def congestion(self) -> np.ndarray:
        if not self.congestions:
            return np.zeros(self.n)
        return np.asarray(self.weights) @ np.vstack(self.congestions)

    @property
    def has_routes(self) -> bool:
        return all(p is not None for p in self.preds)

    def pair_paths(self, u: int, v: int) -> dict[tuple[int, ...], float]:
        if not self.has_routes:
            raise PreconditionError("routes were not stored for this solve (see keep_routes)")
        if u > v:
            u, v = v, u
        out: dict[tuple[int, ...], float] = {}
        for pred, w in zip(self.preds, self.weights):
            if w <= 0:
                continue
            row = pred[u]
            path = [v]
            while path[-1] != u:
                path.append(int(row[path[-1]]))
            key = tuple(reversed(path))
            out[key] = out.get(key, 0.0) + float(w)
        return out

    def to_flow(self, g: Graph) -> FractionalFlow:
        routes = {}
        for u in range(self.n):
            for v in range(u + 1, self.n):
                paths = self.pair_paths(u, v)
                total = sum(paths.values())
                routes[(u, v)] = {p: w / total for p, w in paths.items()}
        return FractionalFlow(g, routes)


@dataclass
class DualitySolution:
    graph: Graph
    weights: np.ndarray  # best metric-side weights, unit l2 norm
    congestion: np.ndarray  # profile of the returned flow
    primal_value: float  # lambda_s(G) at ``weights``: a lower bound on min con_2
    dual_value: float  # con_2 of the returned flow: an upper bound on min con_2
    iterations: int
    converged: bool
    mixture: RoutingMixture = field(repr=False)
    history: list = field(default_factory=list, repr=False)
    seed: int = 0
    tol: float = 0.0

    @property
    def gap(self) -> float:
        return self.dual_value - self.primal_value

    @property
    def relative_gap(self) -> float:
        return self.gap / self.dual_value if self.dual_value > 0 else 0.0

    @property
    def status(self) -> str:
        return "converged" if self.converged else "tolerance not met"

    @cached_property
    def flow(self) -> FractionalFlow:
        return self.mixture.to_flow(self.graph)

    def to_record(self) -> dict:
        rec = {
            "module": MODULE_VERSION,
            "seed": self.seed,
            "n": self.graph.n,
            "primal": self.primal_value,
            "dual": self.dual_value,
            "gap": self.gap,
            "relative_gap": self.relative_gap,
            "tol": self.tol,
            "iterations": self.iterations,
            "status": self.status,
        }
        for v in range(self.graph.n):
            rec[f"s.{v}"] = float(self.weights[v])
        for v in range(self.graph.n):
            rec[f"c.{v}"] = float(self.congestion[v])
        return rec


def _fingerprint(pred: np.ndarray) -> bytes:
    return hashlib.blake2b(np.ascontiguousarray(pred).tobytes(), digest_size=16).digest()


def _compact(pred: np.ndarray) -> np.ndarray:
    return pred.astype(np.int16) if pred.shape[0] < 2 ** 15 else pred


def solve_min_con2(
    g: Graph,
    max_iters: int = 500,
    tol: float = 1e-3,
    seed: int = 0,
    keep_routes: bool | None = None,
) -> DualitySolution:
    """Frank-Wolfe with step ``2/(k+2)`` on ``con_2^2`` over unit all-pairs flows.

    Stops once the relative gap between the best flow and the best weighting
    seen drops to ``tol`` or after ``max_iters`` blending steps. The returned
    ``dual_value`` is the 2-congestion of an actual flow and ``primal_value``
    the objective of an actual weighting, so both are certified bounds on the
    common optimum whether or not the tolerance was met.

    The method is deterministic; ``seed`` is recorded for provenance only.
    """
    if g.n < 2:
        raise PreconditionError("need at least two vertices to route a demand")
    if keep_routes is None:
        keep_routes = g.n <= KEEP_ROUTES_MAX_N

    preds: list = []
    congs: list = []
    index: dict[bytes, int] = {}
    weights: list[float] = []

    c = None
    best_dual, best_dual_weights, best_dual_c = math.inf, None, None
    best_primal, best_s = 0.0, None
    history = []
    converged = False
    k = 0
    while True:
        cost = np.ones(g.n) if c is None else c
        routing: Routing = shortest_path_routing(g, cost)
        if c is not None:
            dual = float(np.sqrt(c @ c))
            primal = routing.pair_distance_sum(c) / dual
            if primal > dual + WEAK_DUALITY_TOL * max(1.0, dual):
                raise InvariantViolation(f"weak duality violated: lambda_s={primal!r} > con_2={dual!r}")
            if dual < best_dual:
                best_dual, best_dual_weights, best_dual_c = dual, list(weights), c.copy()
            if primal > best_primal:
                best_primal, best_s = primal, c / dual
            history.append((k, primal, dual, best_primal, best_dual))
            if best_dual - best_primal <= tol * best_dual:
                converged = True
                break
            if k >= max_iters:
                break
        fp = _fingerprint(routing.pred)
        gamma = 2.0 / (k + 2.0)
        new_c = routing_congestion(routing)
        weights = [w * (1.0 - gamma) for w in weights]
        if fp in index:
            weights[index[fp]] += gamma
        else:
            index[fp] = len(preds)
            preds.append(_compact(routing.pred) if keep_routes else None)
            congs.append(new_c)
            weights.append(gamma)
        c = new_c if c is None else (1.0 - gamma) * c + gamma * new_c
        k += 1

    if not converged:
        log.info("solve_min_con2: relative gap %.3g after %d iterations", (best_dual - best_primal) / best_dual, k)
    w = np.zeros(len(preds))
    w[: len(best_dual_weights)] = best_dual_weights
    mixture = RoutingMixture(g.n, preds, congs, w)
    return DualitySolution(
        graph=g,
        weights=best_s,
        congestion=best_dual_c,
        primal_value=best_primal,
        dual_value=best_dual,
        iterations=k,
        converged=converged,
        mixture=mixture,
        history=history,
        seed=seed,
        tol=tol,
    )
