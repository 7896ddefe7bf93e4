"""Path-based multicommodity flows, vertex congestion and the metric objective."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DegenerateError, PreconditionError
from .graph import Graph, as_weights
from .paths import all_pairs_metric

UNIT_TOL = 1e-9
PRUNE_BELOW = 1e-12

Pair = tuple[int, int]
Path = tuple[int, ...]


def _canon(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


def check_path(g: Graph, path, u: int, v: int) -> None:
    """Raise PreconditionError unless ``path`` is a simple u-v path in ``g``."""
    if len(path) < 2 or path[0] != u or path[-1] != v:
        raise PreconditionError(f"path {path} does not join {u} and {v}")
    if len(set(path)) != len(path):
        raise PreconditionError(f"path {path} is not simple")
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise PreconditionError(f"path {path} uses non-edge ({a}, {b})")


@dataclass(frozen=True)
class FractionalFlow:
    """Unit flow per demand pair, stored as ``{(u, v): {path: weight}}`` with ``u < v``.

    Paths run from ``u`` to ``v``. Identical vertex sequences are merged and
    weights below ``PRUNE_BELOW`` are dropped at construction.
    """

    graph: Graph
    routes: Mapping[Pair, Mapping[Path, float]]

    def __post_init__(self):
        clean: dict[Pair, dict[Path, float]] = {}
        for (a, b), paths in self.routes.items():
            u, v = _canon(int(a), int(b))
            if u == v:
                raise PreconditionError(f"demand ({a}, {b}) has equal endpoints")
            merged: dict[Path, float] = clean.setdefault((u, v), {})
            for p, w in paths.items():
                p = tuple(int(x) for x in p)
                if p and p[0] != u:
                    p = p[::-1]
                w = float(w)
                if w < 0:
                    raise PreconditionError(f"negative flow on {p}")
                check_path(self.graph, p, u, v)
                merged[p] = merged.get(p, 0.0) + w
        for pair, merged in clean.items():
            for p in [p for p, w in merged.items() if w < PRUNE_BELOW]:
                del merged[p]
            total = sum(merged.values())
            if abs(total - 1.0) > UNIT_TOL:
                raise PreconditionError(f"demand {pair} carries {total}, not a unit flow")
        object.__setattr__(self, "routes", clean)

    @property
    def demands(self) -> list[Pair]:
        return sorted(self.routes)

    def n_paths(self) -> int:
        return sum(len(p) for p in self.routes.values())

    @classmethod
    def from_paths(cls, g: Graph, paths: Mapping[Pair, Path]) -> "FractionalFlow":
        """Integral (single path per demand) flow as a fractional flow."""
        return cls(g, {pair: {tuple(p): 1.0} for pair, p in paths.items()})


def congestion(flow: FractionalFlow) -> np.ndarray:
    """``c(v)``: total weight of stored paths containing ``v``."""
    c = np.zeros(flow.graph.n)
    for paths in flow.routes.values():
        for p, w in paths.items():
            c[list(p)] += w
    return c


def con_norm(profile, p: int = 2) -> float:
    """``(sum_v c(v)^p)^(1/p)`` for ``p`` in {1, 2}."""
    if p not in (1, 2):
        raise PreconditionError(f"p must be 1 or 2, got {p}")
    c = np.asarray(profile, dtype=float)
    if p == 1:
        return float(np.abs(c).sum())
    return float(np.sqrt(c @ c))


def lambda_s(g: Graph, s) -> float:
    """Sum of ``d_s`` over unordered pairs divided by ``||s||_2``."""
    s = as_weights(g, s)
    norm = math.sqrt(float(s @ s))
    if norm == 0.0:
        raise DegenerateError("lambda_s is undefined for identically zero weights")
    return float(all_pairs_metric(g, s).pair_values().sum()) / norm
