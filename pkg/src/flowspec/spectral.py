"""Second Laplacian eigenvalue, sweep cuts and recursive balanced edge separators."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateError, InvariantViolation, PreconditionError
from .graph import Graph, dirichlet_energy, induced_components, induced_subgraph, laplacian_matrix

log = logging.getLogger(__name__)

MODULE_VERSION = "spectral-cuts/1"
DENSE_MAX_N = 64
BOUND_RTOL = 1e-12


@dataclass
class SpectrumResult:
    lambda2: float
    fiedler: np.ndarray  # unit norm, orthogonal to the all-ones vector
    method: str  # "dense_oracle" or "iterative"
    residual: float
    converged: bool = True


def _finish(g: Graph, vec: np.ndarray, method: str, tol: float) -> SpectrumResult:
    v = vec - vec.mean()
    v /= np.linalg.norm(v)
    L = laplacian_matrix(g)
    lam = float(v @ (L @ v))
    residual = float(np.linalg.norm(L @ v - lam * v))
    return SpectrumResult(lam, v, method, residual, residual <= tol)


def lambda2_solve(g: Graph, tol: float = 1e-8) -> SpectrumResult:
    """Second-smallest Laplacian eigenvalue and a unit Fiedler vector.

    Small graphs use a dense symmetric eigendecomposition. Larger ones run
    ARPACK on ``P (L + eps I)^-1 P`` with ``P`` the projector onto the
    complement of the all-ones vector, so the constant direction is deflated on
    every application and the wanted eigenvalue becomes the largest.
    """
    if g.n < 2:
        raise PreconditionError("lambda_2 needs at least two vertices")
    if g.n <= DENSE_MAX_N:
        w, V = scipy.linalg.eigh(laplacian_matrix(g).toarray())
        res = _finish(g, V[:, 1], "dense_oracle", tol)
        res.lambda2 = float(w[1])
        return res

    n = g.n
    eps = 1e-3
    lu = spla.splu(sp.csc_matrix(laplacian_matrix(g) + eps * sp.identity(n)))

    def apply(x):
        x = np.asarray(x).ravel()
        y = lu.solve(x - x.mean())
        return y - y.mean()

    op = spla.LinearOperator((n, n), matvec=apply, dtype=float)
    v0 = np.cos(np.arange(n) + 1.0)
    _, vecs = spla.eigsh(op, k=1, which="LA", v0=v0 - v0.mean(), tol=1e-14, maxiter=50 * n)
    res = _finish(g, vecs[:, 0], "iterative", tol)
    if not res.converged:
        log.warning("lambda2_solve: residual %.3g above tol %.3g", res.residual, tol)
    return res


# ----------------------------------------------------------------- edge cuts

def cut_edges(g: Graph, side) -> int:
    mask = np.zeros(g.n, dtype=bool)
    mask[list(side)] = True
    e = g.edge_array
    return int((mask[e[:, 0]] != mask[e[:, 1]]).sum())


def cut_ratio(g: Graph, side) -> float:
    """Crossing edges divided by the size of the smaller side."""
    k = len(set(side))
    if k == 0 or k == g.n:
        raise PreconditionError("cut side must be a non-empty proper subset")
    return cut_edges(g, side) / min(k, g.n - k)


@dataclass
class CutResult:
    side: frozenset
    ratio: float
    bound: float  # sqrt(2 d_max <v, L v> / ||v||^2) for the centred sweep vector
    crossing: int

    def to_record(self) -> dict:
        return {
            "module": MODULE_VERSION,
            "ratio": self.ratio,
            "bound": self.bound,
            "crossing_edges": self.crossing,
            "side_size": len(self.side),
        }


def sweep_bound(g: Graph, v) -> float:
    v = np.asarray(v, dtype=float)
    v = v - v.mean()
    return math.sqrt(2 * g.max_degree * dirichlet_energy(g, v) / float(v @ v))


def sweep_cut(g: Graph, v) -> CutResult:
    """Best prefix cut (by ratio) of the vertices sorted by ``v``; ties go to the shorter prefix."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != g.n:
        raise PreconditionError(f"vector has length {v.shape[0]}, graph has {g.n} vertices")
    if g.n < 2 or np.ptp(v) == 0.0:
        raise DegenerateError("sweep needs a non-constant vector")
    v = v - v.mean()
    order = np.argsort(v, kind="stable")
    pos = np.empty(g.n, dtype=np.int64)
    pos[order] = np.arange(g.n)
    e = g.edge_array
    lo = np.minimum(pos[e[:, 0]], pos[e[:, 1]])
    hi = np.maximum(pos[e[:, 0]], pos[e[:, 1]])
    # Edge crosses prefix {order[:i]} iff lo < i <= hi.
    diff = np.zeros(g.n + 1, dtype=np.int64)
    np.add.at(diff, lo + 1, 1)
    np.add.at(diff, hi + 1, -1)
    crossing = np.cumsum(diff)[1:g.n]
    sizes = np.arange(1, g.n)
    ratios = crossing / np.minimum(sizes, g.n - sizes)
    i = int(np.argmin(ratios))
    bound = sweep_bound(g, v)
    ratio = float(ratios[i])
    if ratio > bound * (1 + BOUND_RTOL) + BOUND_RTOL:
        raise InvariantViolation(f"sweep ratio {ratio} exceeds its guarantee {bound}")
    return CutResult(frozenset(order[: i + 1].tolist()), ratio, bound, int(crossing[i]))


def fiedler_sweep(g: Graph) -> CutResult:
    return sweep_cut(g, lambda2_solve(g).fiedler)


# --------------------------------------------------------- balanced separators

@dataclass
class EdgeSeparator:
    side: frozenset
    crossing: int
    levels: list = field(default_factory=list)  # (peeled size, crossing edges charged at that level)

    @property
    def charged(self) -> int:
        return sum(c for _, c in self.levels)

    def balance(self, n: int) -> float:
        return min(len(self.side), n - len(self.side)) / n


def recursive_edge_separator(
    g: Graph,
    cutter: Callable[[Graph], CutResult] = fiedler_sweep,
    delta: float = 1 / 3,
) -> EdgeSeparator:
    """Peel off the smaller side of repeated cuts until it holds ``delta * n`` vertices.

    Each peel takes at most half of what remains, so the final split leaves at
    least ``(1 - delta) n / 2`` on the other side. If the remainder is
    disconnected, its smallest component is peeled at no cost instead.
    """
    if not 0 < delta <= 1 / 3:
        raise PreconditionError(f"delta must lie in (0, 1/3], got {delta}")
    n = g.n
    if n < 2:
        raise PreconditionError("need at least two vertices to separate")
    taken: set[int] = set()
    remaining = list(range(n))
    levels = []
    while len(taken) < delta * n:
        comps = induced_components(g, remaining)
        if len(comps) > 1:
            piece = min(comps, key=lambda c: (len(c), c[0]))
            levels.append((len(piece), 0))
        else:
            sub, labels = induced_subgraph(g, remaining)
            cut = cutter(sub)
            small = cut.side if len(cut.side) <= sub.n / 2 else frozenset(range(sub.n)) - cut.side
            piece = [labels[x] for x in sorted(small)]
            levels.append((len(piece), cut.crossing))
        taken.update(piece)
        remaining = [v for v in remaining if v not in taken]
    crossing = cut_edges(g, taken)
    if crossing > sum(c for _, c in levels):
        raise InvariantViolation("separator cuts more edges than the peels charged")
    return EdgeSeparator(frozenset(taken), crossing, levels)
