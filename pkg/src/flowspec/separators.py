"""Vertex separators from a threshold sweep over a line embedding of ``d_s``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import EXPANSION_RTOL, LineEmbedding, check_non_expansive, pair_power_sum
from .errors import InvariantViolation, PreconditionError
from .graph import Graph, as_weights
from .paths import all_pairs_metric

MODULE_VERSION = "spectral-cuts/1"
BOUND_RTOL = 1e-9


@dataclass
class VertexSeparator:
    A: frozenset
    B: frozenset
    S: frozenset
    alpha: float  # |S| / (|A u S| * |B u S|)
    bound: float  # 2 sum(s) / sum over pairs |f(u) - f(v)|
    threshold: float
    degenerate: bool = False

    def to_record(self) -> dict:
        return {
            "module": MODULE_VERSION,
            "alpha": self.alpha,
            "bound": self.bound,
            "threshold": self.threshold,
            "sizes": f"{len(self.A)} {len(self.B)} {len(self.S)}",
            "degenerate": self.degenerate,
        }

    def to_text(self) -> str:
        return "".join(f"{name}: {' '.join(map(str, sorted(part)))}\n" for name, part in
                       (("A", self.A), ("B", self.B), ("S", self.S)))


def separator_alpha(n_a: int, n_b: int, n_s: int) -> float:
    return n_s / ((n_a + n_s) * (n_b + n_s))


def fhl_sweep(g: Graph, s, f) -> VertexSeparator:
    """Sweep a threshold ``t`` along ``f``: ``A = {f + s < t}``, ``B = {f - s > t}``, rest in ``S``.

    Candidates are all points ``f(v)``, ``f(v) +- s(v)`` plus midpoints between
    consecutive ones, since the strict inequalities make the open gaps between
    breakpoints distinct candidates. ``f`` must be non-expansive for ``d_s``,
    which rules out edges between ``A`` and ``B``; this is re-checked anyway.
    """
    s = as_weights(g, s)
    fv = np.asarray(f.f if isinstance(f, LineEmbedding) else f, dtype=float).reshape(-1)
    if fv.shape[0] != g.n:
        raise PreconditionError(f"embedding has length {fv.shape[0]}, graph has {g.n} vertices")
    metric = all_pairs_metric(g, s)
    try:
        check_non_expansive(metric, fv)
    except InvariantViolation as exc:
        raise PreconditionError(f"embedding is not non-expansive for d_s: {exc}") from None
    # Breakpoints closer than the non-expansiveness tolerance are rounding noise.
    eps = EXPANSION_RTOL * max(1.0, float(metric.d.max(initial=0.0)))

    lo, hi = fv - s, fv + s
    points = np.unique(np.concatenate([lo, fv, hi]))
    gaps = np.diff(points) > 2 * eps
    cand = np.sort(np.concatenate([points, ((points[:-1] + points[1:]) / 2)[gaps]]))
    n_a = np.searchsorted(np.sort(hi), cand - eps, side="left")  # hi < t - eps
    n_b = g.n - np.searchsorted(np.sort(lo), cand + eps, side="right")  # lo > t + eps
    n_s = g.n - n_a - n_b
    ok = ((n_a + n_s) > 0) & ((n_b + n_s) > 0)
    if not ok.any():
        raise InvariantViolation("no admissible threshold")
    alpha = np.full(len(cand), np.inf)
    alpha[ok] = n_s[ok] / ((n_a[ok] + n_s[ok]) * (n_b[ok] + n_s[ok]))

    e = g.edge_array
    if len(e):
        u, v = e[:, 0], e[:, 1]
        for t in cand[ok]:
            in_a, in_b = hi < t - eps, lo > t + eps
            if np.any((in_a[u] & in_b[v]) | (in_b[u] & in_a[v])):
                raise InvariantViolation(f"threshold {t} leaves an edge between A and B")

    # Among equal sparsities prefer a proper split, then the full separator S = V.
    trivial = (n_a == 0) | (n_b == 0)
    k = int(np.lexsort((cand, n_s != g.n, trivial, alpha))[0])
    t = float(cand[k])
    A = frozenset(np.flatnonzero(hi < t - eps).tolist())
    B = frozenset(np.flatnonzero(lo > t + eps).tolist())
    S = frozenset(range(g.n)) - A - B
    spread = pair_power_sum(fv, 1)
    bound = 2 * float(s.sum()) / spread if spread > 0 else np.inf
    best = float(alpha[k])
    if best > bound * (1 + BOUND_RTOL):
        raise InvariantViolation(f"separator sparsity {best} exceeds its guarantee {bound}")
    return VertexSeparator(A, B, S, best, bound, t, degenerate=bool(spread == 0 or not A or not B))
