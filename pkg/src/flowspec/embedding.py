"""Non-expansive maps of a finite metric into the real line with large average stretch.

Both constructions return ``f(u) = d(u, S)`` for a set ``S``, so
non-expansiveness follows from the triangle inequality; it is still checked on
every pair before returning.

* Dense case: some point ``x0`` has at least ``n/10`` points within
  ``scale/4``. Take ``S`` to be that ball (the best such ``x0``).
* Spread case: partition at diameter ``scale/4``, keep each cluster in ``S``
  with probability 1/2, and keep the best of ``trials`` draws.

``scale`` is the power mean ``(2/n^2 * sum over unordered pairs d^p)^(1/p)``.
The factor 2 makes it agree with the ordered-pair mean that includes the
zero diagonal, so the dense-case constant carries over unchanged.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, PreconditionError
from .graph import Graph, Metric
from .partition import partition_sampler

log = logging.getLogger(__name__)

MODULE_VERSION = "partition-embed/1"
DENSE_RADIUS_FRACTION = 0.25
DENSE_MASS_FRACTION = 0.1
EXPANSION_RTOL = 1e-12


def dense_case_constant(p: int) -> float:
    """Guaranteed ratio ``sum d^p / sum |f(u)-f(v)|^p`` in the dense case, unordered pairs."""
    return 5.0 * 4.0 ** p


def pair_power_sum(values, p: int) -> float:
    """``sum over u < v of |x_u - x_v|^p`` for p in {1, 2} in O(n log n)."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if p == 2:
        return float(max(n * (x @ x) - x.sum() ** 2, 0.0))
    if p == 1:
        xs = np.sort(x)
        return float(((2 * np.arange(n) - n + 1) * xs).sum())
    raise PreconditionError(f"p must be 1 or 2, got {p}")


def metric_power_sum(metric: Metric, p: int) -> float:
    return float((metric.pair_values() ** p).sum())


def scale_p(metric: Metric, p: int) -> float:
    n = metric.n
    return (2.0 / n ** 2 * metric_power_sum(metric, p)) ** (1.0 / p)


def distance_to_set(metric: Metric, members) -> np.ndarray:
    idx = np.flatnonzero(members) if np.asarray(members).dtype == bool else np.asarray(members, dtype=np.int64)
    if len(idx) == 0:
        raise PreconditionError("distance to the empty set is undefined")
    return metric.d[:, idx].min(axis=1)


def check_non_expansive(metric: Metric, f) -> float:
    """Largest excess of ``|f(u) - f(v)|`` over ``d(u, v)``; raises if beyond rounding."""
    f = np.asarray(f, dtype=float)
    excess = np.abs(f[:, None] - f[None, :]) - metric.d
    worst = float(excess.max(initial=0.0))
    scale = max(1.0, float(metric.d.max(initial=0.0)))
    if worst > EXPANSION_RTOL * scale:
        raise InvariantViolation(f"map expands a pair by {worst}")
    return worst


@dataclass
class LineEmbedding:
    f: np.ndarray
    metric: Metric = field(repr=False)
    p: int
    case: str  # "dense", "spread" or "degenerate"
    scale: float
    objective: float  # sum over pairs |f(u) - f(v)|^p
    metric_sum: float  # sum over pairs d(u, v)^p
    anchor: int | None = None  # centre of the dense ball
    trial_stats: list = field(default_factory=list, repr=False)
    best_trial: int | None = None
    partition_source: str | None = None
    seed: int = 0

    @property
    def distortion(self) -> float:
        """``sum d^p / sum |f(u) - f(v)|^p`` (inf if f is constant)."""
        if self.metric_sum == 0:
            return 1.0
        return self.metric_sum / self.objective if self.objective > 0 else math.inf

    @property
    def degenerate(self) -> bool:
        return self.case == "degenerate"

    def to_text(self) -> str:
        return "".join(f"{v} {x:.17g}\n" for v, x in enumerate(self.f))

    def to_record(self) -> dict:
        rec = {
            "module": MODULE_VERSION,
            "seed": self.seed,
            "p": self.p,
            "case": self.case,
            "scale": self.scale,
            "scale_convention": "unordered pairs, factor 2/n^2",
            "objective": self.objective,
            "metric_sum": self.metric_sum,
            "distortion": self.distortion,
            "partition": self.partition_source or "none",
            "trials": len(self.trial_stats),
        }
        if self.case == "dense":
            rec["dense_constant"] = dense_case_constant(self.p)
            rec["anchor"] = self.anchor
        return rec


def _dense_candidates(metric: Metric, radius: float) -> np.ndarray:
    counts = (metric.d <= radius).sum(axis=1)
    return np.flatnonzero(counts >= DENSE_MASS_FRACTION * metric.n)


def line_embed(
    metric: Metric,
    p: int = 2,
    trials: int = 128,
    seed: int = 0,
    partition_source: str = "ckr",
    graph: Graph | None = None,
    rounds: int = 3,
) -> LineEmbedding:
    """Non-expansive ``f`` maximising ``sum over pairs |f(u) - f(v)|^p`` among the candidates tried."""
    if p not in (1, 2):
        raise PreconditionError(f"p must be 1 or 2, got {p}")
    if trials < 1:
        raise PreconditionError("need at least one trial")
    n = metric.n
    total = metric_power_sum(metric, p)
    if n < 2 or total == 0.0:
        return LineEmbedding(np.zeros(n), metric, p, "degenerate", 0.0, 0.0, total, seed=seed)
    scale = scale_p(metric, p)
    radius = DENSE_RADIUS_FRACTION * scale

    dense = _dense_candidates(metric, radius)
    if len(dense):
        best = (-1.0, None, None)
        for x0 in dense:
            f = distance_to_set(metric, metric.d[x0] <= radius)
            val = pair_power_sum(f, p)
            if val > best[0]:
                best = (val, int(x0), f)
        val, x0, f = best
        check_non_expansive(metric, f)
        floor = total / dense_case_constant(p)
        if val < floor * (1 - 1e-9):
            raise InvariantViolation(f"dense-case embedding captures {val}, below the guaranteed {floor}")
        return LineEmbedding(f, metric, p, "dense", scale, val, total, anchor=x0, seed=seed)

    sampler = partition_sampler(partition_source, metric, radius, graph, rounds)
    best_val, best_f, best_t, stats = -1.0, None, None, []
    for t in range(trials):
        part = sampler(int(np.random.SeedSequence([seed, t]).generate_state(1)[0]))
        rng = np.random.default_rng([seed, t])
        keep = rng.integers(0, 2, size=len(part.clusters)) == 0
        members = keep[part.labels]
        if members.any():
            f = distance_to_set(metric, members)
            val = pair_power_sum(f, p)
        else:
            f, val = np.zeros(n), 0.0
        stats.append(val)
        if val > best_val:
            best_val, best_f, best_t = val, f, t
    check_non_expansive(metric, best_f)
    if best_val == 0.0:
        log.warning("line_embed: every trial produced a constant map")
    return LineEmbedding(
        best_f, metric, p, "spread", scale, best_val, total,
        trial_stats=stats, best_trial=best_t, partition_source=partition_source, seed=seed,
    )
