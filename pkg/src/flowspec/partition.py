"""Diameter-bounded random partitions of finite metrics and empirical padding."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvariantViolation, ParseError, PreconditionError
from .graph import Graph, Metric, induced_components
from .paths import all_pairs_metric

DIAM_RTOL = 1e-9


@dataclass(frozen=True)
class PaddedPartition:
    """Disjoint clusters covering ``0..n-1``, each of diameter at most ``delta``.

    Clusters are sorted tuples, listed in order of their smallest member.
    ``alpha`` is the padding parameter the construction targets, if any.
    """

    clusters: tuple[tuple[int, ...], ...]
    delta: float
    alpha: float | None = None

    @classmethod
    def from_labels(cls, labels, delta: float, alpha: float | None = None) -> "PaddedPartition":
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(np.asarray(labels).tolist()):
            groups.setdefault(lab, []).append(v)
        clusters = sorted(tuple(sorted(c)) for c in groups.values())
        return cls(tuple(clusters), float(delta), alpha)

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.clusters)

    @property
    def labels(self) -> np.ndarray:
        lab = np.empty(self.n, dtype=np.int64)
        for k, c in enumerate(self.clusters):
            lab[list(c)] = k
        return lab

    def check(self, metric: Metric) -> None:
        """Raise InvariantViolation unless this is a partition with diameters <= delta."""
        seen = np.zeros(metric.n, dtype=np.int64)
        for c in self.clusters:
            seen[list(c)] += 1
        if np.any(seen != 1):
            raise InvariantViolation("clusters do not form a partition of the point set")
        limit = self.delta * (1 + DIAM_RTOL) + DIAM_RTOL
        for c in self.clusters:
            if metric.diameter(c) > limit:
                raise InvariantViolation(f"cluster {c[:5]}... has diameter {metric.diameter(c)} > {self.delta}")

    def to_text(self) -> str:
        return "".join(f"{k} : {' '.join(map(str, c))}\n" for k, c in enumerate(self.clusters))


def parse_partition(text: str, delta: float = math.inf) -> PaddedPartition:
    clusters = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise ParseError(f"bad partition line {raw!r}")
        try:
            int(head)
            clusters.append(tuple(sorted(int(x) for x in tail.split())))
        except ValueError:
            raise ParseError(f"bad partition line {raw!r}") from None
    return PaddedPartition(tuple(sorted(clusters)), delta)


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not delta > 0:
        raise PreconditionError(f"delta must be positive, got {delta}")
    return delta


def ckr_partition(metric: Metric, delta: float, seed: int = 0) -> PaddedPartition:
    """Random-radius ball carving.

    Draws one radius ``r`` uniform in ``[delta/4, delta/2]`` and a uniform
    random order of centres; each point joins the first centre within ``r``.
    """
    delta = _check_delta(delta)
    rng = np.random.default_rng(seed)
    r = rng.uniform(delta / 4, delta / 2)
    perm = rng.permutation(metric.n)
    # Every point is within r of itself, so each column has a hit.
    first = np.argmax(metric.d[perm] <= r, axis=0)
    part = PaddedPartition.from_labels(perm[first], delta, alpha=None)
    part.check(metric)
    return part


def _clip(metric: Metric, cluster: list[int], delta: float) -> list[list[int]]:
    """Split a cluster into greedy balls of radius delta/2 around its smallest remaining point."""
    if metric.diameter(cluster) <= delta:
        return [cluster]
    rest = np.array(sorted(cluster))
    out = []
    while len(rest):
        ball = metric.d[rest[0], rest] <= delta / 2
        out.append(rest[ball].tolist())
        rest = rest[~ball]
    return out


def chop_partition_metric(g: Graph, metric: Metric, delta: float, rounds: int = 3, seed: int = 0) -> PaddedPartition:
    """Iterated annulus chopping on ``g`` with distances from ``metric``.

    Each round picks a random root and offset, slices the distances from the
    root into annuli of width ``delta / rounds`` and refines every cluster by
    annulus and then by connected component in ``g``. Clusters still wider
    than ``delta`` at the end are split into greedy ``delta/2`` balls. This is
    a heuristic: it carries no padding guarantee, which is measured instead.
    """
    delta = _check_delta(delta)
    if rounds < 1:
        raise PreconditionError(f"rounds must be >= 1, got {rounds}")
    if metric.n != g.n:
        raise PreconditionError("metric and graph sizes differ")
    rng = np.random.default_rng(seed)
    width = delta / rounds
    clusters = [list(range(g.n))]
    for _ in range(rounds):
        root = int(rng.integers(g.n))
        offset = rng.uniform(0, width)
        band = np.floor((metric.d[root] + offset) / width).astype(np.int64)
        refined = []
        for c in clusters:
            groups: dict[int, list[int]] = {}
            for v in c:
                groups.setdefault(int(band[v]), []).append(v)
            for members in groups.values():
                refined.extend(induced_components(g, members))
        clusters = refined
    final = []
    for c in clusters:
        final.extend(_clip(metric, c, delta))
    labels = np.empty(g.n, dtype=np.int64)
    for k, c in enumerate(final):
        labels[c] = k
    part = PaddedPartition.from_labels(labels, delta)
    part.check(metric)
    return part


def chop_partition(g: Graph, s, delta: float, rounds: int = 3, seed: int = 0) -> PaddedPartition:
    """Annulus chopping under the vertex-weighted metric ``d_s``."""
    return chop_partition_metric(g, all_pairs_metric(g, s), delta, rounds, seed)


# ------------------------------------------------------------------- padding

def padding_radius(metric: Metric, part: PaddedPartition) -> np.ndarray:
    """Per point, the distance to the nearest point in a different cluster (inf if none).

    The ball ``B(x, r)`` (closed) lies inside the cluster of ``x`` exactly when
    ``r`` is below this radius.
    """
    lab = part.labels
    other = lab[:, None] != lab[None, :]
    masked = np.where(other, metric.d, np.inf)
    return masked.min(axis=1)


@dataclass
class PaddingEstimate:
    delta: float
    samples: int
    radii: np.ndarray  # samples x n padding radii
    per_point: np.ndarray  # smallest alpha with padding probability >= 1/2, per point

    @property
    def alpha_hat(self) -> float:
        return float(self.per_point.max())

    def probability(self, alpha: float) -> np.ndarray:
        """Empirical per-point probability that ``B(x, delta/alpha)`` stays in its cluster."""
        return (self.radii > self.delta / alpha).mean(axis=0)


def estimate_padding(
    metric: Metric,
    delta: float,
    sampler: Callable[[int], PaddedPartition],
    samples: int = 200,
    seed: int = 0,
) -> PaddingEstimate:
    """Empirical padding parameter from ``samples`` partitions ``sampler(seed_k)``.

    With ``q(x)`` the ``ceil(N/2)``-th largest padding radius of ``x`` over the
    samples, the smallest workable alpha for ``x`` is ``delta / q(x)`` (an
    infimum, since the ball must sit strictly inside the radius).
    """
    if samples < 1:
        raise PreconditionError("need at least one partition sample")
    seeds = np.random.SeedSequence(seed).generate_state(samples)
    radii = np.vstack([padding_radius(metric, sampler(int(k))) for k in seeds])
    need = math.ceil(samples / 2)
    q = -np.sort(-radii, axis=0)[need - 1]
    with np.errstate(divide="ignore"):
        per_point = np.where(q > 0, delta / q, np.inf)
    return PaddingEstimate(float(delta), samples, radii, per_point)


def partition_sampler(source: str, metric: Metric, delta: float, graph: Graph | None = None, rounds: int = 3):
    """``seed -> PaddedPartition`` for the named construction (``ckr`` or ``chop``)."""
    if source == "ckr":
        return lambda seed: ckr_partition(metric, delta, seed)
    if source == "chop":
        if graph is None:
            raise PreconditionError("chop partitions need the underlying graph")
        return lambda seed: chop_partition_metric(graph, metric, delta, rounds, seed)
    raise PreconditionError(f"unknown partition source {source!r}")
