"""Certified upper bounds on the second Laplacian eigenvalue from congestion-optimal weights.

Pipeline: solve for the weights ``s`` that maximise ``lambda_s``, embed
``d_s`` into the line with ``p = 2``, and evaluate the Rayleigh quotient of the
centred embedding. That quotient is the certificate. The record also carries
each link of the chain

    edge energy <= 2 d_max ||s||^2
    n * centred norm = sum_pairs |f(u)-f(v)|^2 >= (sum_pairs |f(u)-f(v)|)^2 / C(n, 2)
    sum_pairs |f(u)-f(v)|^2 = sum_pairs d_s^2 / distortion >= (lambda_s ||s||)^2 / (C(n, 2) distortion)

which combine into ``lambda_2 <= 2 d_max n C(n, 2) distortion / lambda_s^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .duality import DualitySolution, solve_min_con2
from .embedding import LineEmbedding, line_embed, pair_power_sum
from .errors import DegenerateError, InvariantViolation, PreconditionError
from .graph import Graph, dirichlet_energy, rayleigh_quotient
from .paths import all_pairs_metric

MODULE_VERSION = "spectral-cuts/1"
CHAIN_RTOL = 1e-9


@dataclass
class SolverConfig:
    max_iters: int = 500
    tol: float = 1e-3
    seed: int = 0


@dataclass
class EmbedConfig:
    trials: int = 128
    seed: int = 0
    partition_source: str = "ckr"
    rounds: int = 3


@dataclass
class Certificate:
    upper_bound: float  # Rayleigh quotient of the centred embedding, inf if unavailable
    s: np.ndarray
    f: np.ndarray
    solution: DualitySolution = field(repr=False)
    embedding: LineEmbedding = field(repr=False)
    chain: dict = field(default_factory=dict)
    achieved_lambda2: float | None = None

    @property
    def available(self) -> bool:
        return math.isfinite(self.upper_bound)

    def to_record(self) -> dict:
        rec = {"module": MODULE_VERSION, "upper_bound": self.upper_bound, "available": self.available}
        if self.achieved_lambda2 is not None:
            rec["lambda2"] = self.achieved_lambda2
        rec.update({f"chain.{k}": v for k, v in self.chain.items()})
        return rec


def _chain(g: Graph, s: np.ndarray, f: np.ndarray, emb: LineEmbedding, lam_s: float) -> dict:
    n = g.n
    pairs = n * (n - 1) / 2
    energy = dirichlet_energy(g, f)
    deg_mass = float(g.degrees @ (s * s))
    norm_sq = float(s @ s)
    sq_sum = pair_power_sum(f, 2)
    abs_sum = pair_power_sum(f, 1)
    centred = f - f.mean()
    chain = {
        "edge_energy": energy,
        "edge_energy_bound": 2 * deg_mass,
        "edge_energy_ceiling": 2 * g.max_degree * norm_sq,
        "centred_norm_sq": float(centred @ centred),
        "pair_sq_sum": sq_sum,
        "pair_abs_sum": abs_sum,
        "cauchy_schwarz_floor": abs_sum ** 2 / pairs,
        "metric_sq_sum": emb.metric_sum,
        "distortion": emb.distortion,
        "lambda_s": lam_s,
        "chain_bound": 2 * g.max_degree * n * pairs * emb.distortion / lam_s ** 2,
    }
    tol = CHAIN_RTOL * max(1.0, energy, sq_sum)
    checks = [
        ("edge energy", energy, chain["edge_energy_bound"]),
        ("degree mass", chain["edge_energy_bound"], chain["edge_energy_ceiling"]),
        ("cauchy-schwarz", chain["cauchy_schwarz_floor"], sq_sum),
        ("centring", abs(n * chain["centred_norm_sq"] - sq_sum), 0.0),
        ("metric floor", (lam_s ** 2 * norm_sq) / (pairs * emb.distortion), sq_sum),
    ]
    for name, lhs, rhs in checks:
        if lhs > rhs + tol:
            raise InvariantViolation(f"certificate chain step '{name}' fails: {lhs} > {rhs}")
    return chain


def lambda2_certificate(
    g: Graph,
    solver_cfg: SolverConfig | None = None,
    embed_cfg: EmbedConfig | None = None,
    solution: DualitySolution | None = None,
) -> Certificate:
    """Certified ``lambda_2`` upper bound; pass ``solution`` to reuse a finished solve."""
    if g.n < 2:
        raise PreconditionError("certificate needs at least two vertices")
    solver_cfg = solver_cfg or SolverConfig()
    embed_cfg = embed_cfg or EmbedConfig()
    if solution is None:
        solution = solve_min_con2(g, solver_cfg.max_iters, solver_cfg.tol, solver_cfg.seed)
    s = solution.weights
    metric = all_pairs_metric(g, s)
    emb = line_embed(metric, 2, embed_cfg.trials, embed_cfg.seed, embed_cfg.partition_source, g, embed_cfg.rounds)
    f = emb.f - emb.f.mean()
    if emb.degenerate or np.ptp(f) == 0:
        return Certificate(math.inf, s, f, solution, emb)
    bound = rayleigh_quotient(g, f)
    chain = _chain(g, s, f, emb, solution.primal_value)
    return Certificate(bound, s, f, solution, emb, chain)


def check_against(cert: Certificate, lambda2: float, residual: float = 0.0) -> None:
    """Assert the certificate does not undercut an eigensolver value."""
    if not cert.available:
        raise DegenerateError("certificate unavailable")
    cert.achieved_lambda2 = lambda2
    if cert.upper_bound < lambda2 - 1e-9 - residual:
        raise InvariantViolation(f"certificate {cert.upper_bound} below lambda_2 = {lambda2}")
