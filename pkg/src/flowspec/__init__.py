"""Congestion-optimal vertex weights, line embeddings and certified spectral bounds."""

from .duality import DualitySolution, solve_min_con2
from .errors import (
    ConvergenceError,
    DegenerateError,
    FlowSpecError,
    InvariantViolation,
    ParseError,
    PreconditionError,
)
from .flows import FractionalFlow, con_norm, congestion, lambda_s
from .generators import generate
from .graph import Graph, Metric, rayleigh_quotient
from .paths import all_pairs_metric, vertex_weighted_distances

__all__ = [
    "ConvergenceError",
    "DegenerateError",
    "DualitySolution",
    "FlowSpecError",
    "FractionalFlow",
    "Graph",
    "InvariantViolation",
    "Metric",
    "ParseError",
    "PreconditionError",
    "all_pairs_metric",
    "con_norm",
    "congestion",
    "generate",
    "lambda_s",
    "rayleigh_quotient",
    "solve_min_con2",
    "vertex_weighted_distances",
]
