"""Seeded size ladders through the full pipeline, with log-log scaling fits."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .certificate import EmbedConfig, SolverConfig, check_against, lambda2_certificate
from .duality import solve_min_con2
from .errors import PreconditionError
from .generators import generate
from .report import Report
from .separators import fhl_sweep
from .spectral import lambda2_solve, sweep_cut

MODULE_VERSION = "cli-harness/1"
CSV_COLUMNS = ("n", "con2", "lambda_s", "gap", "lambda2", "certificate", "cut_ratio", "separator_alpha")


@dataclass
class ScalingFit:
    slope: float
    intercept: float
    residual: float  # root-mean-square residual in log space


def fit_scaling(points) -> ScalingFit:
    """Ordinary least squares of ``log value`` on ``log n``."""
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise PreconditionError("a scaling fit needs at least two points")
    if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
        raise PreconditionError("scaling fit needs finite positive sizes and values")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    if np.ptp(x) == 0:
        raise PreconditionError("scaling fit needs at least two distinct sizes")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ScalingFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2))))


@dataclass
class ExperimentConfig:
    family: str = "grid2d"
    sizes: tuple[int, ...] = (8, 16, 32)
    k: int = 3
    dim: int = 2
    max_iters: int = 100
    tol: float = 1e-3
    trials: int = 128
    p: int = 2
    partition_source: str = "ckr"
    seed: int = 0
    csv_path: str | None = None
    out_dir: str | None = None
    timings: bool = False

    def __post_init__(self):
        self.sizes = tuple(int(x) for x in self.sizes)
        if not self.sizes:
            raise PreconditionError("empty size ladder")
        if self.p != 2:
            raise PreconditionError("the certificate pipeline embeds with p = 2")


@dataclass
class LadderPoint:
    size: int
    row: dict
    status: str
    iterations: int
    seconds: float = field(default=0.0)


def run_point(cfg: ExperimentConfig, size: int) -> LadderPoint:
    start = time.perf_counter()
    g = generate(cfg.family, size, k=cfg.k, dim=cfg.dim, seed=cfg.seed)
    sol = solve_min_con2(g, cfg.max_iters, cfg.tol, cfg.seed)
    cert = lambda2_certificate(
        g,
        embed_cfg=EmbedConfig(cfg.trials, cfg.seed, cfg.partition_source),
        solution=sol,
    )
    eig = lambda2_solve(g)
    if cert.available:
        check_against(cert, eig.lambda2, eig.residual)
    cut = sweep_cut(g, eig.fiedler)
    sep = fhl_sweep(g, sol.weights, cert.embedding)
    row = {
        "n": g.n,
        "con2": sol.dual_value,
        "lambda_s": sol.primal_value,
        "gap": sol.relative_gap,
        "lambda2": eig.lambda2,
        "certificate": cert.upper_bound,
        "cut_ratio": cut.ratio,
        "separator_alpha": sep.alpha,
    }
    return LadderPoint(size, row, sol.status, sol.iterations, time.perf_counter() - start)


def _threads() -> int:
    raw = os.environ.get("FLOWSPEC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise PreconditionError(f"FLOWSPEC_THREADS must be an integer, got {raw!r}") from None


def run_ladder(cfg: ExperimentConfig) -> list[LadderPoint]:
    """Run every ladder point; results come back in ladder order regardless of threading."""
    workers = min(_threads(), len(cfg.sizes))
    if workers == 1:
        return [run_point(cfg, s) for s in cfg.sizes]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: run_point(cfg, s), cfg.sizes))


def ladder_csv(points: list[LadderPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for pt in points:
        w.writerow([pt.row["n"]] + [repr(float(pt.row[c])) for c in CSV_COLUMNS[1:]])
    return buf.getvalue()


SLOPE_COLUMNS = ("con2", "lambda_s", "lambda2", "certificate", "cut_ratio", "separator_alpha")


def ladder_slopes(points: list[LadderPoint]) -> dict[str, ScalingFit | None]:
    out = {}
    for col in SLOPE_COLUMNS:
        pts = [(p.row["n"], p.row[col]) for p in points]
        try:
            out[col] = fit_scaling(pts)
        except PreconditionError:
            out[col] = None
    return out


def ladder_report(cfg: ExperimentConfig, points: list[LadderPoint]) -> Report:
    rep = Report()
    rep.add("command", "experiment")
    conf = asdict(cfg)
    conf["sizes"] = ",".join(map(str, cfg.sizes))
    conf.pop("timings")
    rep.section("config", conf, MODULE_VERSION, cfg.seed)
    for pt in points:
        rec = dict(pt.row)
        rec["solve_status"] = pt.status
        rec["iterations"] = pt.iterations
        if cfg.timings:
            rec["seconds"] = round(pt.seconds, 3)
        rep.section(f"ladder.{pt.size}", rec, MODULE_VERSION, cfg.seed)
    for col, fit in ladder_slopes(points).items():
        if fit is None:
            rep.add(f"slope.{col}", "undefined")
        else:
            rep.add(f"slope.{col}", fit.slope)
            rep.add(f"slope.{col}.intercept", fit.intercept)
            rep.add(f"slope.{col}.residual", fit.residual)
    return rep


def run_experiment(cfg: ExperimentConfig) -> tuple[list[LadderPoint], Report, str]:
    points = run_ladder(cfg)
    return points, ladder_report(cfg, points), ladder_csv(points)


def total_seconds(points: list[LadderPoint]) -> float:
    return math.fsum(p.seconds for p in points)
