import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from flowspec.certificate import EmbedConfig, SolverConfig, check_against, lambda2_certificate
from flowspec.duality import solve_min_con2
from flowspec.embedding import line_embed
from flowspec.errors import DegenerateError, InvariantViolation, PreconditionError
from flowspec.generators import complete, cycle, grid2d, knn_random_points, path, random_connected, star, torus2d
from flowspec.graph import laplacian_matrix, rayleigh_quotient
from flowspec.paths import all_pairs_metric
from flowspec.separators import fhl_sweep, separator_alpha
from flowspec.spectral import (
    cut_edges,
    cut_ratio,
    fiedler_sweep,
    lambda2_solve,
    recursive_edge_separator,
    sweep_bound,
    sweep_cut,
)
from test_graph import graphs_with_weights, small_graphs


def dense_lambda2(g):
    return scipy.linalg.eigvalsh(laplacian_matrix(g).toarray())[1]


# ---------------------------------------------------------------- eigenvalues

@pytest.mark.parametrize("m", range(2, 9))
def test_grid_closed_form(m):
    assert lambda2_solve(grid2d(m)).lambda2 == pytest.approx(4 * math.sin(math.pi / (2 * m)) ** 2, abs=1e-8)


def test_small_closed_forms():
    assert lambda2_solve(path(3)).lambda2 == pytest.approx(1.0, abs=1e-12)
    assert lambda2_solve(complete(6)).lambda2 == pytest.approx(6.0, abs=1e-12)
    assert lambda2_solve(cycle(7)).lambda2 == pytest.approx(2 - 2 * math.cos(2 * math.pi / 7), abs=1e-12)
    assert lambda2_solve(star(5)).lambda2 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("g", [grid2d(9), grid2d(12), torus2d(10), knn_random_points(120, 4, 2, seed=2)],
                         ids=["grid9", "grid12", "torus10", "knn120"])
def test_iterative_matches_dense(g):
    res = lambda2_solve(g)
    assert res.method == "iterative" and res.converged
    assert res.lambda2 == pytest.approx(dense_lambda2(g), abs=1e-8)
    assert abs(res.fiedler.sum()) < 1e-8
    assert np.linalg.norm(res.fiedler) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(small_graphs(max_n=10))
def test_fiedler_vector_is_an_eigenvector(g):
    res = lambda2_solve(g)
    assert res.lambda2 == pytest.approx(dense_lambda2(g), abs=1e-8)
    assert res.residual < 1e-8
    assert rayleigh_quotient(g, res.fiedler) == pytest.approx(res.lambda2, abs=1e-9)


def test_lambda2_needs_two_vertices():
    from flowspec.graph import Graph
    with pytest.raises(PreconditionError):
        lambda2_solve(Graph(1, []))


# ----------------------------------------------------------------- sweep cuts

def test_cut_ratio_examples():
    g = path(4)
    assert cut_edges(g, {0, 1}) == 1
    assert cut_ratio(g, {0, 1}) == 0.5
    assert cut_ratio(g, {0}) == 1.0


def test_sweep_on_column_vector():
    g = grid2d(4)
    v = np.array([v % 4 for v in range(16)], dtype=float)
    cut = sweep_cut(g, v)
    assert cut.crossing == 4 and len(cut.side) == 8
    assert cut.ratio == 0.5
    assert cut.ratio <= cut.bound


def test_sweep_on_path_finds_the_middle():
    cut = fiedler_sweep(path(10))
    assert cut.crossing == 1 and cut.ratio == pytest.approx(0.2)


def test_sweep_rejects_constant():
    with pytest.raises(DegenerateError):
        sweep_cut(path(3), [1, 1, 1])
    with pytest.raises(PreconditionError):
        sweep_cut(path(3), [1, 2])


@settings(max_examples=80, deadline=None)
@given(small_graphs(max_n=10), st.data())
def test_sweep_guarantee_for_any_vector(g, data):
    v = np.array(data.draw(st.lists(st.floats(-5, 5), min_size=g.n, max_size=g.n)))
    if np.ptp(v) < 1e-6:
        return
    cut = sweep_cut(g, v)
    assert cut.ratio <= sweep_bound(g, v) * (1 + 1e-12) + 1e-12
    assert cut.ratio == pytest.approx(cut_ratio(g, cut.side))


@pytest.mark.parametrize("g", [grid2d(8), torus2d(6), knn_random_points(80, 3, 2, seed=1)], ids=["grid", "torus", "knn"])
def test_fiedler_sweep_guarantee(g):
    cut = fiedler_sweep(g)
    assert cut.ratio <= cut.bound
    assert cut.ratio == pytest.approx(cut_ratio(g, cut.side))


# --------------------------------------------------------- balanced separator

@pytest.mark.parametrize("g", [path(9), complete(6), grid2d(8), knn_random_points(60, 3, 2, seed=4)],
                         ids=["path", "k6", "grid", "knn"])
def test_recursive_separator_balance(g):
    sep = recursive_edge_separator(g)
    assert sep.balance(g.n) >= 1 / 3 - 1e-12
    assert sep.crossing == cut_edges(g, sep.side)
    assert sep.crossing <= sep.charged


def test_recursive_separator_known_sizes():
    assert recursive_edge_separator(path(9)).crossing == 1
    assert recursive_edge_separator(grid2d(8)).crossing == 12


def test_recursive_separator_validation():
    with pytest.raises(PreconditionError):
        recursive_edge_separator(path(4), delta=0.5)


# ---------------------------------------------------------- vertex separators

def test_separator_alpha():
    assert separator_alpha(2, 2, 1) == pytest.approx(1 / 9)


def test_fhl_on_a_path():
    g = path(5)
    # With unit weights d_s(u, v) = |u - v| + 1, so the identity map is non-expansive.
    sep = fhl_sweep(g, np.ones(5), np.arange(5.0))
    assert len(sep.S) == 2 and len(sep.A) + len(sep.B) == 3
    assert sep.alpha == pytest.approx(1 / 6)
    assert sep.bound == pytest.approx(10 / 20)


def test_fhl_rejects_expansive_f():
    with pytest.raises(PreconditionError):
        fhl_sweep(path(3), np.full(3, 0.5), [0.0, 5.0, 10.0])


def test_fhl_constant_f_is_degenerate():
    sep = fhl_sweep(path(4), np.ones(4), np.zeros(4))
    assert sep.degenerate and math.isinf(sep.bound)


def _check_separator(g, sep):
    assert sep.A | sep.B | sep.S == frozenset(range(g.n))
    assert not (sep.A & sep.B) and not (sep.A & sep.S) and not (sep.B & sep.S)
    for u, v in g.edges:
        assert not ((u in sep.A and v in sep.B) or (u in sep.B and v in sep.A))
    assert sep.alpha <= sep.bound * (1 + 1e-9)


@settings(max_examples=40, deadline=None)
@given(graphs_with_weights(allow_zero=False), st.integers(0, 100))
def test_fhl_guarantee_property(gs, seed):
    g, s = gs
    emb = line_embed(all_pairs_metric(g, s), 1, trials=8, seed=seed, graph=g)
    _check_separator(g, fhl_sweep(g, s, emb))


@pytest.mark.parametrize("m", [4, 8])
def test_fhl_with_solved_weights(m):
    g = grid2d(m)
    sol = solve_min_con2(g, 60)
    emb = line_embed(all_pairs_metric(g, sol.weights), 2, 32, graph=g)
    sep = fhl_sweep(g, sol.weights, emb)
    _check_separator(g, sep)
    assert not sep.degenerate


def test_separator_text():
    sep = fhl_sweep(path(5), np.ones(5), np.arange(5.0))
    assert sep.to_text().splitlines()[0].startswith("A: ")
    assert sep.to_record()["sizes"] == f"{len(sep.A)} {len(sep.B)} 2"


# ---------------------------------------------------------------- certificate

def test_certificate_on_p3():
    cert = lambda2_certificate(path(3), SolverConfig(500, 1e-9))
    assert cert.available
    assert cert.solution.primal_value == pytest.approx(math.sqrt(17), rel=1e-6)
    assert cert.upper_bound >= 1.0 - 1e-9
    assert cert.upper_bound <= cert.chain["chain_bound"]
    check_against(cert, lambda2_solve(path(3)).lambda2)
    assert cert.achieved_lambda2 == pytest.approx(1.0)


def test_certificate_on_k2():
    cert = lambda2_certificate(complete(2))
    assert cert.upper_bound == pytest.approx(2.0)


@pytest.mark.parametrize("g", [grid2d(5), cycle(9), star(6), random_connected(10, 0.3, 3)],
                         ids=["grid", "cycle", "star", "random"])
def test_certificate_upper_bounds_lambda2(g):
    cert = lambda2_certificate(g, SolverConfig(80), EmbedConfig(32))
    lam = lambda2_solve(g).lambda2
    assert cert.upper_bound >= lam - 1e-9
    check_against(cert, lam)
    rec = cert.to_record()
    assert rec["available"] and "chain.chain_bound" in rec


def test_check_against_detects_undercut():
    cert = lambda2_certificate(path(3))
    with pytest.raises(InvariantViolation):
        check_against(cert, cert.upper_bound + 1.0)


def test_certificate_reuses_solution():
    g = grid2d(4)
    sol = solve_min_con2(g, 30)
    cert = lambda2_certificate(g, solution=sol, embed_cfg=EmbedConfig(8))
    assert cert.solution is sol


# ------------------------------------------------------------ worked examples

def test_sweep_p3_example():
    cut = sweep_cut(path(3), [-1.0, 0.0, 1.0])
    assert cut.side == frozenset({0}) and cut.ratio == 1.0
    assert cut.bound == pytest.approx(2.0)


def test_sweep_k4_fiedler():
    assert fiedler_sweep(complete(4)).ratio == pytest.approx(2.0)


def test_sweep_grid4_fiedler():
    # lambda_2 is double on the square grid; take the eigenvector that varies by column.
    g = grid2d(4)
    v = np.array([math.cos((x % 4 + 0.5) * math.pi / 4) for x in range(16)])
    lam = lambda2_solve(g).lambda2
    assert np.allclose(laplacian_matrix(g) @ v, lam * v)
    assert sweep_cut(g, v).ratio <= 0.5 + 1e-12
    assert fiedler_sweep(g).ratio <= fiedler_sweep(g).bound


def test_recursive_separator_examples():
    p9 = recursive_edge_separator(path(9))
    assert p9.balance(9) >= 3 / 9 and p9.crossing <= 2
    assert recursive_edge_separator(complete(6)).crossing == 9
    assert recursive_edge_separator(grid2d(8)).crossing <= 4 * 8 * 4


def test_fhl_p3_example():
    sep = fhl_sweep(path(3), np.ones(3), [0.0, 2.0, 3.0])
    assert (sep.A, sep.S, sep.B) == (frozenset({0}), frozenset({1}), frozenset({2}))
    assert sep.alpha == pytest.approx(1 / 4) and sep.bound == pytest.approx(1.0)


def test_fhl_heavy_weights_force_full_separator():
    g = grid2d(3)
    f = np.linspace(0, 1, 9)
    sep = fhl_sweep(g, np.full(9, 5.0), f)
    assert sep.S == frozenset(range(9)) and sep.degenerate
    assert sep.alpha == pytest.approx(1 / 9)


def test_fhl_grid6_pipeline():
    g = grid2d(6)
    sol = solve_min_con2(g, 100)
    emb = line_embed(all_pairs_metric(g, sol.weights), 2, 128, graph=g)
    _check_separator(g, fhl_sweep(g, sol.weights, emb))


def test_certificate_p3_ceiling():
    cert = lambda2_certificate(path(3))
    assert 1.0 - 1e-9 <= cert.upper_bound <= 12


def test_grid_lambda2_ladder_slope():
    from flowspec.experiment import fit_scaling
    pts = [(m * m, lambda2_solve(grid2d(m)).lambda2) for m in (8, 16, 32)]
    assert -1.3 <= fit_scaling(pts).slope <= -0.7
