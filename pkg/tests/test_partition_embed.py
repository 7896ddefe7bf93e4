import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowspec.embedding import (
    check_non_expansive,
    dense_case_constant,
    distance_to_set,
    line_embed,
    metric_power_sum,
    pair_power_sum,
    scale_p,
)
from flowspec.errors import InvariantViolation, ParseError, PreconditionError
from flowspec.generators import complete, grid2d, path, star
from flowspec.graph import Metric
from flowspec.partition import (
    PaddedPartition,
    chop_partition,
    ckr_partition,
    estimate_padding,
    padding_radius,
    parse_partition,
    partition_sampler,
)
from flowspec.paths import all_pairs_metric
from test_graph import graphs_with_weights


def hop_metric(g):
    return all_pairs_metric(g, np.full(g.n, 0.5))


def line_metric(points):
    x = np.asarray(points, dtype=float)
    return Metric(np.abs(x[:, None] - x[None, :]))


# ----------------------------------------------------------------- partitions

@pytest.mark.parametrize("delta", [1.0, 2.0, 3.5, 10.0])
@pytest.mark.parametrize("seed", range(5))
def test_ckr_is_delta_bounded(delta, seed):
    m = hop_metric(grid2d(6))
    part = ckr_partition(m, delta, seed)
    part.check(m)
    assert part.n == 36


@pytest.mark.parametrize("delta", [1.0, 2.0, 4.0])
@pytest.mark.parametrize("seed", range(5))
def test_chop_is_delta_bounded(delta, seed):
    g = grid2d(6)
    part = chop_partition(g, np.full(g.n, 0.5), delta, rounds=3, seed=seed)
    part.check(hop_metric(g))


def test_large_delta_gives_one_cluster():
    m = hop_metric(grid2d(4))
    assert len(ckr_partition(m, 100.0, 0).clusters) == 1


def test_tiny_delta_gives_singletons():
    m = hop_metric(path(5))
    assert len(ckr_partition(m, 0.5, 0).clusters) == 5


def test_partition_validation():
    m = hop_metric(path(3))
    with pytest.raises(PreconditionError):
        ckr_partition(m, 0.0)
    bad = PaddedPartition(((0, 1),), 1.0)
    with pytest.raises(InvariantViolation):
        bad.check(m)
    wide = PaddedPartition(((0, 1, 2),), 1.0)
    with pytest.raises(InvariantViolation):
        wide.check(m)


def test_partition_text_roundtrip():
    part = ckr_partition(hop_metric(grid2d(4)), 2.0, 1)
    back = parse_partition(part.to_text(), 2.0)
    assert back.clusters == part.clusters
    with pytest.raises(ParseError):
        parse_partition("0 : 1 x\n")


@settings(max_examples=40, deadline=None)
@given(graphs_with_weights(allow_zero=False), st.floats(0.1, 10.0), st.integers(0, 1000))
def test_partitions_bounded_property(gs, delta, seed):
    g, s = gs
    m = all_pairs_metric(g, s)
    ckr_partition(m, delta, seed).check(m)
    chop_partition(g, s, delta, 2, seed).check(m)


# -------------------------------------------------------------------- padding

def test_padding_radius_on_a_line():
    m = line_metric([0, 1, 5, 6])
    part = PaddedPartition.from_labels([0, 0, 1, 1], 2.0)
    assert list(padding_radius(m, part)) == [5, 4, 4, 5]
    single = PaddedPartition.from_labels([0, 0, 0, 0], 10.0)
    assert np.all(np.isinf(padding_radius(m, single)))


def test_estimate_padding_fixed_partition():
    m = line_metric([0, 1, 5, 6])
    part = PaddedPartition.from_labels([0, 0, 1, 1], 2.0)
    est = estimate_padding(m, 2.0, lambda seed: part, samples=3)
    assert est.alpha_hat == pytest.approx(2.0 / 4)
    assert np.all(est.probability(1.0) == 1.0)


def test_padding_is_reproducible():
    m = hop_metric(grid2d(5))
    sampler = partition_sampler("ckr", m, 3.0)
    a = estimate_padding(m, 3.0, sampler, 30, seed=4)
    b = estimate_padding(m, 3.0, sampler, 30, seed=4)
    assert np.array_equal(a.radii, b.radii)


def test_padding_probability_on_grid():
    g = grid2d(8)
    m = hop_metric(g)
    alpha = 8 * math.log(g.n)
    for source in ("ckr", "chop"):
        est = estimate_padding(m, 4.0, partition_sampler(source, m, 4.0, g), 50)
        assert np.all(est.probability(alpha) >= 0.5)


def test_unknown_partition_source():
    m = hop_metric(path(3))
    with pytest.raises(PreconditionError):
        partition_sampler("voronoi", m, 1.0)
    with pytest.raises(PreconditionError):
        partition_sampler("chop", m, 1.0)


# ------------------------------------------------------------------ embedding

def test_pair_power_sum_matches_loops():
    x = np.array([3.0, -1.0, 0.5, 2.0, 2.0])
    for p in (1, 2):
        direct = sum(abs(x[i] - x[j]) ** p for i in range(5) for j in range(i + 1, 5))
        assert pair_power_sum(x, p) == pytest.approx(direct)


def test_scale_of_two_points():
    m = line_metric([0, 2])
    # (2 / n^2 * sum d^p)^(1/p) with n = 2 and one pair at distance 2.
    assert scale_p(m, 2) == pytest.approx(math.sqrt(2))
    assert scale_p(m, 1) == pytest.approx(1.0)
    assert metric_power_sum(m, 2) == 4


def test_distance_to_set_is_non_expansive():
    m = hop_metric(grid2d(4))
    f = distance_to_set(m, np.arange(16) < 3)
    assert check_non_expansive(m, f) <= 1e-12
    with pytest.raises(InvariantViolation):
        check_non_expansive(m, 2 * f)


def test_dense_case_on_a_star():
    # Most points sit at distance 1.5 from each other, so one small ball holds a tenth of them.
    m = hop_metric(star(9))
    emb = line_embed(m, 2, trials=4)
    assert emb.case == "dense"
    assert emb.objective >= emb.metric_sum / dense_case_constant(2)
    check_non_expansive(m, emb.f)


def test_dense_constant():
    assert dense_case_constant(2) == 80
    assert dense_case_constant(1) == 20


def test_spread_case_on_grid():
    g = grid2d(8)
    emb = line_embed(hop_metric(g), 2, trials=32, seed=1)
    assert emb.case == "spread"
    assert emb.best_trial is not None and len(emb.trial_stats) == 32
    assert emb.objective == max(emb.trial_stats)


def test_degenerate_metric():
    emb = line_embed(Metric(np.zeros((3, 3))), 2)
    assert emb.degenerate and np.all(emb.f == 0)


def test_embedding_is_seeded():
    m = hop_metric(grid2d(6))
    a = line_embed(m, 2, 16, seed=9)
    b = line_embed(m, 2, 16, seed=9)
    assert np.array_equal(a.f, b.f)


def test_embed_rejects_bad_args():
    m = hop_metric(path(3))
    with pytest.raises(PreconditionError):
        line_embed(m, 3)
    with pytest.raises(PreconditionError):
        line_embed(m, 2, trials=0)


@settings(max_examples=40, deadline=None)
@given(graphs_with_weights(), st.sampled_from([1, 2]), st.sampled_from(["ckr", "chop"]), st.integers(0, 100))
def test_embedding_non_expansive_property(gs, p, source, seed):
    g, s = gs
    m = all_pairs_metric(g, s)
    emb = line_embed(m, p, trials=8, seed=seed, partition_source=source, graph=g)
    assert check_non_expansive(m, emb.f) <= 1e-12 * max(1.0, m.d.max())
    assert emb.objective == pytest.approx(pair_power_sum(emb.f, p))


def test_embedding_record_and_text():
    emb = line_embed(hop_metric(complete(4)), 2, trials=4)
    rec = emb.to_record()
    assert rec["p"] == 2 and rec["case"] in ("dense", "spread")
    assert len(emb.to_text().splitlines()) == 4


# --------------------------------------------------------- 500-seed padding runs

@pytest.fixture(scope="module")
def grid8_padding():
    g = grid2d(8)
    m = hop_metric(g)
    return g, {src: estimate_padding(m, 4.0, partition_sampler(src, m, 4.0, g, 3), 500) for src in ("ckr", "chop")}


def test_ckr_padding_probability_500(grid8_padding):
    g, est = grid8_padding
    assert np.all(est["ckr"].probability(8 * math.log(g.n)) > 0.5)


def test_chop_alpha_not_worse_than_ckr(grid8_padding):
    _, est = grid8_padding
    assert math.isfinite(est["chop"].alpha_hat)
    assert est["chop"].alpha_hat <= est["ckr"].alpha_hat


def test_best_of_trials_is_monotone():
    m = hop_metric(grid2d(7))
    values = [line_embed(m, 2, t, seed=2).objective for t in (1, 4, 16, 64)]
    assert values == sorted(values)


def test_dense_case_meets_the_looser_floor():
    m = hop_metric(star(9))
    emb = line_embed(m, 2)
    assert emb.objective >= emb.metric_sum / 160
