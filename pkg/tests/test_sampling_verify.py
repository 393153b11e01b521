import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from exchgraph.dissociated import is_dissociated
from exchgraph.graph_core import LabeledGraph, build_catalog, core_key
from exchgraph.graph_io import FormatError
from exchgraph.mobius import MobiusVector, is_monotone
from exchgraph.sampling_verify import (
    BlockModel, Constant, Grid, MissingUnions, Mixture, convergence_report, graphon_from_json,
    graphon_mobius, graphon_to_json, motif_from_name, reflection_positivity_check,
    sample_adjacency, sample_graphon, union_closure,
)

F = Fraction
SBM = BlockModel(("1/2", "1/2"), (("4/5", "1/10"), ("1/10", "4/5")))


def test_trivial_constants():
    assert sample_graphon(Constant(1), 6, seed=1) == LabeledGraph.complete(6)
    assert sample_graphon(Constant(0), 6, seed=1) == LabeledGraph.empty(6)


def test_sampler_deterministic():
    assert sample_graphon(SBM, 30, seed=5) == sample_graphon(SBM, 30, seed=5)
    assert sample_graphon(SBM, 30, seed=5) != sample_graphon(SBM, 30, seed=6)


def test_class_frequencies_match_uniform_labeled_law():
    # constant 1/2: every labeled graph on 4 nodes has probability 1/64
    rng = np.random.default_rng(0)
    N = 100_000
    cat = build_catalog(4)
    counts = np.zeros(len(cat))
    w = np.array([32, 16, 8, 4, 2, 1])
    for _ in range(N // 1000):
        A = np.stack([sample_adjacency(Constant("1/2"), 4, rng) for _ in range(1000)])
        bits = A[:, [0, 0, 0, 1, 1, 2], [1, 2, 3, 2, 3, 3]].astype(int)
        np.add.at(counts, cat.class_of_code[bits @ w], 1)
    for c in cat:
        p = c.orbit_size / 64
        assert abs(counts[c.index] / N - p) <= 4 * math.sqrt(p * (1 - p) / N)


def test_labeled_frequencies_equal_within_class():
    rng = np.random.default_rng(1)
    N = 100_000
    A = np.stack([sample_adjacency(SBM, 4, rng) for _ in range(N)])
    codes = A[:, [0, 0, 0, 1, 1, 2], [1, 2, 3, 2, 3, 3]].astype(int) @ np.array([32, 16, 8, 4, 2, 1])
    freq = np.bincount(codes, minlength=64) / N
    cat = build_catalog(4)
    for c in cat:
        members = cat.orbit_codes(c.index)
        mean = freq[members].mean()
        se = math.sqrt(mean * (1 - mean) / N)
        assert np.all(np.abs(freq[members] - mean) <= 4 * se + 1e-12)


def test_mobius_closed_forms():
    z = graphon_mobius(Constant("1/3"), ["edge", "triangle", "2K2", "K4"])
    assert list(z.values()) == [F(1, 3), F(1, 27), F(1, 9), F(1, 729)]
    zb = graphon_mobius(SBM, ["edge"])
    assert zb[motif_from_name("edge")] == F(9, 20)  # sum_ab pi_a pi_b B_ab


def test_grid_matches_block_model_and_monte_carlo():
    g = Grid((("1/2", "1/4"), ("1/4", "1")))
    b = BlockModel(("1/2", "1/2"), (("1/2", "1/4"), ("1/4", "1")))
    motifs = ["edge", "P3", "triangle"]
    assert graphon_mobius(g, motifs) == graphon_mobius(b, motifs)
    # oracle: integrate the triangle kernel product by Monte Carlo over latent points
    rng = np.random.default_rng(2)
    x = rng.random((200_000, 3))
    W = lambda s, t: np.where((s < .5) & (t < .5), .5, np.where((s >= .5) & (t >= .5), 1., .25))
    est = (W(x[:, 0], x[:, 1]) * W(x[:, 1], x[:, 2]) * W(x[:, 0], x[:, 2])).mean()
    assert abs(est - float(graphon_mobius(g, ["triangle"])[motif_from_name("triangle")])) < 5e-3


def test_graphon_mobius_dissociated_and_monotone():
    cat = build_catalog(4)
    for w in (Constant("2/5"), SBM):
        z = graphon_mobius(w, [c.core for c in cat])
        vec = MobiusVector(4, tuple(z[core_key(c.canonical)] for c in cat))
        assert is_dissociated(vec) == (True, 0)
        assert is_monotone(vec)


def test_mixture_is_not_dissociated():
    m = Mixture(("1/2", "1/2"), (Constant(0), Constant(1)))
    z = graphon_mobius(m, ["edge", "2K2"])
    assert z[motif_from_name("2K2")] == F(1, 2) != z[motif_from_name("edge")] ** 2


def test_json_roundtrip_and_errors():
    for w in (Constant("1/2"), SBM, Grid((("1/3",),)), Mixture((1,), (SBM,))):
        assert graphon_from_json(graphon_to_json(w)) == w
    with pytest.raises(FormatError):
        graphon_from_json({"kind": "fractal"})
    with pytest.raises(ValueError):
        BlockModel(("1/2", "1/2"), (("1", "0"), ("1/2", "1")))
    with pytest.raises(ValueError):
        Constant("3/2")


def test_convergence_two_block_edge():
    r = convergence_report(SBM, ["edge"], [6, 40], reps=40, seed=3, samples=20_000)
    assert r.ok
    assert r.rows[0].exact and not r.rows[1].exact
    assert r.rows[0].target == F(9, 20)


def test_reflection_positivity():
    p = F(1, 3)
    z = graphon_mobius(Constant(p), union_closure(["empty", "edge"]))
    rep = reflection_positivity_check(z, ["empty", "edge"])
    assert rep.ok and np.allclose(rep.matrix, [[1, 1 / 3], [1 / 3, 1 / 9]])
    # corrupt z(2K2) below half of z(edge)^2
    bad = dict(z)
    bad[motif_from_name("2K2")] = p ** 2 * F(1, 2) - F(1, 100)
    assert not reflection_positivity_check(bad, ["empty", "edge"]).ok
    with pytest.raises(MissingUnions) as e:
        reflection_positivity_check({motif_from_name("edge"): p}, ["edge", "triangle"])
    assert "+" in str(e.value)


@given(st.fractions(0, 1, max_denominator=12), st.fractions(0, 1, max_denominator=12),
       st.fractions(0, 1, max_denominator=12), st.fractions(0, 1, max_denominator=12))
def test_psd_for_any_block_model(a, b, c, pi):
    w = BlockModel((pi, 1 - pi), ((a, b), (b, c)))
    motifs = ["empty", "edge", "P3", "triangle", "2K2", "star"]
    z = graphon_mobius(w, union_closure(motifs[:3]) + union_closure(motifs))
    assert reflection_positivity_check(z, motifs[:3]).ok
