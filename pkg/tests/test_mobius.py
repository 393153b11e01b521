import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from exchgraph.graph_core import LabeledGraph, build_catalog, induced_subgraph, named_class_index, num_pairs
from exchgraph.mobius import (
    ExchDist, IdentityViolation, MobiusVector, OutsideMobiusSimplex, ProbVector, check_backward_compatibility,
    facet_values, finite_definetti_check, inverse_mobius, inverse_mobius_labeled, is_monotone,
    marginal_map, mobius_matrix, mobius_transform, mobius_transform_labeled, random_exch_dist,
    random_prob_vector, tv_distance_check,
)


def naive_z(p: ProbVector):
    K = len(p.p)
    return tuple(sum((p.p[G] for G in range(K) if G & F == F), Fraction(0)) for F in range(K))


def test_labeled_transform_matches_matrix(rng):
    for n in (2, 3, 4):
        p = random_prob_vector(n, rng)
        M = mobius_matrix(n)
        z = mobius_transform_labeled(p)
        assert list(z) == [sum((M[F][G] * p.p[G] for G in range(len(p.p))), Fraction(0))
                           for F in range(len(p.p))]
        assert z == naive_z(p)
        assert inverse_mobius_labeled(n, z) == p


def test_class_transform_agrees_with_labeled(rng):
    for n in (3, 4, 5):
        d = random_exch_dist(n, rng)
        z_lab = mobius_transform_labeled(d.to_labeled())
        z = mobius_transform(d)
        for c in d.catalog:
            assert z.z[c.index] == z_lab[c.canonical.code]


def test_erdos_renyi_z_is_power_of_edges():
    q = Fraction(1, 3)
    z = mobius_transform(ExchDist.erdos_renyi(5, q))
    for c in build_catalog(5):
        assert z.z[c.index] == q ** c.edge_count


@pytest.mark.parametrize("n", range(2, 6))
def test_vertices_roundtrip_and_are_monotone(n):
    for c in build_catalog(n):
        v = ExchDist.vertex(n, c.index)
        z = mobius_transform(v)
        assert inverse_mobius(z) == v
        assert is_monotone(z)
        assert min(facet_values(z)) >= 0


def test_inverse_names_failing_class():
    cat = build_catalog(3)
    z = [Fraction(1)] + [Fraction(0)] * (len(cat) - 1)
    z[cat.complete_index] = Fraction(1, 2)  # triangle more likely than its edges
    with pytest.raises(OutsideMobiusSimplex) as e:
        inverse_mobius(MobiusVector(3, tuple(z)))
    assert e.value.value < 0


def test_marginal_matches_labeled_restriction(rng):
    d = random_exch_dist(5, rng)
    lab = marginal_map(d.to_labeled(), 3)
    ex = marginal_map(d, 3)
    assert lab.to_exchangeable() == ex
    # oracle: push each labeled graph through induced_subgraph
    out = {}
    for code, v in enumerate(d.to_labeled().p):
        h = induced_subgraph(LabeledGraph.from_code(5, code), 3).code
        out[h] = out.get(h, Fraction(0)) + v
    assert all(lab.p[k] == v for k, v in out.items())


def test_example_four_cycle_marginal():
    cat5 = build_catalog(5)
    c4 = LabeledGraph.from_edges(5, [(1, 2), (2, 3), (3, 4), (1, 4)])
    q = marginal_map(ExchDist.vertex(5, cat5.class_of(c4)), 4)
    assert q.mass[named_class_index("C4")] == Fraction(3, 15)
    assert q.mass[named_class_index("P3")] == Fraction(12, 15)
    assert sum(q.mass) == 1


def test_backward_compatibility(rng):
    for _ in range(5):
        assert check_backward_compatibility(random_exch_dist(5, rng), 3).ok
    assert check_backward_compatibility(random_prob_vector(4, rng), 3).ok


@pytest.mark.parametrize("n,m", [(4, 2), (5, 3), (5, 4)])
def test_definetti_identity_and_bounds(rng, n, m):
    for _ in range(5):
        p = random_exch_dist(n, rng)
        r = finite_definetti_check(p, m)
        assert r.identity_holds and r.bound_holds
        t = tv_distance_check(p, m)
        assert t.identity_holds and t.bound_holds


def test_vertex_identity():
    r = finite_definetti_check(ExchDist.vertex(5, 7), 3)
    assert r.vertex_identity_holds


def test_tv_at_equal_sizes_is_not_zero():
    # with replacement, a repeated node is never adjacent; n = m still leaves a gap
    edge = ExchDist(2, (Fraction(0), Fraction(1)))
    t = tv_distance_check(edge, 2)
    assert t.distance == Fraction(1, 2) == t.bound


def test_validation_errors():
    with pytest.raises(ValueError):
        ExchDist(3, (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(0))).validate()
    with pytest.raises(ValueError):
        marginal_map(ExchDist.vertex(4, 0), 5)


weights = st.lists(st.integers(0, 9), min_size=11, max_size=11).filter(lambda w: sum(w) > 0)


@given(weights)
def test_roundtrip_random_n4(w):
    tot = sum(w)
    p = ExchDist(4, tuple(Fraction(x, tot) for x in w))
    z = mobius_transform(p)
    assert inverse_mobius(z) == p
    assert is_monotone(z)


@given(weights, weights, st.fractions(0, 1))
def test_transform_is_affine(w1, w2, a):
    p1 = ExchDist(4, tuple(Fraction(x, sum(w1)) for x in w1))
    p2 = ExchDist(4, tuple(Fraction(x, sum(w2)) for x in w2))
    mix = ExchDist.mixture([a, 1 - a], [p1, p2])
    z1, z2, zm = mobius_transform(p1), mobius_transform(p2), mobius_transform(mix)
    assert zm.z == tuple(a * x + (1 - a) * y for x, y in zip(z1.z, z2.z))
