from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from exchgraph.exch_geometry import (
    clique_plus_isolated, enumerate_vertices, extendable, marginal_polytope_vertices, membership,
    strict_inclusion_witness, vertexhood,
)
from exchgraph.graph_core import LabeledGraph, build_catalog, named_class_index
from exchgraph.lp import hull_membership
from exchgraph.mobius import ExchDist, marginal_map


def float_member(q, pts):
    A = np.array([[float(x) for x in p] for p in pts]).T
    A = np.vstack([A, np.ones(len(pts))])
    b = np.append([float(x) for x in q], 1.0)
    res = linprog(np.zeros(len(pts)), A_eq=A, b_eq=b, bounds=[(0, None)] * len(pts), method="highs")
    return res.status == 0


small_pts = st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=6)
query = st.lists(st.fractions(-4, 4, max_denominator=6), min_size=3, max_size=3)


@given(small_pts, query)
def test_lp_agrees_with_scipy_and_certifies(pts, q):
    pts = [[Fraction(x) for x in p] for p in pts]
    cert = hull_membership(q, pts)
    assert cert.verify(q, pts)
    assert cert.member == float_member(q, pts)


@given(small_pts, st.lists(st.integers(0, 5), min_size=6, max_size=6))
def test_convex_combinations_are_members(pts, w):
    w = w[:len(pts)]
    if not sum(w):
        return
    pts = [[Fraction(x) for x in p] for p in pts]
    q = [sum(Fraction(wi, sum(w)) * p[i] for wi, p in zip(w, pts)) for i in range(3)]
    cert = hull_membership(q, pts)
    assert cert.member and cert.verify(q, pts)


def test_lp_rejects_bad_input():
    with pytest.raises(ValueError):
        hull_membership([Fraction(0)], [])
    with pytest.raises(ValueError):
        hull_membership([Fraction(0)], [[Fraction(0), Fraction(1)]])


def test_vertices_enumerated():
    vs = enumerate_vertices(4)
    assert len(vs) == 11
    assert all(sum(v.dist.mass) == 1 for v in vs)


def test_example_marginal_polytope():
    imgs = marginal_polytope_vertices(5, 4)
    c4 = ExchDist.vertex(4, named_class_index("C4"))
    p3 = ExchDist.vertex(4, named_class_index("P3"))
    for v in (c4, p3):
        cert = membership(v, imgs)
        assert not cert.member and cert.separation_value > 0
        assert cert.verify(v.mass, [d.mass for d in imgs])
    # empty and complete graphs extend
    for name in ("empty", "K4"):
        assert membership(ExchDist.vertex(4, named_class_index(name)), imgs).member
    cat5 = build_catalog(5)
    c4_5 = cat5.class_of(LabeledGraph.from_edges(5, [(1, 2), (2, 3), (3, 4), (1, 4)]))
    p45 = marginal_map(ExchDist.vertex(5, c4_5), 4)
    assert membership(p45, imgs).member
    assert vertexhood(p45, imgs)


def test_three_node_marginals_of_four_node_laws_fill_the_simplex():
    imgs = marginal_polytope_vertices(4, 3)
    for v in enumerate_vertices(3):
        assert extendable(v.dist, 4).member
        assert membership(v.dist, imgs).member


def test_strict_inclusion_witness():
    w = strict_inclusion_witness(4, 5, 6)
    assert w.certified
    assert clique_plus_isolated(5).edge_count == 6
    with pytest.raises(ValueError):
        strict_inclusion_witness(3, 5, 6)


def test_extendable_to_same_size():
    assert extendable(ExchDist.vertex(4, 3), 4).member
