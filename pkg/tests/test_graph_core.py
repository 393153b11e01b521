import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st
from networkx.algorithms.isomorphism import GraphMatcher

from exchgraph.graph_core import (
    EMPTY_CORE, LabeledGraph, apply_permutation, automorphisms, build_catalog, canonical_form,
    class_name, connected_class_count, core_components, core_key, delete_isolated_core,
    disjoint_union, induced_subgraph, is_isomorphic, is_node_transitive, named_class_index,
    num_pairs, pad,
)
from exchgraph.graph_io import (FormatError, from_edgelist_text, from_graph6, parse_frac,
                                to_edgelist_text, to_graph6)


def to_nx(g: LabeledGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(1, g.n + 1))
    G.add_edges_from(g.edge_list)
    return G


graphs = st.integers(1, 6).flatmap(
    lambda n: st.integers(0, (1 << num_pairs(n)) - 1).map(lambda c: LabeledGraph.from_code(n, c)))


def test_code_roundtrip_and_bit_order():
    # first pair (1,2) is the most significant bit
    g = LabeledGraph.from_edges(3, [(1, 2)])
    assert g.code == 0b100
    assert LabeledGraph.from_code(3, g.code) == g
    assert LabeledGraph.complete(4).edge_count == 6


def test_bad_edges_rejected():
    with pytest.raises(ValueError):
        LabeledGraph.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        LabeledGraph.from_edges(3, [(1, 4)])


@pytest.mark.parametrize("n", range(1, 8))
def test_catalog_matches_graph_atlas(n):
    atlas = [G for G in nx.graph_atlas_g() if G.number_of_nodes() == n]
    cat = build_catalog(n)
    assert len(cat) == len(atlas)
    assert sum(c.orbit_size for c in cat) == 2 ** num_pairs(n)
    assert len(cat.connected_indices) == sum(
        1 for G in atlas if G.number_of_edges() and nx.is_connected(nx.Graph(G.subgraph(
            [v for v in G if G.degree(v) > 0]))))


@pytest.mark.parametrize("n", range(1, 6))
def test_orbit_times_aut_is_factorial(n):
    for c in build_catalog(n):
        G = to_nx(c.canonical)
        auts = sum(1 for _ in GraphMatcher(G, G).isomorphisms_iter())
        assert c.aut_count == auts
        assert c.orbit_size * auts == math.factorial(n)


def test_catalog_sorted_by_edges_then_code():
    cat = build_catalog(5)
    keys = [(c.edge_count, c.canonical.code) for c in cat]
    assert keys == sorted(keys)


def test_names_of_four_node_classes():
    cat = build_catalog(4)
    names = [class_name(c) for c in cat]
    assert names == ["empty", "K2", "P3", "2K2", "K3", "K1,3", "P4", "paw", "C4", "diamond", "K4"]
    c4 = cat[named_class_index("C4")].canonical
    assert nx.is_isomorphic(to_nx(c4), nx.cycle_graph(4))
    p4 = cat[named_class_index("P4")].canonical
    assert nx.is_isomorphic(to_nx(p4), nx.path_graph(4))


@given(graphs, st.randoms(use_true_random=False))
def test_canonical_form_is_relabeling_invariant(g, rnd):
    sigma = list(range(1, g.n + 1))
    rnd.shuffle(sigma)
    h = apply_permutation(g, sigma)
    assert canonical_form(h) == canonical_form(g)
    assert is_isomorphic(g, h)


@given(graphs, graphs)
def test_isomorphism_agrees_with_networkx(g, h):
    assert is_isomorphic(g, h) == (g.n == h.n and nx.is_isomorphic(to_nx(g), to_nx(h)))


def test_automorphisms_of_cycle():
    c5 = LabeledGraph.from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])
    assert len(automorphisms(c5)) == 10
    assert is_node_transitive(c5)
    assert not is_node_transitive(LabeledGraph.from_edges(3, [(1, 2)]))


def test_node_transitive_iff_all_deletions_isomorphic():
    # node-transitive graphs have all (n-1)-node induced subgraphs isomorphic; check the converse on n <= 5
    for n in range(2, 6):
        for c in build_catalog(n):
            g = c.canonical
            subs = {canonical_form(induced_subgraph(apply_permutation(g, _move_last(n, v)), n - 1))[0]
                    for v in range(1, n + 1)}
            if is_node_transitive(g):
                assert len(subs) == 1


def _move_last(n, v):
    # permutation sending node v to position n (1-based images)
    order = [u for u in range(1, n + 1) if u != v] + [v]
    sigma = [0] * n
    for pos, u in enumerate(order, start=1):
        sigma[u - 1] = pos
    return sigma


def test_cores_and_components():
    g = LabeledGraph.from_edges(6, [(1, 2), (4, 5), (5, 6)])
    assert delete_isolated_core(g).n == 5
    comps = sorted(c.edge_count for c in core_components(g))
    assert comps == [1, 2]
    assert core_key(LabeledGraph.empty(3)) == EMPTY_CORE
    assert core_key(disjoint_union(LabeledGraph.complete(2), LabeledGraph.complete(2))) == \
        core_key(LabeledGraph.from_edges(4, [(1, 3), (2, 4)]))
    assert pad(LabeledGraph.complete(2), 4).n == 4


def test_connected_class_count():
    assert [connected_class_count(n) for n in range(1, 8)] == [0, 1, 3, 9, 30, 142, 995]


@given(graphs)
def test_graph6_roundtrip(g):
    assert from_graph6(to_graph6(g)) == g
    assert from_edgelist_text(to_edgelist_text(g)) == g
    assert to_graph6(g) == nx.to_graph6_bytes(nx.relabel_nodes(to_nx(g), lambda v: v - 1),
                                              header=False).decode().strip()


def test_format_errors():
    with pytest.raises(FormatError):
        from_graph6("\x01bad")
    with pytest.raises(FormatError):
        from_edgelist_text("3; 1-9")
    with pytest.raises(FormatError):
        parse_frac(0.5)
    assert parse_frac("3/6") == parse_frac("1/2")


def test_catalog_too_large():
    with pytest.raises(MemoryError):
        build_catalog(8)
