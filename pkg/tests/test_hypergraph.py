from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliquecouple.errors import ConfigError, ContractViolation
from cliquecouple.graphs import FCopy, complete_graph, cycle_graph
from cliquecouple.hypergraph import (
    FGraph,
    Hypergraph,
    avoidable_bound,
    classify_component,
    clean_cycle_core,
    extra_copies,
    find_avoidable_configuration,
    find_clean_cycles,
    is_avoidable_configuration,
    is_tree_by_construction,
    nullity,
    structure_report,
    to_hypergraph,
    tree_replacement_nullity,
    underlying_graph,
)


@st.composite
def hypergraphs(draw, r=3, max_n=8, max_e=6):
    n = draw(st.integers(r, max_n))
    pool = [frozenset(c) for c in combinations(range(n), r)]
    hs = draw(st.lists(st.sampled_from(pool), min_size=0, max_size=max_e))
    return Hypergraph(r, n, tuple(hs))


def H(r, n, *hs):
    return Hypergraph(r, n, tuple(frozenset(h) for h in hs))


def test_rejects_wrong_size_and_range():
    with pytest.raises(ValueError):
        H(3, 5, (0, 1))
    with pytest.raises(ValueError):
        H(3, 3, (0, 1, 3))


def test_text_round_trip():
    h = H(3, 7, (0, 1, 2), (2, 3, 4), (0, 1, 2))
    assert Hypergraph.from_text(h.to_text()) == h


def test_nullity_examples():
    assert nullity(H(3, 5, (0, 1, 2), (2, 3, 4))) == 0
    assert nullity(H(3, 4, (0, 1, 2), (0, 1, 3))) == 1
    assert nullity(H(3, 3, (0, 1, 2), (0, 1, 2))) == 2
    assert nullity(H(3, 9)) == 0


@given(hypergraphs())
def test_nullity_equals_star_cycle_rank(h):
    assert nullity(h) == tree_replacement_nullity(h)
    assert nullity(h) >= 0


@given(hypergraphs())
def test_components_match_networkx(h):
    g = nx.Graph()
    for i, e in enumerate(h.hyperedges):
        g.add_node(("h", i))
        for v in e:
            g.add_edge(("h", i), v)
    expected = sorted(sorted(i for kind, i in (x for x in c if isinstance(x, tuple))) for c in nx.connected_components(g)
                      if any(isinstance(x, tuple) for x in c))
    assert sorted(sorted(c) for c in h.component_indices()) == expected


@given(hypergraphs())
def test_tree_construction_agrees_with_nullity(h):
    for idx in h.component_indices():
        sub = h.sub(idx)
        assert is_tree_by_construction(sub) == (nullity(sub) == 0)


def test_classify_component():
    assert classify_component(H(3, 5, (0, 1, 2), (2, 3, 4))) == "tree"
    assert classify_component(H(3, 4, (0, 1, 2), (0, 1, 3))) == "unicyclic"
    assert classify_component(H(3, 3, (0, 1, 2), (0, 1, 2))) == "complex"
    with pytest.raises(ContractViolation):
        classify_component(H(3, 6, (0, 1, 2), (3, 4, 5)))


def test_structure_report_lists_components():
    rep = structure_report(H(3, 9, (0, 1, 2), (3, 4, 5), (3, 4, 6), (6, 7, 8)))
    assert sorted(rep.classes) == ["tree", "unicyclic"]
    assert not rep.has_complex


def _brute_avoidable(h):
    bound = avoidable_bound(h.r)
    for k in range(1, min(bound, h.e) + 1):
        for idx in combinations(range(h.e), k):
            if is_avoidable_configuration(h.sub(idx)):
                return True
    return False


@given(hypergraphs(max_n=7, max_e=6))
def test_avoidable_search_matches_subset_scan(h):
    found = find_avoidable_configuration(h)
    assert (found is not None) == _brute_avoidable(h)
    if found is not None:
        assert is_avoidable_configuration(found)


def test_clean_cycle_core():
    assert clean_cycle_core([frozenset({0, 1, 2}), frozenset({0, 1, 3})]) == frozenset({0, 1})
    tri = [frozenset({0, 1, 2}), frozenset({2, 3, 4}), frozenset({4, 5, 0})]
    assert clean_cycle_core(tri) == frozenset({0, 2, 4})
    # three hyperedges through one vertex are not a cycle
    assert clean_cycle_core([frozenset({0, 1, 2}), frozenset({0, 3, 4}), frozenset({0, 5, 6})]) is None


def test_find_clean_cycles():
    h = H(3, 8, (0, 1, 2), (2, 3, 4), (4, 5, 0), (0, 1, 7))
    cycles = find_clean_cycles(h, 3)
    sizes = sorted(c.e for c in cycles)
    assert sizes == [2, 3]
    assert all(nullity(c) == 1 for c in cycles)


def test_fgraph_round_trip_and_underlying_graph():
    k4 = complete_graph(4)
    a = FCopy.from_image(k4, (0, 1, 2, 3))
    b = FCopy.from_image(k4, (3, 4, 5, 6))
    fg = FGraph(k4, 7, (a, b))
    again = FGraph.from_text(fg.to_text())
    assert {c.edges for c in again.f_edges} == {a.edges, b.edges}
    assert underlying_graph(fg).edge_count == 12
    assert to_hypergraph(fg).hyperedges == (a.vertices, b.vertices)


def test_fgraph_rejects_duplicates_and_bad_files():
    k3 = complete_graph(3)
    a = FCopy.from_image(k3, (0, 1, 2))
    with pytest.raises(ValueError):
        FGraph(k3, 3, (a, FCopy.from_image(k3, (2, 1, 0))))
    with pytest.raises(ConfigError):
        FGraph.from_text("pattern K3\n4 1\n0 0 1\n")
    with pytest.raises(ConfigError):
        FGraph.from_text("4 1\n0 1 2\n")


def test_extra_copies_of_a_four_cycle():
    c4 = cycle_graph(4)
    # two 4-cycles on the same four vertices span K4, which holds a third one
    a = FCopy.from_image(c4, (0, 1, 2, 3))
    b = FCopy.from_image(c4, (0, 2, 1, 3))
    fg = FGraph(c4, 6, (a, b))
    extras = extra_copies(fg, a)
    assert [sorted(c.edges) for c in extras] == [[(0, 1), (0, 2), (1, 3), (2, 3)]]
    # sharing a single edge adds nothing
    far = FGraph(c4, 6, (a, FCopy.from_image(c4, (0, 1, 4, 5))))
    assert extra_copies(far, a) == []
    with pytest.raises(ContractViolation):
        extra_copies(fg, FCopy.from_image(c4, (2, 3, 4, 5)))
