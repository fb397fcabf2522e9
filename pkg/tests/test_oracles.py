from fractions import Fraction
from itertools import combinations, combinations_with_replacement

import networkx as nx
import pytest

from cliquecouple.errors import CapExceeded
from cliquecouple.graphs import bowtie_graph, complete_graph, cycle_graph, path_graph, petersen_graph
from cliquecouple.hypergraph import Hypergraph, nullity
from cliquecouple.oracles import (
    EXHAUSTIVE_CAPS,
    EnumerationSpec,
    bd_multisets,
    bound_MF,
    classifier_table,
    clean_cycle_skeleton,
    extra_cliques,
    hypergraphs,
    iso_classes,
    verify_bd_inequality,
    verify_lemma2,
    verify_lemma8,
    verify_mbd,
    verify_r3_exception,
)


def _incidence(h: Hypergraph) -> nx.Graph:
    g = nx.Graph()
    for i, e in enumerate(h.hyperedges):
        g.add_node(("e", i), kind="e")
        for v in e:
            g.add_node(v, kind="v")
            g.add_edge(("e", i), v)
    return g


def _first_occurrence_labelled(r, e):
    """Multisets of e r-sets whose vertices are introduced in increasing order."""
    pool = [frozenset(c) for c in combinations(range(r * e), r)]
    for hs in combinations_with_replacement(pool, e):
        seen = sorted(set().union(*hs))
        if seen == list(range(len(seen))):
            yield Hypergraph(r, r * e, hs)


def _brute_iso_count(r, e):
    buckets: dict[str, list[nx.Graph]] = {}
    match = nx.algorithms.isomorphism.categorical_node_match("kind", None)
    for h in _first_occurrence_labelled(r, e):
        g = _incidence(h)
        key = nx.weisfeiler_lehman_graph_hash(g, node_attr="kind")
        reps = buckets.setdefault(key, [])
        if not any(nx.is_isomorphic(g, x, node_match=match) for x in reps):
            reps.append(g)
    return sum(len(v) for v in buckets.values())


@pytest.mark.parametrize("r,e", [(3, 1), (3, 2), (3, 3), (4, 2)])
def test_iso_class_counts_match_networkx(r, e):
    ours = list(iso_classes(r, e, r * e))
    assert len(ours) == _brute_iso_count(r, e)
    assert all(h.e == e for h in ours)


def test_iso_class_counts_known_values():
    assert [sum(1 for _ in iso_classes(3, e, 9)) for e in (1, 2, 3, 4)] == [1, 4, 16, 87]
    assert [sum(1 for _ in iso_classes(4, e, 10)) for e in (1, 2, 3)] == [1, 5, 28]


def test_enumeration_caps():
    r, (e_cap, v_cap) = 4, EXHAUSTIVE_CAPS[4]
    with pytest.raises(CapExceeded):
        EnumerationSpec(r, e_cap + 1, v_cap)
    random_spec = EnumerationSpec(4, 8, 20, mode="random", count=50, seed=1)
    hs = list(hypergraphs(random_spec))
    assert len(hs) == 50 and hs == list(hypergraphs(random_spec))


def test_extra_cliques_of_a_triangle_of_triples():
    # three triples pairwise sharing one vertex span a triangle on the shared vertices
    h = Hypergraph(3, 6, (frozenset({0, 1, 2}), frozenset({2, 3, 4}), frozenset({4, 5, 0})))
    assert frozenset({0, 2, 4}) in set(extra_cliques(h))
    assert nullity(h) == 1


def test_small_exhaustive_checks_pass():
    assert verify_lemma2(EnumerationSpec(4, 2, 8)).ok
    rep = verify_r3_exception(EnumerationSpec(3, 3, 9))
    assert rep.ok and rep.instances_checked > 0


def test_bd_multisets_and_inequality():
    ms = list(bd_multisets(4))
    assert ms and all(len(m) <= 6 and sum(t * (t - 1) // 2 for t in m) >= 6 for m in ms)
    assert set(ms) >= {(3, 3), (2, 2, 2, 2, 2, 2)}
    rep = verify_bd_inequality(4, random_checks=200, seed=3)
    assert rep.ok


def test_clean_cycle_skeleton_is_unicyclic():
    n, hs = clean_cycle_skeleton(4, 3)
    h = Hypergraph(4, n, hs)
    assert h.is_connected() and nullity(h) == 1


@pytest.mark.parametrize("pattern,bound,certified", [
    (complete_graph(3), 1, False), (complete_graph(4), 0, True), (cycle_graph(4), 4, False),
])
def test_extra_copy_bound(pattern, bound, certified):
    res = bound_MF(pattern, budget=500, seed=0)
    assert res.lower_bound >= bound
    assert res.certified_zero == certified
    assert not res.counterexamples


def test_randomised_fgraph_checks():
    spec = EnumerationSpec(4, 4, 10, mode="random", count=100, seed=5)
    assert verify_lemma8(complete_graph(4), spec).ok


def test_mbd():
    assert verify_mbd(complete_graph(4)).ok
    assert verify_mbd(cycle_graph(4)).ok


def test_classifier_rows():
    rows = {r["pattern"]: r for r in classifier_table(
        [complete_graph(4), cycle_graph(5), path_graph(3), petersen_graph(), bowtie_graph()])}
    assert rows["K4"]["nice"] and rows["K4"]["d1"] == str(Fraction(2))
    assert rows["petersen"]["three_connected"] and rows["petersen"]["nice"]
    assert not rows["C5"]["three_connected"]
    assert not rows["P3"]["two_connected"]
    assert rows["bowtie"]["one_balanced"] and not rows["bowtie"]["strictly_one_balanced"]
