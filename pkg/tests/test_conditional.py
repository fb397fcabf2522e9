from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliquecouple.conditional import (
    ConditionalEngine,
    ConditionalQuery,
    HistoryConstraint,
    brute_force_conditional,
    conditional_probability,
    dump_query,
    pi_lower_bound,
    q_statistic,
    target_component,
)
from cliquecouple.errors import ContractViolation, ZeroProbabilityCondition

EDGES = list(combinations(range(6), 2))
e = EDGES

probs = st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(2, 5), Fraction(3, 4), Fraction(1, 7)])
coins = st.sampled_from([None, Fraction(1, 2), Fraction(1, 3), Fraction(1, 6), Fraction(1)])


@st.composite
def queries(draw, pool=12):
    edges = EDGES[:pool]
    p = draw(probs)
    c = draw(coins)
    revealed = frozenset(draw(st.lists(st.sampled_from(edges), max_size=3)))
    free = [x for x in edges if x not in revealed]
    target = frozenset(draw(st.lists(st.sampled_from(free), min_size=1, max_size=4)))
    failed = tuple(frozenset(draw(st.lists(st.sampled_from(free), min_size=1, max_size=4)))
                   for _ in range(draw(st.integers(0, 6))))
    return ConditionalQuery(target, HistoryConstraint(revealed, failed, c), p)


@given(queries())
def test_engine_matches_enumeration(q):
    assert conditional_probability(q) == brute_force_conditional(q)


@given(queries())
def test_lower_bound_holds(q):
    c = q.constraint
    R = c.revealed_present
    lb = pi_lower_bound(q.edge_probability, q.target_set | R, R, [s | R for s in c.failed_sets], c.thinning)
    assert conditional_probability(q) >= lb


def test_single_overlap_closed_form():
    p = Fraction(1, 3)
    q = ConditionalQuery.from_history([e[0]], [], [[e[0], e[1]]], p)
    assert conditional_probability(q) == p / (1 + p)


def test_thinned_closed_form():
    p, c = Fraction(1, 3), Fraction(1, 4)
    q = ConditionalQuery.from_history([e[0]], [], [[e[0], e[1]]], p, thinning=c)
    assert conditional_probability(q) == c * p * (1 - p * c) / (1 - c * p * p)


def test_unconstrained_is_power():
    q = ConditionalQuery.from_history(e[:3], [], [], Fraction(2, 5))
    assert conditional_probability(q) == Fraction(2, 5) ** 3


def test_revealed_edges_are_free():
    q = ConditionalQuery.from_history([e[0], e[1], e[2]], [[e[0], e[1]]], [], Fraction(1, 2))
    assert conditional_probability(q) == Fraction(1, 2)


def test_disjoint_failures_do_not_matter():
    p = Fraction(1, 2)
    base = ConditionalQuery.from_history([e[0]], [], [], p)
    far = ConditionalQuery.from_history([e[0]], [], [[e[5], e[6]], [e[6], e[7], e[8]]], p)
    assert conditional_probability(base) == conditional_probability(far) == p


def test_empty_plain_failure_is_impossible():
    q = ConditionalQuery.from_history([e[2]], [[e[0], e[1]]], [[e[0], e[1]]], Fraction(1, 2))
    with pytest.raises(ZeroProbabilityCondition):
        conditional_probability(q)
    with pytest.raises(ZeroProbabilityCondition):
        brute_force_conditional(q)


def test_target_must_avoid_revealed():
    with pytest.raises(ContractViolation):
        ConditionalQuery(frozenset({e[0]}), HistoryConstraint(frozenset({e[0]}), ()), Fraction(1, 2))


def test_failed_sets_must_avoid_revealed():
    with pytest.raises(ContractViolation):
        HistoryConstraint(frozenset({e[0]}), (frozenset({e[0], e[1]}),))


def test_q_statistic_counts_overlaps_outside_the_cover():
    p = Fraction(1, 2)
    target = frozenset(e[:3])
    failed = [frozenset([e[0], e[5], e[6]]), frozenset([e[1], e[2]]), frozenset([e[7], e[8]])]
    # first contributes p^2, second p^0, third does not overlap
    assert q_statistic(p, target, frozenset(), failed) == Fraction(1, 4) + 1


def test_target_component_and_dump():
    q = ConditionalQuery.from_history([e[0]], [], [[e[0], e[1]], [e[1], e[2]], [e[7]]], Fraction(1, 2))
    assert sorted(target_component(q.target_set, q.constraint.failed_sets)) == [0, 1]
    text = dump_query(q)
    assert "failed 2 dropped" in text and "failed 1 linked" in text


def test_memo_seeding_keeps_answers_exact():
    # feed the engine a history step by step, recording each failure, and compare with fresh engines
    p = Fraction(1, 3)
    index = {x: i for i, x in enumerate(EDGES)}
    engine = ConditionalEngine(p, None, dict(index))
    sets = [frozenset(EDGES[i:i + 3]) for i in range(0, 10, 2)]
    failed: list[frozenset] = []
    for s in sets:
        q = ConditionalQuery(s, HistoryConstraint(frozenset(), tuple(failed)), p)
        pi_j = engine.probability(q)
        assert pi_j == conditional_probability(q)
        engine.record_failure(q, pi_j)
        failed.append(s)
    final = ConditionalQuery(frozenset(EDGES[3:6]), HistoryConstraint(frozenset(), tuple(failed)), p)
    assert engine.probability(final) == brute_force_conditional(final)


def test_completion_sampler_hits_the_conditional_law():
    from cliquecouple.rng import RandomStream

    p = Fraction(1, 2)
    failed = [frozenset([e[0], e[1]]), frozenset([e[1], e[2]])]
    engine = ConditionalEngine(p)
    trials = 4000
    hits = 0
    for t in range(trials):
        got = engine.sample_completion(frozenset(), failed, e[:3], RandomStream(77, t))
        assert not all(x in got for x in failed[0]) and not all(x in got for x in failed[1])
        hits += e[1] in got
    exact = conditional_probability(ConditionalQuery.from_history([e[1]], [], failed, p))
    sd = (float(exact) * (1 - float(exact)) / trials) ** 0.5
    assert abs(hits / trials - float(exact)) < 5 * sd


def test_memo_seeding_with_a_repeated_thinned_failure():
    # two failed copies with the same unrevealed edges carry two separate coins
    p, c = Fraction(1, 2), Fraction(1, 2)
    engine = ConditionalEngine(p, c)
    failed = [frozenset([e[0], e[1]])]
    target = frozenset([e[0], e[1]])
    for _ in range(3):
        q = ConditionalQuery(target, HistoryConstraint(frozenset(), tuple(failed), c), p)
        pi_j = engine.probability(q)
        assert pi_j == brute_force_conditional(q)
        engine.record_failure(q, pi_j)
        failed.append(target)
    q = ConditionalQuery(target, HistoryConstraint(frozenset(), tuple(failed), c), p)
    assert engine.probability(q) == brute_force_conditional(q)
