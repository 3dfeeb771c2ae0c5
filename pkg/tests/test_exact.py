from fractions import Fraction

import pytest

from bunkbed.conf import bunkbed_settings
from bunkbed.events import ConnectivityEvent, EdgeState, connected, forced_states, separated
from bunkbed.exact import (
    bunkbed_gap,
    connection_probability,
    event_probabilities,
    event_probability,
    four_point_d,
    holding_gap,
    pattern_d,
    vertical_mixture_gap,
)
from bunkbed.exceptions import CapExceededError, GraphError
from bunkbed.generators import generate, parse_class_spec
from bunkbed.graph import Edge, PercolationGraph, WeightedGraph, build_bunkbed
from bunkbed.resources import ExactResultCache


def test_single_edge_bunkbed(k2):
    b = build_bunkbed(k2)
    same, cross = event_probabilities(b, [connected('a-', 'b-'), connected('a-', 'b+')])

    assert same.probability == Fraction(9, 16)
    assert cross.probability == Fraction(7, 16)
    assert same.configurations_evaluated == 16
    assert bunkbed_gap(b, 'a', 'b') == Fraction(1, 8)
    assert four_point_d(b, 'a', 'b') == Fraction(1, 4)
    assert pattern_d(b, 'a', 'b') == Fraction(1, 4)


@pytest.mark.parametrize('p', ['1/4', '1/2', '3/4'])
def test_pattern_terms_cancel_to_four_point_d(corpus_spec, p):
    g = generate(parse_class_spec(corpus_spec, p=p))
    b = build_bunkbed(g)
    for v, w in ((g.vertices[0], g.vertices[1]), (g.vertices[0], g.vertices[-1])):
        assert pattern_d(b, v, w) == four_point_d(b, v, w)


def test_results_do_not_depend_on_workers():
    g = build_bunkbed(generate(parse_class_spec('complete:4', p='1/3')))
    bunkbed_settings.chunk_bits = 6
    events = [connected('a-', 'd-'), connected('a-', 'd+')]
    serial = event_probabilities(g, events, workers=1)
    ExactResultCache.grab().reset_cache()
    parallel = event_probabilities(g, events, workers=4)
    assert [r.probability for r in serial] == [r.probability for r in parallel]


def test_cap_is_checked_before_enumerating(k2):
    with pytest.raises(CapExceededError) as info:
        bunkbed_gap(build_bunkbed(k2), 'a', 'b', cap=3)
    assert info.value.needed == 4
    assert info.value.cap == 3


def test_forced_states(k2):
    b = build_bunkbed(k2)
    states = forced_states(b, open_pairs=[('a-', 'b-')])
    assert connection_probability(b, 'a-', 'b-', states) == 1

    closed = forced_states(b, closed_pairs=[('a-', 'b-'), ('a+', 'a-')])
    assert connection_probability(b, 'a-', 'b-', closed) == 0

    # A single pair is accepted as well as a list of pairs.
    assert forced_states(b, open_pairs=('a-', 'b-')) == states
    assert ConnectivityEvent.create(connect=('a-', 'b-')) == connected('a-', 'b-')

    with pytest.raises(GraphError, match='no edge between'):
        forced_states(b, open_pairs=[('a-', 'b+')])
    with pytest.raises(GraphError, match='both open and closed'):
        forced_states(b, open_pairs=[('a-', 'b-')], closed_pairs=[('b-', 'a-')])


def test_parallel_edges_and_separation():
    g = PercolationGraph(('x', 'y', 'z'), [Edge('x', 'y', '1/2'), Edge('y', 'x', '1/2')])
    assert connection_probability(g, 'x', 'y') == Fraction(3, 4)
    assert event_probability(g, separated('x', 'z')).probability == 1

    both = ConnectivityEvent.create(connect=[('x', 'y')], separate=[('y', 'z')])
    assert event_probability(g, both).probability == Fraction(3, 4)
    with pytest.raises(GraphError, match='event: unknown vertex'):
        event_probability(g, connected('x', 'nope'))
    with pytest.raises(GraphError, match='both required'):
        ConnectivityEvent.create(connect=[('x', 'y')], separate=[('y', 'x')])


def test_deterministic_edges_are_not_enumerated():
    g = WeightedGraph.build('abc', [('a', 'b', 1), ('b', 'c', '1/2')], 0)
    result = event_probability(build_bunkbed(g), connected('a-', 'c-'))
    assert result.probability == Fraction(1, 2)
    # Only the two `b c` copies are random.
    assert result.configurations_evaluated == 4


@pytest.mark.parametrize(
    'holding, expected', [((), Fraction(1, 2)), (('a',), 0), (('a', 'b'), 0)]
)
def test_holding_gap(k2, holding, expected):
    assert holding_gap(k2, '1/2', holding, 'a', 'b') == expected


def test_vertical_mixture_matches_direct_gap():
    g = WeightedGraph.build(
        'abc', [('a', 'b', '1/2'), ('b', 'c', '1/3')], {'a': '1/4', 'b': 1, 'c': '1/2'}
    )
    mixture = vertical_mixture_gap(g, 'a', 'c')
    assert mixture.agrees
    # `b` always holds, so only `a` and `c` vary.
    assert mixture.holdings == 4


def test_repeated_queries_use_the_cache(k3):
    b = build_bunkbed(k3)
    cache = ExactResultCache.grab()
    bunkbed_gap(b, 'a', 'b')
    hits = cache.hits
    bunkbed_gap(b, 'a', 'b')
    assert cache.hits == hits + 2


def test_forced_state_on_unknown_edge(k2):
    with pytest.raises(GraphError, match='no edge with index'):
        bunkbed_gap(build_bunkbed(k2), 'a', 'b', {17: EdgeState.OPEN})
