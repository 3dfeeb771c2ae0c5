from fractions import Fraction

import pytest

from bunkbed.exceptions import GraphError
from bunkbed.graph import (
    Edge,
    PercolationGraph,
    WeightedGraph,
    build_bunkbed,
    fraction_str,
    graph_from_json,
    graph_to_json,
    normalize,
    normalize_with_map,
    probability,
    reflect,
)


def test_probability_parsing():
    assert probability('3/4') == Fraction(3, 4)
    assert probability('0.25') == Fraction(1, 4)
    assert probability(0.1) == Fraction(1, 10)
    assert probability(1) == 1

    with pytest.raises(GraphError, match='outside of'):
        probability('3/2')
    with pytest.raises(GraphError, match='boolean'):
        probability(True)
    with pytest.raises(GraphError, match="edges\\[2\\].p: can't parse"):
        probability('half', field_path='edges[2].p')


def test_fraction_str():
    assert fraction_str(Fraction(1, 3)) == '1/3'
    assert fraction_str(Fraction(-7, 16)) == '-7/16'
    assert fraction_str(Fraction(2, 2)) == '1'


def test_bunkbed_layout(k3):
    b = build_bunkbed(k3)
    assert b.vertices == ('a+', 'b+', 'c+', 'a-', 'b-', 'c-')
    assert len(b.edges) == 9

    ab = b.edges[b.upper_edge('b', 'a')]
    assert (ab.u, ab.v) == ('a+', 'b+')
    assert b.edges[b.lower_edge('a', 'b')].key == ('a-', 'b-')
    assert b.edges[b.vertical_edge('c')].key == ('c+', 'c-')
    assert b.marked('a', 'b') == ('a-', 'a+', 'b-', 'b+')
    assert reflect('a+') == 'a-'

    with pytest.raises(GraphError, match="v: unknown vertex 'z'"):
        b.marked('z', 'a')


def test_bunkbed_uses_vertex_weights():
    g = WeightedGraph.build('xy', [('x', 'y', '1/3')], {'x': 1, 'y': '1/5'})
    b = build_bunkbed(g)
    assert b.edges[b.vertical_edge('x')].p == 1
    assert b.edges[b.vertical_edge('y')].p == Fraction(1, 5)
    assert b.edges[b.lower_edge('x', 'y')].p == Fraction(1, 3)


def test_weighted_graph_rejects_bad_input():
    with pytest.raises(GraphError, match="duplicate vertex 'a'"):
        WeightedGraph.build('aa')
    with pytest.raises(GraphError, match='duplicate edge'):
        WeightedGraph.build('ab', [('a', 'b', 0), ('b', 'a', 1)])
    with pytest.raises(GraphError, match="loop at 'a'"):
        WeightedGraph.build('ab', [('a', 'a', 0)])
    with pytest.raises(GraphError, match='missing weight'):
        WeightedGraph.build('ab', vertex_weights={'a': 0})

    # Parallel edges are fine for plain percolation graphs.
    g = PercolationGraph(('x', 'y'), [Edge('x', 'y', '1/2'), Edge('y', 'x', '1/2')])
    assert g.edges_between('x', 'y') == (0, 1)


def test_json_round_trip(k3):
    document = graph_to_json(k3)
    assert document['edges'][0] == {'u': 'a', 'v': 'b', 'p': '1/2'}
    assert document['vertex_weights'] == {'a': '1/2', 'b': '1/2', 'c': '1/2'}
    assert graph_from_json(document) == k3


@pytest.mark.parametrize(
    'change, message',
    [
        (lambda d: d['edges'].append({'u': 'b', 'v': 'a', 'p': '1/3'}), r'edges\[3\]: duplicate'),
        (lambda d: d['edges'][0].update(p='3/2'), r'edges\[0\]\.p: probability'),
        (lambda d: d['edges'][1].update(v='z'), r'edges\[1\]\.v: unknown vertex'),
        (lambda d: d['edges'][2].pop('p'), r'edges\[2\]\.p: missing'),
        (lambda d: d['vertex_weights'].pop('b'), r'vertex_weights\.b: missing'),
        (lambda d: d['vertex_weights'].update(c='-1'), r'vertex_weights\.c: probability'),
        (lambda d: d.pop('vertices'), r'vertices: missing'),
    ],
)
def test_json_errors_name_the_field(k3, change, message):
    document = graph_to_json(k3)
    change(document)
    with pytest.raises(GraphError, match=message):
        graph_from_json(document)


def test_normalize_contracts_and_combines():
    g = WeightedGraph.build(
        'abcd',
        [('a', 'b', 1), ('a', 'c', '1/2'), ('b', 'c', '1/2'), ('c', 'd', 0)],
        {'a': '1/2', 'b': '1/2', 'c': 0, 'd': 1},
    )
    normalized, mapping = normalize_with_map(g)

    assert normalized.vertices == ('a~b', 'c', 'd')
    assert mapping == {'a': 'a~b', 'b': 'a~b', 'c': 'c', 'd': 'd'}
    assert [(e.key, e.p) for e in normalized.edges] == [(('a~b', 'c'), Fraction(3, 4))]
    assert normalized.vertex_weight('a~b') == Fraction(3, 4)
    assert normalized.vertex_weight('d') == 1


def test_normalize_is_identity_without_deterministic_edges(k3):
    assert normalize(k3) == k3


def test_with_weights_keeps_structure():
    g = WeightedGraph.build('abc', [('a', 'b', '1/3'), ('b', 'c', 0)], {'a': 0, 'b': 1, 'c': 0})
    changed = g.with_weights('1/2', vertex_p=0)
    assert [(e.key, e.p) for e in changed.edges] == [(('a', 'b'), Fraction(1, 2))]
    assert changed.vertex_weights == (0, 0, 0)
    assert g.with_vertex_weights({'c': '1/4'}).vertex_weight('c') == Fraction(1, 4)
