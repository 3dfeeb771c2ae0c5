from fractions import Fraction

import pytest

from bunkbed.exceptions import GraphError
from bunkbed.generators import (
    ClassKind,
    VerticalSpec,
    generate,
    parse_class_spec,
    vertex_side,
)
from bunkbed.graph import normalize


@pytest.mark.parametrize(
    'text, vertices, edges',
    [
        ('complete:4', 4, 6),
        ('complete_bipartite:2,3', 5, 6),
        ('complete_kpartite:3,2', 6, 12),
        ('complete_minus_clique:5,2', 5, 10),
        ('cycle:5', 5, 5),
        ('path:4', 4, 3),
        ('hypercube:3', 8, 12),
        ('petersen', 10, 15),
        ('icosahedral', 12, 30),
    ],
)
def test_class_sizes(text, vertices, edges):
    g = generate(parse_class_spec(text))
    assert len(g.vertices) == vertices
    assert len(g.edges) == edges
    assert set(g.vertex_weights) == {Fraction(1, 2)}


def test_vertex_names():
    assert generate(parse_class_spec('complete:3')).vertices == ('a', 'b', 'c')
    assert generate(parse_class_spec('complete_bipartite:2,3')).vertices == (
        'V1_0', 'V1_1', 'V2_0', 'V2_1', 'V2_2'
    )
    assert '010' in generate(parse_class_spec('hypercube:3')).vertices
    assert generate(parse_class_spec('petersen')).vertices[:3] == ('0', '1', '2')
    assert vertex_side('V2_1') == 2
    assert vertex_side('a') is None


def test_complete_minus_clique_weights():
    spec = parse_class_spec('complete_minus_clique:5,2,pprime=1/4', p='1/3')
    g = generate(spec)
    assert g.edge_weight('V1_0', 'V1_1') == 0
    assert g.edge_weight('V2_0', 'V2_2') == Fraction(1, 4)
    assert g.edge_weight('V1_0', 'V2_2') == Fraction(1, 3)
    assert spec.partite


def test_removing_both_cliques_gives_the_bipartite_graph():
    minus = normalize(generate(parse_class_spec('complete_minus_clique:5,2,pprime=0', p='1/3')))
    bipartite = generate(parse_class_spec('complete_bipartite:2,3', p='1/3'))
    assert minus.vertices == bipartite.vertices
    assert {e.key: e.p for e in minus.edges} == {e.key: e.p for e in bipartite.edges}
    assert minus.vertex_weights == bipartite.vertex_weights


def test_vertical_specs():
    holding = generate(parse_class_spec('complete:3', vertical=VerticalSpec.holding_set('a')))
    assert holding.vertex_weights == (1, 0, 0)

    constant = parse_class_spec('cycle:3', p='1/4', vertical=VerticalSpec.constant_weight('1/2'))
    assert generate(constant).vertex_weights == (Fraction(1, 2),) * 3

    explicit = VerticalSpec.explicit_weights({'a': 0, 'b': '1/3', 'c': 1})
    assert generate(parse_class_spec('path:3', vertical=explicit)).vertex_weights == (
        0, Fraction(1, 3), 1
    )

    with pytest.raises(GraphError, match='holding: unknown vertices'):
        generate(parse_class_spec('complete:2', vertical=VerticalSpec.holding_set(['z'])))


def test_spec_strings_round_trip():
    spec = parse_class_spec(' complete_minus_clique:5,2,pprime=1/4 ')
    assert str(spec) == 'complete_minus_clique:5,2,pprime=1/4'
    assert parse_class_spec(str(spec)) == spec
    assert spec.kind is ClassKind.COMPLETE_MINUS_CLIQUE
    assert spec.with_p('1/4').p == Fraction(1, 4)
    assert str(parse_class_spec('petersen')) == 'petersen'


@pytest.mark.parametrize(
    'text, message',
    [
        ('nope:3', "unknown class 'nope'"),
        ('complete:a', "'a' is not an integer"),
        ('cycle:2', 'at least 3'),
        ('complete_bipartite:2', 'expected 2 size parameter'),
        ('complete:0', 'integers >= 1'),
        ('complete:3,pprime=0', 'pprime only applies'),
        ('complete_minus_clique:2,3', 'at most n'),
        ('complete_minus_clique:4,2,pprime=2', 'pprime'),
    ],
)
def test_bad_specs(text, message):
    with pytest.raises(GraphError, match=message):
        parse_class_spec(text)
