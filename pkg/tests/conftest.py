import json
from fractions import Fraction

import pytest

from bunkbed.generators import generate, parse_class_spec
from bunkbed.graph import WeightedGraph, graph_to_json

HALF = Fraction(1, 2)

CORPUS = (
    'complete:2',
    'complete:3',
    'complete:4',
    'complete_bipartite:1,2',
    'complete_bipartite:1,3',
    'complete_bipartite:2,2',
    'complete_bipartite:2,3',
    'complete_kpartite:2,2',
    'complete_minus_clique:4,2',
    'complete_minus_clique:4,3',
    'cycle:4',
    'cycle:5',
    'path:3',
    'path:4',
    'hypercube:2',
)
""" Small generated classes; each bunkbed has at most 18 edges. """


@pytest.fixture
def k2() -> WeightedGraph:
    """ Single edge `a-b`, every edge and vertex weight 1/2. """
    return generate(parse_class_spec('complete:2', p=HALF))


@pytest.fixture
def k3() -> WeightedGraph:
    return generate(parse_class_spec('complete:3', p=HALF))


@pytest.fixture
def path4() -> WeightedGraph:
    """ Path `a-b-c-d`, every weight 1/2. """
    return generate(parse_class_spec('path:4', p=HALF))


@pytest.fixture(params=CORPUS)
def corpus_spec(request) -> str:
    return request.param


@pytest.fixture
def write_graph(tmp_path):
    """ Writes a graph (or any JSON document) to a file and returns its path. """

    def write(document, name='graph.json'):
        if isinstance(document, WeightedGraph):
            document = graph_to_json(document)
        path = tmp_path / name
        path.write_text(document if isinstance(document, str) else json.dumps(document))
        return path

    return write
