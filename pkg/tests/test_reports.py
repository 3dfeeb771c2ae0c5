from fractions import Fraction

import pytest

from bunkbed.exact import bunkbed_gap
from bunkbed.exceptions import HypothesisError
from bunkbed.generators import generate, parse_class_spec
from bunkbed.graph import WeightedGraph, build_bunkbed
from bunkbed.reports import (
    Assertion,
    VerificationReport,
    verify_local_symmetry,
    verify_same_neighbors,
)


def _graph(text, p):
    return generate(parse_class_spec(text, p=p))


@pytest.mark.parametrize(
    'text, v, w',
    [
        ('complete:3', 'a', 'b'),
        ('complete_bipartite:2,2', 'V1_0', 'V1_1'),
        ('complete_bipartite:2,3', 'V1_0', 'V1_1'),
    ],
)
@pytest.mark.parametrize('p', ['1/3', '1/2'])
def test_same_neighbors_verification(text, v, w, p):
    g = _graph(text, p)
    report = verify_same_neighbors(g, v, w)

    assert report.passed, [a.json() for a in report.failures]
    assert report.gap == bunkbed_gap(build_bunkbed(g), v, w)
    assert report.gap >= 0
    assert report.partitions > 0
    assert report.json()['check'] == 'same-neighbors'


@pytest.mark.parametrize(
    'text, v, w, p',
    [
        ('complete:3', 'a', 'b', '1/4'),
        ('complete:3', 'a', 'b', '1/2'),
        ('complete:4', 'a', 'b', '1/4'),
        ('complete:4', 'a', 'b', '1/2'),
        ('complete_bipartite:2,3', 'V1_0', 'V2_0', '1/2'),
        ('cycle:5', 'a', 'b', '1/3'),
    ],
)
def test_local_symmetry_verification(text, v, w, p):
    report = verify_local_symmetry(_graph(text, p), v, w)

    assert report.passed, [a.json() for a in report.failures]
    assert not report.trivial
    assert report.gap >= 0
    document = report.json()
    assert document['passed'] is True
    assert 'min d_C >= 0' in [a['name'] for a in document['assertions']]


def test_local_symmetry_with_a_held_vertex():
    g = WeightedGraph.build('ab', [('a', 'b', '1/2')], {'a': 1, 'b': '1/2'})
    report = verify_local_symmetry(g, 'a', 'b')
    assert report.trivial
    assert report.passed
    assert report.gap == 0


def test_hypotheses_are_checked(path4):
    with pytest.raises(HypothesisError, match='same neighbors'):
        verify_same_neighbors(path4, 'a', 'b')
    with pytest.raises(HypothesisError, match='local symmetry'):
        verify_local_symmetry(path4, 'b', 'c')


def test_report_summarises_assertions():
    report = VerificationReport(check='same-neighbors', v='a', w='b')
    report.add(Assertion.equal('one', Fraction(1, 2), Fraction(1, 2)))
    assert report.passed

    failed = report.add(Assertion.at_least('two', Fraction(-1, 8), 0))
    assert not report.passed
    assert report.failures == [failed]
    assert failed.json() == dict(name='two', lhs='-1/8', relation='>=', rhs='0', passed=False)
    assert Assertion.close('three', 0.5, 0.5 + 1e-12, 1e-9).passed
