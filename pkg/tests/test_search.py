from fractions import Fraction

import pytest

from bunkbed.conf import bunkbed_settings
from bunkbed.exceptions import GraphError, PreconditionError
from bunkbed.montecarlo import McGapResult, McResult
from bunkbed.search import (
    PairSelection,
    SearchConfig,
    SearchMode,
    Theorem,
    applicable_theorems,
    canonical_masks,
    mask_edges,
    nonisomorphic_graphs,
    run_search,
    search_exhaustive,
    select_pairs,
    verify_class,
)


@pytest.mark.parametrize('n, count', [(1, 1), (2, 2), (3, 4), (4, 11), (5, 34)])
def test_nonisomorphic_graph_counts(n, count):
    assert len(nonisomorphic_graphs(n)) == count


def test_canonical_masks():
    # Any single edge on three vertices is the same graph.
    assert canonical_masks(3, [1, 2, 4]) == [1, 1, 1]
    assert canonical_masks(3, [3, 5, 6]) == [3, 3, 3]
    assert mask_edges(3, 5) == [(0, 1), (1, 2)]


def test_exhaustive_search_small_graphs():
    report = search_exhaustive(3, ['1/2'])

    assert report.passed
    assert report.graphs_per_size == {1: 1, 2: 2, 3: 4}
    assert report.instances == 7
    assert report.checks == 14
    assert report.min_gap.gap >= 0
    assert not report.skipped
    assert report.json()['graphs_per_size'] == {'1': 1, '2': 2, '3': 4}


def test_exhaustive_search_limit():
    with pytest.raises(PreconditionError, match='at most 7'):
        search_exhaustive(8)


def test_class_sweep_attributes_theorems():
    report = verify_class(['complete:3'], p_grid=['1/2'])

    assert report.passed
    assert report.checks == 3
    assert report.min_gap.engine == 'exact'
    assert {
        ('complete', 'adjacent', 'local-symmetry'),
        ('complete', 'adjacent', 'same-neighbors'),
        ('complete', 'adjacent', 'edge-transitive'),
    } <= report.coverage
    assert report.summaries['complete:3'].theorems['same-neighbors'] == 3


def test_class_sweep_pair_selection():
    report = verify_class(['complete_bipartite:2,2'], pairs='same-side', p_grid=['1/2', '1/4'])

    assert report.passed
    assert report.instances == 2
    assert report.checks == 4
    assert report.coverage == {('complete_bipartite', 'same-side', 'same-neighbors')}
    assert report.summary_csv().splitlines()[0] == (
        'class,instances,checks,min_gap,violations,theorems'
    )


def test_class_sweep_with_holdings():
    report = verify_class(['complete:2'], p_grid=['1/2'], holdings=True)
    # The plain model plus the four holding sets of two vertices.
    assert report.checks == 5
    assert report.passed
    assert report.min_gap.gap == 0


def test_select_pairs_and_theorems(k3, path4):
    assert select_pairs(path4, partite=False)[:2] == [
        ('a', 'b', 'adjacent'),
        ('a', 'c', 'non-adjacent'),
    ]
    assert applicable_theorems(k3, 'a', 'b', edge_transitive=True) == (
        Theorem.LOCAL_SYMMETRY,
        Theorem.SAME_NEIGHBORS,
        Theorem.EDGE_TRANSITIVE,
    )
    assert applicable_theorems(path4, 'b', 'c') == ()


def test_monte_carlo_flags_are_rechecked_exactly(mocker):
    bunkbed_settings.search_exact_cap = 4
    flagged = McGapResult(
        same=McResult(0.4, 0.01, 100, 0),
        cross=McResult(0.5, 0.01, 100, 0),
        gap=-0.1,
        stderr=0.01,
        unpaired_stderr=0.014,
    )
    estimate = mocker.patch('bunkbed.search.mc_bunkbed_gap', return_value=flagged)

    report = verify_class(['complete:3'], p_grid=['1/2'])
    assert estimate.call_count == 3
    assert report.min_gap.engine == 'mc'
    # The exact re-check clears every flag.
    assert report.passed
    assert not report.unresolved_flags

    bunkbed_settings.exact_cap = 5
    report = verify_class(['complete:3'], p_grid=['1/2'])
    assert report.passed
    assert len(report.unresolved_flags) == 3


def test_random_search_is_deterministic():
    config = SearchConfig(mode='random', instances=12, max_vertices=4, seed=3)
    first = run_search(config)

    assert first.passed
    assert first.instances == 12
    assert run_search(config).json() == first.json()


def test_config_from_json():
    config = SearchConfig.from_json(
        {'mode': 'class-sweep', 'classes': ['cycle:4'], 'p_grid': ['1/3'], 'holdings': 'true'}
    )
    assert config.mode is SearchMode.CLASS_SWEEP
    assert config.p_grid == (Fraction(1, 3),)
    assert config.holdings is True
    assert config.pairs is PairSelection.ALL
    assert SearchConfig.from_json(config.json()) == config


@pytest.mark.parametrize(
    'document, message',
    [
        ({'mode': 'exhaustive', 'max_vertices': 9}, 'at most 7'),
        ({'mode': 'class-sweep'}, 'at least one class'),
        ({'mode': 'sideways'}, 'search config'),
        ({'mode': 'random', 'colour': 'red'}, "unknown fields \\['colour'\\]"),
        ({'mode': 'random', 'p_grid': ['2']}, r'p_grid\[0\]'),
    ],
)
def test_bad_configs(document, message):
    with pytest.raises(GraphError, match=message):
        SearchConfig.from_json(document)
