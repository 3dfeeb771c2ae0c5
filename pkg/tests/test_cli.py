import json

import pytest

from bunkbed.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, load_graph, run
from bunkbed.conf import bunkbed_settings
from bunkbed.exceptions import GraphError, IdentityMismatchError
from bunkbed.generators import generate, parse_class_spec
from bunkbed.graph import graph_to_json
from bunkbed.reports import Assertion, VerificationReport


def _run_json(capsys, *argv):
    code = run(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_gen_round_trip(tmp_path):
    out = tmp_path / 'k23.json'
    assert run(['gen', '--class', 'complete_bipartite:2,3', '--p', '1/3', '--out', str(out)]) == 0
    assert load_graph(out) == generate(parse_class_spec('complete_bipartite:2,3', p='1/3'))


def test_gap(capsys):
    code, document = _run_json(capsys, 'gap', '--class', 'complete:2', '--v', 'a', '--w', 'b')
    assert code == EXIT_OK
    assert document['same'] == '9/16'
    assert document['cross'] == '7/16'
    assert document['gap'] == '1/8'
    assert document['configurations_evaluated'] == 16


def test_gap_from_file(capsys, write_graph, k3):
    path = write_graph(k3)
    code, document = _run_json(
        capsys, 'gap', '--graph', str(path), '--p', '1/4', '--v', 'a', '--w', 'c'
    )
    assert code == EXIT_OK
    assert not document['gap'].startswith('-')


def test_exact_events(capsys):
    code, document = _run_json(
        capsys, 'exact', '--class', 'complete:2', '--connect', 'a-,b+'
    )
    assert code == EXIT_OK
    assert document['probability'] == '7/16'

    code, document = _run_json(
        capsys, 'exact', '--class', 'complete:2', '--connect', 'a-,b-', '--force-open', 'a-,b-'
    )
    assert document['probability'] == '1'


def test_poly(capsys):
    code, document = _run_json(capsys, 'poly', '--class', 'complete:2', '--v', 'a', '--w', 'b')
    assert code == EXIT_OK
    assert document['coefficients'] == ['0', '1', '-2', '1']
    assert document['verdict'] == 'nonnegative'


def test_mc(capsys):
    code, document = _run_json(
        capsys, 'mc', '--class', 'complete:2', '--v', 'a', '--w', 'b', '--samples', '4000'
    )
    assert code == EXIT_OK
    assert document['samples'] == 4000
    assert document['flagged'] is False


def test_engine_overrides_only_apply_to_the_command(capsys):
    code, document = _run_json(
        capsys,
        'mc',
        '--class',
        'complete:2',
        '--v',
        'a',
        '--w',
        'b',
        '--samples',
        '2000',
        '--seed',
        '9',
    )
    assert code == EXIT_OK
    assert document['seed'] == 9
    assert document['samples'] == 2000
    assert bunkbed_settings.seed == 0
    assert bunkbed_settings.mc_samples == 20_000


def test_verify(capsys):
    code, document = _run_json(
        capsys,
        'verify-same-neighbors',
        '--class',
        'complete_bipartite:2,2',
        '--v',
        'V1_0',
        '--w',
        'V1_1',
    )
    assert code == EXIT_OK
    assert document['passed'] is True

    code, document = _run_json(
        capsys, 'verify-thm1', '--class', 'complete:3', '--p', '1/4', '--v', 'a', '--w', 'b'
    )
    assert code == EXIT_OK
    assert document['check'] == 'local-symmetry'


def test_failed_assertions_exit_one(capsys, mocker):
    report = VerificationReport(check='same-neighbors', v='a', w='b')
    report.add(Assertion.equal('d', 1, 2))
    mocker.patch('bunkbed.cli.verify_same_neighbors', return_value=report)
    assert run(['verify-thm2', '--class', 'complete:3', '--v', 'a', '--w', 'b']) == EXIT_FAILED

    mocker.patch('bunkbed.cli.verify_same_neighbors', side_effect=IdentityMismatchError('x'))
    assert run(['verify-thm2', '--class', 'complete:3', '--v', 'a', '--w', 'b']) == EXIT_FAILED
    assert 'identity mismatch' in capsys.readouterr().err


def test_check_class_and_search(capsys):
    code, document = _run_json(
        capsys, 'check-class', '--class', 'complete:3', '--class', 'cycle:4', '--p-grid', '1/2'
    )
    assert code == EXIT_OK
    assert document['instances'] == 2

    code, document = _run_json(
        capsys, 'search', '--mode', 'exhaustive', '--max-n', '3', '--p-grid', '1/2'
    )
    assert code == EXIT_OK
    assert document['passed'] is True
    assert document['checks'] == 14


def test_search_config_file(capsys, write_graph):
    path = write_graph({'mode': 'random', 'instances': 3, 'seed': 1}, name='search.json')
    code, document = _run_json(capsys, 'search', '--config', str(path))
    assert code == EXIT_OK
    assert document['mode'] == 'random'
    assert document['instances'] == 3


def test_output_formats(capsys):
    assert run(['gap', '--class', 'complete:2', '--v', 'a', '--w', 'b', '--format', 'csv']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'key,value'
    assert 'gap,1/8' in lines

    assert run(['gap', '--class', 'complete:2', '--v', 'a', '--w', 'b', '--format', 'text']) == 0
    assert 'gap: 1/8' in capsys.readouterr().out.splitlines()

    assert run(['check-class', '--class', 'complete:2', '--p', '1/2', '--format', 'csv']) == 0
    assert capsys.readouterr().out.startswith('class,instances,checks')


@pytest.mark.parametrize(
    'argv',
    [
        ['nope'],
        ['gap', '--class', 'complete:2'],
        ['gap', '--class', 'nope:2', '--v', 'a', '--w', 'b'],
        ['gap', '--class', 'complete:2', '--v', 'a', '--w', 'z'],
        ['gap', '--class', 'complete:4', '--v', 'a', '--w', 'b', '--cap', '3'],
        ['gap', '--class', 'complete:2', '--p', '3/2', '--v', 'a', '--w', 'b'],
        ['gap', '--v', 'a', '--w', 'b'],
        ['check-class'],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE
    assert capsys.readouterr().err


def test_bad_graph_files(write_graph, k3, capsys):
    document = graph_to_json(k3)
    document['edges'][0]['p'] = '3/2'
    path = write_graph(document)
    with pytest.raises(GraphError, match=r'graph\.json: edges\[0\]\.p'):
        load_graph(path)
    assert run(['gap', '--graph', str(path), '--v', 'a', '--w', 'b']) == EXIT_USAGE
    assert 'edges[0].p' in capsys.readouterr().err

    broken = write_graph('{"vertices": [}', name='broken.json')
    with pytest.raises(GraphError, match=r'broken\.json:1:\d+'):
        load_graph(broken)
    with pytest.raises(GraphError, match='missing.json'):
        load_graph(broken.parent / 'missing.json')
