"""
Command line entry point: `bunkbed <subcommand> [options]` (or `python -m bunkbed`).

Every subcommand produces one output document, written as JSON (the default), CSV or text
to stdout or `--out`. Exit codes:

- `0`: success, every assertion passed and no violation was found.
- `1`: an assertion failed, a negative gap or violation was found, or a polynomial could
  not be certified nonnegative.
- `2`: usage or input error (including a cap that would be exceeded).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from logging import getLogger
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .conf import BunkbedSettings, bunkbed_settings
from .events import ConnectivityEvent, connected, forced_states
from .exact import event_probabilities, event_probability
from .exceptions import BunkbedError, GraphError, IdentityMismatchError
from .generators import DEFAULT_P, VerticalSpec, generate, parse_class_spec
from .graph import (
    WeightedGraph,
    build_bunkbed,
    fraction_str,
    graph_from_json,
    graph_to_json,
    lower,
    probability,
    upper,
)
from .montecarlo import mc_bunkbed_gap
from .polynomial import gap_polynomial, nonneg_on_unit_interval
from .reports import verify_local_symmetry, verify_same_neighbors
from .search import (
    DEFAULT_P_GRID,
    PairSelection,
    SearchConfig,
    SearchMode,
    run_search,
    verify_class,
)
from .types import JsonDict, Pair

log = getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

_LOCAL_SYMMETRY_COMMANDS = ('verify-local-symmetry', 'verify-thm1')


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def load_graph(path) -> WeightedGraph:
    """
    Reads and validates a weighted-graph JSON file.

    Raises:
        bunkbed.exceptions.GraphError: Unreadable file, invalid JSON (with line and column),
            or a document rejected by `bunkbed.graph.graph_from_json` (with the field path).
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as error:
        raise GraphError(f"{path}: {error.strerror or error}.") from None
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise GraphError(f"{path}:{error.lineno}:{error.colno}: {error.msg}.") from None
    try:
        return graph_from_json(document)
    except GraphError as error:
        raise GraphError(f"{path}: {error}") from None


def _pair(text: str) -> Pair:
    parts = [part.strip() for part in text.split(',')]
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"expected two vertex ids 'a,b', got '{text}'.")
    return parts[0], parts[1]


def _probability(text: str):
    try:
        return probability(text)
    except GraphError as error:
        raise argparse.ArgumentTypeError(str(error)) from None


def _grid(text: str):
    return tuple(_probability(part) for part in text.split(',') if part.strip())


def _ids(text: str) -> Tuple[str, ...]:
    return tuple(part.strip() for part in text.split(',') if part.strip())


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument('--graph', metavar='FILE', help="Weighted graph JSON file.")
    source.add_argument(
        '--class',
        dest='classes',
        metavar='SPEC',
        action='append',
        help="Class spec, ie: complete:4 or complete_bipartite:2,3 (repeatable for "
        "check-class).",
    )
    common.add_argument('--v', metavar='ID')
    common.add_argument('--w', metavar='ID')
    common.add_argument('--p', metavar='RAT', type=_probability)
    common.add_argument('--p-grid', metavar='RAT,RAT,...', type=_grid)
    common.add_argument(
        '--h', metavar='ID,ID,...', type=_ids, help="Vertical edges held open (others closed)."
    )
    common.add_argument('--samples', metavar='N', type=int)
    common.add_argument('--seed', metavar='N', type=int)
    common.add_argument('--cap', metavar='N', type=int)
    common.add_argument('--workers', metavar='N', type=int)
    common.add_argument('--format', choices=('json', 'csv', 'text'), default='json')
    common.add_argument('--out', metavar='FILE')

    parser = _ArgumentParser(prog='bunkbed', description="Bunkbed percolation toolkit.")
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    commands.add_parser('gen', parents=[common], help="Emit a generated graph as JSON.")

    exact = commands.add_parser('exact', parents=[common], help="Exact event probability.")
    exact.add_argument('--connect', type=_pair, action='append', default=[])
    exact.add_argument('--separate', type=_pair, action='append', default=[])
    exact.add_argument('--force-open', type=_pair, action='append', default=[])
    exact.add_argument('--force-closed', type=_pair, action='append', default=[])

    commands.add_parser('gap', parents=[common], help="Exact bunkbed gap.")
    commands.add_parser('mc', parents=[common], help="Monte Carlo bunkbed gap.")
    commands.add_parser('poly', parents=[common], help="Gap polynomial and its verdict.")
    commands.add_parser(
        'verify-local-symmetry',
        aliases=['verify-thm1'],
        parents=[common],
        help="Local-symmetry decomposition report.",
    )
    commands.add_parser(
        'verify-same-neighbors',
        aliases=['verify-thm2'],
        parents=[common],
        help="Same-neighbors decomposition report.",
    )

    check = commands.add_parser('check-class', parents=[common], help="Class sweep.")
    check.add_argument('--pairs', choices=[s.value for s in PairSelection], default='all')
    check.add_argument('--holdings', action='store_true')

    search = commands.add_parser('search', parents=[common], help="Search harness.")
    search.add_argument('--config', metavar='FILE', help="SearchConfig JSON file.")
    search.add_argument('--mode', choices=[m.value for m in SearchMode])
    search.add_argument('--max-n', type=int)
    search.add_argument('--instances', type=int)
    search.add_argument('--pairs', choices=[s.value for s in PairSelection])
    search.add_argument('--holdings', action='store_true')
    return parser


def _command_settings(args) -> BunkbedSettings:
    """ A new settings context with the engine overrides given on the command line. """
    overrides = {}
    if args.workers is not None:
        overrides['workers'] = args.workers
    if args.samples is not None:
        overrides['mc_samples'] = args.samples
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.cap is not None and args.command in ('check-class', 'search'):
        overrides['exact_cap'] = args.cap
    return BunkbedSettings(**overrides)


def _engine(args) -> dict:
    return {} if args.cap is None else dict(cap=args.cap)


def _input_graph(args) -> WeightedGraph:
    if args.graph:
        g = load_graph(args.graph)
        if args.p is not None:
            g = g.with_weights(args.p)
        if args.h is not None:
            for vertex in args.h:
                g.require_vertex(vertex, field_path='--h')
            g = g.with_vertex_weights({v: 1 if v in args.h else 0 for v in g.vertices})
        return g

    if not args.classes:
        raise _UsageError(f"{args.command}: one of --graph or --class is required.")
    if len(args.classes) > 1:
        raise _UsageError(f"{args.command}: --class can only be given once.")
    spec = parse_class_spec(args.classes[0], p=DEFAULT_P if args.p is None else args.p)
    if args.h is not None:
        spec = spec.with_vertical(VerticalSpec.holding_set(args.h))
    return generate(spec)


def _require_pair(args, g: WeightedGraph) -> Pair:
    if args.v is None or args.w is None:
        raise _UsageError(f"{args.command}: --v and --w are required.")
    g.require_vertex(args.v, field_path='--v')
    g.require_vertex(args.w, field_path='--w')
    return args.v, args.w


def _exact(args, g: WeightedGraph) -> Tuple[JsonDict, bool]:
    b = build_bunkbed(g)
    if not args.connect and not args.separate:
        v, w = _require_pair(args, g)
        args.connect = [(lower(v), lower(w))]
    event = ConnectivityEvent.create(connect=args.connect, separate=args.separate)
    states = forced_states(b, open_pairs=args.force_open, closed_pairs=args.force_closed)
    result = event_probability(b, event, states, **_engine(args))
    return (
        dict(
            event=str(event),
            probability=fraction_str(result.probability),
            configurations_evaluated=result.configurations_evaluated,
            elapsed_seconds=result.elapsed.total_seconds(),
        ),
        True,
    )


def _gap(args, g: WeightedGraph) -> Tuple[JsonDict, bool]:
    v, w = _require_pair(args, g)
    b = build_bunkbed(g)
    same, cross = event_probabilities(
        b, [connected(lower(v), lower(w)), connected(lower(v), upper(w))], **_engine(args)
    )
    gap = same.probability - cross.probability
    document = dict(
        v=v,
        w=w,
        same=fraction_str(same.probability),
        cross=fraction_str(cross.probability),
        gap=fraction_str(gap),
        configurations_evaluated=same.configurations_evaluated,
    )
    return document, gap >= 0


def _mc(args, g: WeightedGraph) -> Tuple[JsonDict, bool]:
    v, w = _require_pair(args, g)
    result = mc_bunkbed_gap(build_bunkbed(g), v, w)
    flagged = result.flagged(bunkbed_settings.mc_flag_sigmas)
    return dict(v=v, w=w, **result.json(), flagged=flagged), not flagged


def _poly(args, g: WeightedGraph) -> Tuple[JsonDict, bool]:
    v, w = _require_pair(args, g)
    poly = gap_polynomial(g, v, w, args.h, **_engine(args))
    verdict = nonneg_on_unit_interval(poly)
    document = dict(v=v, w=w, coefficients=poly.json(), polynomial=str(poly))
    document.update(verdict.json())
    return document, verdict.nonnegative


def _verify(args, g: WeightedGraph) -> Tuple[JsonDict, bool]:
    v, w = _require_pair(args, g)
    if args.command in _LOCAL_SYMMETRY_COMMANDS:
        verify = verify_local_symmetry
    else:
        verify = verify_same_neighbors
    report = verify(g, v, w, **_engine(args))
    return report.json(), report.passed


def _check_class(args) -> Tuple[JsonDict, bool, str]:
    if not args.classes:
        raise _UsageError("check-class: at least one --class is required.")
    report = verify_class(
        args.classes,
        pairs=args.pairs,
        p_grid=args.p_grid or ((args.p,) if args.p is not None else DEFAULT_P_GRID),
        holdings=args.holdings,
    )
    return report.json(), report.passed, report.summary_csv()


def _search(args) -> Tuple[JsonDict, bool, str]:
    if args.config:
        try:
            document = json.loads(Path(args.config).read_text())
        except OSError as error:
            raise GraphError(f"{args.config}: {error.strerror or error}.") from None
        except json.JSONDecodeError as error:
            raise GraphError(
                f"{args.config}:{error.lineno}:{error.colno}: {error.msg}."
            ) from None
        config = SearchConfig.from_json(document)
    else:
        fields = dict(
            mode=args.mode or SearchMode.CLASS_SWEEP,
            classes=tuple(args.classes or ()),
            pairs=args.pairs or PairSelection.ALL,
            holdings=args.holdings,
        )
        if args.p_grid:
            fields['p_grid'] = args.p_grid
        if args.max_n is not None:
            fields['max_vertices'] = args.max_n
        if args.instances is not None:
            fields['instances'] = args.instances
        config = SearchConfig(**fields)
    report = run_search(config)
    return report.json(), report.passed, report.summary_csv()


def _rows(document: JsonDict) -> List[List[str]]:
    if 'assertions' in document:
        rows = [['name', 'lhs', 'relation', 'rhs', 'passed']]
        for a in document['assertions']:
            rows.append([a['name'], a['lhs'], a['relation'], a['rhs'], a['passed']])
        return rows
    rows = [['key', 'value']]
    for key, value in document.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, separators=(',', ':'))
        rows.append([key, value])
    return rows


def _format(document: JsonDict, fmt: str, table: Optional[str]) -> str:
    if fmt == 'json':
        return json.dumps(document, indent=2)
    if fmt == 'csv':
        if table is not None:
            return table.rstrip('\n')
        buffer = io.StringIO()
        csv.writer(buffer, lineterminator='\n').writerows(_rows(document))
        return buffer.getvalue().rstrip('\n')
    lines = []
    for key, value in document.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, separators=(', ', ': '))
        lines.append(f"{key}: {value}")
    return '\n'.join(lines)


def _dispatch(args) -> Tuple[JsonDict, bool, Optional[str]]:
    if args.command == 'check-class':
        return _check_class(args)
    if args.command == 'search':
        return _search(args)

    g = _input_graph(args)
    if args.command == 'gen':
        return graph_to_json(g), True, None
    handler = {
        'exact': _exact,
        'gap': _gap,
        'mc': _mc,
        'poly': _poly,
        'verify-local-symmetry': _verify,
        'verify-thm1': _verify,
        'verify-same-neighbors': _verify,
        'verify-thm2': _verify,
    }[args.command]
    document, passed = handler(args, g)
    return document, passed, None


def run(argv: Optional[Sequence[str]] = None) -> int:
    """ Runs one subcommand and returns its exit code (see module docs). """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as error:
        print(error, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exit_:
        # `--help` exits through argparse.
        return EXIT_OK if not exit_.code else EXIT_USAGE

    try:
        with _command_settings(args):
            document, passed, table = _dispatch(args)
    except _UsageError as error:
        print(error, file=sys.stderr)
        return EXIT_USAGE
    except IdentityMismatchError as error:
        log.error(f"{args.command}: identity mismatch: {error}")
        print(f"{args.command}: identity mismatch: {error}", file=sys.stderr)
        return EXIT_FAILED
    except BunkbedError as error:
        print(f"{args.command}: {error}", file=sys.stderr)
        return EXIT_USAGE

    text = _format(document, args.format, table)
    if args.out:
        Path(args.out).write_text(text + '\n')
    else:
        print(text)
    return EXIT_OK if passed else EXIT_FAILED


def main():
    sys.exit(run())
