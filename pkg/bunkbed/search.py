"""
Batch checks of the bunkbed inequality: class sweeps, random graphs, and every small graph.

Each instance is checked exactly when its bunkbed has at most
`bunkbed_settings.search_exact_cap` free edges, otherwise by Monte Carlo. A Monte Carlo gap
more than `bunkbed_settings.mc_flag_sigmas` standard errors below zero is re-checked exactly
when the instance is within `bunkbed_settings.exact_cap`; a violation is only ever reported
with the exact computation attached. Flags that cannot be re-checked are listed as
`unresolved_flags`.

Instances are processed one after the other in a fixed order; parallelism lives inside the
engines.
"""
from __future__ import annotations

import csv
import enum
import functools
import io
import itertools
import string
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from logging import getLogger
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from xbool import bool_value
from xloop import xloop
from xsentinels import Default

from .conf import resolve_setting
from .events import EdgeStates, connected
from .exact import event_probabilities, holding_states, reduce_model
from .exceptions import CapExceededError, GraphError, PreconditionError
from .generators import ClassSpec, generate, parse_class_spec, vertex_side
from .graph import (
    BunkbedGraph,
    WeightedGraph,
    build_bunkbed,
    fraction_str,
    lower,
    probability,
    upper,
)
from .montecarlo import mc_bunkbed_gap
from .symmetry import has_local_edge_symmetry, has_same_neighbors, is_edge_transitive
from .types import JsonDict, Pair, VertexId

log = getLogger(__name__)

DEFAULT_P_GRID = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
DEFAULT_EDGE_PALETTE = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
DEFAULT_VERTEX_PALETTE = (Fraction(0), Fraction(1, 2), Fraction(1))

Gap = Union[Fraction, float]


class SearchMode(str, enum.Enum):
    CLASS_SWEEP = 'class-sweep'
    RANDOM = 'random'
    EXHAUSTIVE = 'exhaustive'


class PairSelection(str, enum.Enum):
    """
    Which vertex pairs of a generated graph to check. `same-side` and `cross-side` refer to
    the parts of partite classes; other classes always check every pair.
    """

    ALL = 'all'
    SAME_SIDE = 'same-side'
    CROSS_SIDE = 'cross-side'


class Theorem(str, enum.Enum):
    LOCAL_SYMMETRY = 'local-symmetry'
    SAME_NEIGHBORS = 'same-neighbors'
    EDGE_TRANSITIVE = 'edge-transitive'


def _grid(values: Iterable, field_path: str) -> Tuple[Fraction, ...]:
    return tuple(
        probability(value, field_path=f"{field_path}[{i}]")
        for i, value in enumerate(xloop(values, not_iterate=[str]))
    )


@dataclass(frozen=True)
class SearchConfig:
    mode: SearchMode = SearchMode.CLASS_SWEEP
    classes: Tuple[ClassSpec, ...] = ()
    pairs: PairSelection = PairSelection.ALL
    p_grid: Tuple[Fraction, ...] = DEFAULT_P_GRID
    max_vertices: int = 4
    edge_palette: Tuple[Fraction, ...] = DEFAULT_EDGE_PALETTE
    vertex_palette: Tuple[Fraction, ...] = DEFAULT_VERTEX_PALETTE
    instances: int = 1000
    samples: Optional[int] = None
    """ Monte Carlo samples per pair; `None` means `bunkbed_settings.mc_samples`. """
    seed: Optional[int] = None
    """ `None` means `bunkbed_settings.seed`. """
    holdings: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'mode', SearchMode(self.mode))
        object.__setattr__(self, 'pairs', PairSelection(self.pairs))
        object.__setattr__(self, 'holdings', bool_value(self.holdings))
        object.__setattr__(
            self,
            'classes',
            tuple(c if isinstance(c, ClassSpec) else parse_class_spec(c) for c in self.classes),
        )
        object.__setattr__(self, 'p_grid', _grid(self.p_grid, 'p_grid'))
        object.__setattr__(self, 'edge_palette', _grid(self.edge_palette, 'edge_palette'))
        object.__setattr__(self, 'vertex_palette', _grid(self.vertex_palette, 'vertex_palette'))
        if self.max_vertices < 1:
            raise GraphError("max_vertices: must be at least 1.")
        if self.mode is SearchMode.EXHAUSTIVE:
            limit = resolve_setting(Default, 'exhaustive_max_vertices')
            if self.max_vertices > limit:
                raise GraphError(f"max_vertices: exhaustive mode supports at most {limit}.")
        if self.mode is SearchMode.CLASS_SWEEP and not self.classes:
            raise GraphError("classes: class-sweep mode needs at least one class spec.")
        if not self.p_grid:
            raise GraphError("p_grid: needs at least one value.")

    @classmethod
    def from_json(cls, document: JsonDict) -> SearchConfig:
        if not isinstance(document, dict):
            raise GraphError("search config: expected a JSON object.")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(document) - known)
        if unknown:
            raise GraphError(f"search config: unknown fields {unknown}.")
        try:
            return cls(**document)
        except (TypeError, ValueError) as error:
            if isinstance(error, GraphError):
                raise
            raise GraphError(f"search config: {error}") from None

    def json(self) -> JsonDict:
        return dict(
            mode=self.mode.value,
            classes=[str(c) for c in self.classes],
            pairs=self.pairs.value,
            p_grid=[fraction_str(p) for p in self.p_grid],
            max_vertices=self.max_vertices,
            edge_palette=[fraction_str(p) for p in self.edge_palette],
            vertex_palette=[fraction_str(p) for p in self.vertex_palette],
            instances=self.instances,
            samples=self.samples,
            seed=self.seed,
            holdings=self.holdings,
        )


def _gap_str(gap: Gap) -> str:
    return fraction_str(gap) if isinstance(gap, Fraction) else repr(gap)


@dataclass(frozen=True)
class GapRecord:
    instance: str
    v: VertexId
    w: VertexId
    gap: Gap
    engine: str
    """ `exact` or `mc`. """
    p: Optional[Fraction] = None
    holding: Optional[Tuple[VertexId, ...]] = None
    stderr: Optional[float] = None

    def json(self) -> JsonDict:
        document = dict(instance=self.instance, v=self.v, w=self.w, gap=_gap_str(self.gap))
        document['engine'] = self.engine
        if self.p is not None:
            document['p'] = fraction_str(self.p)
        if self.holding is not None:
            document['holding'] = list(self.holding)
        if self.stderr is not None:
            document['stderr'] = self.stderr
        return document


@dataclass(frozen=True)
class Violation:
    record: GapRecord
    transcript: JsonDict
    """ The exact recomputation: both probabilities, the gap, configurations evaluated. """

    def json(self) -> JsonDict:
        return dict(self.record.json(), transcript=self.transcript)


@dataclass
class ClassSummary:
    key: str
    instances: int = 0
    checks: int = 0
    min_gap: Optional[Gap] = None
    violations: int = 0
    theorems: Counter = field(default_factory=Counter)

    def json(self) -> JsonDict:
        return dict(
            key=self.key,
            instances=self.instances,
            checks=self.checks,
            min_gap=None if self.min_gap is None else _gap_str(self.min_gap),
            violations=self.violations,
            theorems=dict(sorted(self.theorems.items())),
        )


@dataclass
class SearchReport:
    mode: SearchMode
    instances: int = 0
    checks: int = 0
    min_gap: Optional[GapRecord] = None
    violations: List[Violation] = field(default_factory=list)
    unresolved_flags: List[GapRecord] = field(default_factory=list)
    skipped: List[JsonDict] = field(default_factory=list)
    summaries: Dict[str, ClassSummary] = field(default_factory=dict)
    coverage: Set[Tuple[str, str, str]] = field(default_factory=set)
    graphs_per_size: Dict[int, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self, key: str) -> ClassSummary:
        return self.summaries.setdefault(key, ClassSummary(key))

    def record(self, key: str, record: GapRecord):
        self.checks += 1
        summary = self.summary(key)
        summary.checks += 1
        if summary.min_gap is None or record.gap < summary.min_gap:
            summary.min_gap = record.gap
        if self.min_gap is None or record.gap < self.min_gap.gap:
            self.min_gap = record

    def skip(self, instance: str, reason: str):
        log.warning(f"Skipping {instance}: {reason}", extra=dict(instance=instance))
        self.skipped.append(dict(instance=instance, reason=reason))

    def json(self) -> JsonDict:
        return dict(
            mode=self.mode.value,
            passed=self.passed,
            instances=self.instances,
            checks=self.checks,
            min_gap=None if self.min_gap is None else self.min_gap.json(),
            violations=[v.json() for v in self.violations],
            unresolved_flags=[r.json() for r in self.unresolved_flags],
            skipped=self.skipped,
            summaries=[self.summaries[k].json() for k in sorted(self.summaries)],
            coverage=[
                dict(kind=kind, pairs=relation, theorem=theorem)
                for kind, relation, theorem in sorted(self.coverage)
            ],
            graphs_per_size={str(n): count for n, count in sorted(self.graphs_per_size.items())},
        )

    def summary_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(['class', 'instances', 'checks', 'min_gap', 'violations', 'theorems'])
        for key in sorted(self.summaries):
            summary = self.summaries[key]
            writer.writerow(
                [
                    key,
                    summary.instances,
                    summary.checks,
                    '' if summary.min_gap is None else _gap_str(summary.min_gap),
                    summary.violations,
                    ';'.join(f"{t}={n}" for t, n in sorted(summary.theorems.items())),
                ]
            )
        return buffer.getvalue()


class _Checker:
    """ Checks the gaps of all given pairs of one graph, picking the engine by size. """

    def __init__(self, report: SearchReport, *, samples, seed, workers, exact_only=False):
        self.report = report
        self.samples = resolve_setting(samples, 'mc_samples')
        self.seed = resolve_setting(seed, 'seed')
        self.workers = resolve_setting(workers, 'workers')
        self.search_cap = resolve_setting(Default, 'search_exact_cap')
        self.exact_cap = resolve_setting(Default, 'exact_cap')
        self.sigmas = resolve_setting(Default, 'mc_flag_sigmas')
        self.exact_only = exact_only

    def check(
        self,
        g: WeightedGraph,
        label: str,
        key: str,
        pairs: Sequence[Pair],
        *,
        p: Optional[Fraction] = None,
        holding: Optional[Tuple[VertexId, ...]] = None,
    ):
        """
        Raises:
            bunkbed.exceptions.CapExceededError: An exact-only check above `exact_cap`.
        """
        if not pairs:
            return
        b = build_bunkbed(g)
        states = None if holding is None else holding_states(b, holding)
        free = reduce_model(b, states).free_count
        if free <= self.search_cap or self.exact_only:
            self._exact(b, states, label, key, pairs, p, holding)
        else:
            self._monte_carlo(b, states, free, label, key, pairs, p, holding)

    def _exact_gaps(
        self, b: BunkbedGraph, states: Optional[EdgeStates], pairs: Sequence[Pair]
    ) -> List[Tuple[Gap, JsonDict]]:
        events = []
        for v, w in pairs:
            events += [connected(lower(v), lower(w)), connected(lower(v), upper(w))]
        results = event_probabilities(
            b, events, states, cap=self.exact_cap, workers=self.workers
        )
        gaps = []
        for k in range(len(pairs)):
            same, cross = results[2 * k], results[2 * k + 1]
            gap = same.probability - cross.probability
            transcript = dict(
                same=fraction_str(same.probability),
                cross=fraction_str(cross.probability),
                gap=fraction_str(gap),
                configurations_evaluated=same.configurations_evaluated,
            )
            gaps.append((gap, transcript))
        return gaps

    def _violation(self, key: str, record: GapRecord, transcript: JsonDict):
        log.error(
            f"Bunkbed violation on {record.instance} for ({record.v}, {record.w}): "
            f"gap {transcript['gap']}.",
            extra=dict(instance=record.instance, v=record.v, w=record.w),
        )
        self.report.violations.append(Violation(record, transcript))
        self.report.summary(key).violations += 1

    def _exact(self, b, states, label, key, pairs, p, holding):
        for (v, w), (gap, transcript) in zip(pairs, self._exact_gaps(b, states, pairs)):
            record = GapRecord(label, v, w, gap, 'exact', p=p, holding=holding)
            self.report.record(key, record)
            if gap < 0:
                self._violation(key, record, transcript)

    def _monte_carlo(self, b, states, free, label, key, pairs, p, holding):
        for v, w in pairs:
            estimate = mc_bunkbed_gap(
                b, v, w, states, samples=self.samples, seed=self.seed, workers=self.workers
            )
            record = GapRecord(
                label, v, w, estimate.gap, 'mc', p=p, holding=holding, stderr=estimate.stderr
            )
            self.report.record(key, record)
            if not estimate.flagged(self.sigmas):
                continue
            if free > self.exact_cap:
                log.warning(
                    f"Unresolved Monte Carlo flag on {label} for ({v}, {w}): "
                    f"gap {estimate.gap!r} +- {estimate.stderr!r}.",
                    extra=dict(instance=label, v=v, w=w),
                )
                self.report.unresolved_flags.append(record)
                continue
            [(gap, transcript)] = self._exact_gaps(b, states, [(v, w)])
            if gap < 0:
                exact = GapRecord(label, v, w, gap, 'exact', p=p, holding=holding)
                self._violation(key, exact, transcript)
            else:
                log.info(
                    f"Monte Carlo flag on {label} for ({v}, {w}) cleared exactly: "
                    f"gap {fraction_str(gap)}."
                )


def _letters(n: int) -> List[VertexId]:
    if n <= len(string.ascii_lowercase):
        return list(string.ascii_lowercase[:n])
    return [f"v{i}" for i in range(n)]


def pair_relation(g: WeightedGraph, v: VertexId, w: VertexId, partite: bool) -> str:
    if partite:
        return 'same-side' if vertex_side(v) == vertex_side(w) else 'cross-side'
    return 'adjacent' if g.edge_weight(v, w) > 0 else 'non-adjacent'


def select_pairs(
    g: WeightedGraph, partite: bool, selection: PairSelection = PairSelection.ALL
) -> List[Tuple[VertexId, VertexId, str]]:
    """ Unordered vertex pairs `(v, w, relation)` of `g` in vertex order. """
    selected = []
    for v, w in itertools.combinations(g.vertices, 2):
        relation = pair_relation(g, v, w, partite)
        if partite and selection is not PairSelection.ALL and relation != selection.value:
            continue
        selected.append((v, w, relation))
    return selected


def applicable_theorems(
    g: WeightedGraph, v: VertexId, w: VertexId, *, edge_transitive: Optional[bool] = None
) -> Tuple[Theorem, ...]:
    """
    The theorems whose hypothesis the pair satisfies. `edge_transitive` (of `g`, with
    constant weights) adds the edge-transitive case for adjacent pairs; predicates that
    can't be decided (weight-1 edges, graphs above the automorphism cap) count as not
    applying.
    """
    found = []
    try:
        if has_local_edge_symmetry(g, v, w):
            found.append(Theorem.LOCAL_SYMMETRY)
    except (PreconditionError, CapExceededError) as error:
        log.debug(f"Local-symmetry predicate undecided for ({v}, {w}): {error}")
    if has_same_neighbors(g, v, w):
        found.append(Theorem.SAME_NEIGHBORS)
    if edge_transitive and g.edge_weight(v, w) > 0:
        found.append(Theorem.EDGE_TRANSITIVE)
    return tuple(found)


def _is_constant(g: WeightedGraph) -> bool:
    weights = {e.p for e in g.edges} | set(g.vertex_weights)
    return len(weights) <= 1


def _edge_transitive(g: WeightedGraph) -> Optional[bool]:
    if not _is_constant(g):
        return False
    try:
        return is_edge_transitive(g)
    except CapExceededError:
        return None


def _note_theorems(report: SearchReport, key: str, kind: str, g: WeightedGraph, selected):
    transitive = _edge_transitive(g)
    for v, w, relation in selected:
        theorems = applicable_theorems(g, v, w, edge_transitive=transitive)
        for theorem in theorems:
            report.summary(key).theorems[theorem.value] += 1
            report.coverage.add((kind, relation, theorem.value))
        if not theorems:
            report.coverage.add((kind, relation, 'none'))


def verify_class(
    specs: Iterable[Union[ClassSpec, str]],
    *,
    pairs: Union[PairSelection, str] = PairSelection.ALL,
    p_grid: Sequence = DEFAULT_P_GRID,
    holdings: bool = False,
    samples=Default,
    seed=Default,
    workers=Default,
) -> SearchReport:
    """
    Checks `gap >= 0` for every class instance on the `p` grid and every selected pair,
    recording which theorems cover each pair.

    With `holdings`, every vertical holding set `H` is also checked (horizontal edges at
    `p`, vertical edges open exactly on `H`) on instances whose horizontal edges fit the
    exact search cap.
    """
    pairs = PairSelection(pairs)
    report = SearchReport(mode=SearchMode.CLASS_SWEEP)
    checker = _Checker(report, samples=samples, seed=seed, workers=workers)
    search_cap = resolve_setting(Default, 'search_exact_cap')

    for spec in xloop(specs, not_iterate=[str]):
        if not isinstance(spec, ClassSpec):
            spec = parse_class_spec(spec)
        key = str(spec)
        for p in _grid(p_grid, 'p_grid'):
            g = generate(spec.with_p(p))
            label = f"{key}@p={fraction_str(p)}"
            report.instances += 1
            report.summary(key).instances += 1
            selected = select_pairs(g, spec.partite, pairs)
            _note_theorems(report, key, spec.kind.value, g, selected)
            plain = [(v, w) for v, w, _ in selected]
            try:
                checker.check(g, label, key, plain, p=p)
            except CapExceededError as error:
                report.skip(label, str(error))
                continue

            if not holdings:
                continue
            if 2 * len(g.edges) > search_cap:
                report.skip(f"{label} holdings", f"{2 * len(g.edges)} horizontal edges.")
                continue
            for size in range(len(g.vertices) + 1):
                for holding in itertools.combinations(g.vertices, size):
                    checker.check(g, label, key, plain, p=p, holding=holding)

    log.info(
        f"Class sweep checked {report.checks} gaps over {report.instances} instances: "
        f"{len(report.violations)} violation(s).",
        extra=dict(checks=report.checks, violations=len(report.violations)),
    )
    return report


def random_graph(
    rng: np.random.Generator,
    max_vertices: int,
    edge_palette: Sequence[Fraction],
    vertex_palette: Sequence[Fraction],
) -> WeightedGraph:
    n = int(rng.integers(1, max_vertices + 1))
    vertices = _letters(n)
    edges = []
    for u, v in itertools.combinations(vertices, 2):
        p = edge_palette[int(rng.integers(len(edge_palette)))]
        if p > 0:
            edges.append((u, v, p))
    weights = {v: vertex_palette[int(rng.integers(len(vertex_palette)))] for v in vertices}
    return WeightedGraph.build(vertices, edges, weights)


def search_random(config: SearchConfig, *, workers=Default) -> SearchReport:
    """
    Checks every vertex pair of `config.instances` random weighted graphs with up to
    `config.max_vertices` vertices, weights drawn from the palettes. Deterministic given
    the seed.
    """
    seed = resolve_setting(Default if config.seed is None else config.seed, 'seed')
    samples = Default if config.samples is None else config.samples
    rng = np.random.default_rng(seed)
    report = SearchReport(mode=SearchMode.RANDOM)
    checker = _Checker(report, samples=samples, seed=seed, workers=workers)

    for i in range(config.instances):
        g = random_graph(rng, config.max_vertices, config.edge_palette, config.vertex_palette)
        label = f"random-{i}"
        key = f"random:n={len(g.vertices)}"
        report.instances += 1
        report.summary(key).instances += 1
        selected = select_pairs(g, partite=False)
        _note_theorems(report, key, 'random', g, selected)
        try:
            checker.check(g, label, key, [(v, w) for v, w, _ in selected])
        except CapExceededError as error:
            report.skip(label, str(error))

    log.info(
        f"Random search checked {report.checks} gaps over {report.instances} graphs: "
        f"{len(report.violations)} violation(s), {len(report.unresolved_flags)} unresolved.",
        extra=dict(checks=report.checks, violations=len(report.violations), seed=seed),
    )
    return report


def _pair_table(n: int) -> Tuple[List[Tuple[int, int]], np.ndarray]:
    pairs = list(itertools.combinations(range(n), 2))
    table = np.zeros((n, n), dtype=np.int64)
    for index, (a, b) in enumerate(pairs):
        table[a, b] = table[b, a] = index
    return pairs, table


def canonical_masks(n: int, masks: Sequence[int], *, batch: int = 256) -> List[int]:
    """
    Canonical form of each graph on `range(n)` given as an adjacency bitmask (bit `k` is
    the `k`-th pair of `itertools.combinations(range(n), 2)`): the smallest mask over all
    vertex permutations.
    """
    pairs, table = _pair_table(n)
    if not pairs:
        return [0 for _ in masks]
    perms = np.asarray(list(itertools.permutations(range(n))), dtype=np.int64)
    targets = np.stack([table[perms[:, a], perms[:, b]] for a, b in pairs])
    weights = np.left_shift(np.int64(1), targets)
    shifts = np.arange(len(pairs), dtype=np.int64)
    result = []
    masks = np.asarray(list(masks), dtype=np.int64)
    for start in range(0, len(masks), batch):
        bits = (masks[start:start + batch, None] >> shifts) & 1
        result += [int(x) for x in (bits @ weights).min(axis=1)]
    return result


def mask_edges(n: int, mask: int) -> List[Tuple[int, int]]:
    pairs, _ = _pair_table(n)
    return [pair for k, pair in enumerate(pairs) if mask >> k & 1]


@functools.lru_cache(maxsize=None)
def nonisomorphic_graphs(n: int) -> Tuple[int, ...]:
    """
    Canonical adjacency masks of all simple graphs on `n` vertices up to isomorphism
    (the edgeless graph included), built by adding a vertex to each graph on `n - 1`
    vertices in every possible way.
    """
    if n < 1:
        raise PreconditionError("graphs need at least one vertex.")
    if n == 1:
        return (0,)
    _, table = _pair_table(n)
    candidates = set()
    for mask in nonisomorphic_graphs(n - 1):
        base = 0
        for a, b in mask_edges(n - 1, mask):
            base |= 1 << int(table[a, b])
        for neighbours in range(1 << (n - 1)):
            extended = base
            for u in range(n - 1):
                if neighbours >> u & 1:
                    extended |= 1 << int(table[u, n - 1])
            candidates.add(extended)
    return tuple(sorted(set(canonical_masks(n, sorted(candidates)))))


def search_exhaustive(
    max_n: int, p_grid: Sequence = DEFAULT_P_GRID, *, workers=Default
) -> SearchReport:
    """
    Exact gaps of every vertex pair of every graph on at most `max_n` vertices (up to
    isomorphism), every weight (horizontal and vertical) at each `p` of the grid. Graphs
    whose bunkbed is above `bunkbed_settings.exact_cap` are skipped.
    """
    limit = resolve_setting(Default, 'exhaustive_max_vertices')
    if max_n > limit:
        raise PreconditionError(f"exhaustive search supports at most {limit} vertices.")
    grid = _grid(p_grid, 'p_grid')
    report = SearchReport(mode=SearchMode.EXHAUSTIVE)
    checker = _Checker(report, samples=Default, seed=Default, workers=workers, exact_only=True)

    for n in range(1, max_n + 1):
        graphs = nonisomorphic_graphs(n)
        report.graphs_per_size[n] = len(graphs)
        vertices = _letters(n)
        for mask in graphs:
            edges = [(vertices[a], vertices[b]) for a, b in mask_edges(n, mask)]
            for p in grid:
                g = WeightedGraph.build(vertices, [(u, v, p) for u, v in edges], p)
                label = f"n={n}:mask={mask}@p={fraction_str(p)}"
                key = f"n={n}"
                report.instances += 1
                report.summary(key).instances += 1
                pairs = list(itertools.combinations(vertices, 2))
                try:
                    checker.check(g, label, key, pairs, p=p)
                except CapExceededError as error:
                    report.skip(label, str(error))

    log.info(
        f"Exhaustive search checked {report.checks} gaps over {report.instances} instances: "
        f"{len(report.violations)} violation(s).",
        extra=dict(checks=report.checks, violations=len(report.violations)),
    )
    return report


def run_search(config: SearchConfig, *, workers=Default) -> SearchReport:
    if config.mode is SearchMode.CLASS_SWEEP:
        return verify_class(
            config.classes,
            pairs=config.pairs,
            p_grid=config.p_grid,
            holdings=config.holdings,
            samples=Default if config.samples is None else config.samples,
            seed=Default if config.seed is None else config.seed,
            workers=workers,
        )
    if config.mode is SearchMode.RANDOM:
        return search_random(config, workers=workers)
    return search_exhaustive(config.max_vertices, config.p_grid, workers=workers)
