"""
Exact event probabilities by exhaustive enumeration of edge configurations.

The engine first resolves deterministic edges: forced-open and weight-1 edges are merged
(their endpoints become one quotient vertex), forced-closed and weight-0 edges are dropped,
and edges that end up as loops are marginalised away. The remaining free edges are
enumerated by configuration index in chunks of `2 ** bunkbed_settings.chunk_bits`.

Each chunk builds the open-edge bit matrix, runs a batched union-find over all its
configurations at once, evaluates every requested event, and tallies hits by the number of
open edges in each weight class. The exact probability is then

    sum over tallied keys of  count * prod_j p_j ** k_j * (1 - p_j) ** (n_j - k_j)

in `fractions.Fraction` arithmetic. Tallies are integer counts, so results are identical for
any number of workers and any chunking.
"""
from __future__ import annotations

import datetime as dt
import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from logging import getLogger
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from xsentinels import Default

from .conf import resolve_setting
from .events import ConnectivityEvent, EdgeState, EdgeStates, connected, pattern_event
from .exceptions import CapExceededError, GraphError
from .graph import BunkbedGraph, PercolationGraph, WeightedGraph, build_bunkbed, lower, upper
from .resources import EnumerationPool, ExactResultCache
from .types import VertexId
from .unionfind import DisjointSet, batched_roots

log = getLogger(__name__)


@dataclass(frozen=True)
class ExactResult:
    probability: Fraction
    configurations_evaluated: int
    elapsed: dt.timedelta

    def __post_init__(self):
        if not 0 <= self.probability <= 1:
            raise ValueError(f"Exact probability {self.probability} outside of [0, 1].")


@dataclass(frozen=True)
class ReducedModel:
    """
    A percolation graph with its deterministic edges resolved.

    Quotient vertices are numbered by first member in the graph's vertex order. Free edges
    are grouped into weight classes (distinct weights, ascending); a configuration's tally key
    is the mixed-radix number of its per-class open-edge counts.
    """

    graph: PercolationGraph
    vertex_class: Tuple[int, ...]
    class_count: int
    free_edges: Tuple[Tuple[int, int], ...]
    free_edge_ids: Tuple[int, ...]
    weights: Tuple[Fraction, ...]
    edge_class: Tuple[int, ...]
    class_sizes: Tuple[int, ...]

    @property
    def free_count(self) -> int:
        return len(self.free_edges)

    @property
    def configurations(self) -> int:
        return 1 << self.free_count

    @property
    def radices(self) -> Tuple[int, ...]:
        return tuple(
            math.prod(size + 1 for size in self.class_sizes[:j])
            for j in range(len(self.class_sizes))
        )

    def class_of(self, vertex: VertexId) -> int:
        return self.vertex_class[self.graph.index[vertex]]

    def scan(self, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
        """ `(open bits, component roots)` for configurations `start..stop-1`. """
        index = np.arange(start, stop, dtype=np.int64)
        bits = ((index[:, None] >> np.arange(self.free_count, dtype=np.int64)) & 1).astype(bool)
        return bits, batched_roots(self.class_count, list(self.free_edges), bits)

    def keys(self, bits: np.ndarray) -> np.ndarray:
        """ Tally key of each configuration row in `bits`. """
        if not self.class_sizes:
            return np.zeros(bits.shape[0], dtype=np.int64)
        one_hot = np.zeros((self.free_count, len(self.class_sizes)), dtype=np.int64)
        one_hot[np.arange(self.free_count), list(self.edge_class)] = 1
        counts = bits.astype(np.int64) @ one_hot
        return counts @ np.asarray(self.radices, dtype=np.int64)

    def decode(self, key: int) -> Tuple[int, ...]:
        """ Per weight class open-edge counts of a tally key. """
        counts = []
        for size in self.class_sizes:
            key, count = divmod(key, size + 1)
            counts.append(count)
        return tuple(counts)

    def key_weight(self, key: int) -> Fraction:
        """ Probability of any single configuration with this tally key. """
        result = Fraction(1)
        for p, size, k in zip(self.weights, self.class_sizes, self.decode(int(key))):
            result *= p ** k * (1 - p) ** (size - k)
        return result

    def weigh(self, tally: Dict[int, int]) -> Fraction:
        return sum((count * self.key_weight(key) for key, count in tally.items()), Fraction(0))


def reduce_model(g: PercolationGraph, states: Optional[EdgeStates] = None) -> ReducedModel:
    states = dict(states or {})
    for i, state in states.items():
        if not isinstance(i, (int, np.integer)) or not 0 <= i < len(g.edges):
            raise GraphError(f"forced states: no edge with index {i!r}.")
        if not isinstance(state, EdgeState):
            raise GraphError(f"forced states: edge {i} has invalid state {state!r}.")

    merged: DisjointSet[VertexId] = DisjointSet(g.vertices)
    free: List[int] = []
    for i, edge in enumerate(g.edges):
        state = states.get(i, EdgeState.FREE)
        if state is EdgeState.OPEN or (state is EdgeState.FREE and edge.p == 1):
            merged.union(edge.u, edge.v)
        elif state is EdgeState.FREE and edge.p > 0:
            free.append(i)

    class_index = {}
    for position, members in enumerate(merged.groups(g.vertices)):
        for member in members:
            class_index[member] = position
    vertex_class = tuple(class_index[v] for v in g.vertices)

    free_edges, free_ids = [], []
    for i in free:
        edge = g.edges[i]
        a, b = class_index[edge.u], class_index[edge.v]
        if a != b:
            free_edges.append((a, b))
            free_ids.append(i)

    weights = tuple(sorted({g.edges[i].p for i in free_ids}))
    weight_position = {p: j for j, p in enumerate(weights)}
    edge_class = tuple(weight_position[g.edges[i].p] for i in free_ids)
    class_sizes = tuple(Counter(edge_class)[j] for j in range(len(weights)))

    return ReducedModel(
        graph=g,
        vertex_class=vertex_class,
        class_count=len(set(vertex_class)),
        free_edges=tuple(free_edges),
        free_edge_ids=tuple(free_ids),
        weights=weights,
        edge_class=edge_class,
        class_sizes=class_sizes,
    )


def check_cap(model: ReducedModel, cap: int, *, what: str = 'exact enumeration'):
    if model.free_count > cap:
        raise CapExceededError(
            f"{what} needs {model.free_count} free edges "
            f"({model.configurations} configurations), above the cap of {cap}; "
            f"raise the cap or use the Monte Carlo engine.",
            needed=model.free_count,
            cap=cap,
        )


def chunk_ranges(total: int, chunk_bits: int) -> List[Tuple[int, int]]:
    size = 1 << chunk_bits
    return [(start, min(start + size, total)) for start in range(0, total, size)]


@dataclass(frozen=True)
class CompiledEvent:
    connect: Tuple[Tuple[int, int], ...]
    separate: Tuple[Tuple[int, int], ...]
    impossible: bool


def compile_event(model: ReducedModel, event: ConnectivityEvent) -> CompiledEvent:
    connect, separate, impossible = [], [], False
    for a, b in sorted(event.must_connect):
        ca, cb = model.class_of(a), model.class_of(b)
        if ca != cb:
            connect.append((ca, cb))
    for a, b in sorted(event.must_separate):
        ca, cb = model.class_of(a), model.class_of(b)
        if ca == cb:
            impossible = True
        separate.append((ca, cb))
    return CompiledEvent(tuple(connect), tuple(separate), impossible)


def event_hits(roots: np.ndarray, event: CompiledEvent) -> np.ndarray:
    hits = np.full(roots.shape[0], not event.impossible)
    for a, b in event.connect:
        hits &= roots[:, a] == roots[:, b]
    for a, b in event.separate:
        hits &= roots[:, a] != roots[:, b]
    return hits


def _tally_chunk(task) -> List[Dict[int, int]]:
    model, compiled, start, stop = task
    bits, roots = model.scan(start, stop)
    keys = model.keys(bits)
    tallies = []
    for event in compiled:
        selected, counts = np.unique(keys[event_hits(roots, event)], return_counts=True)
        tallies.append({int(k): int(c) for k, c in zip(selected, counts)})
    return tallies


@dataclass(frozen=True)
class EventTally:
    """ Per event, configuration counts by tally key (see `ReducedModel.keys`). """

    model: ReducedModel
    counts: Tuple[Dict[int, int], ...]
    elapsed: dt.timedelta

    @property
    def configurations_evaluated(self) -> int:
        return self.model.configurations

    def probability(self, position: int) -> Fraction:
        return self.model.weigh(self.counts[position])


def tally_events(
    g: PercolationGraph,
    events: Sequence[ConnectivityEvent],
    states: Optional[EdgeStates] = None,
    *,
    cap=Default,
    workers=Default,
    what: str = 'exact enumeration',
) -> EventTally:
    """
    Enumerates every free-edge configuration of `g` once, tallying each event's hits.

    Raises:
        bunkbed.exceptions.CapExceededError: More free edges than `cap`
            (default `bunkbed_settings.exact_cap`).
        bunkbed.exceptions.GraphError: An event names an unknown vertex, or a forced state
            an unknown edge.
    """
    cap = resolve_setting(cap, 'exact_cap')
    workers = resolve_setting(workers, 'workers')
    chunk_bits = resolve_setting(Default, 'chunk_bits')

    for event in events:
        event.validate(g)
    model = reduce_model(g, states)
    check_cap(model, cap, what=what)
    compiled = [compile_event(model, event) for event in events]

    log.info(
        f"Enumerating {model.configurations} configurations "
        f"({model.free_count} free edges) for {len(events)} event(s).",
        extra=dict(
            free_edges=model.free_count,
            configurations=model.configurations,
            events=len(events),
            workers=workers,
        ),
    )
    started = time.perf_counter()
    tasks = [
        (model, compiled, start, stop)
        for start, stop in chunk_ranges(model.configurations, chunk_bits)
    ]
    totals = [Counter() for _ in events]
    for chunk_tallies in EnumerationPool.grab().map(_tally_chunk, tasks, workers=workers):
        for total, tally in zip(totals, chunk_tallies):
            total.update(tally)
    elapsed = dt.timedelta(seconds=time.perf_counter() - started)
    log.debug(
        f"Enumeration finished in {elapsed.total_seconds():.3f}s.",
        extra=dict(configurations=model.configurations, elapsed=elapsed.total_seconds()),
    )
    return EventTally(model=model, counts=tuple(dict(t) for t in totals), elapsed=elapsed)


def _states_key(states: Optional[EdgeStates]):
    return frozenset((states or {}).items())


def event_probabilities(
    g: PercolationGraph,
    events: Sequence[ConnectivityEvent],
    states: Optional[EdgeStates] = None,
    *,
    cap=Default,
    workers=Default,
) -> List[ExactResult]:
    """
    Exact probability of each event under independent bond percolation on `g`, with the
    `states` edges forced open/closed. All events not already in the
    `bunkbed.resources.ExactResultCache` share a single enumeration pass.
    """
    events = list(events)
    cache = ExactResultCache.grab()
    states_key = _states_key(states)
    results: List[Optional[ExactResult]] = [cache.get((g, e, states_key)) for e in events]
    missing = [i for i, result in enumerate(results) if result is None]
    if len(missing) < len(events):
        log.debug(f"Exact result cache hit for {len(events) - len(missing)} event(s).")
    if missing:
        tally = tally_events(g, [events[i] for i in missing], states, cap=cap, workers=workers)
        for position, i in enumerate(missing):
            result = ExactResult(
                probability=tally.probability(position),
                configurations_evaluated=tally.configurations_evaluated,
                elapsed=tally.elapsed,
            )
            cache.set((g, events[i], states_key), result)
            results[i] = result
    return results


def event_probability(
    g: PercolationGraph,
    event: ConnectivityEvent,
    states: Optional[EdgeStates] = None,
    *,
    cap=Default,
    workers=Default,
) -> ExactResult:
    return event_probabilities(g, [event], states, cap=cap, workers=workers)[0]


def _probabilities(g, events, states, cap, workers) -> List[Fraction]:
    results = event_probabilities(g, events, states, cap=cap, workers=workers)
    return [r.probability for r in results]


def connection_probability(
    g: PercolationGraph,
    a: VertexId,
    c: VertexId,
    states: Optional[EdgeStates] = None,
    *,
    cap=Default,
    workers=Default,
) -> Fraction:
    """ `P(a <-> c)`, exact. """
    return event_probability(g, connected(a, c), states, cap=cap, workers=workers).probability


def bunkbed_gap(
    g: PercolationGraph,
    v: VertexId,
    w: VertexId,
    states: Optional[EdgeStates] = None,
    *,
    cap=Default,
    workers=Default,
) -> Fraction:
    """
    `P(v- <-> w-) - P(v- <-> w+)` for base vertices `v`, `w` of a bunkbed graph (or of any
    percolation graph that names its vertices with `+`/`-` copies, such as a conditioned view).
    """
    same, cross = _probabilities(
        g, [connected(lower(v), lower(w)), connected(lower(v), upper(w))], states, cap, workers
    )
    return same - cross


def four_point_d(
    g: PercolationGraph,
    v: VertexId,
    w: VertexId,
    states: Optional[EdgeStates] = None,
    *,
    cap=Default,
    workers=Default,
) -> Fraction:
    """ `P(v+ <-> w+) + P(v- <-> w-) - P(v+ <-> w-) - P(v- <-> w+)`, exact. """
    vp, vm, wp, wm = upper(v), lower(v), upper(w), lower(w)
    events = [connected(vp, wp), connected(vm, wm), connected(vp, wm), connected(vm, wp)]
    pp, mm, pm, mp = _probabilities(g, events, states, cap, workers)
    return pp + mm - pm - mp


def pattern_events(v: VertexId, w: VertexId) -> Tuple[ConnectivityEvent, ...]:
    """
    The four exact patterns whose signed sum is `four_point_d`, positive ones first:
    `v- </> v+ <-> w+ </> w-`, `v+ </> v- <-> w- </> w+`,
    `v- </> v+ <-> w- </> w+`, `v+ </> v- <-> w+ </> w-`.
    """
    vp, vm, wp, wm = upper(v), lower(v), upper(w), lower(w)
    return (
        pattern_event(vm, vp, wp, wm),
        pattern_event(vp, vm, wm, wp),
        pattern_event(vm, vp, wm, wp),
        pattern_event(vp, vm, wp, wm),
    )


def pattern_d(
    g: PercolationGraph,
    v: VertexId,
    w: VertexId,
    states: Optional[EdgeStates] = None,
    *,
    cap=Default,
    workers=Default,
) -> Fraction:
    """ `four_point_d` rewritten as the signed sum of the four `pattern_events`, exact. """
    first, second, third, fourth = _probabilities(
        g, pattern_events(v, w), states, cap, workers
    )
    return first + second - third - fourth


def conditioned(g: PercolationGraph, forced: EdgeStates) -> PercolationGraph:
    """
    View of `g` with forced-open edges at weight 1 and forced-closed edges at weight 0.

    Probabilities under the view are conditional probabilities of `g` given those edge
    states. The result is always a plain `bunkbed.graph.PercolationGraph`.
    """
    weights = {}
    for i, state in forced.items():
        if not 0 <= i < len(g.edges):
            raise GraphError(f"forced states: no edge with index {i!r}.")
        if state is EdgeState.OPEN:
            weights[i] = 1
        elif state is EdgeState.CLOSED:
            weights[i] = 0
    return g.with_edge_weights(weights)


def holding_states(b: BunkbedGraph, holding: Iterable[VertexId]) -> Dict[int, EdgeState]:
    """ Forces the vertical edge of every vertex in `holding` open and every other one closed. """
    holding = set(holding)
    for vertex in holding:
        b.base.require_vertex(vertex, field_path='holding')
    return {
        b.vertical_edge(v): EdgeState.OPEN if v in holding else EdgeState.CLOSED
        for v in b.base.vertices
    }


def holding_gap(
    g: WeightedGraph,
    p,
    holding: Iterable[VertexId],
    v: VertexId,
    w: VertexId,
    *,
    cap=Default,
    workers=Default,
) -> Fraction:
    """ The gap in the model with every horizontal edge at `p` and vertical edges exactly `H`. """
    b = build_bunkbed(g.with_weights(p))
    return bunkbed_gap(b, v, w, holding_states(b, holding), cap=cap, workers=workers)


@dataclass(frozen=True)
class VerticalMixture:
    """ The gap computed directly and as a mixture over every vertical holding set. """

    direct: Fraction
    mixture: Fraction
    holdings: int

    @property
    def agrees(self) -> bool:
        return self.direct == self.mixture


def vertical_mixture_gap(
    g: WeightedGraph, v: VertexId, w: VertexId, *, cap=Default, workers=Default
) -> VerticalMixture:
    """
    Checks that the gap of `g` equals the sum over holding sets `H` of
    `P(vertical edges open exactly on H) * gap given H`, both exact.

    Vertices whose weight is 0 or 1 only ever appear on one side of `H`.
    """
    b = build_bunkbed(g)
    direct = bunkbed_gap(b, v, w, cap=cap, workers=workers)

    choices = []
    for vertex, p in zip(g.vertices, g.vertex_weights):
        options = []
        if p > 0:
            options.append((True, p))
        if p < 1:
            options.append((False, 1 - p))
        choices.append(options)

    mixture = Fraction(0)
    holdings = 0
    for combination in itertools.product(*choices):
        weight = Fraction(1)
        holding = []
        for vertex, (is_open, factor) in zip(g.vertices, combination):
            weight *= factor
            if is_open:
                holding.append(vertex)
        mixture += weight * bunkbed_gap(
            b, v, w, holding_states(b, holding), cap=cap, workers=workers
        )
        holdings += 1
    return VerticalMixture(direct=direct, mixture=mixture, holdings=holdings)
