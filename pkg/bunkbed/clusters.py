"""
Cluster partitions and the per-partition quantities of both bunkbed decompositions.

Given a (conditioned) bunkbed graph and a set of marked vertices, the edges between unmarked
vertices (the reduced edge set) split the unmarked vertices into clusters. Conditioning on
the exact partition they produce makes the marked vertices' edges into each cluster
independent, which is what the decompositions below use:

- same-neighbors (marked `v-, v+, w-, w+`): `same_neighbors_cluster_d` as a sum over ordered
  splits `J, K, L` of the cluster indexes of `at_most_one(J) * d_kl(K, L)`, and directly.
- local symmetry (marked `w-, w+`): `local_symmetry_cluster_d` by its closed logarithmic
  form, and directly from the log weights `c_uw = -ln(1 - p_uw)`.

Both functions compute their value twice and raise `bunkbed.exceptions.IdentityMismatchError`
when the two computations disagree.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from logging import getLogger
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from xsentinels import Default

from .conf import resolve_setting
from .events import EdgeState, connected
from .exact import (
    check_cap,
    chunk_ranges,
    conditioned,
    event_probabilities,
    pattern_d,
    reduce_model,
)
from .exceptions import (
    CapExceededError,
    IdentityMismatchError,
    PreconditionError,
    SymmetryCollapseError,
)
from .graph import Edge, PercolationGraph, WeightedGraph, build_bunkbed, lower, upper
from .resources import EnumerationPool
from .symmetry import automorphism_orbit
from .types import Pair, VertexId

log = getLogger(__name__)


@dataclass(frozen=True)
class ClusterPartition:
    """
    A partition of the unmarked vertices into the clusters the reduced edges produce, with
    the exact probability `P(A_C)` of producing exactly it. Clusters are ordered by their
    first vertex in graph order.
    """

    clusters: Tuple[FrozenSet[VertexId], ...]
    probability: Fraction

    @property
    def support(self) -> FrozenSet[VertexId]:
        return frozenset().union(*self.clusters)

    def cluster_of(self, vertex: VertexId) -> int:
        for i, cluster in enumerate(self.clusters):
            if vertex in cluster:
                return i
        raise KeyError(vertex)

    def __str__(self):
        return ' | '.join('{' + ','.join(sorted(c)) + '}' for c in self.clusters) or '{}'


def _partition_chunk(task) -> List[Tuple[Tuple[int, ...], int, int]]:
    model, start, stop = task
    bits, roots = model.scan(start, stop)
    rows = np.column_stack([roots, model.keys(bits)])
    unique, counts = np.unique(rows, axis=0, return_counts=True)
    return [
        (tuple(int(x) for x in row[:-1]), int(row[-1]), int(count))
        for row, count in zip(unique, counts)
    ]


def enumerate_partitions(
    g: PercolationGraph, excluded: Iterable[VertexId], *, cap=Default, workers=Default
) -> List[ClusterPartition]:
    """
    Every achievable cluster partition of the vertices of `g` outside `excluded`, with its
    exact probability.

    Only the edges with both endpoints outside `excluded` are enumerated; configurations are
    grouped by the partition they induce, so each listed partition is achievable and the
    probabilities sum to 1.

    Raises:
        bunkbed.exceptions.CapExceededError: More free reduced edges than `cap` (default
            `bunkbed_settings.partition_cap`).
    """
    cap = resolve_setting(cap, 'partition_cap')
    workers = resolve_setting(workers, 'workers')
    chunk_bits = resolve_setting(Default, 'chunk_bits')
    excluded = set(excluded)
    for vertex in excluded:
        g.require_vertex(vertex, field_path='excluded')

    reduced = g.induced(v for v in g.vertices if v not in excluded)
    model = reduce_model(reduced)
    check_cap(model, cap, what='partition enumeration')

    tasks = [
        (model, start, stop) for start, stop in chunk_ranges(model.configurations, chunk_bits)
    ]
    tallies: Dict[Tuple[int, ...], Counter] = defaultdict(Counter)
    for chunk in EnumerationPool.grab().map(_partition_chunk, tasks, workers=workers):
        for roots, key, count in chunk:
            tallies[roots][key] += count

    partitions = []
    for roots in sorted(tallies):
        labels: Dict[int, List[VertexId]] = {}
        for vertex, quotient in zip(reduced.vertices, model.vertex_class):
            labels.setdefault(roots[quotient], []).append(vertex)
        partitions.append(
            ClusterPartition(
                clusters=tuple(frozenset(members) for members in labels.values()),
                probability=model.weigh(tallies[roots]),
            )
        )

    log.info(
        f"Found {len(partitions)} cluster partitions over {model.free_count} reduced edges.",
        extra=dict(partitions=len(partitions), free_edges=model.free_count),
    )
    return partitions


@dataclass(frozen=True)
class AttachProbs:
    """
    `values[i][k]` is `p_i(u)`, the conditional probability that marked vertex
    `marked[k]` has an open edge into cluster `i`.
    """

    marked: Tuple[VertexId, ...]
    values: Tuple[Tuple[Fraction, ...], ...]
    collapse_violations: Tuple[Tuple[int, VertexId, VertexId], ...] = ()

    @classmethod
    def collapsed(
        cls, v: VertexId, w: VertexId, clusters: Sequence[Tuple[Fraction, Fraction]]
    ) -> AttachProbs:
        """
        Attach values for marked `v-, v+, w-, w+` where every cluster attaches to both upper
        copies with `p_plus` and to both lower copies with `p_minus`, given as
        `(p_plus, p_minus)` pairs.
        """
        return cls(
            marked=(lower(v), upper(v), lower(w), upper(w)),
            values=tuple(
                (Fraction(minus), Fraction(plus), Fraction(minus), Fraction(plus))
                for plus, minus in clusters
            ),
        )

    def __len__(self) -> int:
        return len(self.values)

    def p(self, i: int, u: VertexId) -> Fraction:
        return self.values[i][self.marked.index(u)]

    def cluster(self, i: int) -> Dict[VertexId, Fraction]:
        return dict(zip(self.marked, self.values[i]))

    @property
    def idle(self) -> Tuple[int, ...]:
        """ Clusters no marked vertex can attach to. """
        return tuple(i for i, row in enumerate(self.values) if not any(row))


def attach_probs(
    g: PercolationGraph,
    partition: ClusterPartition,
    marked: Sequence[VertexId],
    *,
    pair: Optional[Pair] = None,
    strict: bool = False,
) -> AttachProbs:
    """
    `p_i(u) = 1 - prod(1 - p_e)` over the edges `e` of `g` joining marked vertex `u` to
    cluster `i`.

    With `pair=(v, w)` (base ids) the collapse `p_i(v+) = p_i(w+)`, `p_i(v-) = p_i(w-)` is
    checked for every cluster; violations are listed on the result, or raise
    `bunkbed.exceptions.SymmetryCollapseError` when `strict`.
    """
    marked = tuple(marked)
    for u in marked:
        g.require_vertex(u, field_path='marked')
    overlap = set(marked) & partition.support
    if overlap:
        raise PreconditionError(f"marked vertices {sorted(overlap)} lie inside the partition.")

    rows = []
    for cluster in partition.clusters:
        row = []
        for u in marked:
            closed = Fraction(1)
            for i in g.incident[u]:
                edge = g.edges[i]
                if edge.other(u) in cluster:
                    closed *= 1 - edge.p
            row.append(1 - closed)
        rows.append(tuple(row))
    attach = AttachProbs(marked=marked, values=tuple(rows))

    if pair is None:
        return attach

    v, w = pair
    violations = []
    for i in range(len(attach)):
        for a, b in ((upper(v), upper(w)), (lower(v), lower(w))):
            if attach.p(i, a) != attach.p(i, b):
                violations.append((i, a, b))
    if violations:
        i, a, b = violations[0]
        message = (
            f"attach probabilities differ on cluster {i} of {partition}: "
            f"p({a}) = {attach.p(i, a)} but p({b}) = {attach.p(i, b)}."
        )
        if strict:
            raise SymmetryCollapseError(message)
        log.warning(message, extra=dict(violations=len(violations)))
    return AttachProbs(marked=marked, values=attach.values, collapse_violations=tuple(violations))


def attach_pattern_probability(
    attach: Mapping[VertexId, Fraction], subset: Iterable[VertexId]
) -> Fraction:
    """
    Probability that the marked vertices attached to a cluster are exactly `subset`, given
    that cluster's attach values (`AttachProbs.cluster`).
    """
    subset = set(subset)
    unknown = subset - set(attach)
    if unknown:
        raise PreconditionError(f"subset vertices {sorted(unknown)} are not marked vertices.")
    result = Fraction(1)
    for u, p in attach.items():
        result *= p if u in subset else 1 - p
    return result


def at_most_one_probability(attach: Mapping[VertexId, Fraction]) -> Fraction:
    """ Probability that at most one marked vertex attaches to the cluster. """
    none = Fraction(1)
    for p in attach.values():
        none *= 1 - p
    exactly_one = Fraction(0)
    for u, p in attach.items():
        term = p
        for other, q in attach.items():
            if other != u:
                term *= 1 - q
        exactly_one += term
    return none + exactly_one


@dataclass(frozen=True)
class _SplitTerms:
    """ One cluster's factors for the `J, K, L` sum. """

    at_most_one: Fraction
    upper_pair: Fraction
    lower_pair: Fraction
    upper_v_lower_w: Fraction
    lower_v_upper_w: Fraction
    plus: Fraction
    minus: Fraction


def _split_terms(attach: AttachProbs, i: int, v: VertexId, w: VertexId) -> _SplitTerms:
    row = attach.cluster(i)
    vp, vm, wp, wm = upper(v), lower(v), upper(w), lower(w)
    if row[vp] != row[wp] or row[vm] != row[wm]:
        raise SymmetryCollapseError(
            f"cluster {i}: p({vp}) = {row[vp]}, p({wp}) = {row[wp]}, "
            f"p({vm}) = {row[vm]}, p({wm}) = {row[wm]}; the symmetric form needs them paired."
        )
    return _SplitTerms(
        at_most_one=at_most_one_probability(row),
        upper_pair=attach_pattern_probability(row, (vp, wp)),
        lower_pair=attach_pattern_probability(row, (vm, wm)),
        upper_v_lower_w=attach_pattern_probability(row, (vp, wm)),
        lower_v_upper_w=attach_pattern_probability(row, (vm, wp)),
        plus=row[vp],
        minus=row[vm],
    )


def _product(values: Iterable[Fraction]) -> Fraction:
    result = Fraction(1)
    for value in values:
        result *= value
    return result


def _d_kl(k_part: Sequence[_SplitTerms], l_part: Sequence[_SplitTerms]) -> Fraction:
    def both(k_factor, l_factor) -> Fraction:
        return _product(k_factor(t) for t in k_part) * _product(l_factor(t) for t in l_part)

    four_products = (
        both(lambda t: t.upper_pair, lambda t: t.lower_pair)
        + both(lambda t: t.lower_pair, lambda t: t.upper_pair)
        - both(lambda t: t.upper_v_lower_w, lambda t: t.lower_v_upper_w)
        - both(lambda t: t.lower_v_upper_w, lambda t: t.upper_v_lower_w)
    )
    square = (
        both(lambda t: t.plus * (1 - t.minus), lambda t: t.minus * (1 - t.plus))
        - both(lambda t: t.minus * (1 - t.plus), lambda t: t.plus * (1 - t.minus))
    ) ** 2
    if four_products != square:
        raise IdentityMismatchError(
            f"d_KL four-product form {four_products} differs from its square form {square}."
        )
    return four_products


def d_kl(
    attach: AttachProbs,
    k_part: Iterable[int],
    l_part: Iterable[int],
    v: VertexId,
    w: VertexId,
) -> Fraction:
    """
    The signed four-product `d_KL` for disjoint cluster index sets `k_part` and `l_part`,
    computed from the attach patterns and independently as a perfect square; both must agree
    exactly.

    Raises:
        bunkbed.exceptions.SymmetryCollapseError: A cluster in `k_part` or `l_part` attaches
            to `v` and `w` with different probabilities.
        bunkbed.exceptions.IdentityMismatchError: The two forms differ.
    """
    k_part, l_part = list(k_part), list(l_part)
    shared = sorted(set(k_part) & set(l_part))
    if shared:
        raise PreconditionError(f"K and L must be disjoint, both contain {shared}.")
    return _d_kl(
        [_split_terms(attach, i, v, w) for i in k_part],
        [_split_terms(attach, i, v, w) for i in l_part],
    )


def contract_partition(
    g: PercolationGraph, partition: ClusterPartition, marked: Sequence[VertexId]
) -> PercolationGraph:
    """
    The conditional model given `A_C` as a graph: the marked vertices plus one vertex per
    cluster (`C0`, `C1`, ...), keeping every edge between marked vertices and from a marked
    vertex into a cluster (parallel edges included). Edges inside the partition support are
    dropped: given `A_C`, clusters are internally connected and mutually separated.
    """
    marked = tuple(marked)
    names = {}
    for i, cluster in enumerate(partition.clusters):
        for vertex in cluster:
            names[vertex] = f"C{i}"
    for u in marked:
        names[u] = u

    edges = []
    marked_set = set(marked)
    for edge in g.edges:
        if edge.u not in marked_set and edge.v not in marked_set:
            continue
        if edge.u not in names or edge.v not in names:
            continue
        edges.append(Edge(names[edge.u], names[edge.v], edge.p))
    vertices = marked + tuple(f"C{i}" for i in range(len(partition.clusters)))
    return PercolationGraph(vertices, tuple(edges))


def _require_zero(g: PercolationGraph, pairs: Iterable[Pair], what: str):
    for a, b in pairs:
        for i in g.edges_between(a, b):
            if g.edges[i].p != 0:
                raise PreconditionError(
                    f"{what}: edge {a}-{b} has weight {g.edges[i].p}, expected 0 "
                    f"(condition the model first)."
                )


def same_neighbors_cluster_d(
    g: PercolationGraph,
    v: VertexId,
    w: VertexId,
    partition: ClusterPartition,
    *,
    max_clusters=Default,
    cap=Default,
    workers=Default,
) -> Fraction:
    """
    `d_C` of the same-neighbors decomposition for one partition of the vertices outside
    `W = {v-, v+, w-, w+}`, in the conditioned model `g`.

    Computed (a) as the sum over ordered splits `J, K, L` of the active clusters with
    `K` non-empty of `at_most_one(J) * d_KL`, and (b) as the signed sum of the four exact
    pattern probabilities on the partition's contracted graph. Clusters no marked vertex
    can reach contribute a factor 1 to every term and are left out of (a).

    Raises:
        bunkbed.exceptions.PreconditionError: `g` still has open-able vertical edges at `v`
            or `w`, or edges between the copies of `v` and `w`.
        bunkbed.exceptions.CapExceededError: More active clusters than `max_clusters`.
        bunkbed.exceptions.IdentityMismatchError: (a) and (b) differ.
    """
    max_clusters = resolve_setting(max_clusters, 'max_clusters')
    vp, vm, wp, wm = upper(v), lower(v), upper(w), lower(w)
    marked = (vm, vp, wm, wp)
    _require_zero(
        g,
        [(vp, vm), (wp, wm), (vp, wp), (vm, wm), (vp, wm), (vm, wp)],
        'same-neighbors cluster d',
    )

    attach = attach_probs(g, partition, marked, pair=(v, w), strict=True)
    active = [i for i in range(len(attach)) if i not in attach.idle]
    if len(active) > max_clusters:
        raise CapExceededError(
            f"{len(active)} active clusters need 3 ** {len(active)} splits, above the cap of "
            f"{max_clusters} clusters.",
            needed=len(active),
            cap=max_clusters,
        )

    terms = {i: _split_terms(attach, i, v, w) for i in active}
    formula = Fraction(0)
    for assignment in itertools.product(range(3), repeat=len(active)):
        k_part = [terms[i] for i, side in zip(active, assignment) if side == 1]
        if not k_part:
            continue
        j = [terms[i] for i, side in zip(active, assignment) if side == 0]
        l_part = [terms[i] for i, side in zip(active, assignment) if side == 2]
        formula += _product(t.at_most_one for t in j) * _d_kl(k_part, l_part)

    contracted = contract_partition(g, partition, marked)
    direct = pattern_d(contracted, v, w, cap=cap, workers=workers)
    if formula != direct:
        raise IdentityMismatchError(
            f"same-neighbors d_C for {partition}: split sum {formula} != direct {direct}."
        )
    log.debug(f"d_C = {formula} for {partition}.")
    return formula


def log_weights(g: WeightedGraph, w: VertexId) -> Dict[VertexId, float]:
    """
    `c_uw = -ln(1 - p_uw)` for every vertex `u` other than `w` (0 when there is no edge).

    Raises:
        bunkbed.exceptions.PreconditionError: Some `p_uw` is 1.
    """
    g.require_vertex(w, field_path='w')
    result = {}
    for u in g.vertices:
        if u == w:
            continue
        p = g.edge_weight(u, w)
        if p == 1:
            raise PreconditionError(f"edge {u}-{w} has weight 1; its log weight is infinite.")
        result[u] = -math.log1p(-float(p)) if p else 0.0
    return result


def _upper_weights_to(g: PercolationGraph, w: VertexId) -> Dict[VertexId, float]:
    """ `c_uw` read off the upper horizontal edges `u+ w+` of a bunkbed-shaped graph. """
    result: Dict[VertexId, float] = {}
    wp = upper(w)
    for i in g.incident[wp]:
        other = g.edges[i].other(wp)
        if not other.endswith('+'):
            continue
        p = g.edges[i].p
        if p == 1:
            raise PreconditionError(f"edge {other}-{wp} has weight 1; its log weight is infinite.")
        result[other[:-1]] = result.get(other[:-1], 0.0) - math.log1p(-float(p))
    return result


def local_symmetry_cluster_d(
    g: PercolationGraph,
    w: VertexId,
    partition: ClusterPartition,
    c: Optional[Mapping[VertexId, float]] = None,
    *,
    tolerance=Default,
    cap=Default,
    workers=Default,
) -> float:
    """
    `d_C` of the local-symmetry decomposition for one partition of the vertices other than
    `w-, w+`, in the conditioned model `g` (vertical edge at `w` closed).

    Computed (a) by the closed form `sum_i r_i (p_i- - p_i+) (ln(1 - p_i+) - ln(1 - p_i-))`
    with `r_i = prod_{j != i} (1 - p_j- p_j+)` and `p_i± = P_C(w± attaches to C_i)`, and
    (b) as `sum_u c_uw` times the four conditional connection differences, with the
    conditional probabilities taken exactly on the contracted graph.

    Args:
        c: Log weights by base vertex (`log_weights`); read from the `u+ w+` edges of `g`
            when not given.

    Raises:
        bunkbed.exceptions.PreconditionError: The vertical edge at `w` can open, or an edge
            into `w` has weight 1.
        bunkbed.exceptions.IdentityMismatchError: (a) and (b) differ by more than
            `tolerance` (default `bunkbed_settings.aggregate_tolerance`).
    """
    tolerance = resolve_setting(tolerance, 'aggregate_tolerance')
    wp, wm = upper(w), lower(w)
    _require_zero(g, [(wp, wm)], 'local-symmetry cluster d')
    if c is None:
        c = _upper_weights_to(g, w)

    attach = attach_probs(g, partition, (wp, wm))
    plus = [attach.p(i, wp) for i in range(len(attach))]
    minus = [attach.p(i, wm) for i in range(len(attach))]
    for i in range(len(attach)):
        if plus[i] == 1 or minus[i] == 1:
            raise PreconditionError(f"cluster {i} attaches to {w} with probability 1.")

    closed_form = 0.0
    for i in range(len(attach)):
        if plus[i] == minus[i]:
            continue
        r = _product(1 - minus[j] * plus[j] for j in range(len(attach)) if j != i)
        closed_form += (
            float(r)
            * float(minus[i] - plus[i])
            * (math.log1p(-float(plus[i])) - math.log1p(-float(minus[i])))
        )

    contracted = contract_partition(g, partition, (wp, wm))
    cluster_names = [f"C{i}" for i in range(len(attach))]
    events = [connected(name, wm) for name in cluster_names]
    events += [connected(name, wp) for name in cluster_names]
    probabilities = [
        r.probability for r in event_probabilities(contracted, events, cap=cap, workers=workers)
    ]
    to_lower = probabilities[: len(attach)]
    to_upper = probabilities[len(attach):]

    direct = 0.0
    for u, weight in c.items():
        if not weight:
            continue
        i = partition.cluster_of(lower(u))
        j = partition.cluster_of(upper(u))
        direct += weight * float(to_lower[i] - to_upper[i] + to_upper[j] - to_lower[j])

    if abs(closed_form - direct) > tolerance:
        raise IdentityMismatchError(
            f"local-symmetry d_C for {partition}: closed form {closed_form!r} != "
            f"direct {direct!r} (tolerance {tolerance})."
        )
    log.debug(f"d_C = {closed_form!r} for {partition}.")
    return closed_form


def telescoping_residual(
    g: PercolationGraph,
    w: VertexId,
    partition: ClusterPartition,
    c: Mapping[VertexId, float],
) -> float:
    """
    Largest relative error, over clusters and layers, of
    `sum_{u± in C_i} c_uw = -ln(1 - p_i±)`.
    """
    wp, wm = upper(w), lower(w)
    attach = attach_probs(g, partition, (wp, wm))
    worst = 0.0
    for i, cluster in enumerate(partition.clusters):
        for marked, layer in ((wp, '+'), (wm, '-')):
            total = sum(c.get(u[:-1], 0.0) for u in cluster if u.endswith(layer))
            expected = -math.log1p(-float(attach.p(i, marked)))
            scale = max(abs(expected), 1.0)
            worst = max(worst, abs(total - expected) / scale)
    return worst


@dataclass(frozen=True)
class OrbitConstancy:
    """
    Exact `(P(u- <-> w-), P(u- <-> w+))` for `v` and every `u` the local-symmetry condition
    quantifies over, in the model with the vertical edge at `w` closed.
    """

    v: VertexId
    probabilities: Tuple[Tuple[VertexId, Fraction, Fraction], ...]

    @property
    def holds(self) -> bool:
        values = {(same, cross) for _, same, cross in self.probabilities}
        return len(values) <= 1


def orbit_constancy(
    g: WeightedGraph, v: VertexId, w: VertexId, *, cap=Default, workers=Default
) -> OrbitConstancy:
    """
    The weaker form of the local-symmetry condition, tested directly: the two connection
    probabilities to `w-` and `w+` are the same for `v` and every `u` with `p_uw > 0` and
    `p_u != 1`, computed exactly with the vertical edge at `w` closed.
    """
    b = build_bunkbed(g)
    view = conditioned(b, {b.vertical_edge(w): EdgeState.CLOSED})
    subjects = [v] + [u for u in automorphism_orbit(g, v, w) if u != v]
    events = []
    for u in subjects:
        events += [connected(lower(u), lower(w)), connected(lower(u), upper(w))]
    results = event_probabilities(view, events, cap=cap, workers=workers)
    return OrbitConstancy(
        v=v,
        probabilities=tuple(
            (u, results[2 * k].probability, results[2 * k + 1].probability)
            for k, u in enumerate(subjects)
        ),
    )
