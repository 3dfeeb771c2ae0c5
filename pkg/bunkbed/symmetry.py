"""
Weighted automorphisms and the symmetry predicates the bunkbed theorems rely on.

Absent edges count as weight-0 edges throughout: a permutation is a weighted automorphism
when it preserves every pairwise weight (and every vertex weight), so weight-0 edges and
missing edges are interchangeable.
"""
from __future__ import annotations

from collections import Counter
from logging import getLogger
from typing import Dict, List, Mapping, Optional, Tuple

from xsentinels import Default

from .conf import resolve_setting
from .exceptions import CapExceededError, GraphError, PreconditionError
from .graph import PercolationGraph, WeightedGraph, edge_key, reflect
from .types import VertexId

log = getLogger(__name__)

Permutation = Mapping[VertexId, VertexId]


def _require_bijection(g: PercolationGraph, perm: Permutation):
    vertices = set(g.vertices)
    if set(perm.keys()) != vertices or set(perm.values()) != vertices:
        raise GraphError("perm: not a bijection on the graph's vertices.")


def is_weighted_automorphism(g: PercolationGraph, perm: Permutation) -> bool:
    """
    True iff `perm` maps the positive-weight edges of `g` onto themselves with equal weights
    (as a multiset, so parallel edges are handled) and, for a `WeightedGraph`, preserves
    every vertex weight.

    Raises:
        bunkbed.exceptions.GraphError: `perm` is not a bijection on the vertices of `g`.
    """
    _require_bijection(g, perm)
    if isinstance(g, WeightedGraph):
        for v in g.vertices:
            if g.vertex_weight(perm[v]) != g.vertex_weight(v):
                return False

    edges = Counter((e.key, e.p) for e in g.edges if e.p > 0)
    mapped = Counter((edge_key(perm[e.u], perm[e.v]), e.p) for e in g.edges if e.p > 0)
    return edges == mapped


def transposition(g: PercolationGraph, a: VertexId, b: VertexId) -> Dict[VertexId, VertexId]:
    """ The permutation swapping `a` and `b` and fixing every other vertex. """
    g.require_vertex(a, field_path='a')
    g.require_vertex(b, field_path='b')
    perm = {v: v for v in g.vertices}
    perm[a], perm[b] = b, a
    return perm


def _signature(g: WeightedGraph, v: VertexId) -> Tuple:
    incident = sorted(g.edges[i].p for i in g.incident[v] if g.edges[i].p > 0)
    return g.vertex_weight(v), tuple(incident)


def find_weighted_automorphism(
    g: WeightedGraph, fixed: Optional[Permutation] = None, *, max_vertices=Default
) -> Optional[Dict[VertexId, VertexId]]:
    """
    Searches for a weighted automorphism of `g` extending the partial assignment `fixed`.

    Plain backtracking: vertices are assigned in order (fixed ones first, then by decreasing
    degree), candidates must share the vertex weight and the multiset of incident weights,
    and every new assignment must preserve the weight to each already assigned vertex.

    Returns:
        The automorphism as a dict, or `None` if there is none.

    Raises:
        bunkbed.exceptions.CapExceededError: `g` has more vertices than `max_vertices`
            (default `bunkbed_settings.automorphism_max_vertices`).
    """
    max_vertices = resolve_setting(max_vertices, 'automorphism_max_vertices')
    if len(g.vertices) > max_vertices:
        raise CapExceededError(
            f"automorphism search on {len(g.vertices)} vertices is above the cap of "
            f"{max_vertices}.",
            needed=len(g.vertices),
            cap=max_vertices,
        )

    fixed = dict(fixed or {})
    for source, target in fixed.items():
        g.require_vertex(source, field_path='fixed')
        g.require_vertex(target, field_path='fixed')
    if len(set(fixed.values())) != len(fixed):
        return None

    signature = {v: _signature(g, v) for v in g.vertices}
    for source, target in fixed.items():
        if signature[source] != signature[target]:
            return None

    rest = sorted(
        (v for v in g.vertices if v not in fixed),
        key=lambda v: (-len(g.neighbors[v]), g.index[v]),
    )
    order: List[VertexId] = list(fixed) + rest

    assignment: Dict[VertexId, VertexId] = {}
    used = set()

    def consistent(source: VertexId, target: VertexId) -> bool:
        for assigned, image in assignment.items():
            if g.edge_weight(source, assigned) != g.edge_weight(target, image):
                return False
        return True

    def extend(position: int) -> bool:
        if position == len(order):
            return True
        source = order[position]
        if source in fixed:
            candidates = [fixed[source]]
        else:
            candidates = [
                t for t in g.vertices if t not in used and signature[t] == signature[source]
            ]
        for target in candidates:
            if target in used or not consistent(source, target):
                continue
            assignment[source] = target
            used.add(target)
            if extend(position + 1):
                return True
            del assignment[source]
            used.discard(target)
        return False

    if extend(0):
        return dict(assignment)
    return None


def automorphism_orbit(g: WeightedGraph, v: VertexId, w: VertexId) -> Tuple[VertexId, ...]:
    """
    The vertices `u` the local-symmetry condition quantifies over: `p_uw > 0` and `p_u != 1`
    (in vertex order; includes `v` when `p_vw > 0` and `p_v != 1`).
    """
    g.require_vertex(v, field_path='v')
    g.require_vertex(w, field_path='w')
    return tuple(
        u for u in g.vertices if u != w and g.edge_weight(u, w) > 0 and g.vertex_weight(u) != 1
    )


def local_symmetry_map(
    g: WeightedGraph, v: VertexId, w: VertexId, u: VertexId, *, max_vertices=Default
) -> Optional[Dict[VertexId, VertexId]]:
    """
    A weighted automorphism mapping `{v, w}` onto `{u, w}`, preferring one that fixes `w`.
    """
    if u == v:
        return {x: x for x in g.vertices}
    for fixed in ({v: u, w: w}, {v: w, w: u}):
        found = find_weighted_automorphism(g, fixed, max_vertices=max_vertices)
        if found is not None:
            return found
    return None


def _require_pair(g: WeightedGraph, v: VertexId, w: VertexId):
    g.require_vertex(v, field_path='v')
    g.require_vertex(w, field_path='w')
    if v == w:
        raise PreconditionError(f"v and w must be distinct vertices, got '{v}' twice.")


def has_local_edge_symmetry(
    g: WeightedGraph, v: VertexId, w: VertexId, *, max_vertices=Default
) -> bool:
    """
    Neighbouring vertices with a local symmetry: `p_vw > 0`, and either `p_v = 1`, `p_w = 1`,
    or for every `u` with `p_uw > 0` and `p_u != 1` some weighted automorphism maps
    `{v, w}` onto `{u, w}`.

    Raises:
        bunkbed.exceptions.PreconditionError: `v == w`, or some edge has weight 1 (edge
            weights must lie in `[0, 1)`; normalize the graph first).
    """
    _require_pair(g, v, w)
    heavy = [e for e in g.edges if e.p == 1]
    if heavy:
        raise PreconditionError(
            f"edge {heavy[0].u}-{heavy[0].v} has weight 1; edge weights must be below 1 "
            f"(contract it with `normalize` first)."
        )

    if g.edge_weight(v, w) == 0:
        return False
    if g.vertex_weight(v) == 1 or g.vertex_weight(w) == 1:
        return True

    for u in automorphism_orbit(g, v, w):
        if local_symmetry_map(g, v, w, u, max_vertices=max_vertices) is None:
            log.debug(f"No automorphism maps {{{v}, {w}}} onto {{{u}, {w}}}.")
            return False
    return True


def has_same_neighbors(g: WeightedGraph, v: VertexId, w: VertexId) -> bool:
    """
    True iff `p_vu = p_wu` for every `u` other than `v` and `w` (absent edges count as 0).

    Raises:
        bunkbed.exceptions.PreconditionError: `v == w`.
    """
    _require_pair(g, v, w)
    return all(
        g.edge_weight(v, u) == g.edge_weight(w, u) for u in g.vertices if u not in (v, w)
    )


def check_reflection_automorphism(b: PercolationGraph) -> bool:
    """
    True iff swapping the layers (`u+ <-> u-` for every `u`) is a weighted automorphism of `b`.

    Always true for graphs made by `bunkbed.graph.build_bunkbed`; hand-built double graphs
    whose layers disagree (or vertices without a `+`/`-` partner) give `False`.
    """
    perm = {}
    for vertex in b.vertices:
        if not vertex or vertex[-1] not in '+-':
            return False
        partner = reflect(vertex)
        if partner not in b:
            return False
        perm[vertex] = partner
    return is_weighted_automorphism(b, perm)


def is_edge_transitive(g: WeightedGraph, *, max_vertices=Default) -> bool:
    """
    True iff the weighted automorphism group acts transitively on the positive-weight edges
    (vacuously true without any).
    """
    edges = [e for e in g.edges if e.p > 0]
    if not edges:
        return True
    first = edges[0]
    for edge in edges[1:]:
        found = find_weighted_automorphism(
            g, {first.u: edge.u, first.v: edge.v}, max_vertices=max_vertices
        ) or find_weighted_automorphism(
            g, {first.u: edge.v, first.v: edge.u}, max_vertices=max_vertices
        )
        if found is None:
            return False
    return True

