"""
Graph data model: percolation graphs, weighted base graphs and their bunkbed doubles.

All weights are exact `fractions.Fraction` probabilities. Graph values are frozen dataclasses,
so they are hashable (used as cache keys) and safe to share between worker threads.

- `PercolationGraph`: vertices plus weighted edges; parallel edges are allowed. Conditioned
  views and cluster-contracted graphs are plain percolation graphs.
- `WeightedGraph`: a simple graph that also carries a weight per vertex (the weight of the
  vertical edge joining the vertex's two copies in its bunkbed).
- `BunkbedGraph`: the double graph made by `build_bunkbed`, remembering its base graph.

The JSON form of a weighted graph is:

```json
{"vertices": ["a", "b"],
 "edges": [{"u": "a", "v": "b", "p": "1/2"}],
 "vertex_weights": {"a": "0", "b": "1"}}
```
"""
from __future__ import annotations

import dataclasses
import decimal
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from xsentinels import Default

from .exceptions import GraphError
from .types import EdgeKey, JsonDict, RationalLike, VertexId
from .unionfind import DisjointSet

UPPER = '+'
LOWER = '-'
MERGED_SEPARATOR = '~'


def probability(value: RationalLike, *, field_path: str = 'p') -> Fraction:
    """
    Parses `value` into an exact probability.

    Strings may be fractions (`"3/4"`), integers or decimal literals (`"0.25"`); decimals are
    converted exactly. Raises `bunkbed.exceptions.GraphError` (naming `field_path`) when the
    value can't be parsed or is outside of `[0, 1]`.
    """
    if isinstance(value, bool):
        raise GraphError(f"{field_path}: expected a probability, got boolean {value!r}.")

    try:
        if isinstance(value, Fraction):
            result = value
        elif isinstance(value, int):
            result = Fraction(value)
        elif isinstance(value, float):
            result = Fraction(repr(value))
        elif isinstance(value, str):
            result = Fraction(value.strip())
        else:
            raise GraphError(
                f"{field_path}: expected a probability string or number, "
                f"got {type(value).__name__}."
            )
    except (ValueError, ZeroDivisionError, decimal.InvalidOperation) as e:
        raise GraphError(f"{field_path}: can't parse probability {value!r} ({e}).") from e

    if not 0 <= result <= 1:
        raise GraphError(f"{field_path}: probability {value!r} is outside of [0, 1].")
    return result


def fraction_str(value: Fraction) -> str:
    """ `"n/d"`, or just `"n"` for integers; the string form used in every output document. """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def edge_key(u: VertexId, v: VertexId) -> EdgeKey:
    return (u, v) if u <= v else (v, u)


def upper(v: VertexId) -> VertexId:
    """ Id of the upper-layer copy of base vertex `v`. """
    return f"{v}{UPPER}"


def lower(v: VertexId) -> VertexId:
    """ Id of the lower-layer copy of base vertex `v`. """
    return f"{v}{LOWER}"


def base_vertex(bunkbed_vertex: VertexId) -> Tuple[VertexId, str]:
    """ Splits a bunkbed vertex id into `(base id, layer)`, layer being `'+'` or `'-'`. """
    if not bunkbed_vertex or bunkbed_vertex[-1] not in (UPPER, LOWER):
        raise GraphError(f"'{bunkbed_vertex}' is not a bunkbed vertex id (needs a +/- suffix).")
    return bunkbed_vertex[:-1], bunkbed_vertex[-1]


def reflect(bunkbed_vertex: VertexId) -> VertexId:
    """ The other layer's copy of `bunkbed_vertex`. """
    base, layer = base_vertex(bunkbed_vertex)
    return lower(base) if layer == UPPER else upper(base)


@dataclass(eq=True, frozen=True)
class Edge:
    u: VertexId
    v: VertexId
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'p', probability(self.p))

    @property
    def key(self) -> EdgeKey:
        return edge_key(self.u, self.v)

    def other(self, vertex: VertexId) -> VertexId:
        return self.v if vertex == self.u else self.u

    def with_weight(self, p: RationalLike) -> Edge:
        return Edge(self.u, self.v, probability(p))


@dataclass(eq=True, frozen=True)
class PercolationGraph:
    """
    Independent bond percolation on a finite (multi)graph: each edge is open with its weight.

    Vertices keep their given order; it is the order the engines index vertices in.
    Parallel edges are allowed, loops are not.
    """

    vertices: Tuple[VertexId, ...]
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'vertices', tuple(self.vertices))
        object.__setattr__(self, 'edges', tuple(_as_edge(e) for e in self.edges))

        seen = set()
        for vertex in self.vertices:
            if not isinstance(vertex, str) or not vertex:
                raise GraphError(f"vertices: ids must be non-empty strings, got {vertex!r}.")
            if vertex in seen:
                raise GraphError(f"vertices: duplicate vertex '{vertex}'.")
            seen.add(vertex)

        for i, edge in enumerate(self.edges):
            for endpoint in (edge.u, edge.v):
                if endpoint not in seen:
                    raise GraphError(f"edges[{i}]: unknown vertex '{endpoint}'.")
            if edge.u == edge.v:
                raise GraphError(f"edges[{i}]: loop at '{edge.u}' is not allowed.")

    @cached_property
    def index(self) -> Dict[VertexId, int]:
        """ Vertex id -> position in `vertices`. """
        return {vertex: i for i, vertex in enumerate(self.vertices)}

    @cached_property
    def incident(self) -> Dict[VertexId, Tuple[int, ...]]:
        """ Vertex id -> indexes of the edges touching it. """
        result: Dict[VertexId, List[int]] = {vertex: [] for vertex in self.vertices}
        for i, edge in enumerate(self.edges):
            result[edge.u].append(i)
            result[edge.v].append(i)
        return {vertex: tuple(edges) for vertex, edges in result.items()}

    def __contains__(self, vertex: VertexId) -> bool:
        return vertex in self.index

    def require_vertex(self, vertex: VertexId, *, field_path: str = 'vertex') -> VertexId:
        if vertex not in self.index:
            raise GraphError(f"{field_path}: unknown vertex '{vertex}'.")
        return vertex

    def edges_between(self, u: VertexId, v: VertexId) -> Tuple[int, ...]:
        """ Indexes of every edge joining `u` and `v` (several when edges are parallel). """
        key = edge_key(u, v)
        return tuple(i for i in self.incident.get(u, ()) if self.edges[i].key == key)

    def with_edge_weights(self, weights: Mapping[int, RationalLike]) -> PercolationGraph:
        """ Copy as a plain `PercolationGraph` with the given edge indexes re-weighted. """
        edges = tuple(
            edge.with_weight(weights[i]) if i in weights else edge
            for i, edge in enumerate(self.edges)
        )
        return PercolationGraph(self.vertices, edges)

    def induced(self, keep: Iterable[VertexId]) -> PercolationGraph:
        """ Subgraph induced on `keep`, vertices in this graph's order. """
        keep = set(keep)
        return PercolationGraph(
            tuple(v for v in self.vertices if v in keep),
            tuple(e for e in self.edges if e.u in keep and e.v in keep),
        )


@dataclass(eq=True, frozen=True)
class WeightedGraph(PercolationGraph):
    """
    A finite simple graph with a probability weight on every edge and every vertex.

    `vertex_weights` is parallel to `vertices`; use `WeightedGraph.build` to construct one
    from pairs and a vertex -> weight mapping.
    """

    vertex_weights: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if len(self.vertex_weights) != len(self.vertices):
            raise GraphError(
                f"vertex_weights: expected {len(self.vertices)} weights, "
                f"got {len(self.vertex_weights)}."
            )
        weights = tuple(
            probability(p, field_path=f"vertex_weights.{v}")
            for v, p in zip(self.vertices, self.vertex_weights)
        )
        object.__setattr__(self, 'vertex_weights', weights)

        seen = set()
        for i, edge in enumerate(self.edges):
            if edge.key in seen:
                raise GraphError(f"edges[{i}]: duplicate edge {edge.u}-{edge.v}.")
            seen.add(edge.key)

    @classmethod
    def build(
        cls,
        vertices: Sequence[VertexId],
        edges: Iterable[Tuple[VertexId, VertexId, RationalLike]] = (),
        vertex_weights=Default,
    ) -> WeightedGraph:
        """
        Args:
            vertices: Vertex ids, in order.
            edges: `(u, v, p)` triples.
            vertex_weights: A mapping vertex -> weight (every vertex required), a single
                weight for all vertices, or `Default` for all zero.
        """
        vertices = tuple(vertices)
        if vertex_weights is Default:
            vertex_weights = 0
        if isinstance(vertex_weights, Mapping):
            missing = [v for v in vertices if v not in vertex_weights]
            if missing:
                raise GraphError(f"vertex_weights: missing weight for {missing}.")
            extra = [v for v in vertex_weights if v not in set(vertices)]
            if extra:
                raise GraphError(f"vertex_weights: unknown vertices {extra}.")
            weights = tuple(vertex_weights[v] for v in vertices)
        else:
            weights = tuple(vertex_weights for _ in vertices)
        return cls(
            vertices=vertices,
            edges=tuple(Edge(u, v, probability(p)) for u, v, p in edges),
            vertex_weights=weights,
        )

    @cached_property
    def _edge_weights(self) -> Dict[EdgeKey, Fraction]:
        return {edge.key: edge.p for edge in self.edges}

    def edge_weight(self, u: VertexId, v: VertexId) -> Fraction:
        """ `p_uv`, zero when there is no edge (absent edges count as weight-0 edges). """
        return self._edge_weights.get(edge_key(u, v), Fraction(0))

    def vertex_weight(self, v: VertexId) -> Fraction:
        return self.vertex_weights[self.index[v]]

    @cached_property
    def neighbors(self) -> Dict[VertexId, Tuple[VertexId, ...]]:
        """ Vertex -> neighbors joined by an edge of positive weight. """
        result: Dict[VertexId, List[VertexId]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            if edge.p > 0:
                result[edge.u].append(edge.v)
                result[edge.v].append(edge.u)
        return {v: tuple(n) for v, n in result.items()}

    def with_vertex_weights(self, weights: Mapping[VertexId, RationalLike]) -> WeightedGraph:
        return dataclasses.replace(
            self,
            vertex_weights=tuple(
                probability(weights[v]) if v in weights else p
                for v, p in zip(self.vertices, self.vertex_weights)
            ),
        )

    def with_weights(self, p: RationalLike, vertex_p=Default) -> WeightedGraph:
        """
        Same structure with every positive-weight edge set to `p`, and every vertex weight set
        to `vertex_p` (`Default`: also `p`). Weight-0 edges stay absent.
        """
        p = probability(p)
        vertex_p = p if vertex_p is Default else probability(vertex_p)
        return WeightedGraph(
            vertices=self.vertices,
            edges=tuple(e.with_weight(p) for e in self.edges if e.p > 0),
            vertex_weights=tuple(vertex_p for _ in self.vertices),
        )


@dataclass(eq=True, frozen=True)
class BunkbedGraph(PercolationGraph):
    """
    The bunkbed double of `base`: build with `build_bunkbed`.

    Vertex order is every upper copy in base order, then every lower copy. Edge order is the
    upper horizontal copies (base edge order), the lower horizontal copies, then the vertical
    edges (base vertex order); the `*_edge` helpers rely on it.
    """

    base: Optional[WeightedGraph] = field(default=None, compare=True)

    def __post_init__(self):
        super().__post_init__()
        if self.base is None:
            raise GraphError("BunkbedGraph needs its base graph; use `build_bunkbed`.")

    def upper_edge(self, u: VertexId, v: VertexId) -> int:
        return self._base_edge_position(u, v)

    def lower_edge(self, u: VertexId, v: VertexId) -> int:
        return len(self.base.edges) + self._base_edge_position(u, v)

    def vertical_edge(self, v: VertexId) -> int:
        self.base.require_vertex(v)
        return 2 * len(self.base.edges) + self.base.index[v]

    def marked(self, v: VertexId, w: VertexId) -> Tuple[VertexId, VertexId, VertexId, VertexId]:
        """ The marked quadruple `(v-, v+, w-, w+)` for base pair `(v, w)`. """
        self.base.require_vertex(v, field_path='v')
        self.base.require_vertex(w, field_path='w')
        return lower(v), upper(v), lower(w), upper(w)

    def _base_edge_position(self, u: VertexId, v: VertexId) -> int:
        key = edge_key(u, v)
        for i, edge in enumerate(self.base.edges):
            if edge.key == key:
                return i
        raise GraphError(f"No base edge {u}-{v}.")


def build_bunkbed(g: WeightedGraph) -> BunkbedGraph:
    """
    The bunkbed graph of `g`: an upper and a lower copy of `g` whose horizontal edges both
    carry `p_uv`, joined at every vertex `u` by a vertical edge of weight `p_u`.
    """
    vertices = tuple(upper(v) for v in g.vertices) + tuple(lower(v) for v in g.vertices)
    edges = (
        tuple(Edge(upper(e.u), upper(e.v), e.p) for e in g.edges)
        + tuple(Edge(lower(e.u), lower(e.v), e.p) for e in g.edges)
        + tuple(Edge(upper(v), lower(v), p) for v, p in zip(g.vertices, g.vertex_weights))
    )
    return BunkbedGraph(vertices=vertices, edges=edges, base=g)


def normalize_with_map(g: WeightedGraph) -> Tuple[WeightedGraph, Dict[VertexId, VertexId]]:
    """
    Removes weight-0 edges and contracts weight-1 edges.

    Endpoints of weight-1 edges are merged into one vertex named by joining the member ids
    with `~` (in vertex order). Edges that become parallel are combined to `1 - prod(1 - p)`,
    edges that become loops are dropped, and the vertex weights of merged vertices are
    combined the same way (the merged class's vertical edges act in parallel).

    Returns:
        The normalized graph and a map from every original vertex to its new vertex.
    """
    classes: DisjointSet[VertexId] = DisjointSet(g.vertices)
    for edge in g.edges:
        if edge.p == 1:
            classes.union(edge.u, edge.v)

    mapping: Dict[VertexId, VertexId] = {}
    new_vertices: List[VertexId] = []
    new_weights: List[Fraction] = []
    for members in classes.groups(g.vertices):
        name = MERGED_SEPARATOR.join(members)
        new_vertices.append(name)
        closed = Fraction(1)
        for member in members:
            mapping[member] = name
            closed *= 1 - g.vertex_weight(member)
        new_weights.append(1 - closed)

    closed_by_key: Dict[EdgeKey, Fraction] = {}
    endpoints: Dict[EdgeKey, Tuple[VertexId, VertexId]] = {}
    for edge in g.edges:
        if edge.p == 0:
            continue
        u, v = mapping[edge.u], mapping[edge.v]
        if u == v:
            continue
        key = edge_key(u, v)
        closed_by_key[key] = closed_by_key.get(key, Fraction(1)) * (1 - edge.p)
        endpoints.setdefault(key, (u, v))

    new_edges = tuple(Edge(*endpoints[key], 1 - closed) for key, closed in closed_by_key.items())
    normalized = WeightedGraph(
        vertices=tuple(new_vertices), edges=new_edges, vertex_weights=tuple(new_weights)
    )
    return normalized, mapping


def normalize(g: WeightedGraph) -> WeightedGraph:
    return normalize_with_map(g)[0]


def graph_to_json(g: PercolationGraph) -> JsonDict:
    """ JSON document for `g`; `vertex_weights` is only present for weighted graphs. """
    result: JsonDict = {
        'vertices': list(g.vertices),
        'edges': [{'u': e.u, 'v': e.v, 'p': fraction_str(e.p)} for e in g.edges],
    }
    if isinstance(g, WeightedGraph):
        result['vertex_weights'] = {
            v: fraction_str(p) for v, p in zip(g.vertices, g.vertex_weights)
        }
    return result


def graph_from_json(document: JsonDict) -> WeightedGraph:
    """
    Validates and parses a weighted-graph JSON document.

    Raises `bunkbed.exceptions.GraphError` with the path of the offending field
    (ie: `edges[3].p`) for malformed documents, weights outside of `[0, 1]`, duplicate
    vertices or edges, and unknown endpoints.
    """
    if not isinstance(document, Mapping):
        raise GraphError("graph document must be a JSON object.")
    for key in ('vertices', 'edges', 'vertex_weights'):
        if key not in document:
            raise GraphError(f"{key}: missing required field.")

    vertices = document['vertices']
    if not isinstance(vertices, list):
        raise GraphError("vertices: expected a list of vertex ids.")
    for i, vertex in enumerate(vertices):
        if not isinstance(vertex, str) or not vertex:
            raise GraphError(f"vertices[{i}]: expected a non-empty string, got {vertex!r}.")

    raw_edges = document['edges']
    if not isinstance(raw_edges, list):
        raise GraphError("edges: expected a list of edge objects.")
    edges = []
    seen_keys = {}
    known = set(vertices)
    for i, raw in enumerate(raw_edges):
        if not isinstance(raw, Mapping):
            raise GraphError(f"edges[{i}]: expected an object with u, v and p.")
        for key in ('u', 'v', 'p'):
            if key not in raw:
                raise GraphError(f"edges[{i}].{key}: missing required field.")
        u, v = raw['u'], raw['v']
        for name, endpoint in (('u', u), ('v', v)):
            if endpoint not in known:
                raise GraphError(f"edges[{i}].{name}: unknown vertex {endpoint!r}.")
        if u == v:
            raise GraphError(f"edges[{i}]: loop at '{u}' is not allowed.")
        key = edge_key(u, v)
        if key in seen_keys:
            raise GraphError(
                f"edges[{i}]: duplicate edge {u}-{v} (already given as edges[{seen_keys[key]}])."
            )
        seen_keys[key] = i
        edges.append(Edge(u, v, probability(raw['p'], field_path=f"edges[{i}].p")))

    raw_weights = document['vertex_weights']
    if not isinstance(raw_weights, Mapping):
        raise GraphError("vertex_weights: expected an object mapping vertex id -> weight.")
    for vertex in raw_weights:
        if vertex not in known:
            raise GraphError(f"vertex_weights.{vertex}: unknown vertex.")
    weights = []
    for vertex in vertices:
        if vertex not in raw_weights:
            raise GraphError(f"vertex_weights.{vertex}: missing weight.")
        weights.append(probability(raw_weights[vertex], field_path=f"vertex_weights.{vertex}"))

    return WeightedGraph(
        vertices=tuple(vertices), edges=tuple(edges), vertex_weights=tuple(weights)
    )


def _as_edge(value) -> Edge:
    if isinstance(value, Edge):
        return value
    u, v, p = value
    return Edge(u, v, probability(p))
