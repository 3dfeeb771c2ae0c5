"""
Weighted graph classes covered by the bunkbed theorems, built with `networkx`.

Vertex naming:

- `complete`, `cycle`, `path`: letters `a`, `b`, `c`, ... (`v0`, `v1`, ... past 26 vertices).
- partite classes: `V{i}_{j}` for the `j`-th vertex of part `i` (parts numbered from 1), so
  `complete_bipartite:2,3` has `V1_0, V1_1, V2_0, V2_1, V2_2`. `complete_minus_clique:n,s`
  puts the removed clique in `V1`.
- `hypercube`: bit strings (`"010"`); `petersen` and `icosahedral`: `"0"`, `"1"`, ...

Class spec strings (as used on the command line):
`complete:n`, `complete_bipartite:n1,n2`, `complete_kpartite:k,m`,
`complete_minus_clique:n,s[,pprime=RAT]`, `cycle:n`, `path:n`, `hypercube:d`, `petersen`,
`icosahedral`.
"""
from __future__ import annotations

import enum
import re
import string
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
from xsentinels import Default

from .exceptions import GraphError
from .graph import WeightedGraph, fraction_str, probability
from .types import RationalLike, VertexId

DEFAULT_P = Fraction(1, 2)

_SIDE_PATTERN = re.compile(r'^V(\d+)_')


class ClassKind(str, enum.Enum):
    COMPLETE = 'complete'
    COMPLETE_BIPARTITE = 'complete_bipartite'
    COMPLETE_KPARTITE = 'complete_kpartite'
    COMPLETE_MINUS_CLIQUE = 'complete_minus_clique'
    CYCLE = 'cycle'
    PATH = 'path'
    HYPERCUBE = 'hypercube'
    PETERSEN = 'petersen'
    ICOSAHEDRAL = 'icosahedral'


_ARITY = {
    ClassKind.COMPLETE: 1,
    ClassKind.COMPLETE_BIPARTITE: 2,
    ClassKind.COMPLETE_KPARTITE: 2,
    ClassKind.COMPLETE_MINUS_CLIQUE: 2,
    ClassKind.CYCLE: 1,
    ClassKind.PATH: 1,
    ClassKind.HYPERCUBE: 1,
    ClassKind.PETERSEN: 0,
    ClassKind.ICOSAHEDRAL: 0,
}


@dataclass(eq=True, frozen=True)
class VerticalSpec:
    """
    How vertical (vertex) weights are chosen for a generated graph. Exactly one of:

    - `constant`: every vertex gets this weight; `None` means the class's `p`
      (the constant-weight model).
    - `holding`: vertices in the set get weight 1, every other vertex 0.
    - `explicit`: `(vertex, weight)` pairs covering every vertex.
    """

    constant: Optional[Fraction] = None
    holding: Optional[FrozenSet[VertexId]] = None
    explicit: Optional[Tuple[Tuple[VertexId, Fraction], ...]] = None

    @classmethod
    def constant_weight(cls, p=Default) -> VerticalSpec:
        return cls(constant=None if p is Default else probability(p))

    @classmethod
    def holding_set(cls, holding: Iterable[VertexId]) -> VerticalSpec:
        return cls(holding=frozenset(holding))

    @classmethod
    def explicit_weights(cls, weights: Mapping[VertexId, RationalLike]) -> VerticalSpec:
        return cls(
            explicit=tuple(
                (v, probability(p, field_path=f"vertex_weights.{v}"))
                for v, p in sorted(weights.items())
            )
        )

    def weights(self, vertices: Sequence[VertexId], p: Fraction) -> Tuple[Fraction, ...]:
        if self.holding is not None:
            unknown = sorted(self.holding - set(vertices))
            if unknown:
                raise GraphError(f"holding: unknown vertices {unknown}.")
            return tuple(Fraction(1) if v in self.holding else Fraction(0) for v in vertices)
        if self.explicit is not None:
            weights = dict(self.explicit)
            missing = [v for v in vertices if v not in weights]
            if missing:
                raise GraphError(f"vertex_weights: missing weight for {missing}.")
            return tuple(weights[v] for v in vertices)
        constant = p if self.constant is None else self.constant
        return tuple(constant for _ in vertices)


@dataclass(eq=True, frozen=True)
class ClassSpec:
    kind: ClassKind
    sizes: Tuple[int, ...] = ()
    p: Fraction = DEFAULT_P
    p_prime: Optional[Fraction] = None
    """ `complete_minus_clique` only: weight inside the second part; `None` means `p`. """
    vertical: VerticalSpec = field(default_factory=VerticalSpec)

    def __post_init__(self):
        object.__setattr__(self, 'kind', ClassKind(self.kind))
        object.__setattr__(self, 'sizes', tuple(self.sizes))
        object.__setattr__(self, 'p', probability(self.p))
        if self.p_prime is not None:
            object.__setattr__(self, 'p_prime', probability(self.p_prime, field_path='pprime'))

        arity = _ARITY[self.kind]
        if len(self.sizes) != arity:
            raise GraphError(
                f"{self.kind.value}: expected {arity} size parameter(s), got {len(self.sizes)}."
            )
        for size in self.sizes:
            if not isinstance(size, int) or size < 1:
                raise GraphError(f"{self.kind.value}: size parameters must be integers >= 1.")
        if self.kind is ClassKind.CYCLE and self.sizes[0] < 3:
            raise GraphError("cycle: needs at least 3 vertices.")
        if self.kind is ClassKind.COMPLETE_MINUS_CLIQUE and self.sizes[1] > self.sizes[0]:
            raise GraphError("complete_minus_clique: clique size s must be at most n.")
        if self.p_prime is not None and self.kind is not ClassKind.COMPLETE_MINUS_CLIQUE:
            raise GraphError(f"{self.kind.value}: pprime only applies to complete_minus_clique.")

    @property
    def effective_p_prime(self) -> Fraction:
        return self.p if self.p_prime is None else self.p_prime

    @property
    def partite(self) -> bool:
        return self.kind in (
            ClassKind.COMPLETE_BIPARTITE,
            ClassKind.COMPLETE_KPARTITE,
            ClassKind.COMPLETE_MINUS_CLIQUE,
        )

    def with_p(self, p: RationalLike) -> ClassSpec:
        return ClassSpec(self.kind, self.sizes, probability(p), self.p_prime, self.vertical)

    def with_vertical(self, vertical: VerticalSpec) -> ClassSpec:
        return ClassSpec(self.kind, self.sizes, self.p, self.p_prime, vertical)

    def __str__(self):
        text = self.kind.value
        if self.sizes:
            text += ':' + ','.join(str(s) for s in self.sizes)
        if self.p_prime is not None:
            text += f",pprime={fraction_str(self.p_prime)}"
        return text


def parse_class_spec(
    text: str, p: RationalLike = DEFAULT_P, vertical: VerticalSpec = VerticalSpec()
) -> ClassSpec:
    """
    Parses a class spec string such as `complete_bipartite:2,3` or
    `complete_minus_clique:5,2,pprime=0`.
    """
    text = text.strip()
    name, _, raw_args = text.partition(':')
    try:
        kind = ClassKind(name.strip())
    except ValueError:
        choices = ', '.join(k.value for k in ClassKind)
        raise GraphError(
            f"class spec '{text}': unknown class '{name}' (expected one of {choices})."
        ) from None

    sizes: List[int] = []
    p_prime = None
    for arg in (a.strip() for a in raw_args.split(',') if a.strip()):
        if arg.startswith('pprime='):
            p_prime = probability(arg[len('pprime='):], field_path=f"class spec '{text}' pprime")
            continue
        try:
            sizes.append(int(arg))
        except ValueError:
            raise GraphError(f"class spec '{text}': '{arg}' is not an integer size.") from None
    return ClassSpec(kind, tuple(sizes), probability(p), p_prime, vertical)


def vertex_side(vertex: VertexId) -> Optional[int]:
    """ Part number of a `V{i}_{j}` vertex, or `None` for other names. """
    match = _SIDE_PATTERN.match(vertex)
    return int(match.group(1)) if match else None


def _letters(n: int) -> List[VertexId]:
    if n <= len(string.ascii_lowercase):
        return list(string.ascii_lowercase[:n])
    return [f"v{i}" for i in range(n)]


def _structure(spec: ClassSpec) -> Tuple[nx.Graph, Dict[object, VertexId]]:
    kind, sizes = spec.kind, spec.sizes
    if kind is ClassKind.COMPLETE:
        graph = nx.complete_graph(sizes[0])
    elif kind is ClassKind.CYCLE:
        graph = nx.cycle_graph(sizes[0])
    elif kind is ClassKind.PATH:
        graph = nx.path_graph(sizes[0])
    elif kind is ClassKind.HYPERCUBE:
        graph = nx.hypercube_graph(sizes[0])
        return graph, {node: ''.join(str(bit) for bit in node) for node in graph.nodes}
    elif kind is ClassKind.PETERSEN:
        graph = nx.petersen_graph()
        return graph, {node: str(node) for node in graph.nodes}
    elif kind is ClassKind.ICOSAHEDRAL:
        graph = nx.icosahedral_graph()
        return graph, {node: str(node) for node in graph.nodes}
    else:
        if kind is ClassKind.COMPLETE_BIPARTITE:
            parts = sizes
        elif kind is ClassKind.COMPLETE_KPARTITE:
            parts = (sizes[1],) * sizes[0]
        else:
            n, s = sizes
            parts = (s, n - s) if n > s else (s,)

        if kind is ClassKind.COMPLETE_MINUS_CLIQUE:
            # Every pair is an edge; in-part weights are set in `generate`.
            graph = nx.complete_graph(sum(parts))
            for node, subset in enumerate(i for i, size in enumerate(parts) for _ in range(size)):
                graph.nodes[node]['subset'] = subset
        else:
            graph = nx.complete_multipartite_graph(*parts)
        names = {}
        position: Dict[int, int] = {}
        for node in graph.nodes:
            subset = graph.nodes[node]['subset']
            names[node] = f"V{subset + 1}_{position.get(subset, 0)}"
            position[subset] = position.get(subset, 0) + 1
        return graph, names

    return graph, dict(zip(graph.nodes, _letters(graph.number_of_nodes())))


def generate(spec: ClassSpec) -> WeightedGraph:
    """
    The weighted graph of `spec`: every edge at `spec.p`, except for `complete_minus_clique`
    where edges inside `V1` have weight 0 and edges inside `V2` weight `p_prime`. Vertex
    weights follow `spec.vertical`.
    """
    graph, names = _structure(spec)
    vertices = [names[node] for node in graph.nodes]
    edges = []
    for a, b in graph.edges:
        u, v = names[a], names[b]
        weight = spec.p
        if spec.kind is ClassKind.COMPLETE_MINUS_CLIQUE:
            side_u, side_v = vertex_side(u), vertex_side(v)
            if side_u == side_v == 1:
                weight = Fraction(0)
            elif side_u == side_v == 2:
                weight = spec.effective_p_prime
        edges.append((u, v, weight))
    return WeightedGraph.build(
        vertices, edges, dict(zip(vertices, spec.vertical.weights(vertices, spec.p)))
    )
