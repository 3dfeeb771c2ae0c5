"""
Connectivity events and forced edge states.

A `ConnectivityEvent` holds when every `must_connect` pair is joined by a path of open edges
and no `must_separate` pair is. Forced states are a mapping of edge index -> `EdgeState`;
edges not in the mapping are free.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Mapping, Tuple

from xloop import xloop

from .exceptions import GraphError
from .graph import PercolationGraph, edge_key
from .types import Pair, VertexId


class EdgeState(enum.Enum):
    FREE = 'free'
    OPEN = 'open'
    CLOSED = 'closed'


EdgeStates = Mapping[int, EdgeState]
""" Edge index -> forced state; missing edges are `EdgeState.FREE`. """


def pair_list(pairs) -> Tuple[Pair, ...]:
    """ Accepts one `(a, b)` pair of vertex ids or any iterable of pairs. """
    if isinstance(pairs, tuple) and len(pairs) == 2 and all(isinstance(x, str) for x in pairs):
        return (pairs,)
    return tuple(tuple(pair) for pair in xloop(pairs))


@dataclass(eq=True, frozen=True)
class ConnectivityEvent:
    must_connect: FrozenSet[Pair] = frozenset()
    must_separate: FrozenSet[Pair] = frozenset()

    def __post_init__(self):
        connect = frozenset(edge_key(a, b) for a, b in self.must_connect)
        separate = frozenset(edge_key(a, b) for a, b in self.must_separate)
        both = connect & separate
        if both:
            raise GraphError(
                f"event: pairs {sorted(both)} are both required connected and separated."
            )
        object.__setattr__(self, 'must_connect', connect)
        object.__setattr__(self, 'must_separate', separate)

    @classmethod
    def create(
        cls, connect: Iterable[Pair] = (), separate: Iterable[Pair] = ()
    ) -> ConnectivityEvent:
        return cls(
            must_connect=frozenset(pair_list(connect)),
            must_separate=frozenset(pair_list(separate)),
        )

    @property
    def vertices(self) -> FrozenSet[VertexId]:
        return frozenset(v for pair in self.must_connect | self.must_separate for v in pair)

    def validate(self, g: PercolationGraph) -> ConnectivityEvent:
        """ Raises `bunkbed.exceptions.GraphError` if the event names a vertex `g` lacks. """
        for vertex in sorted(self.vertices):
            g.require_vertex(vertex, field_path='event')
        return self

    def sort_key(self) -> Tuple:
        return tuple(sorted(self.must_connect)), tuple(sorted(self.must_separate))

    def __str__(self):
        parts = [f"{a}<->{b}" for a, b in sorted(self.must_connect)]
        parts += [f"{a}</>{b}" for a, b in sorted(self.must_separate)]
        return ', '.join(parts) or 'always'


def connected(a: VertexId, b: VertexId) -> ConnectivityEvent:
    return ConnectivityEvent.create(connect=[(a, b)])


def separated(a: VertexId, b: VertexId) -> ConnectivityEvent:
    return ConnectivityEvent.create(separate=[(a, b)])


def pattern_event(x: VertexId, a: VertexId, b: VertexId, y: VertexId) -> ConnectivityEvent:
    """ The exact pattern `x </> a <-> b </> y`: `a` joined to `b`, cut from `x` and `y`. """
    return ConnectivityEvent.create(connect=[(a, b)], separate=[(x, a), (b, y)])


def forced_states(
    g: PercolationGraph, *, open_pairs: Iterable[Pair] = (), closed_pairs: Iterable[Pair] = ()
) -> dict:
    """
    Edge states forcing every edge between each given pair open (or closed). `open_pairs`
    and `closed_pairs` are each one pair or an iterable of pairs.

    Raises `bunkbed.exceptions.GraphError` for pairs with no edge between them, or a pair
    given both ways.
    """
    states = {}
    for pairs, state in ((open_pairs, EdgeState.OPEN), (closed_pairs, EdgeState.CLOSED)):
        for a, b in pair_list(pairs):
            indexes = g.edges_between(a, b)
            if not indexes:
                raise GraphError(f"forced states: no edge between '{a}' and '{b}'.")
            for i in indexes:
                if states.get(i, state) != state:
                    raise GraphError(f"forced states: edge {a}-{b} forced both open and closed.")
                states[i] = state
    return states
