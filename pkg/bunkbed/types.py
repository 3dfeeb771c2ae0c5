from fractions import Fraction
from typing import Any, Dict, Tuple, Union

JsonDict = Dict[str, Any]

VertexId = str
""" Vertex ids are plain strings; bunkbed copies append `+` / `-` (see `bunkbed.graph.upper`). """

Pair = Tuple[VertexId, VertexId]

EdgeKey = Tuple[VertexId, VertexId]
""" Unordered edge identity, endpoints in sorted order (see `bunkbed.graph.edge_key`). """

RationalLike = Union[Fraction, int, str, float]
"""
Anything `bunkbed.graph.probability` accepts: `Fraction`, `int`, strings such as `"1/2"`
or `"0.25"`, and floats (converted through their shortest decimal repr, so `0.1`
becomes exactly `1/10`).
"""
