"""
End-to-end verifiers for the two bunkbed decompositions.

Each verifier recomputes every intermediate identity of its argument on a concrete instance
and returns a `VerificationReport` listing the assertions with both computed sides. Exact
quantities are compared as fractions; the logarithmic quantities of the local-symmetry
decomposition are floats compared within `bunkbed_settings.aggregate_tolerance` (sums over
partitions) or `bunkbed_settings.term_tolerance` (single terms).

A failed assertion is recorded, not raised; `VerificationReport.passed` summarises. Inputs
that do not satisfy a verifier's hypothesis raise `bunkbed.exceptions.HypothesisError`.
"""
from __future__ import annotations

import datetime as dt
import time
from dataclasses import dataclass, field
from fractions import Fraction
from logging import getLogger
from typing import Dict, List, Optional, Union

from xsentinels import Default

from .clusters import (
    enumerate_partitions,
    local_symmetry_cluster_d,
    log_weights,
    orbit_constancy,
    same_neighbors_cluster_d,
    telescoping_residual,
)
from .conf import resolve_setting
from .events import EdgeState, connected
from .exact import (
    bunkbed_gap,
    conditioned,
    event_probabilities,
    four_point_d,
    pattern_d,
    pattern_events,
)
from .exceptions import HypothesisError
from .graph import WeightedGraph, build_bunkbed, fraction_str, lower, upper
from .symmetry import automorphism_orbit, has_local_edge_symmetry, has_same_neighbors
from .types import JsonDict, VertexId

log = getLogger(__name__)

Number = Union[Fraction, float, int]


def _render(value: Number) -> str:
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class Assertion:
    name: str
    lhs: Number
    rhs: Number
    relation: str
    """ One of `==`, `>=`, `~=` (within `tolerance`). """
    passed: bool
    tolerance: Optional[float] = None

    @classmethod
    def equal(cls, name: str, lhs: Number, rhs: Number) -> Assertion:
        return cls(name, lhs, rhs, '==', lhs == rhs)

    @classmethod
    def at_least(cls, name: str, lhs: Number, rhs: Number, tolerance: float = 0) -> Assertion:
        return cls(name, lhs, rhs, '>=', lhs >= rhs - tolerance, tolerance or None)

    @classmethod
    def close(cls, name: str, lhs: float, rhs: float, tolerance: float) -> Assertion:
        return cls(name, lhs, rhs, '~=', abs(lhs - rhs) <= tolerance, tolerance)

    def json(self) -> JsonDict:
        document = dict(
            name=self.name,
            lhs=_render(self.lhs),
            relation=self.relation,
            rhs=_render(self.rhs),
            passed=self.passed,
        )
        if self.tolerance is not None:
            document['tolerance'] = self.tolerance
        return document


@dataclass
class VerificationReport:
    check: str
    v: VertexId
    w: VertexId
    gap: Optional[Fraction] = None
    partitions: int = 0
    trivial: bool = False
    assertions: List[Assertion] = field(default_factory=list)
    elapsed: dt.timedelta = dt.timedelta()

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    @property
    def failures(self) -> List[Assertion]:
        return [a for a in self.assertions if not a.passed]

    def add(self, assertion: Assertion) -> Assertion:
        self.assertions.append(assertion)
        if not assertion.passed:
            log.warning(
                f"{self.check} assertion failed: {assertion.name}: "
                f"{_render(assertion.lhs)} {assertion.relation} {_render(assertion.rhs)}.",
                extra=dict(check=self.check, assertion=assertion.name),
            )
        return assertion

    def json(self) -> JsonDict:
        return dict(
            check=self.check,
            v=self.v,
            w=self.w,
            gap=None if self.gap is None else fraction_str(self.gap),
            partitions=self.partitions,
            trivial=self.trivial,
            passed=self.passed,
            elapsed_seconds=self.elapsed.total_seconds(),
            assertions=[a.json() for a in self.assertions],
        )


def _closed(*indexes: int) -> Dict[int, EdgeState]:
    return {i: EdgeState.CLOSED for i in indexes}


def verify_same_neighbors(
    g: WeightedGraph, v: VertexId, w: VertexId, *, cap=Default, workers=Default
) -> VerificationReport:
    """
    Verifies, exactly, the same-neighbors argument that `v` and `w` satisfy the bunkbed
    inequality:

    1. `pattern_d == four_point_d`.
    2. Conditioning: closing the vertical edges at `v` and `w` scales `d` by
       `(1 - p_v)(1 - p_w)`; the negative patterns need both copies of `vw` closed (event
       `A`), and the positive ones lose at most `P(A) * d_A` by conditioning on `A`.
    3. `d_A == sum_C P(A_C) * d_C` over the cluster partitions of the other vertices.
    4. Every `d_C >= 0` (each `d_C` is itself checked two ways).
    5. `four_point_d == 2 * gap` and `gap >= 0`.

    Raises:
        bunkbed.exceptions.HypothesisError: `v` and `w` do not have the same neighbors.
        bunkbed.exceptions.CapExceededError: An enumeration is above its cap.
    """
    started = time.monotonic()
    if not has_same_neighbors(g, v, w):
        raise HypothesisError(f"'{v}' and '{w}' do not have the same neighbors.")
    engine = dict(cap=cap, workers=workers)
    report = VerificationReport(check='same-neighbors', v=v, w=w)

    b = build_bunkbed(g)
    d_pattern = pattern_d(b, v, w, **engine)
    d_four = four_point_d(b, v, w, **engine)
    report.add(Assertion.equal('pattern_d == four_point_d', d_pattern, d_four))

    free = conditioned(b, _closed(b.vertical_edge(v), b.vertical_edge(w)))
    d_free = pattern_d(free, v, w, **engine)
    verticals_open = (1 - g.vertex_weight(v)) * (1 - g.vertex_weight(w))
    report.add(
        Assertion.equal(
            'pattern_d == (1 - p_v)(1 - p_w) * pattern_d[verticals closed]',
            d_pattern,
            verticals_open * d_free,
        )
    )

    horizontal = ()
    if g.edge_weight(v, w):
        horizontal = (b.upper_edge(v, w), b.lower_edge(v, w))
    given_a = conditioned(free, _closed(*horizontal))
    a_probability = (1 - g.edge_weight(v, w)) ** 2

    free_patterns = event_probabilities(free, pattern_events(v, w), **engine)
    a_patterns = event_probabilities(given_a, pattern_events(v, w), **engine)
    report.add(
        Assertion.equal(
            'negative patterns only occur on A',
            free_patterns[2].probability + free_patterns[3].probability,
            a_probability * (a_patterns[2].probability + a_patterns[3].probability),
        )
    )
    d_a = (
        a_patterns[0].probability
        + a_patterns[1].probability
        - a_patterns[2].probability
        - a_patterns[3].probability
    )
    report.add(
        Assertion.at_least(
            'pattern_d[verticals closed] >= P(A) * d_A', d_free, a_probability * d_a
        )
    )

    marked = (lower(v), upper(v), lower(w), upper(w))
    partitions = enumerate_partitions(given_a, marked, workers=workers)
    report.partitions = len(partitions)
    report.add(
        Assertion.equal('sum of P(A_C) == 1', sum(c.probability for c in partitions), Fraction(1))
    )

    weighted = Fraction(0)
    smallest: Optional[Fraction] = None
    for partition in partitions:
        d_c = same_neighbors_cluster_d(given_a, v, w, partition, **engine)
        weighted += partition.probability * d_c
        smallest = d_c if smallest is None else min(smallest, d_c)
    report.add(Assertion.equal('d_A == sum of P(A_C) * d_C', d_a, weighted))
    report.add(Assertion.at_least('min d_C >= 0', smallest or Fraction(0), Fraction(0)))

    report.gap = bunkbed_gap(b, v, w, **engine)
    report.add(Assertion.equal('four_point_d == 2 * gap', d_four, 2 * report.gap))
    report.add(Assertion.at_least('gap >= 0', report.gap, Fraction(0)))

    report.elapsed = dt.timedelta(seconds=time.monotonic() - started)
    log.info(
        f"Same-neighbors verification of ({v}, {w}) "
        f"{'passed' if report.passed else 'FAILED'} over {len(partitions)} partitions.",
        extra=dict(v=v, w=w, partitions=len(partitions), passed=report.passed),
    )
    return report


def verify_local_symmetry(
    g: WeightedGraph,
    v: VertexId,
    w: VertexId,
    *,
    cap=Default,
    workers=Default,
    max_vertices=Default,
) -> VerificationReport:
    """
    Verifies the local-symmetry argument that `v` and `w` satisfy the bunkbed inequality,
    in the model with the vertical edge at `w` closed (`gap == (1 - p_w) * gap_closed` is
    checked first, exactly):

    1. Orbit constancy: every `u` with `p_uw > 0`, `p_u != 1` has the same two connection
       probabilities to `w-` and `w+` as `v` (exact); for `u` with `p_u = 1` the two agree.
    2. `d = 2 sum_u c_uw (P(u- <-> w-) - P(u- <-> w+))` equals `2 c gap_closed` and the
       reflected four-term form.
    3. `d == sum_C P(A_C) * d_C` over the partitions of every vertex but `w-, w+`.
    4. Every `d_C >= -term_tolerance`, and the log weights telescope per cluster.
    5. `gap >= 0`.

    With `p_v = 1` or `p_w = 1` the gap is 0 and only that is asserted.

    Raises:
        bunkbed.exceptions.HypothesisError: The pair has no local edge symmetry.
        bunkbed.exceptions.PreconditionError: Some edge has weight 1.
        bunkbed.exceptions.CapExceededError: An enumeration is above its cap.
    """
    started = time.monotonic()
    if not has_local_edge_symmetry(g, v, w, max_vertices=max_vertices):
        raise HypothesisError(f"'{v}' and '{w}' are not neighbours with a local symmetry.")
    aggregate = resolve_setting(Default, 'aggregate_tolerance')
    term = resolve_setting(Default, 'term_tolerance')
    engine = dict(cap=cap, workers=workers)
    report = VerificationReport(check='local-symmetry', v=v, w=w)

    b = build_bunkbed(g)
    report.gap = bunkbed_gap(b, v, w, **engine)
    closed = conditioned(b, _closed(b.vertical_edge(w)))
    gap_closed = bunkbed_gap(closed, v, w, **engine)
    report.add(
        Assertion.equal(
            'gap == (1 - p_w) * gap[vertical at w closed]',
            report.gap,
            (1 - g.vertex_weight(w)) * gap_closed,
        )
    )

    if g.vertex_weight(v) == 1 or g.vertex_weight(w) == 1:
        report.trivial = True
        report.add(Assertion.equal('gap == 0 (p_v = 1 or p_w = 1)', report.gap, Fraction(0)))
        report.add(Assertion.at_least('gap >= 0', report.gap, Fraction(0)))
        report.elapsed = dt.timedelta(seconds=time.monotonic() - started)
        return report

    c = log_weights(g, w)
    orbit = automorphism_orbit(g, v, w)
    c_total = sum(c[u] for u in orbit)

    constancy = orbit_constancy(g, v, w, **engine)
    _, v_same, v_cross = constancy.probabilities[0]
    for u, same, cross in constancy.probabilities[1:]:
        report.add(Assertion.equal(f"P({u}- <-> {w}-) == P({v}- <-> {w}-)", same, v_same))
        report.add(Assertion.equal(f"P({u}- <-> {w}+) == P({v}- <-> {w}+)", cross, v_cross))

    others = [u for u in g.vertices if u != w]
    events = []
    for u in others:
        events += [
            connected(lower(u), lower(w)),
            connected(lower(u), upper(w)),
            connected(upper(u), upper(w)),
            connected(upper(u), lower(w)),
        ]
    results = [r.probability for r in event_probabilities(closed, events, **engine)]
    probabilities = {u: results[4 * k: 4 * k + 4] for k, u in enumerate(others)}

    for u in others:
        if g.edge_weight(u, w) > 0 and g.vertex_weight(u) == 1:
            mm, mp, _, _ = probabilities[u]
            report.add(Assertion.equal(f"P({u}- <-> {w}-) == P({u}- <-> {w}+) (p_u = 1)", mm, mp))

    d_factored = 2 * sum(
        c[u] * float(probabilities[u][0] - probabilities[u][1]) for u in others if c[u]
    )
    d_reflected = sum(
        c[u] * float(mm - mp + pp - pm)
        for u, (mm, mp, pp, pm) in probabilities.items()
        if c[u]
    )
    report.add(
        Assertion.close(
            'd == 2 c gap[closed]', d_factored, 2 * c_total * float(gap_closed), aggregate
        )
    )
    report.add(Assertion.close('d == reflected four-term d', d_factored, d_reflected, aggregate))

    partitions = enumerate_partitions(closed, (upper(w), lower(w)), workers=workers)
    report.partitions = len(partitions)
    report.add(
        Assertion.equal('sum of P(A_C) == 1', sum(p.probability for p in partitions), Fraction(1))
    )

    weighted = 0.0
    smallest = 0.0
    residual = 0.0
    for partition in partitions:
        d_c = local_symmetry_cluster_d(closed, w, partition, c, **engine)
        weighted += float(partition.probability) * d_c
        smallest = min(smallest, d_c)
        residual = max(residual, telescoping_residual(closed, w, partition, c))
    report.add(Assertion.close('d == sum of P(A_C) * d_C', d_reflected, weighted, aggregate))
    report.add(Assertion.at_least('min d_C >= 0', smallest, 0.0, term))
    report.add(Assertion.at_least('log weights telescope per cluster', -residual, 0.0, term))
    report.add(Assertion.at_least('gap >= 0', report.gap, Fraction(0)))

    report.elapsed = dt.timedelta(seconds=time.monotonic() - started)
    log.info(
        f"Local-symmetry verification of ({v}, {w}) "
        f"{'passed' if report.passed else 'FAILED'} over {len(partitions)} partitions.",
        extra=dict(v=v, w=w, partitions=len(partitions), passed=report.passed),
    )
    return report
