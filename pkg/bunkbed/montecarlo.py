"""
Monte Carlo estimates of event probabilities, for graphs beyond the exact-enumeration cap.

Samples are drawn in chunks of `bunkbed_settings.mc_chunk_size`; chunk `c` uses its own
`numpy.random.Philox` stream seeded by `SeedSequence(seed, spawn_key=(c,))`, so estimates
depend only on `(seed, samples, mc_chunk_size)` and never on the worker count.

An edge of weight `p` is open when its 64-bit uniform draw is below `floor(p * 2 ** 64)`;
the bias this adds is at most `2 ** -64` per edge. Deterministic edges (weight 0 or 1, or
forced) are resolved before sampling, as in the exact engine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from logging import getLogger
from typing import List, Optional, Sequence, Tuple

import numpy as np
from xsentinels import Default

from .conf import resolve_setting
from .events import ConnectivityEvent, EdgeStates, connected
from .exact import ReducedModel, compile_event, event_hits, reduce_model
from .exceptions import PreconditionError
from .graph import PercolationGraph, lower, upper
from .resources import EnumerationPool
from .types import VertexId
from .unionfind import batched_roots

log = getLogger(__name__)


@dataclass(frozen=True)
class McResult:
    estimate: float
    stderr: float
    samples: int
    seed: int

    def __post_init__(self):
        if not 0 <= self.estimate <= 1:
            raise ValueError(f"Monte Carlo estimate {self.estimate} outside of [0, 1].")

    @classmethod
    def from_hits(cls, hits: int, samples: int, seed: int) -> McResult:
        estimate = hits / samples
        return cls(
            estimate=estimate,
            stderr=math.sqrt(estimate * (1 - estimate) / samples),
            samples=samples,
            seed=seed,
        )


@dataclass(frozen=True)
class McGapResult:
    """
    Both connection probabilities estimated on the same sampled configurations, with the
    paired gap estimate and its standard error (and, for comparison, the standard error the
    gap would have from independent samples).
    """

    same: McResult
    cross: McResult
    gap: float
    stderr: float
    unpaired_stderr: float

    @property
    def samples(self) -> int:
        return self.same.samples

    @property
    def seed(self) -> int:
        return self.same.seed

    def flagged(self, sigmas: float) -> bool:
        """ True when the gap is more than `sigmas` standard errors below 0. """
        return self.gap < -sigmas * self.stderr

    def json(self) -> dict:
        return dict(
            same=self.same.estimate,
            cross=self.cross.estimate,
            gap=self.gap,
            stderr=self.stderr,
            unpaired_stderr=self.unpaired_stderr,
            samples=self.samples,
            seed=self.seed,
        )


def _thresholds(model: ReducedModel) -> np.ndarray:
    values = []
    for i in model.free_edge_ids:
        p = model.graph.edges[i].p
        values.append((p.numerator << 64) // p.denominator)
    return np.asarray(values, dtype=np.uint64)


def _sample_chunk(task) -> Tuple[np.ndarray, int]:
    model, compiled, thresholds, seed, chunk, count = task
    stream = np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    draws = stream.random_raw(size=count * model.free_count).reshape(count, model.free_count)
    roots = batched_roots(model.class_count, list(model.free_edges), draws < thresholds)
    hits = np.stack([event_hits(roots, event) for event in compiled], axis=1)
    disagreements = 0
    if len(compiled) >= 2:
        disagreements = int(np.count_nonzero(hits[:, 0] != hits[:, 1]))
    return hits.sum(axis=0), disagreements


def _simulate(
    g: PercolationGraph,
    events: Sequence[ConnectivityEvent],
    states: Optional[EdgeStates],
    samples,
    seed,
    workers,
) -> Tuple[List[int], int, int, int]:
    samples = resolve_setting(samples, 'mc_samples')
    seed = resolve_setting(seed, 'seed')
    workers = resolve_setting(workers, 'workers')
    chunk_size = resolve_setting(Default, 'mc_chunk_size')
    if samples < 1:
        raise PreconditionError(f"samples must be at least 1, got {samples}.")
    if seed < 0:
        raise PreconditionError(f"seed must be a non-negative integer, got {seed}.")

    for event in events:
        event.validate(g)
    model = reduce_model(g, states)
    compiled = [compile_event(model, event) for event in events]
    thresholds = _thresholds(model)

    tasks = [
        (model, compiled, thresholds, seed, chunk, min(chunk_size, samples - start))
        for chunk, start in enumerate(range(0, samples, chunk_size))
    ]
    log.info(
        f"Sampling {samples} configurations ({model.free_count} random edges) "
        f"for {len(events)} event(s).",
        extra=dict(samples=samples, seed=seed, free_edges=model.free_count, workers=workers),
    )
    totals = np.zeros(len(events), dtype=np.int64)
    disagreements = 0
    for hits, disagree in EnumerationPool.grab().map(_sample_chunk, tasks, workers=workers):
        totals += hits
        disagreements += disagree
    return [int(x) for x in totals], disagreements, samples, seed


def mc_event_probabilities(
    g: PercolationGraph,
    events: Sequence[ConnectivityEvent],
    states: Optional[EdgeStates] = None,
    *,
    samples=Default,
    seed=Default,
    workers=Default,
) -> List[McResult]:
    """ Estimates of several events from one shared set of sampled configurations. """
    events = list(events)
    hits, _, samples, seed = _simulate(g, events, states, samples, seed, workers)
    return [McResult.from_hits(h, samples, seed) for h in hits]


def mc_event_probability(
    g: PercolationGraph,
    event: ConnectivityEvent,
    states: Optional[EdgeStates] = None,
    *,
    samples=Default,
    seed=Default,
    workers=Default,
) -> McResult:
    """
    Sample mean of the event over `samples` independent configurations of `g`, with
    standard error `sqrt(estimate * (1 - estimate) / samples)`.

    Raises:
        bunkbed.exceptions.PreconditionError: `samples < 1` or a negative seed.
    """
    return mc_event_probabilities(
        g, [event], states, samples=samples, seed=seed, workers=workers
    )[0]


def mc_bunkbed_gap(
    g: PercolationGraph,
    v: VertexId,
    w: VertexId,
    states: Optional[EdgeStates] = None,
    *,
    samples=Default,
    seed=Default,
    workers=Default,
) -> McGapResult:
    """
    Estimates `P(v- <-> w-)` and `P(v- <-> w+)` on common sampled configurations.

    The paired standard error is that of the per-sample difference of the two indicators,
    which is never larger than the unpaired one when the two events are positively
    correlated (as two increasing events are).
    """
    events = [connected(lower(v), lower(w)), connected(lower(v), upper(w))]
    (same_hits, cross_hits), disagreements, samples, seed = _simulate(
        g, events, states, samples, seed, workers
    )
    same = McResult.from_hits(same_hits, samples, seed)
    cross = McResult.from_hits(cross_hits, samples, seed)
    gap = (same_hits - cross_hits) / samples
    variance = max(disagreements / samples - gap * gap, 0.0)
    return McGapResult(
        same=same,
        cross=cross,
        gap=gap,
        stderr=math.sqrt(variance / samples),
        unpaired_stderr=math.sqrt(same.stderr ** 2 + cross.stderr ** 2),
    )
