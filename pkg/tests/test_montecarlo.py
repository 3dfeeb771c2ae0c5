import pytest

from bunkbed.conf import bunkbed_settings
from bunkbed.events import connected
from bunkbed.exact import event_probability
from bunkbed.exceptions import PreconditionError
from bunkbed.generators import generate, parse_class_spec
from bunkbed.graph import build_bunkbed
from bunkbed.montecarlo import mc_bunkbed_gap, mc_event_probability


@pytest.fixture
def k4_bunkbed():
    return build_bunkbed(generate(parse_class_spec('complete:4', p='1/3')))


def test_estimates_do_not_depend_on_workers(k4_bunkbed):
    bunkbed_settings.mc_chunk_size = 500
    results = [
        mc_bunkbed_gap(k4_bunkbed, 'a', 'b', samples=4000, seed=11, workers=workers)
        for workers in (1, 2, 8)
    ]
    assert results[0] == results[1] == results[2]


def test_same_seed_same_estimate(k4_bunkbed):
    event = connected('a-', 'c+')
    first = mc_event_probability(k4_bunkbed, event, samples=3000, seed=5)
    assert mc_event_probability(k4_bunkbed, event, samples=3000, seed=5) == first
    assert mc_event_probability(k4_bunkbed, event, samples=3000, seed=6) != first


def test_estimates_are_close_to_exact(k4_bunkbed):
    event = connected('a-', 'b+')
    exact = float(event_probability(k4_bunkbed, event).probability)
    within = 0
    for seed in range(20):
        result = mc_event_probability(k4_bunkbed, event, samples=2000, seed=seed)
        if abs(result.estimate - exact) <= 3 * result.stderr:
            within += 1
    assert within >= 18


def test_paired_gap(k2):
    result = mc_bunkbed_gap(build_bunkbed(k2), 'a', 'b', samples=20_000, seed=3)
    assert result.gap == pytest.approx(result.same.estimate - result.cross.estimate)
    assert result.gap == pytest.approx(1 / 8, abs=0.03)
    assert result.stderr <= result.unpaired_stderr
    assert not result.flagged(4)
    assert result.json()['samples'] == 20_000


def test_sample_count_is_validated(k2):
    with pytest.raises(PreconditionError, match='samples must be at least 1'):
        mc_bunkbed_gap(build_bunkbed(k2), 'a', 'b', samples=0)
    with pytest.raises(PreconditionError, match='seed'):
        mc_bunkbed_gap(build_bunkbed(k2), 'a', 'b', samples=10, seed=-1)
