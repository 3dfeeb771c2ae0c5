"""
Shared fixtures for unit tests of `bunkbed` and of projects built on it.

.. important:: Don't import this module yourself!
    pytest loads it through the `pytest11` entry point declared in `pyproject.toml`;
    importing the fixtures manually gives `ValueError: duplicate 'bunkbed_test_settings'`.
"""
from __future__ import annotations

import pytest

from bunkbed.conf import BunkbedSettings, bunkbed_settings


@pytest.fixture(autouse=True)
def bunkbed_test_settings(xinject_test_context) -> BunkbedSettings:
    """
    Automatically used for each unit test.

    Builds on `xinject_test_context`, so every test starts with fresh settings, a fresh
    `bunkbed.resources.ExactResultCache` and a fresh worker pool. Settings are pinned to a
    single worker, seed 0 and small chunks (so chunked code paths run on small graphs too);
    tests change them by setting values on `bunkbed_settings`:

    >>> def test_something():
    ...     bunkbed_settings.workers = 2
    """
    _setup_settings_for_testing()
    return BunkbedSettings.grab()


def _setup_settings_for_testing():
    bunkbed_settings.workers = 1
    bunkbed_settings.seed = 0
    bunkbed_settings.chunk_bits = 8
    bunkbed_settings.mc_chunk_size = 1024
    bunkbed_settings.mc_samples = 20_000
