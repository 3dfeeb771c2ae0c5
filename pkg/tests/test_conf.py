from xsentinels import Default

from bunkbed.conf import BunkbedSettings, bunkbed_settings, resolve_setting
from bunkbed.resources import EnumerationPool, ExactResultCache


def test_plugin_pins_settings_for_tests():
    assert bunkbed_settings.workers == 1
    assert bunkbed_settings.seed == 0


def test_defaults_and_explicit_values():
    assert resolve_setting(Default, 'exact_cap') == 30
    assert resolve_setting(12, 'exact_cap') == 12

    bunkbed_settings.exact_cap = 18
    assert resolve_setting(Default, 'exact_cap') == 18


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv('BUNKBED_POLY_CAP', '11')
    assert BunkbedSettings().poly_cap == 11


def test_pool_keeps_item_order():
    pool = EnumerationPool.grab()
    try:
        assert pool.map(lambda x: x * x, range(20), workers=3) == [x * x for x in range(20)]
        assert pool.map(lambda x: -x, [1, 2], workers=1) == [-1, -2]
    finally:
        pool.shutdown()


def test_result_cache_evicts_oldest():
    bunkbed_settings.result_cache_size = 2
    cache = ExactResultCache()
    cache.set('a', 1)
    cache.set('b', 2)
    assert cache.get('a') == 1
    cache.set('c', 3)

    assert cache.get('b') is None
    assert cache.get('a') == 1
    assert cache.get('c') == 3
    assert len(cache) == 2
    assert cache.hits == 3
    assert cache.misses == 1
