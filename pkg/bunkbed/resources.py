"""
Process-wide resources shared by the engines, as `xinject` dependencies.

Grab the current instance with `.grab()`; a new `xinject.XContext` (each unit test gets one
via the pytest plugin) starts with fresh instances.
"""
from __future__ import annotations

import collections
import threading
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from typing import Any, Callable, Hashable, Iterable, List, Optional, TypeVar

from xinject import Dependency
from xsentinels import Default

from .conf import resolve_setting

log = getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


class EnumerationPool(Dependency):
    """
    Lazily owns the worker executor used to process enumeration and sampling chunks.

    Chunk functions must be pure: they get everything they need as arguments and never read
    `bunkbed_settings` or grab other dependencies (worker threads don't share the caller's
    `xinject` context).

    With `workers == 1` (or a single chunk) everything runs inline on the calling thread.
    """

    _executor: Optional[ThreadPoolExecutor] = None
    _executor_workers: int = 0

    def __init__(self):
        super().__init__()
        self._lock = threading.Lock()

    def map(self, fn: Callable[[T], R], items: Iterable[T], *, workers=Default) -> List[R]:
        """ Results of `fn` over `items`, in item order regardless of worker count. """
        workers = resolve_setting(workers, 'workers')
        items = list(items)
        if workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        return list(self._executor_for(workers).map(fn, items))

    def _executor_for(self, workers: int) -> ThreadPoolExecutor:
        with self._lock:
            if self._executor is None or self._executor_workers != workers:
                if self._executor is not None:
                    self._executor.shutdown(wait=False)
                log.debug(f"Starting enumeration pool with {workers} workers.")
                self._executor = ThreadPoolExecutor(
                    max_workers=workers, thread_name_prefix='bunkbed-enum'
                )
                self._executor_workers = workers
            return self._executor

    def shutdown(self):
        with self._lock:
            if self._executor is not None:
                self._executor.shutdown(wait=True)
            self._executor = None
            self._executor_workers = 0


class ExactResultCache(Dependency):
    """
    Bounded LRU of exact engine results.

    Keys are built by `bunkbed.exact` from the (hashable, immutable) graph, the events and the
    forced edge states; the verifiers ask for the same probabilities several times.

    The size comes from `bunkbed_settings.result_cache_size`, read when the cache is created;
    a size of zero disables caching.
    """

    def __init__(self):
        super().__init__()
        self.max_size = resolve_setting(Default, 'result_cache_size')
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()
        self.reset_cache()

    def get(self, key: Hashable) -> Optional[Any]:
        with self._lock:
            value = self._entries.get(key)
            if value is None:
                self.misses += 1
                return None
            self._entries.move_to_end(key)
            self.hits += 1
            return value

    def set(self, key: Hashable, value: Any):
        if self.max_size <= 0:
            return
        with self._lock:
            self._entries[key] = value
            self._entries.move_to_end(key)
            while len(self._entries) > self.max_size:
                self._entries.popitem(last=False)

    def __len__(self) -> int:
        return len(self._entries)

    def reset_cache(self):
        self._entries: collections.OrderedDict = collections.OrderedDict()
