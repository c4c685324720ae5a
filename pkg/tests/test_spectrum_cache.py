"""
Tests for the spectrum cache used by the finite-difference families.
"""
import time

import numpy as np
import pytest

from spectrum_cache.spectrum_cache import SpectrumCache


class TestSpectrumCache:

    def test_get_or_compute_runs_once(self):
        cache = SpectrumCache()
        calls = []

        def compute():
            calls.append(1)
            return np.array([1.0, 2.0])

        first = cache.get_or_compute("disk", compute)
        second = cache.get_or_compute("disk", compute)
        assert len(calls) == 1
        np.testing.assert_array_equal(first, second)
        assert (cache.hits, cache.misses) == (1, 1)

    def test_stored_arrays_are_frozen(self):
        cache = SpectrumCache()
        values = cache.put("k", [3.0])
        with pytest.raises(ValueError):
            values[0] = 1.0

    def test_stale_entries_are_recomputed(self):
        cache = SpectrumCache(ttl_seconds=0)
        cache.put("k", [1.0])
        time.sleep(0.01)
        assert cache.get("k") is None
        assert cache.get_or_compute("k", lambda: np.array([2.0]))[0] == 2.0
        assert cache.misses == 1

    def test_eviction_keeps_newest(self):
        cache = SpectrumCache(max_entries=2)
        for key in ("a", "b", "c"):
            cache.put(key, [0.0])
        assert cache.size == 2
        assert cache.get("a") is None
        assert cache.get("c") is not None

    def test_full_cache_drops_stale_entries_first(self):
        cache = SpectrumCache(ttl_seconds=0.05, max_entries=3)
        for key in ("a", "b", "c"):
            cache.put(key, [0.0])
        time.sleep(0.1)
        cache.put("d", [1.0])
        assert cache.size == 1

    def test_cleanup_and_clear(self):
        cache = SpectrumCache(ttl_seconds=0)
        cache.put("k", [1.0])
        time.sleep(0.01)
        assert cache.cleanup_expired() == 1
        assert cache.size == 0
        cache.put("j", [1.0])
        cache.clear()
        assert cache.size == 0
