"""
In-process store of computed spectra keyed by domain and solver settings.

Finite-difference oracles solve the base domain once per step size and the
±h domains of neighbouring clusters repeatedly; entries older than the TTL
are recomputed.
"""
import logging
import threading
import time
from typing import Callable, Dict, Hashable, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class SpectrumCache:
    """Read-only eigenvalue arrays shared between worker threads."""

    def __init__(self, ttl_seconds: float = 3600.0, max_entries: int = 512):
        """
        Args:
            ttl_seconds: Age after which a spectrum is recomputed
            max_entries: Capacity; a full cache drops stale entries first,
                then the oldest ones
        """
        self._cache: Dict[Hashable, Tuple[np.ndarray, float]] = {}
        self._ttl_seconds = ttl_seconds
        self._max_entries = max_entries
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def _stale(self, stamp: float, now: float) -> bool:
        return now - stamp > self._ttl_seconds

    def get(self, key: Hashable) -> Optional[np.ndarray]:
        """The stored spectrum for ``key``; stale entries are dropped and give None."""
        with self._lock:
            entry = self._cache.get(key)
            if entry is None:
                return None
            values, stamp = entry
            if self._stale(stamp, time.time()):
                logger.debug(f"Spectrum for {key} is stale")
                del self._cache[key]
                return None
            return values

    def put(self, key: Hashable, values: np.ndarray) -> np.ndarray:
        """Store a frozen copy of ``values`` and return it."""
        values = np.array(values, dtype=float)
        values.setflags(write=False)
        with self._lock:
            self._cache[key] = (values, time.time())
            full = len(self._cache) > self._max_entries
        if full:
            self.cleanup_expired()
            with self._lock:
                while len(self._cache) > self._max_entries:
                    del self._cache[next(iter(self._cache))]
        return values

    def get_or_compute(self, key: Hashable, compute: Callable[[], np.ndarray]) -> np.ndarray:
        """Cached spectrum for ``key``, computing it on a miss.

        ``compute`` runs without the lock; two threads missing the same key
        both compute and the later result is kept.
        """
        cached = self.get(key)
        if cached is not None:
            self.hits += 1
            return cached
        self.misses += 1
        return self.put(key, compute())

    def cleanup_expired(self) -> int:
        """Drop every stale entry and return how many were dropped."""
        now = time.time()
        with self._lock:
            stale = [key for key, (_, stamp) in self._cache.items() if self._stale(stamp, now)]
            for key in stale:
                del self._cache[key]
        if stale:
            logger.info(f"Dropped {len(stale)} stale spectra")
        return len(stale)

    def clear(self) -> None:
        with self._lock:
            self._cache.clear()
        self.hits = self.misses = 0

    @property
    def size(self) -> int:
        return len(self._cache)


spectrum_cache = SpectrumCache()
