"""Rate-limited HTTP GET with bounded retry."""

from __future__ import annotations

import logging
import threading
import time

from ..errors import TransportError

log = logging.getLogger(__name__)


class TokenBucket:
    """Blocking token bucket; ``rate`` tokens per second, burst of ``capacity``."""

    def __init__(self, rate=4.0, capacity=None, clock=time.monotonic, sleep=time.sleep):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = float(rate)
        self.capacity = float(capacity if capacity is not None else rate)
        self._tokens = self.capacity
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self):
        # holding the lock while sleeping serializes admission, which is the point
        with self._lock:
            while True:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                self._sleep((1.0 - self._tokens) / self.rate)


class TransientError(Exception):
    """A failure worth retrying (connection drop, timeout, 5xx, 429)."""


def requests_transport(url, params, headers, timeout):
    import requests

    try:
        resp = requests.get(url, params=params, headers=headers, timeout=timeout)
    except (requests.ConnectionError, requests.Timeout) as exc:
        raise TransientError(str(exc)) from exc
    return resp.status_code, resp.content


class HttpClient:
    """GET with per-source rate limiting and exponential backoff.

    ``transport(url, params, headers, timeout) -> (status, body)`` may raise
    :class:`TransientError`; it defaults to ``requests``. Safe to share
    between threads.
    """

    def __init__(self, transport=None, rate=4.0, attempts=3, backoff=0.5,
                 timeout=30.0, sleep=time.sleep):
        self.transport = transport or requests_transport
        self.rate = rate
        self.attempts = attempts
        self.backoff = backoff
        self.timeout = timeout
        self.sleep = sleep
        self._buckets = {}
        self._lock = threading.Lock()

    def _bucket(self, source):
        with self._lock:
            if source not in self._buckets:
                self._buckets[source] = TokenBucket(self.rate, sleep=self.sleep)
            return self._buckets[source]

    def get(self, source, url, params=None, headers=None):
        last = None
        for attempt in range(self.attempts):
            if attempt:
                delay = self.backoff * 2 ** (attempt - 1)
                log.warning("%s: retrying %s in %.1fs after: %s", source, url, delay, last)
                self.sleep(delay)
            self._bucket(source).acquire()
            try:
                status, body = self.transport(url, params or {}, headers or {}, self.timeout)
            except TransientError as exc:
                last = exc
                continue
            if status == 429 or status >= 500:
                last = f"HTTP {status}"
                continue
            if status >= 400:
                raise TransportError(f"{source}: HTTP {status} from {url}")
            return body
        raise TransportError(f"{source}: {url} failed after {self.attempts} attempts: {last}")
