"""Segmented odd-only sieve of Eratosthenes and absolutely indexed prime access.

Primes are indexed from 1 (``p_1 = 2``). Everything downstream consumes
primes either as a stream of numpy segments (one pass, bounded memory) or
through a :class:`PrimeTable` holding every prime below a limit.

Counting convention: ``count_primes_below(x)`` counts primes strictly below
``x``. This agrees with pi(x) whenever ``x`` itself is not prime.
"""

from __future__ import annotations

import collections
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .errors import CacheFormatError, ConfigError, CoverageError, RangeError

DEFAULT_SEGMENT_SIZE = 256 * 1024
MAX_LIMIT = 2**63

CACHE_MAGIC = b"PPLB1"
_CACHE_HEADER = struct.Struct("<5sQQ")


@dataclass(frozen=True)
class SieveConfig:
    """Sieve every prime ``< limit``.

    ``segment_size`` is the number of bytes in each segment's odd-number map
    (one byte per odd integer), so a segment spans ``2 * segment_size``
    integers.
    """

    limit: int
    segment_size: int = DEFAULT_SEGMENT_SIZE
    threads: int = 1

    def __post_init__(self):
        if self.limit < 3:
            raise ConfigError(f"sieve limit must be >= 3, got {self.limit}")
        if self.limit > MAX_LIMIT:
            raise ConfigError(f"sieve limit must be <= 2**63, got {self.limit}")
        if self.segment_size < 1024 or self.segment_size % 2:
            raise ConfigError(
                f"segment_size must be even and >= 1024, got {self.segment_size}"
            )
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")


@dataclass(frozen=True)
class PrimeWindow:
    """Consecutive primes ``p_base_index, p_base_index+1, ...``."""

    base_index: int
    primes: tuple[int, ...]

    @property
    def end_index(self) -> int:
        """Absolute index of the last prime in the window."""
        return self.base_index + len(self.primes) - 1

    def covers(self, first: int, last: int) -> bool:
        return self.base_index <= first and last <= self.end_index

    def prime_at(self, index: int) -> int:
        if not self.covers(index, index):
            raise CoverageError(
                f"index {index} outside window [{self.base_index}, {self.end_index}]"
            )
        return self.primes[index - self.base_index]


class PrimeCountResult(NamedTuple):
    limit: int
    count: int


def small_primes(n: int) -> np.ndarray:
    """All primes ``<= n`` by a plain (non-segmented) sieve."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    # lo is odd; marks odd numbers in [lo, hi)
    size = (hi - lo + 1) // 2
    mask = np.ones(size, dtype=bool)
    ps = base[base * base < hi]
    if len(ps):
        starts = np.maximum(ps * ps, (lo + ps - 1) // ps * ps)
        starts += ps * (starts % 2 == 0)
        offsets = (starts - lo) // 2
        for off, p in zip(offsets.tolist(), ps.tolist()):
            if off < size:
                mask[off::p] = False
    return lo + 2 * np.flatnonzero(mask).astype(np.int64)


def iter_segments(config: SieveConfig) -> Iterator[np.ndarray]:
    """Yield int64 arrays of consecutive primes below ``config.limit``, in order.

    With ``threads > 1`` segments are sieved concurrently but still yielded
    in ascending order.
    """
    limit = config.limit
    base = small_primes(math.isqrt(limit - 1))
    base = base[base > 2]
    span = 2 * config.segment_size
    bounds = [(lo, min(lo + span, limit)) for lo in range(3, limit, span)]

    yield np.array([2], dtype=np.int64)
    if config.threads == 1:
        for lo, hi in bounds:
            yield _sieve_segment(lo, hi, base)
        return

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        pending = collections.deque()
        it = iter(bounds)
        for lo, hi in it:
            pending.append(pool.submit(_sieve_segment, lo, hi, base))
            if len(pending) >= 2 * config.threads:
                break
        while pending:
            yield pending.popleft().result()
            nxt = next(it, None)
            if nxt is not None:
                pending.append(pool.submit(_sieve_segment, nxt[0], nxt[1], base))


def stream_primes(config: SieveConfig) -> Iterator[tuple[int, int]]:
    """Yield ``(index, prime)`` for every prime below the limit: (1, 2), (2, 3), ..."""
    index = 1
    for seg in iter_segments(config):
        for p in seg.tolist():
            yield index, p
            index += 1


def windows(config: SieveConfig, width: int) -> Iterator[PrimeWindow]:
    """Sliding windows of ``width`` consecutive primes, base_index = 1, 2, ..."""
    if width < 1:
        raise ConfigError(f"window width must be >= 1, got {width}")
    buf = collections.deque(maxlen=width)
    for index, p in stream_primes(config):
        buf.append(p)
        if len(buf) == width:
            yield PrimeWindow(index - width + 1, tuple(buf))


def count_primes_below(limit: int, source: "SieveConfig | PrimeTable | None" = None) -> PrimeCountResult:
    """Exact number of primes ``< limit``.

    With no source (or a :class:`SieveConfig`) this streams a fresh sieve and
    never holds more than a segment in memory, which is what makes 10**10
    feasible.
    """
    if isinstance(source, PrimeTable):
        return PrimeCountResult(limit, source.count_below(limit))
    if limit <= 2:
        return PrimeCountResult(limit, 0)
    if source is None:
        source = SieveConfig(max(limit, 3))
    elif limit > source.limit:
        raise RangeError(f"limit {limit} exceeds sieve limit {source.limit}")
    cfg = SieveConfig(limit, source.segment_size, source.threads)
    return PrimeCountResult(limit, sum(len(seg) for seg in iter_segments(cfg)))


def _as_fraction(x) -> Fraction:
    if isinstance(x, tuple):
        return Fraction(*x)
    return Fraction(x)


class PrimeTable:
    """Every prime below ``limit`` in one read-only int64 array.

    ``table.prime_at(n)`` is ``p_n``; the array itself is zero-based.
    """

    def __init__(self, primes: np.ndarray, limit: int):
        arr = np.asarray(primes, dtype=np.int64).view()
        arr.flags.writeable = False
        self.primes = arr
        self.limit = int(limit)

    @classmethod
    def sieve(cls, limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int = 1) -> "PrimeTable":
        return cls.from_config(SieveConfig(limit, segment_size, threads))

    @classmethod
    def from_config(cls, config: SieveConfig) -> "PrimeTable":
        return cls(np.concatenate(list(iter_segments(config))), config.limit)

    def __len__(self) -> int:
        return len(self.primes)

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit}, count={len(self)})"

    @property
    def max_index(self) -> int:
        return len(self.primes)

    def require_index(self, index: int) -> None:
        if index > len(self.primes):
            raise RangeError(
                f"p_{index} needed but only {len(self.primes)} primes below {self.limit}"
            )
        if index < 1:
            raise CoverageError(f"prime index must be >= 1, got {index}")

    def prime_at(self, index: int) -> int:
        self.require_index(index)
        return int(self.primes[index - 1])

    def indices(self, first: int, last: int) -> np.ndarray:
        """View of ``p_first .. p_last`` inclusive."""
        self.require_index(first)
        self.require_index(last)
        return self.primes[first - 1 : last]

    def window(self, first: int, last: int) -> PrimeWindow:
        return PrimeWindow(first, tuple(self.indices(first, last).tolist()))

    def chunks(self, size: int = 1 << 20) -> Iterator[np.ndarray]:
        for i in range(0, len(self.primes), size):
            yield self.primes[i : i + size]

    def count_below(self, x: int) -> int:
        if x > self.limit:
            raise RangeError(f"count below {x} requested but table only covers < {self.limit}")
        return int(np.searchsorted(self.primes, x, side="left"))

    def prime_in_open_interval(self, lo, hi) -> int | None:
        """Least prime strictly inside ``(lo, hi)``, or ``None``.

        Endpoints are compared exactly as rationals; a ``(num, den)`` tuple is
        accepted as well as ints and :class:`~fractions.Fraction`.
        """
        lo, hi = _as_fraction(lo), _as_fraction(hi)
        if not lo < hi:
            raise ConfigError(f"empty interval ({lo}, {hi})")
        if hi > self.limit:
            raise RangeError(f"interval end {hi} beyond sieved range < {self.limit}")
        i = int(np.searchsorted(self.primes, math.floor(lo), side="right"))
        if i == len(self.primes):
            return None
        p = int(self.primes[i])
        return p if p < hi else None

    def save(self, path) -> None:
        """Write the prime-cache file (little-endian header then u64 primes)."""
        with open(path, "wb") as fh:
            fh.write(_CACHE_HEADER.pack(CACHE_MAGIC, self.limit, len(self.primes)))
            fh.write(self.primes.astype("<u8").tobytes())

    @classmethod
    def load(cls, path, limit: int | None = None) -> "PrimeTable":
        """Read and validate a prime-cache file, optionally truncating to ``< limit``."""
        size = os.path.getsize(path)
        with open(path, "rb") as fh:
            head = fh.read(_CACHE_HEADER.size)
            if len(head) != _CACHE_HEADER.size:
                raise CacheFormatError(f"{path}: truncated header")
            magic, file_limit, count = _CACHE_HEADER.unpack(head)
            if magic != CACHE_MAGIC:
                raise CacheFormatError(f"{path}: bad magic {magic!r}")
            if size != _CACHE_HEADER.size + 8 * count:
                raise CacheFormatError(
                    f"{path}: header says {count} primes but file holds {(size - _CACHE_HEADER.size) / 8}"
                )
            primes = np.fromfile(fh, dtype="<u8", count=count)
        if count:
            if primes[0] != 2:
                raise CacheFormatError(f"{path}: first prime is {primes[0]}, expected 2")
            if np.any(primes[1:] <= primes[:-1]):
                raise CacheFormatError(f"{path}: primes not strictly increasing")
            if primes[-1] >= file_limit or primes[-1] >= MAX_LIMIT:
                raise CacheFormatError(f"{path}: last prime {primes[-1]} not below limit {file_limit}")
        if limit is not None:
            if limit > file_limit:
                raise RangeError(f"cache covers < {file_limit}, {limit} requested")
            primes = primes[: np.searchsorted(primes, limit)]
            file_limit = limit
        return cls(primes.astype(np.int64), file_limit)
