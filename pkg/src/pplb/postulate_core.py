"""Prime-sum inequalities, delta values and empirical thresholds.

An :class:`OffsetSpec` describes the inequality

    p[n-c_1] + ... + p[n-c_g]  >  p[n+d_1] + ... + p[n+d_h]      (g > h >= 1)

(or ``>=`` in non-strict mode). Thresholds found here are *empirical*: they
describe a finite prime range only. Proved thresholds come from
:mod:`pplb.analytic_bounds`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import CoverageError, InvalidSpecError, RangeError, SumOverflowError
from .prime_engine import PrimeTable, PrimeWindow, SieveConfig, iter_segments

_I64_MAX = 2**63 - 1
_U64_MAX = 2**64 - 1


class Mode(str, enum.Enum):
    STRICT = "strict"
    NONSTRICT = "nonstrict"

    def holds(self, left, right):
        return left > right if self is Mode.STRICT else left >= right


@dataclass(frozen=True)
class OffsetSpec:
    """Multisets of left offsets (>= 0) and right offsets (>= 1).

    Offsets are stored sorted but never deduplicated.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]
    mode: Mode = Mode.STRICT

    def __post_init__(self):
        left = tuple(sorted(int(c) for c in self.left))
        right = tuple(sorted(int(d) for d in self.right))
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "mode", Mode(self.mode))
        if not right:
            raise InvalidSpecError("need at least one right offset (h >= 1)")
        if len(left) <= len(right):
            raise InvalidSpecError(
                f"need more left terms than right terms (g > h), got g={len(left)}, h={len(right)}"
            )
        if left[0] < 0:
            raise InvalidSpecError(f"left offsets must be >= 0, got {left}")
        if right[0] < 1:
            raise InvalidSpecError(f"right offsets must be >= 1, got {right}")

    @classmethod
    def pair(cls, c: int, d: int, mode: Mode = Mode.NONSTRICT) -> "OffsetSpec":
        """The two-term spec ``p[n-c] + p[n] vs p[n+d]`` behind M(c,d) and N(c,d)."""
        if c < 1 or d < 1:
            raise InvalidSpecError(f"c and d must be positive, got c={c}, d={d}")
        return cls((0, c), (d,), mode)

    @property
    def g(self) -> int:
        return len(self.left)

    @property
    def h(self) -> int:
        return len(self.right)

    @property
    def max_left(self) -> int:
        return self.left[-1]

    @property
    def max_right(self) -> int:
        return self.right[-1]

    def min_index(self) -> int:
        """Least n for which every p[n - c_i] exists."""
        return self.max_left + 1

    def to_dict(self) -> dict:
        return {"left": list(self.left), "right": list(self.right), "mode": self.mode.value}

    def __str__(self) -> str:
        op = ">" if self.mode is Mode.STRICT else ">="
        lhs = " + ".join(f"p[n-{c}]" if c else "p[n]" for c in self.left)
        rhs = " + ".join(f"p[n+{d}]" for d in self.right)
        return f"{lhs} {op} {rhs}"


class Evaluation(NamedTuple):
    left_sum: int
    right_sum: int
    holds: bool


@dataclass(frozen=True)
class ThresholdResult:
    """Empirical threshold over ``[spec.min_index(), scan_limit_index]``.

    ``m_value`` is one past the last violation, or ``min_index()`` when no
    violation was seen. ``first_hold_index`` is merely the least scanned n at
    which the inequality holds; it equals ``m_value`` only when no violation
    occurs after the first success.
    """

    spec: OffsetSpec
    scan_limit_index: int
    m_value: int
    last_violation_index: int | None
    violation_count: int
    first_hold_index: int | None = None

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "scan_limit_index": self.scan_limit_index,
            "m": self.m_value,
            "last_violation": self.last_violation_index,
            "violations": self.violation_count,
            "first_hold": self.first_hold_index,
        }


@dataclass(frozen=True)
class DeltaSeries:
    c: int
    d: int
    start_index: int
    end_index: int
    values: tuple[int, ...] = field(repr=False)

    def __getitem__(self, n: int) -> int:
        return self.values[n - self.start_index]


def evaluate(spec: OffsetSpec, n: int, primes: PrimeWindow) -> Evaluation:
    if n < spec.min_index():
        raise CoverageError(f"n={n} below min_index {spec.min_index()} for {spec}")
    if not primes.covers(n - spec.max_left, n + spec.max_right):
        raise CoverageError(
            f"window [{primes.base_index}, {primes.end_index}] does not cover "
            f"[{n - spec.max_left}, {n + spec.max_right}]"
        )
    left = sum(primes.prime_at(n - c) for c in spec.left)
    right = sum(primes.prime_at(n + d) for d in spec.right)
    if left > _U64_MAX or right > _U64_MAX:
        raise SumOverflowError(f"prime sum exceeds 64 bits at n={n}")
    return Evaluation(left, right, spec.mode.holds(left, right))


def delta(c: int, d: int, n: int, primes: PrimeWindow) -> int:
    """``p[n-c] + p[n] - p[n+d]``."""
    if n < c + 1:
        raise CoverageError(f"delta needs n >= c+1, got c={c}, n={n}")
    if not primes.covers(n - c, n + d):
        raise CoverageError(
            f"window [{primes.base_index}, {primes.end_index}] does not cover [{n - c}, {n + d}]"
        )
    return primes.prime_at(n - c) + primes.prime_at(n) - primes.prime_at(n + d)


def delta_array(c: int, d: int, start: int, end: int, table: PrimeTable) -> np.ndarray:
    """Vectorised delta over ``n = start .. end`` as int64."""
    if start < c + 1:
        raise CoverageError(f"delta needs n >= c+1, got c={c}, start={start}")
    if end < start:
        raise ValueError(f"empty range [{start}, {end}]")
    table.require_index(end + d)
    p = table.primes
    lo = start - 1
    hi = end
    return p[lo - c : hi - c] + p[lo:hi] - p[lo + d : hi + d]


def delta_series(c: int, d: int, start: int, end: int, table: PrimeTable) -> DeltaSeries:
    vals = delta_array(c, d, start, end, table)
    return DeltaSeries(c, d, start, end, tuple(vals.tolist()))


def sum_ratio(spec: OffsetSpec, n: int, table: PrimeTable) -> tuple[float, float]:
    """(left_sum / right_sum, g / h). The first tends to the second as n grows."""
    table.require_index(n + spec.max_right)
    ev = evaluate(spec, n, table.window(n - spec.max_left, n + spec.max_right))
    return ev.left_sum / ev.right_sum, spec.g / spec.h


def prime_chunks(source) -> Iterator[np.ndarray]:
    if isinstance(source, PrimeTable):
        return source.chunks()
    if isinstance(source, SieveConfig):
        return iter_segments(source)
    return iter(source)


class ThresholdScanner:
    """One-pass threshold computation for many specs over a chunked prime stream.

    Feed consecutive prime chunks starting at ``p_1`` with :meth:`feed`, then
    call :meth:`finish`. Only ``max_left + max_right`` primes are carried
    between chunks.
    """

    def __init__(self, specs: Iterable[OffsetSpec], scan_limit_index: int | None = None):
        self.specs = list(specs)
        if not self.specs:
            raise ValueError("no specs to scan")
        self.scan_limit_index = scan_limit_index
        self.max_left = max(s.max_left for s in self.specs)
        self.max_right = max(s.max_right for s in self.specs)
        self.max_terms = max(s.g for s in self.specs)
        self._buf = np.zeros(0, dtype=np.int64)
        self._buf_base = 1
        self._next = [s.min_index() for s in self.specs]
        self._last = [None] * len(self.specs)
        self._count = [0] * len(self.specs)
        self._first_hold = [None] * len(self.specs)
        self.primes_seen = 0

    def _scan(self, i: int, hi: int) -> None:
        spec = self.specs[i]
        lo = self._next[i]
        if hi < lo:
            return
        buf, base = self._buf, self._buf_base
        off = np.arange(lo, hi + 1, dtype=np.int64) - base
        left = sum(buf[off - c] for c in spec.left)
        right = sum(buf[off + d] for d in spec.right)
        bad = ~spec.mode.holds(left, right)
        nbad = int(np.count_nonzero(bad))
        if nbad:
            self._count[i] += nbad
            self._last[i] = int(np.flatnonzero(bad)[-1]) + lo
        if self._first_hold[i] is None and nbad < len(bad):
            self._first_hold[i] = int(np.flatnonzero(~bad)[0]) + lo
        self._next[i] = hi + 1

    def feed(self, chunk: np.ndarray) -> None:
        if len(chunk) == 0:
            return
        if int(chunk[-1]) > _I64_MAX // self.max_terms:
            raise SumOverflowError("prime sums would overflow 64-bit arithmetic")
        self.primes_seen += len(chunk)
        self._buf = np.concatenate([self._buf, np.asarray(chunk, dtype=np.int64)])
        avail = self._buf_base + len(self._buf) - 1
        for i, spec in enumerate(self.specs):
            hi = avail - spec.max_right
            if self.scan_limit_index is not None:
                hi = min(hi, self.scan_limit_index)
            self._scan(i, hi)
        keep_from = min(self._next) - self.max_left
        drop = max(0, keep_from - self._buf_base)
        if drop:
            self._buf = self._buf[drop:]
            self._buf_base += drop

    def finish(self) -> list[ThresholdResult]:
        results = []
        for i, spec in enumerate(self.specs):
            reachable = self.primes_seen - spec.max_right
            stop = self.scan_limit_index if self.scan_limit_index is not None else reachable
            if stop > reachable:
                raise RangeError(
                    f"scan to n={stop} for {spec} needs p_{stop + spec.max_right}, "
                    f"but only {self.primes_seen} primes were supplied"
                )
            if stop < spec.min_index():
                raise RangeError(f"scan limit {stop} below min_index {spec.min_index()} for {spec}")
            last = self._last[i]
            m = last + 1 if last is not None else spec.min_index()
            results.append(
                ThresholdResult(spec, stop, m, last, self._count[i], self._first_hold[i])
            )
        return results


def scan_thresholds(specs: Iterable[OffsetSpec], source, scan_limit_index: int | None = None) -> list[ThresholdResult]:
    scanner = ThresholdScanner(specs, scan_limit_index)
    for chunk in prime_chunks(source):
        scanner.feed(chunk)
    return scanner.finish()


def empirical_threshold(spec: OffsetSpec, scan_limit_index: int | None, source) -> ThresholdResult:
    """Scan every n in ``[spec.min_index(), scan_limit_index]``.

    ``source`` is a :class:`PrimeTable`, a :class:`SieveConfig`, or any
    iterable of consecutive prime chunks starting at 2. ``None`` as the scan
    limit means "as far as the primes allow".
    """
    return scan_thresholds([spec], source, scan_limit_index)[0]


def threshold_table(c_max: int, d_max: int, scan_limit_index: int | None, source,
                    mode: Mode = Mode.NONSTRICT) -> list[list[ThresholdResult]]:
    """M(c, d) for every ``c <= c_max``, ``d <= d_max`` from a single pass over ``source``."""
    if c_max < 1 or d_max < 1:
        raise InvalidSpecError(f"c_max and d_max must be >= 1, got {c_max}, {d_max}")
    specs = [OffsetSpec.pair(c, d, mode) for c in range(1, c_max + 1) for d in range(1, d_max + 1)]
    flat = scan_thresholds(specs, source, scan_limit_index)
    return [flat[r * d_max : (r + 1) * d_max] for r in range(c_max)]


def m_values(table: list[list[ThresholdResult]]) -> list[list[int]]:
    return [[cell.m_value for cell in row] for row in table]


def table_to_csv(table: list[list[ThresholdResult]]) -> str:
    d_max = len(table[0])
    lines = ["c\\d," + ",".join(str(d) for d in range(1, d_max + 1))]
    for c, row in enumerate(table, start=1):
        lines.append(f"{c}," + ",".join(str(cell.m_value) for cell in row))
    return "\n".join(lines) + "\n"


def table_to_json_obj(table: list[list[ThresholdResult]]) -> dict:
    first = table[0][0]
    return {
        "mode": first.spec.mode.value,
        "c_max": len(table),
        "d_max": len(table[0]),
        "rows": [
            [
                {
                    "c": c,
                    "d": d,
                    "m": cell.m_value,
                    "last_violation": cell.last_violation_index,
                    "violations": cell.violation_count,
                    "first_hold": cell.first_hold_index,
                    "scan_limit_index": cell.scan_limit_index,
                }
                for d, cell in enumerate(row, start=1)
            ]
            for c, row in enumerate(table, start=1)
        ],
    }
