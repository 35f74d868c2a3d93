"""Delta runs, threshold-table probes, sequence export and interval checks.

The run-length survey and the monotonicity probe report evidence only. Both
questions they address are open, so nothing here asserts an answer.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, RangeError
from .postulate_core import ThresholdResult, delta_array
from .prime_engine import PrimeTable

log = logging.getLogger(__name__)

SHEVELEV_K = (1, 2, 3, 5, 9, 14)


class Run(NamedTuple):
    start_index: int
    length: int
    value: int


@dataclass(frozen=True)
class RunReport:
    c: int
    d: int
    start_index: int
    end_index: int
    runs: tuple[Run, ...] = field(repr=False)

    @property
    def max_run_length(self) -> int:
        return max(r.length for r in self.runs)

    def longest(self) -> list[Run]:
        m = self.max_run_length
        return [r for r in self.runs if r.length == m]

    def to_dict(self, include_runs: bool = True) -> dict:
        out = {
            "c": self.c,
            "d": self.d,
            "start_index": self.start_index,
            "end_index": self.end_index,
            "max_run_length": self.max_run_length,
            "longest_runs": [r._asdict() for r in self.longest()],
        }
        if include_runs:
            out["runs"] = [r._asdict() for r in self.runs]
        return out


def _runs(values: np.ndarray, start: int) -> tuple[Run, ...]:
    breaks = np.flatnonzero(np.diff(values)) + 1
    starts = np.concatenate(([0], breaks))
    ends = np.concatenate((breaks, [len(values)]))
    return tuple(
        Run(start + int(a), int(b - a), int(values[a]))
        for a, b in zip(starts.tolist(), ends.tolist())
    )


def delta_runs(c: int, d: int, start_index: int, end_index: int, table: PrimeTable) -> RunReport:
    """Maximal runs of equal delta(c, d, n) for n in [start_index, end_index]."""
    vals = delta_array(c, d, start_index, end_index, table)
    return RunReport(c, d, start_index, end_index, _runs(vals, start_index))


def max_run_survey(c_max: int, d_max: int, scan_limit: int, table: PrimeTable) -> dict:
    """Longest run of identical delta values per (c, d), scanning n up to ``scan_limit``.

    Each cell starts at its own least valid index ``c + 1``.
    """
    cells = {}
    for c in range(1, c_max + 1):
        for d in range(1, d_max + 1):
            vals = delta_array(c, d, c + 1, scan_limit, table)
            breaks = np.flatnonzero(np.diff(vals)) + 1
            lengths = np.diff(np.concatenate(([0], breaks, [len(vals)])))
            k = int(np.argmax(lengths))
            first = int(np.concatenate(([0], breaks))[k])
            cells[(c, d)] = {
                "max_run_length": int(lengths[k]),
                "first_longest_start": c + 1 + first,
                "value": int(vals[first]),
            }
    overall = max(v["max_run_length"] for v in cells.values())
    return {"scan_limit": scan_limit, "cells": cells, "overall_max_run_length": overall}


class MonotonicityViolation(NamedTuple):
    axis: str  # "row": M(c,d) > M(c,d+1); "column": M(c,d) > M(c+1,d)
    cell: tuple[int, int]
    neighbour: tuple[int, int]
    values: tuple[int, int]


def _m(cell) -> int:
    return cell.m_value if isinstance(cell, ThresholdResult) else int(cell)


def monotonicity_probe(table: Sequence[Sequence]) -> list[MonotonicityViolation]:
    """Adjacent cells where M fails to weakly increase along a row or column.

    Accepts ThresholdResult cells or plain integers; (c, d) are 1-based.
    """
    grid = [[_m(x) for x in row] for row in table]
    out = []
    for i, row in enumerate(grid):
        for j, v in enumerate(row):
            if j + 1 < len(row) and v > row[j + 1]:
                out.append(MonotonicityViolation("row", (i + 1, j + 1), (i + 1, j + 2), (v, row[j + 1])))
            if i + 1 < len(grid) and j < len(grid[i + 1]) and v > grid[i + 1][j]:
                out.append(MonotonicityViolation("column", (i + 1, j + 1), (i + 2, j + 1), (v, grid[i + 1][j])))
    return out


@dataclass(frozen=True)
class IntervalCheckReport:
    rule: str
    k: int | None
    n_min: int
    n_max: int
    failures: tuple[int, ...]
    guaranteed: bool = True

    @property
    def verified(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "k": self.k,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "checked": self.n_max - self.n_min + 1,
            "failures": list(self.failures),
            "verified": self.verified,
            "theoretical_guarantee": self.guaranteed,
        }


def _next_primes(ns: np.ndarray, table: PrimeTable) -> np.ndarray:
    idx = np.searchsorted(table.primes, ns, side="right")
    if np.any(idx >= len(table.primes)):
        raise RangeError(f"no prime after {int(ns.max())} below sieve limit {table.limit}")
    return table.primes[idx]


def verify_loo(n_max: int, table: PrimeTable) -> IntervalCheckReport:
    """Check a prime lies in (n, 4(n+2)/3) for every 1 <= n <= n_max, exactly."""
    if n_max < 1:
        raise ConfigError(f"n_max must be >= 1, got {n_max}")
    if Fraction(4 * (n_max + 2), 3) > table.limit:
        raise RangeError(f"Loo check to {n_max} needs primes below {4 * (n_max + 2) / 3:.0f}")
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    p = _next_primes(ns, table)
    # p < 4(n+2)/3  <=>  3p < 4(n+2)
    bad = ns[~(3 * p < 4 * (ns + 2))]
    return IntervalCheckReport("loo", None, 1, n_max, tuple(bad.tolist()))


def verify_shevelev(k: int, n_max: int, table: PrimeTable) -> IntervalCheckReport:
    """Check a prime lies in (k n, (k+1) n) for every 2 <= n <= n_max."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if n_max < 2:
        raise ConfigError(f"n_max must be >= 2, got {n_max}")
    if (k + 1) * n_max > table.limit:
        raise RangeError(f"Shevelev check k={k} to {n_max} needs primes below {(k + 1) * n_max}")
    guaranteed = k in SHEVELEV_K
    if not guaranteed:
        log.warning("k=%d is outside %s: no theoretical guarantee", k, SHEVELEV_K)
    ns = np.arange(2, n_max + 1, dtype=np.int64)
    p = _next_primes(k * ns, table)
    bad = ns[~(p < (k + 1) * ns)]
    return IntervalCheckReport("shevelev", k, 2, n_max, tuple(bad.tolist()), guaranteed)


def verify_theorem2(table: PrimeTable, n_max: int | None = None) -> dict:
    """p[n-1] + p[n] >= p[n+1] for 2 <= n <= n_max; report violations and equalities."""
    if n_max is None:
        n_max = table.max_index - 1
    table.require_index(n_max + 1)
    p = table.primes[: n_max + 1]
    diff = p[:-2] + p[1:-1] - p[2:]  # diff[k] is delta(1, 1, k + 2)
    return {
        "n_min": 2,
        "n_max": n_max,
        "violations": (np.flatnonzero(diff < 0) + 2).tolist(),
        "equalities": (np.flatnonzero(diff == 0) + 2).tolist(),
    }


def export_sequence(row: Sequence[int], fmt: str = "bfile", path=None) -> str:
    """Render a 1-based integer sequence as an OEIS b-file or CSV.

    The b-file is ``"n a(n)"`` per line, newline-terminated, with no trailing
    blank line. Written to ``path`` too when given.
    """
    values = [_m(v) for v in row]
    if not values:
        raise ConfigError("cannot export an empty sequence")
    if fmt == "bfile":
        text = "".join(f"{i} {v}\n" for i, v in enumerate(values, start=1))
    elif fmt == "csv":
        text = "n,a(n)\n" + "".join(f"{i},{v}\n" for i, v in enumerate(values, start=1))
    else:
        raise ConfigError(f"unknown sequence format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    return text
