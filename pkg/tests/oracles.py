"""Pure-Python reference implementations, independent of the numpy code paths."""

import math


def naive_primes_below(limit):
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit - 1) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, limit, i)))
    return [i for i, f in enumerate(flags) if f]


def naive_threshold(left, right, strict, primes, scan_limit_index):
    """(m, last_violation, count) recomputing every sum from a flat 0-based list."""
    p = [None] + list(primes)
    last, count = None, 0
    for n in range(max(left) + 1, scan_limit_index + 1):
        ls = sum(p[n - c] for c in left)
        rs = sum(p[n + d] for d in right)
        ok = ls > rs if strict else ls >= rs
        if not ok:
            last, count = n, count + 1
    m = last + 1 if last is not None else max(left) + 1
    return m, last, count


def naive_max_run(c, d, primes, end_index):
    p = [None] + list(primes)
    best = run = 0
    prev = None
    for n in range(c + 1, end_index + 1):
        v = p[n - c] + p[n] - p[n + d]
        run = run + 1 if v == prev else 1
        prev = v
        best = max(best, run)
    return best
