"""Certified least-N values from Rosser-Schoenfeld prime bounds.

With ``lower(x) = x ln x`` (below p_x for x >= 1) and
``upper(x) = x (ln x + ln ln x)`` (above p_x for x >= 6), the bound gap

    F(n) = sum_i lower(n - c_i) - sum_j upper(n + d_j)

being positive proves the strict prime inequality at ``n``. A certificate
combines three pieces:

1. ``n0``, the least n (with every bound argument >= 6) where F(n) > 0;
2. a witness ``x*`` such that F(n) > 0 on every integer in ``[n0, x*]`` by
   direct evaluation, and a lower bound on F'(x) that is positive at x* and
   increasing from there on, so F stays positive for all n >= x*;
3. an exact scan of real primes over ``[min_index, n0]``.

The derivative witness in step 2 is this package's own construction for
making "the left side grows faster" checkable.

Floating-point verdicts use an error budget ``1e-6 * (g + h) * largest term``.
Values inside the band are recomputed with mpmath at 50 digits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import CertificationFailedError, PreconditionError, RangeError, SearchExhaustedError
from .postulate_core import OffsetSpec
from .prime_engine import PrimeTable

DEFAULT_CEILING = 10**9
RS_UPPER_FLOOR = 6
_REL_EPS = 1e-6
_INV_LN6 = 1.0 / math.log(6.0)
_CHUNK = 1 << 20


def lower_bound(x: float) -> float:
    """x ln x, strictly below p_x for every x >= 1."""
    return x * math.log(x)


def upper_bound(x: float) -> float:
    """x (ln x + ln ln x), strictly above p_x for every x >= 6."""
    lx = math.log(x)
    return x * (lx + math.log(lx))


def _check_domain(spec: OffsetSpec, n: int) -> None:
    if n - spec.max_left < RS_UPPER_FLOOR:
        raise PreconditionError(
            f"bound gap needs n - max(c) >= {RS_UPPER_FLOOR}, got n={n} for {spec}"
        )


def bound_gap(spec: OffsetSpec, n: int) -> float:
    _check_domain(spec, n)
    terms = [lower_bound(n - c) for c in spec.left] + [-upper_bound(n + d) for d in spec.right]
    return math.fsum(terms)


def _bound_gap_mp(spec: OffsetSpec, n: int) -> mpmath.mpf:
    with mpmath.workdps(50):
        left = mpmath.fsum((n - c) * mpmath.log(n - c) for c in spec.left)
        right = mpmath.fsum(
            (n + d) * (mpmath.log(n + d) + mpmath.log(mpmath.log(n + d))) for d in spec.right
        )
        return left - right


def _eps(spec: OffsetSpec, n) -> float:
    x = n + spec.max_right
    return _REL_EPS * (spec.g + spec.h) * x * (np.log(x) + np.log(np.log(x)))


def gap_sign(spec: OffsetSpec, n: int) -> int:
    """Sign of F(n): +1, -1, or 0 (only if F vanishes to 50 digits)."""
    f = bound_gap(spec, n)
    eps = float(_eps(spec, n))
    if f > eps:
        return 1
    if f < -eps:
        return -1
    exact = _bound_gap_mp(spec, n)
    return int(mpmath.sign(exact))


def _gap_array(spec: OffsetSpec, lo: int, hi: int) -> np.ndarray:
    n = np.arange(lo, hi + 1, dtype=np.float64)
    out = np.zeros_like(n)
    for c in spec.left:
        x = n - c
        out += x * np.log(x)
    for d in spec.right:
        x = n + d
        lx = np.log(x)
        out -= x * (lx + np.log(lx))
    return out


def _sign_array(spec: OffsetSpec, lo: int, hi: int) -> np.ndarray:
    f = _gap_array(spec, lo, hi)
    eps = _eps(spec, np.arange(lo, hi + 1, dtype=np.float64))
    sign = np.where(f > eps, 1, np.where(f < -eps, -1, 0)).astype(np.int8)
    for k in np.flatnonzero(sign == 0).tolist():
        sign[k] = int(mpmath.sign(_bound_gap_mp(spec, lo + k)))
    return sign


def _first_positive(spec: OffsetSpec, lo: int, hi: int) -> int | None:
    for a in range(lo, hi + 1, _CHUNK):
        b = min(hi, a + _CHUNK - 1)
        pos = np.flatnonzero(_sign_array(spec, a, b) > 0)
        if len(pos):
            return a + int(pos[0])
    return None


def _first_nonpositive(spec: OffsetSpec, lo: int, hi: int) -> int | None:
    for a in range(lo, hi + 1, _CHUNK):
        b = min(hi, a + _CHUNK - 1)
        bad = np.flatnonzero(_sign_array(spec, a, b) <= 0)
        if len(bad):
            return a + int(bad[0])
    return None


def find_crossover(spec: OffsetSpec, ceiling: int = DEFAULT_CEILING, start: int | None = None) -> int:
    """Least n >= max(c) + 6 (and >= ``start``) with F(n) > 0.

    Doubling locates some positive point, bisection narrows it to a sign
    change, and a linear pass from the floor confirms nothing smaller works.
    """
    floor = spec.max_left + RS_UPPER_FLOOR
    if start is not None:
        floor = max(floor, start)
    if floor > ceiling:
        raise SearchExhaustedError(f"search floor {floor} above ceiling {ceiling}")

    hi = floor
    if gap_sign(spec, hi) <= 0:
        lo = hi
        while True:
            hi = min(2 * hi, ceiling)
            if gap_sign(spec, hi) > 0:
                break
            if hi == ceiling:
                raise SearchExhaustedError(f"no crossover for {spec} below {ceiling}")
            lo = hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if gap_sign(spec, mid) > 0:
                hi = mid
            else:
                lo = mid
    first = _first_positive(spec, floor, hi)
    assert first is not None
    return first


def derivative_lower_bound(spec: OffsetSpec, x: float) -> float:
    """Lower bound on F'(x) for x with x - max(c) >= 6.

    Each left term's derivative ln(x-c)+1 is replaced by its smallest value
    ln(x-max c)+1; each right term's ln(y)+ln ln(y)+1+1/ln(y) by its largest,
    with y = x+max d and 1/ln(y) <= 1/ln 6.
    """
    g, h = spec.g, spec.h
    y = x + spec.max_right
    ly = math.log(y)
    return g * (math.log(x - spec.max_left) + 1) - h * (ly + math.log(ly) + 1 + _INV_LN6)


def _bound_increasing_from(spec: OffsetSpec) -> int:
    # d/dx of derivative_lower_bound is g/(x-C) - h(1 + 1/ln y)/y with y = x+D;
    # since g/(x-C) >= g/y this is positive once ln y > h/(g-h).
    g, h = spec.g, spec.h
    x = max(spec.max_left + RS_UPPER_FLOOR, math.floor(math.exp(h / (g - h))) - spec.max_right)
    while not math.log(x + spec.max_right) > h / (g - h):
        x += 1
    return x


def _derivative_positive(spec: OffsetSpec, x: int) -> bool:
    v = derivative_lower_bound(spec, x)
    if v > 1e-9 * max(1.0, abs(v)):
        return True
    if v < -1e-6:
        return False
    with mpmath.workdps(50):
        y = mpmath.mpf(x + spec.max_right)
        exact = spec.g * (mpmath.log(x - spec.max_left) + 1) - spec.h * (
            mpmath.log(y) + mpmath.log(mpmath.log(y)) + 1 + 1 / mpmath.log(6)
        )
        return exact > 0


def certify_persistence(spec: OffsetSpec, n0: int, ceiling: int = DEFAULT_CEILING) -> int:
    """Return the witness x* >= n0 (see module docstring).

    Raises :class:`CertificationFailedError` with ``index`` set to the first n
    in ``[n0, x*]`` where F(n) <= 0, or with ``index=None`` if no witness
    exists below ``ceiling``.
    """
    if gap_sign(spec, n0) <= 0:
        raise PreconditionError(f"F({n0}) is not positive for {spec}")
    x = max(n0, _bound_increasing_from(spec))
    if not _derivative_positive(spec, x):
        lo, hi = x, x
        while not _derivative_positive(spec, hi):
            if hi >= ceiling:
                raise CertificationFailedError(
                    f"derivative bound for {spec} not positive below {ceiling}"
                )
            lo, hi = hi, min(2 * hi, ceiling)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _derivative_positive(spec, mid):
                hi = mid
            else:
                lo = mid
        x = hi
    bad = _first_nonpositive(spec, n0, x)
    if bad is not None:
        raise CertificationFailedError(
            f"F({bad}) <= 0 inside [{n0}, {x}] for {spec}", index=bad
        )
    return x


@dataclass(frozen=True)
class CrossoverCertificate:
    spec: OffsetSpec
    crossover_index: int
    certified_least_n: int
    margin_window: int
    derivative_witness_x: int
    scan_record: tuple[int, ...]
    derivative_bound_at_witness: float = 0.0
    bound_values_sampled: tuple[tuple[int, float], ...] = field(default=(), repr=False)

    @property
    def n0(self) -> int:
        return self.crossover_index

    def to_dict(self) -> dict:
        return {
            "spec": {"left": list(self.spec.left), "right": list(self.spec.right)},
            "mode": self.spec.mode.value,
            "n0": self.crossover_index,
            "x_star": self.derivative_witness_x,
            "margin_window": self.margin_window,
            "derivative_bound_at_x_star": self.derivative_bound_at_witness,
            "violations": list(self.scan_record),
            "certified_least_n": self.certified_least_n,
            "bound_values_sampled": [{"n": n, "F": f} for n, f in self.bound_values_sampled],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _violations(spec: OffsetSpec, lo: int, hi: int, table: PrimeTable) -> list[int]:
    if hi < lo:
        return []
    table.require_index(hi + spec.max_right)
    p = table.primes
    n = np.arange(lo, hi + 1)
    left = sum(p[n - 1 - c] for c in spec.left)
    right = sum(p[n - 1 + d] for d in spec.right)
    bad = ~spec.mode.holds(left, right)
    return (n[bad]).tolist()


def certified_least_n(spec: OffsetSpec, table: PrimeTable, ceiling: int = DEFAULT_CEILING) -> CrossoverCertificate:
    start = None
    while True:
        n0 = find_crossover(spec, ceiling, start)
        try:
            x_star = certify_persistence(spec, n0, ceiling)
            break
        except CertificationFailedError as exc:
            if exc.index is None:
                raise
            start = exc.index + 1

    if n0 + spec.max_right > table.max_index:
        raise RangeError(
            f"certificate scan needs p_{n0 + spec.max_right}; table has {table.max_index} primes"
        )
    lo = spec.min_index()
    record = _violations(spec, lo, n0, table)
    least = max(lo, 1 + max(record)) if record else lo

    samples = sorted({n for n in (n0 - 1, n0, (n0 + x_star) // 2, x_star) if n - spec.max_left >= RS_UPPER_FLOOR})
    return CrossoverCertificate(
        spec=spec,
        crossover_index=n0,
        certified_least_n=least,
        margin_window=x_star - n0 + 1,
        derivative_witness_x=x_star,
        scan_record=tuple(record),
        derivative_bound_at_witness=derivative_lower_bound(spec, x_star),
        bound_values_sampled=tuple((n, bound_gap(spec, n)) for n in samples),
    )


def check_rs_bounds(table: PrimeTable, n_max: int | None = None) -> dict:
    """Compare both bounds against sieved primes for 1 <= n <= n_max.

    Returns violation lists (expected empty) for the lower bound on
    ``[1, n_max]`` and the upper bound on ``[6, n_max]``.
    """
    if n_max is None:
        n_max = table.max_index
    table.require_index(n_max)
    p = table.primes[:n_max].astype(np.float64)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    lower = n * np.log(n)
    with np.errstate(invalid="ignore", divide="ignore"):
        upper = n * (np.log(n) + np.log(np.log(n)))

    def confirm(idx, exact_ok):
        out = []
        for k in idx.tolist():
            with mpmath.workdps(40):
                if not exact_ok(k + 1, int(table.primes[k])):
                    out.append(k + 1)
        return out

    cand_lo = np.flatnonzero(~(lower < p))
    cand_hi = np.flatnonzero(~(p < upper))
    cand_hi = cand_hi[cand_hi >= RS_UPPER_FLOOR - 1]
    lower_bad = confirm(cand_lo, lambda k, pk: k * mpmath.log(k) < pk)
    upper_bad = confirm(cand_hi, lambda k, pk: pk < k * (mpmath.log(k) + mpmath.log(mpmath.log(k))))
    return {
        "n_max": n_max,
        "lower_checked": n_max,
        "upper_checked": max(0, n_max - RS_UPPER_FLOOR + 1),
        "lower_violations": lower_bad,
        "upper_violations": upper_bad,
    }
