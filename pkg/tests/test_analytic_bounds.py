import json
import math

import numpy as np
import pytest

from pplb.analytic_bounds import (
    bound_gap,
    certified_least_n,
    certify_persistence,
    check_rs_bounds,
    derivative_lower_bound,
    find_crossover,
    gap_sign,
)
from pplb.errors import PreconditionError, RangeError, SearchExhaustedError
from pplb.postulate_core import Mode, OffsetSpec
from pplb.prime_engine import PrimeTable

S, NS = Mode.STRICT, Mode.NONSTRICT
WORKED = OffsetSpec((0, 1, 2), (1, 2), S)


def gap_oracle(left, right, n):
    lo = sum((n - c) * math.log(n - c) for c in left)
    hi = sum((n + d) * (math.log(n + d) + math.log(math.log(n + d))) for d in right)
    return lo - hi


def crossover_oracle(left, right):
    n = max(left) + 6
    while gap_oracle(left, right, n) <= 0:
        n += 1
    return n


def test_bound_gap_matches_oracle():
    for n in (8, 20, 33, 1000):
        assert bound_gap(WORKED, n) == pytest.approx(gap_oracle((0, 1, 2), (1, 2), n), rel=1e-12, abs=1e-9)


def test_worked_example_crossover():
    assert bound_gap(WORKED, 32) <= 0
    assert bound_gap(WORKED, 33) > 0
    assert find_crossover(WORKED) == 33 == crossover_oracle((0, 1, 2), (1, 2))


def test_bound_gap_domain():
    with pytest.raises(PreconditionError):
        bound_gap(WORKED, 7)
    bound_gap(WORKED, 8)


def test_near_tie_positive_eventually():
    assert bound_gap(OffsetSpec((0, 0), (1,)), 10**4) > 0


@pytest.mark.parametrize(
    "left,right,n0",
    [((0, 0), (1,), 6), ((0, 0, 0), (1, 1), 15), ((0, 1), (1,), 7), ((0, 3), (3,), 16), ((0, 5), (5,), 25)],
)
def test_crossover_pinned(left, right, n0):
    spec = OffsetSpec(left, right)
    assert find_crossover(spec) == n0 == crossover_oracle(left, right)
    if n0 > spec.max_left + 6:
        assert gap_sign(spec, n0 - 1) <= 0


def test_crossover_far_out():
    # three right terms against four left terms cross late
    left, right = (0, 1, 2, 3), (4, 5, 6)
    spec = OffsetSpec(left, right)
    n0 = find_crossover(spec)
    assert n0 == crossover_oracle(left, right) == 329


def test_crossover_ceiling():
    spec = OffsetSpec((0, 1, 2, 3), (4, 5, 6))
    with pytest.raises(SearchExhaustedError):
        find_crossover(spec, ceiling=300)


def test_witness_beyond_crossover():
    spec = OffsetSpec((0, 0, 0, 0), (1, 2, 3))
    n0 = find_crossover(spec)
    x = certify_persistence(spec, n0)
    assert (n0, x) == (185, 466)
    assert derivative_lower_bound(spec, x - 1) <= 0 < derivative_lower_bound(spec, x)


def test_certify_persistence_worked():
    x = certify_persistence(WORKED, 33)
    assert x == 33
    assert derivative_lower_bound(WORKED, x) > 0
    with pytest.raises(PreconditionError):
        certify_persistence(WORKED, 32)


@pytest.mark.parametrize("left,right", [((0, 1, 2), (1, 2)), ((0, 0), (1,)), ((0, 0, 0), (1, 1)), ((0, 0, 0, 0), (1, 2, 3)), ((0, 1, 2, 3), (4, 5, 6)), ((0, 4), (9,))])
def test_derivative_witness_properties(left, right):
    spec = OffsetSpec(left, right)
    n0 = find_crossover(spec)
    x = certify_persistence(spec, n0)
    assert x >= n0
    # positive and growing
    a, b = derivative_lower_bound(spec, x), derivative_lower_bound(spec, 2 * x)
    assert 0 < a < b
    # F positive across [n0, x] by the oracle formula
    assert all(gap_oracle(left, right, n) > 0 for n in range(n0, min(x, n0 + 5000) + 1))
    # derivative bound really is below the true derivative
    for t in (x, 3 * x, 10 * x):
        h = 1e-3 * t
        fd = (gap_oracle(left, right, t + h) - gap_oracle(left, right, t - h)) / (2 * h)
        assert derivative_lower_bound(spec, t) <= fd + 1e-6


def test_certificate_worked_example(table_1e7):
    cert = certified_least_n(WORKED, table_1e7)
    assert cert.n0 == 33
    assert cert.certified_least_n == 10
    assert 9 in cert.scan_record and max(cert.scan_record) == 9
    d = json.loads(cert.to_json())
    assert {"spec", "mode", "n0", "x_star", "violations", "certified_least_n", "bound_values_sampled"} <= d.keys()
    assert d["mode"] == "strict"


@pytest.mark.parametrize(
    "left,right,mode,least",
    [((0, 0), (1,), S, 1), ((0, 1), (1,), S, 3), ((0, 1), (1,), NS, 2)],
)
def test_certificate_special_cases(table_1e7, left, right, mode, least):
    assert certified_least_n(OffsetSpec(left, right, mode), table_1e7).certified_least_n == least


@pytest.mark.parametrize("c,n", [(1, 2), (2, 6), (3, 10), (4, 11), (5, 15)])
def test_certified_diagonal(small_table, c, n):
    assert certified_least_n(OffsetSpec.pair(c, c), small_table).certified_least_n == n


@pytest.mark.parametrize(
    "spec",
    [WORKED, OffsetSpec((0, 0, 0), (1, 1)), OffsetSpec.pair(3, 2), OffsetSpec.pair(6, 6), OffsetSpec((0, 1, 2, 3), (4, 5, 6), NS)],
)
def test_certificate_soundness(table_1e7, spec):
    cert = certified_least_n(spec, table_1e7)
    hi = min(cert.derivative_witness_x, 200_000) + 5000
    p = table_1e7.primes
    n = np.arange(cert.certified_least_n, hi + 1)
    left = sum(p[n - 1 - c] for c in spec.left)
    right = sum(p[n - 1 + d] for d in spec.right)
    assert np.all(spec.mode.holds(left, right))
    assert cert == certified_least_n(spec, table_1e7)


def test_certificate_needs_primes():
    with pytest.raises(RangeError):
        certified_least_n(WORKED, PrimeTable.sieve(100))


def test_difference_not_monotone_after_crossover(small_table):
    p = small_table.primes
    n = np.arange(33, 1001)
    diff = p[n - 1] + p[n - 2] + p[n - 3] - p[n] - p[n + 1]
    assert np.any(np.diff(diff) < 0)


def test_rs_bounds_small(small_table):
    rep = check_rs_bounds(small_table)
    assert rep["lower_violations"] == [] and rep["upper_violations"] == []
    assert rep["n_max"] == 78498


def test_rs_upper_fails_below_six(small_table):
    # p_5 = 11 exceeds 5(ln 5 + ln ln 5), which is why the floor is 6
    n = 5
    assert small_table.prime_at(n) > n * (math.log(n) + math.log(math.log(n)))
