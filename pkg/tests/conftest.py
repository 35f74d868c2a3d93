import pytest

from pplb.prime_engine import PrimeTable

from oracles import naive_primes_below


@pytest.fixture(scope="session")
def oracle_primes():
    """Every prime below 10**6 from the pure-Python oracle sieve."""
    return naive_primes_below(10**6)


@pytest.fixture(scope="session")
def small_table():
    return PrimeTable.sieve(10**6)


@pytest.fixture(scope="session")
def table_1e7():
    return PrimeTable.sieve(10**7)


@pytest.fixture(scope="session")
def table_rs():
    # p_1000000 = 15485863
    return PrimeTable.sieve(16_000_000)


@pytest.fixture(scope="session")
def table_1e8():
    return PrimeTable.sieve(10**8)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
