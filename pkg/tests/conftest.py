import pytest

from artinsums.galois import new_cyclotomic, new_splitting_field
from artinsums.sieve import FactorSieve


@pytest.fixture(scope="session")
def sieve_small():
    """Sieve up to 10^5: enough for all unit tests and exact-mode scans."""
    return FactorSieve(100_000)


@pytest.fixture(scope="session")
def sieve_big():
    """Sieve up to 10^6, shared by the density / acceptance tests."""
    return FactorSieve(1_000_000)


@pytest.fixture(scope="session")
def ctx_c4():
    return new_cyclotomic(4)


@pytest.fixture(scope="session")
def ctx_cubic():
    """Splitting field of x^3 + x + 1 (disc -31, Galois group S_3)."""
    return new_splitting_field([1, 1, 0, 1])
