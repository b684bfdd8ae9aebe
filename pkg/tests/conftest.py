from fractions import Fraction

import mpmath
import pytest
from hypothesis import HealthCheck, settings

from lib.takagi_core import PrecisionCtx, as_fraction

settings.register_profile(
    "takagi", settings(deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
)
settings.load_profile("takagi")

ORACLE_BITS = 512


def oracle_sp(p, x, terms=400):
    """Plain partial sum of the series at 512 bits, as a float"""
    xq = as_fraction(x)
    pq = as_fraction(p)
    with mpmath.workprec(ORACLE_BITS):
        pm = mpmath.mpf(pq.numerator) / pq.denominator
        total = mpmath.mpf(0)
        for n in range(terms):
            u = xq * 2 ** n
            frac = u - (u.numerator // u.denominator)
            t = min(frac, 1 - frac)
            if t:
                total += (mpmath.mpf(t.numerator) / t.denominator / 2 ** n) ** pm
        return float(total)


def closed_value(expression):
    """Evaluate an mpmath expression at 256 bits and return a float"""
    with mpmath.workprec(256):
        return float(expression())


@pytest.fixture
def ctx():
    return PrecisionCtx()


@pytest.fixture
def third():
    return Fraction(1, 3)
