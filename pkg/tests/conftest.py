"""Shared generators for randomized algebra tests."""

from fractions import Fraction

import numpy as np
import pytest

from qvlasov.ring import Coefficient, RingElem

# wavenumbers kept to single pi-terms so every element is integrable
WAVENUMBERS = [
    Coefficient.rational(1),
    Coefficient.rational(2),
    Coefficient.rational(Fraction(3, 2)),
    Coefficient.pi_power(1, 1),
    Coefficient.pi_power(1, 2),
    Coefficient.pi_power(-1, 3),
]


def random_fraction(rng) -> Fraction:
    num = int(rng.integers(-6, 7))
    if num == 0:
        num = 1
    return Fraction(num, int(rng.integers(1, 5)))


def random_coefficient(rng) -> Coefficient:
    total = Coefficient()
    for _ in range(int(rng.integers(1, 3))):
        total = total + Coefficient.pi_power(int(rng.integers(-1, 3)),
                                             random_fraction(rng))
    return total


def random_ring_elem(rng, max_terms: int = 5, max_xpow: int = 4) -> RingElem:
    elem = RingElem.zero()
    for _ in range(int(rng.integers(1, max_terms + 1))):
        xpow = int(rng.integers(0, max_xpow + 1))
        trig = rng.choice([None, "sin", "cos"])
        if trig is None:
            part = RingElem({}) + RingElem.x(xpow).scale(random_coefficient(rng))
        else:
            k = WAVENUMBERS[int(rng.integers(0, len(WAVENUMBERS)))]
            part = RingElem.trig(trig, k, xpow=xpow,
                                 coeff=random_coefficient(rng))
        elem = elem + part
    return elem


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
