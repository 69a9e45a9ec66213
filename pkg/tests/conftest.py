import random
from fractions import Fraction

import pytest

from cuntzlab import algebra, scalars
from cuntzlab.system import SystemSpec, parse_spec_text


@pytest.fixture
def e23():
    return SystemSpec((2, 3))


@pytest.fixture
def e24():
    return SystemSpec((2, 4))


@pytest.fixture
def tw14():
    # dims (1,1), UV = zeta_4 VU for U = e((0,1);0), V = e((1,0);0)
    return parse_spec_text(
        "k = 2\ndims = 1 1\ntheta = 0 0 1/4 0\nscalars = cyclotomic:4\n"
    )


@pytest.fixture
def tw23():
    return parse_spec_text(
        "k = 2\ndims = 2 3\ntheta = 0 1/4 0 0\nscalars = cyclotomic:4\n"
    )


@pytest.fixture
def rng():
    return random.Random(20260817)


def random_fiber(spec, rng, max_sum=2):
    while True:
        fiber = tuple(rng.randint(0, max_sum) for _ in range(spec.k))
        if sum(fiber) <= max_sum:
            return fiber


def random_monomial(spec, rng, max_sum=2):
    fiber = random_fiber(spec, rng, max_sum)
    return spec.monomial(fiber, rng.randrange(spec.dim(fiber)))


def random_coeff(spec, rng):
    if spec.field is scalars.RATIONAL:
        return scalars.RationalComplex(
            Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
            Fraction(rng.randint(-2, 2), 1),
        )
    if isinstance(spec.field, scalars.CyclotomicField):
        power = rng.randrange(spec.field.order)
        return spec.field.zeta_power(power) * Fraction(
            rng.randint(-3, 3) or 1, rng.randint(1, 3)
        )
    return scalars.FloatComplex(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)))


def random_element(spec, rng, nterms=3, max_sum=2):
    acc = algebra.zero(spec)
    for _ in range(nterms):
        acc = acc + algebra.monomial_pair(
            spec,
            random_monomial(spec, rng, max_sum),
            random_monomial(spec, rng, max_sum),
            random_coeff(spec, rng),
        )
    return acc
