"""The spanned *-algebra: products, normal forms, expectation, shifts."""

import math
from fractions import Fraction

import pytest

from cuntzlab import algebra, scalars, steprep
from cuntzlab.algebra import (
    adjoint,
    equals,
    expand_normal_form,
    gauge_expectation,
    identity,
    isometry,
    monomial_pair,
    multiply,
    normal_form,
    rewrite_pair,
    shift_endomorphism,
    vector_element,
    vector_projection,
    zero,
)
from cuntzlab.linalg import is_positive_semidefinite
from cuntzlab.system import BasisMonomial, SystemSpec

from conftest import random_element, random_monomial


def _cuntz_sum(spec, fiber):
    acc = zero(spec)
    for x in spec.basis(fiber):
        s = isometry(spec, x)
        acc = acc + multiply(s, s.adjoint())
    return acc


class TestRewritePair:
    def test_cross_fiber_survivors(self, e23):
        # i((0,1),2)* i((1,0),1) leaves exactly the aligned diagonal pairs
        out = rewrite_pair(e23, e23.monomial((0, 1), 2), e23.monomial((1, 0), 1))
        expected = monomial_pair(
            e23, e23.monomial((1, 0), 0), e23.monomial((0, 1), 1)
        ) + monomial_pair(e23, e23.monomial((1, 0), 1), e23.monomial((0, 1), 2))
        assert out.terms == expected.terms

    def test_same_fiber_collapse(self, e23):
        x = e23.monomial((1, 0), 0)
        y = e23.monomial((1, 0), 1)
        assert rewrite_pair(e23, x, y).terms == zero(e23).terms
        assert rewrite_pair(e23, x, x).terms == identity(e23).terms

    def test_matches_product_of_isometries(self, e23, rng):
        for _ in range(20):
            xp = random_monomial(e23, rng)
            yp = random_monomial(e23, rng)
            direct = multiply(isometry(e23, yp).adjoint(), isometry(e23, xp))
            assert equals(direct, rewrite_pair(e23, yp, xp))


class TestCuntzRelations:
    def test_isometries(self, e23):
        for fiber in [(1, 0), (0, 1), (1, 1)]:
            for x in e23.basis(fiber):
                s = isometry(e23, x)
                assert equals(multiply(s.adjoint(), s), identity(e23))

    def test_orthogonal_ranges(self, e23):
        x = isometry(e23, e23.monomial((0, 1), 0))
        y = isometry(e23, e23.monomial((0, 1), 2))
        assert equals(multiply(x.adjoint(), y), zero(e23))

    def test_range_sum_is_identity(self, e23):
        for fiber in [(1, 0), (0, 1), (2, 0), (1, 1)]:
            assert equals(_cuntz_sum(e23, fiber), identity(e23))

    def test_product_homomorphism(self, e23, rng):
        for _ in range(20):
            x = random_monomial(e23, rng)
            y = random_monomial(e23, rng)
            _, xy = e23.mul_basis(x, y)
            assert equals(
                multiply(isometry(e23, x), isometry(e23, y)), isometry(e23, xy)
            )

    def test_commutation_twisted(self, tw14):
        # U V = zeta_4 V U for U = i((0,1);0), V = i((1,0);0)
        k4 = scalars.cyclotomic_field(4)
        u = isometry(tw14, tw14.monomial((0, 1), 0))
        v = isometry(tw14, tw14.monomial((1, 0), 0))
        lhs = multiply(u, v)
        rhs = multiply(v, u).scaled(k4.zeta_power(1))
        assert equals(lhs, rhs)
        assert not equals(multiply(u, v), multiply(v, u))


class TestStarAlgebraAxioms:
    def test_random_associativity(self, e23, rng):
        for _ in range(8):
            a = random_element(e23, rng)
            b = random_element(e23, rng)
            c = random_element(e23, rng)
            assert equals(multiply(multiply(a, b), c), multiply(a, multiply(b, c)))

    def test_random_distributivity(self, e23, rng):
        for _ in range(8):
            a = random_element(e23, rng)
            b = random_element(e23, rng)
            c = random_element(e23, rng)
            assert equals(multiply(a, b + c), multiply(a, b) + multiply(a, c))

    def test_adjoint_reverses_products(self, e23, rng):
        for _ in range(8):
            a = random_element(e23, rng)
            b = random_element(e23, rng)
            assert equals(multiply(a, b).adjoint(), multiply(b.adjoint(), a.adjoint()))

    def test_adjoint_involution_and_conjugation(self, e23, rng):
        a = random_element(e23, rng)
        assert adjoint(adjoint(a)).terms == a.terms
        lam = scalars.RationalComplex(0, 1)
        assert a.scaled(lam).adjoint().terms == a.adjoint().scaled(lam.conj()).terms

    def test_twisted_associativity(self, tw23, rng):
        for _ in range(5):
            a = random_element(tw23, rng)
            b = random_element(tw23, rng)
            c = random_element(tw23, rng)
            assert equals(multiply(multiply(a, b), c), multiply(a, multiply(b, c)))


class TestNormalForm:
    def test_cuntz_sum_is_zero(self, e23):
        diff = _cuntz_sum(e23, (0, 1)) - identity(e23)
        assert normal_form(diff).is_zero()
        assert equals(_cuntz_sum(e23, (0, 1)), identity(e23))

    def test_witness_blocks(self, e24):
        # i((2,0);0) - i((0,1);0): one unit entry per degree block
        a = isometry(e24, e24.monomial((2, 0), 0)) - isometry(
            e24, e24.monomial((0, 1), 0)
        )
        nf = normal_form(a)
        assert not nf.is_zero()
        assert set(nf.blocks) == {(2, 0), (0, 1)}
        c, matrix = nf.block((2, 0))
        assert c == (2, 0)
        assert matrix[0][0].is_one()
        assert sum(1 for row in matrix for v in row if not v.is_zero()) == 1

    def test_raising_merges_terms(self, e23):
        # x x* at fiber (1,0) raised into the (1,1) block stays diagonal
        x = e23.monomial((1, 0), 1)
        a = multiply(isometry(e23, x), isometry(e23, x).adjoint())
        b = zero(e23)
        for j in range(3):
            _, m = e23.mul_basis(x, e23.monomial((0, 1), j))
            b = b + multiply(isometry(e23, m), isometry(e23, m).adjoint())
        assert equals(a, b)

    def test_round_trip_random(self, e23, rng):
        for _ in range(10):
            a = random_element(e23, rng, nterms=4)
            assert equals(expand_normal_form(normal_form(a)), a)

    def test_round_trip_twisted(self, tw23, rng):
        for _ in range(6):
            a = random_element(tw23, rng, nterms=3)
            assert equals(expand_normal_form(normal_form(a)), a)

    def test_zero_iff_no_blocks(self, e23):
        assert normal_form(zero(e23)).is_zero()
        assert not normal_form(identity(e23)).is_zero()


class TestEquals:
    def test_trivial_cases(self, e23):
        a = isometry(e23, e23.monomial((1, 0), 0))
        assert equals(a, a)
        assert not equals(a, isometry(e23, e23.monomial((1, 0), 1)))
        assert not equals(a, zero(e23))

    def test_cross_spec_rejected(self, e23, e24):
        with pytest.raises(ValueError):
            equals(identity(e23), identity(e24))


class TestGaugeExpectation:
    def test_keeps_degree_zero_only(self, e23):
        x = e23.monomial((1, 0), 0)
        y = e23.monomial((1, 0), 1)
        a = monomial_pair(e23, x, y) + isometry(e23, x)
        out = gauge_expectation(a)
        assert out.terms == monomial_pair(e23, x, y).terms

    def test_idempotent_and_linear(self, e23, rng):
        a = random_element(e23, rng, nterms=5)
        once = gauge_expectation(a)
        assert gauge_expectation(once).terms == once.terms
        b = random_element(e23, rng, nterms=5)
        assert (
            gauge_expectation(a + b).terms == (gauge_expectation(a) + gauge_expectation(b)).terms
        )

    def test_positive(self, e23, rng):
        # Phi(a* a) has a positive semidefinite degree-zero block
        for _ in range(5):
            a = random_element(e23, rng, nterms=3)
            nf = normal_form(gauge_expectation(multiply(a.adjoint(), a)))
            if nf.is_zero():
                continue
            ((degree, (_, matrix)),) = nf.blocks.items()
            assert degree == (0,) * e23.k
            assert is_positive_semidefinite([list(r) for r in matrix], e23.field)

    def test_contractive_on_monomials(self, e23):
        # expectation of a nonzero-degree monomial pair is zero
        a = monomial_pair(e23, e23.monomial((1, 1), 0), e23.monomial((0, 1), 0))
        assert gauge_expectation(a).terms == zero(e23).terms


class TestShiftEndomorphism:
    def test_zero_shift_is_identity_map(self, e23, rng):
        a = random_element(e23, rng)
        assert equals(shift_endomorphism(a, (0, 0)), a)

    def test_unital(self, e23):
        for s in [(1, 0), (0, 1), (1, 1)]:
            assert equals(shift_endomorphism(identity(e23), s), identity(e23))

    def test_multiplicative(self, e23, rng):
        s = (1, 0)
        for _ in range(5):
            a = random_element(e23, rng)
            b = random_element(e23, rng)
            lhs = shift_endomorphism(multiply(a, b), s)
            rhs = multiply(shift_endomorphism(a, s), shift_endomorphism(b, s))
            assert equals(lhs, rhs)

    def test_semigroup(self, e23, rng):
        a = random_element(e23, rng)
        lhs = shift_endomorphism(shift_endomorphism(a, (0, 1)), (1, 0))
        rhs = shift_endomorphism(a, (1, 1))
        assert equals(lhs, rhs)

    def test_intertwines_isometries(self, e23):
        # alpha_{s+t}(b) i(x) = i(x) alpha_t(b) for x in the fiber over s
        s, t = (1, 0), (0, 1)
        b = monomial_pair(e23, e23.monomial(t, 0), e23.monomial(t, 1))
        x = isometry(e23, e23.monomial(s, 0))
        lhs = multiply(shift_endomorphism(b, (1, 1)), x)
        rhs = multiply(x, shift_endomorphism(b, t))
        assert equals(lhs, rhs)


class TestVectorElements:
    def test_vector_element_linearity(self, e23):
        v = e23.vector((1, 0), [scalars.RationalComplex(2), scalars.RationalComplex(0, 1)])
        elem = vector_element(e23, v)
        manual = isometry(e23, e23.monomial((1, 0), 0)).scaled(
            scalars.RationalComplex(2)
        ) + isometry(e23, e23.monomial((1, 0), 1)).scaled(scalars.RationalComplex(0, 1))
        assert elem.terms == manual.terms

    def test_vector_projection(self, e23):
        v = e23.vector((1, 0), [scalars.RationalComplex(1), scalars.RationalComplex(1)])
        p = vector_projection(e23, v)
        assert equals(multiply(p, p), p)
        assert equals(p.adjoint(), p)
        with pytest.raises(ValueError):
            vector_projection(e23, e23.vector((1, 0), [scalars.RATIONAL.zero] * 2))


class TestAgainstStepModel:
    def test_normal_form_preserves_evaluation(self, e23, rng):
        for _ in range(10):
            a = random_element(e23, rng, nterms=4)
            b = expand_normal_form(normal_form(a))
            level = math.lcm(steprep.minimal_level(a), steprep.minimal_level(b))
            fam_a = steprep.evaluate(a, level)
            fam_b = steprep.evaluate(b, level)
            assert fam_a.equal(fam_b)

    def test_equals_agrees_with_evaluation(self, e23, rng):
        for _ in range(10):
            a = random_element(e23, rng, nterms=3)
            b = random_element(e23, rng, nterms=3)
            level = math.lcm(steprep.minimal_level(a), steprep.minimal_level(b))
            same_eval = steprep.evaluate(a - b, 2 * level).is_zero()
            if equals(a, b):
                assert same_eval
            elif not same_eval:
                assert not equals(a, b)
