"""The step-function model: exact sparse operators on refinement levels."""

import math
from fractions import Fraction

import pytest

from cuntzlab import algebra, steprep
from cuntzlab.scalars import RATIONAL, FloatComplex, RationalComplex
from cuntzlab.steprep import (
    CharacterTwist,
    LevelError,
    StepOperator,
    UnsupportedRepresentationError,
    basis_step_vector,
    evaluate,
    evaluate_twisted,
    generator_operator,
    inner_step,
    minimal_level,
    refine_vector,
    vector_operator,
)
from cuntzlab.linalg import sparse_identity

from conftest import random_element


def _identity_op(spec, level):
    return StepOperator(level, level, sparse_identity(level, spec.field))


class TestGeneratorOperator:
    def test_stripe_entries(self, e23):
        op = generator_operator(e23, e23.monomial((1, 0), 1), 3)
        assert op.level_in == 3 and op.level_out == 6
        assert op.entries == {(3 + u, u): RATIONAL.one for u in range(3)}

    def test_isometry(self, e23):
        for level in (1, 2, 6):
            op = generator_operator(e23, e23.monomial((0, 1), 2), level)
            assert op.conj_transpose().compose(op).equal(_identity_op(e23, level))

    def test_range_projections_sum_to_identity(self, e23):
        level = 4
        fiber = (1, 1)
        acc = {}
        for x in e23.basis(fiber):
            op = generator_operator(e23, x, level)
            for k, v in op.compose(op.conj_transpose()).entries.items():
                acc[k] = acc.get(k, RATIONAL.zero) + v
        acc = {k: v for k, v in acc.items() if not v.is_zero()}
        assert acc == sparse_identity(level * e23.dim(fiber), RATIONAL)

    def test_product_homomorphism(self, e23):
        x = e23.monomial((1, 0), 0)
        y = e23.monomial((0, 1), 2)
        _, xy = e23.mul_basis(x, y)
        level = 5
        sy = generator_operator(e23, y, level)
        sx = generator_operator(e23, x, level * 3)
        assert sx.compose(sy).equal(generator_operator(e23, xy, level))

    def test_twisted_rejected(self, tw23):
        with pytest.raises(UnsupportedRepresentationError):
            generator_operator(tw23, tw23.monomial((1, 0), 0), 2)


class TestVectorOperator:
    def test_matches_basis_expansion(self, e23):
        v = e23.vector((1, 0), [RationalComplex(2), RationalComplex(0, 1)])
        level = 3
        direct = vector_operator(e23, v, level)
        acc = {}
        for idx, c in enumerate(v.coeffs):
            op = generator_operator(e23, e23.monomial((1, 0), idx), level)
            for k, val in op.entries.items():
                acc[k] = acc.get(k, RATIONAL.zero) + c * val
        assert direct.entries == {k: v for k, v in acc.items() if not v.is_zero()}

    def test_isometry_up_to_norm(self, e23):
        v = e23.vector((1, 0), [RationalComplex(1), RationalComplex(1, 1)])
        op = vector_operator(e23, v, 4)
        gram = op.conj_transpose().compose(op)
        norm = e23.inner(v, v)
        expected = {(j, j): norm for j in range(4)}
        assert gram.entries == expected


class TestEvaluate:
    def test_minimal_level(self, e23):
        a = algebra.monomial_pair(
            e23, e23.monomial((1, 0), 0), e23.monomial((1, 0), 1)
        ) + algebra.monomial_pair(e23, e23.monomial((0, 1), 0), e23.monomial((0, 1), 1))
        assert minimal_level(a) == 6
        assert minimal_level(algebra.identity(e23)) == 1

    def test_level_error(self, e23):
        a = algebra.isometry(e23, e23.monomial((0, 1), 0)).adjoint()
        with pytest.raises(LevelError) as exc:
            evaluate(a, 4)
        assert exc.value.minimal == 3

    def test_homomorphism_on_samples(self, e23, rng):
        for _ in range(8):
            a = random_element(e23, rng, nterms=2)
            b = random_element(e23, rng, nterms=2)
            prod = algebra.multiply(a, b)
            # every output level of b must be a valid base level for a
            mb = minimal_level(b)
            level = minimal_level(a) * mb * mb
            fam_prod = evaluate(prod, level)
            # single-degree pieces compose; compare total block maps instead
            blocks = {}
            fam_b = evaluate(b, level)
            for lv_mid, op_b in fam_b.blocks.items():
                fam_a = evaluate(a, lv_mid)
                for lv_out, op_a in fam_a.blocks.items():
                    cur = blocks.get(lv_out)
                    comp = op_a.compose(op_b)
                    blocks[lv_out] = comp if cur is None else StepOperator(
                        level, lv_out, _merge(cur.entries, comp.entries)
                    )
            for lv, op in fam_prod.blocks.items():
                other = blocks.get(lv)
                if other is None:
                    assert op.is_zero()
                else:
                    assert op.equal(other)
            for lv, op in blocks.items():
                if lv not in fam_prod.blocks:
                    assert op.is_zero()

    def test_adjoint_is_conj_transpose(self, e23, rng):
        from conftest import random_coeff, random_monomial

        for _ in range(10):
            x = random_monomial(e23, rng)
            y = random_monomial(e23, rng)
            coeff = random_coeff(e23, rng)
            if coeff.is_zero():
                continue
            a = algebra.monomial_pair(e23, x, y, coeff)
            level = e23.dim(x.fiber) * e23.dim(y.fiber)
            op = evaluate(a, level).single()
            star = evaluate(a.adjoint(), op.level_out).single()
            assert star.equal(op.conj_transpose())

    def test_faithful_on_witness_free_spec(self, e23):
        # cuntz sum minus identity evaluates to nothing at every level
        acc = algebra.zero(e23)
        for x in e23.basis((0, 1)):
            s = algebra.isometry(e23, x)
            acc = acc + algebra.multiply(s, s.adjoint())
        diff = acc - algebra.identity(e23)
        for level in (3, 6, 9):
            assert evaluate(diff, level).is_zero()

    def test_collision_blind_spot(self, e24):
        # the distinguished model cannot see the dimension collision
        a = algebra.isometry(e24, e24.monomial((2, 0), 0)) - algebra.isometry(
            e24, e24.monomial((0, 1), 0)
        )
        for level in (4, 8, 16):
            assert evaluate(a, level).is_zero()
        assert not algebra.normal_form(a).is_zero()


def _merge(x, y):
    out = dict(x)
    for k, v in y.items():
        cur = out.get(k)
        out[k] = v if cur is None else cur + v
    return {k: v for k, v in out.items() if not v.is_zero()}


class TestCharacterTwist:
    def test_modulus_validation(self):
        with pytest.raises(ValueError):
            CharacterTwist([RationalComplex(2)])
        with pytest.raises(ValueError):
            CharacterTwist([])

    def test_phase(self):
        tw = CharacterTwist([RationalComplex(0, 1), RationalComplex(-1)])
        assert tw.phase((2, 0)) == RationalComplex(-1)
        assert tw.phase((0, 2)) == RationalComplex(1)
        assert tw.phase((-1, 0)) == RationalComplex(0, -1)
        assert tw.phase((0, 0)).is_one()

    def test_twisted_evaluation_separates_witness(self, e24):
        a = algebra.isometry(e24, e24.monomial((2, 0), 0)) - algebra.isometry(
            e24, e24.monomial((0, 1), 0)
        )
        tw = CharacterTwist([RationalComplex(0, 1), RationalComplex(1)])
        assert evaluate(a, 4).is_zero()
        assert not evaluate_twisted(a, tw, 4).is_zero()

    def test_trivial_character_matches_plain(self, e23, rng):
        tw = CharacterTwist([RationalComplex(1), RationalComplex(1)])
        a = random_element(e23, rng, nterms=3)
        level = minimal_level(a)
        assert evaluate_twisted(a, tw, level).equal(evaluate(a, level))

    def test_character_length_checked(self, e23):
        a = algebra.identity(e23)
        with pytest.raises(ValueError):
            evaluate_twisted(a, CharacterTwist([RationalComplex(1)]), 1)

    def test_gauge_invariant_part_unchanged(self, e23, rng):
        a = algebra.gauge_expectation(random_element(e23, rng, nterms=4))
        tw = CharacterTwist([RationalComplex(0, -1), RationalComplex(-1)])
        level = minimal_level(a)
        assert evaluate_twisted(a, tw, level).equal(evaluate(a, level))


class TestStepVectors:
    def test_basis_vector(self, e23):
        v = basis_step_vector(e23, 3, 1)
        assert v.level == 3
        assert v.coeffs[1].is_one() and v.coeffs[0].is_zero()

    def test_refinement_preserves_inner(self, e23):
        v = basis_step_vector(e23, 2, 0)
        w = basis_step_vector(e23, 2, 1)
        before_vv = inner_step(v, v)
        before_vw = inner_step(v, w)
        v4, w4 = refine_vector(v, 3), refine_vector(w, 3)
        # coefficients triple but the norm divisor compensates
        assert inner_step(v4, v4) == before_vv
        assert inner_step(v4, w4) == before_vw

    def test_inner_needs_common_level(self, e23):
        v = basis_step_vector(e23, 2, 0)
        w = basis_step_vector(e23, 4, 0)
        with pytest.raises(ValueError):
            inner_step(v, w)

    def test_conjugate_linear_second_slot(self, e23):
        lam = RationalComplex(0, 1)
        v = basis_step_vector(e23, 2, 0)
        w = steprep.StepVector(2, tuple(lam * c for c in v.coeffs))
        assert inner_step(v, w) == lam.conj() * inner_step(v, v)

    def test_operator_apply(self, e23):
        op = generator_operator(e23, e23.monomial((1, 0), 1), 2)
        v = basis_step_vector(e23, 2, 0)
        out = op.apply(v)
        assert out.level == 4
        assert [c.is_zero() for c in out.coeffs] == [True, True, False, True]


class TestSerialization:
    def test_golden(self, e23):
        op = generator_operator(e23, e23.monomial((1, 0), 1), 2)
        one = repr(RATIONAL.one)
        assert op.serialize().splitlines() == ["4 2 2", f"2 0 {one}", f"3 1 {one}"]

    def test_zero_block(self, e23):
        op = StepOperator(3, 3, {})
        assert op.serialize() == "3 3 0"
