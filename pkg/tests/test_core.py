"""Matrix core: embeddings, products, corner shifts, normalized trace."""

from fractions import Fraction

import pytest

from cuntzlab import algebra, core, scalars
from cuntzlab.core import (
    core_element,
    core_equal,
    corner_shift,
    embed,
    embed_to,
    format_core,
    from_algebra,
    identity_core,
    multiply_core,
    rank_one_core,
    to_algebra,
    trace,
    twisted_unit,
    zero_core,
)

from conftest import random_coeff


def _random_core(spec, rng, fiber):
    n = spec.dim(fiber)
    return core_element(
        spec, fiber, [[random_coeff(spec, rng) for _ in range(n)] for _ in range(n)]
    )


class TestConstruction:
    def test_shape_validation(self, e23):
        with pytest.raises(ValueError):
            core_element(e23, (1, 0), [[1, 2, 3], [4, 5, 6]])
        ok = core_element(e23, (1, 0), [[1, 2], [3, 4]])
        assert ok.matrix[1][0] == scalars.RationalComplex(3)

    def test_zero_identity(self, e23):
        assert zero_core(e23, (1, 1)).is_zero()
        ident = identity_core(e23, (1, 0))
        assert ident.matrix[0][0].is_one() and ident.matrix[0][1].is_zero()

    def test_rank_one(self, e23):
        u = rank_one_core(e23, e23.monomial((0, 1), 1), e23.monomial((0, 1), 2))
        assert u.matrix[1][2].is_one()
        assert sum(1 for row in u.matrix for v in row if not v.is_zero()) == 1
        with pytest.raises(ValueError):
            rank_one_core(e23, e23.monomial((1, 0), 0), e23.monomial((0, 1), 0))


class TestEmbedding:
    def test_identity_pattern(self, e23):
        # S (x) 1_t: entry (j,l) fans out along the lexicographic pairing
        s = core_element(e23, (1, 0), [[0, 1], [0, 0]])
        out = embed(e23, s, (0, 1))
        assert out.fiber == (1, 1)
        expected = {(q, 3 + q) for q in range(3)}
        nonzero = {
            (i, j)
            for i, row in enumerate(out.matrix)
            for j, v in enumerate(row)
            if not v.is_zero()
        }
        assert nonzero == expected

    def test_embed_to_requires_domination(self, e23):
        s = identity_core(e23, (1, 0))
        assert embed_to(e23, s, (1, 0)) is s
        with pytest.raises(ValueError):
            embed_to(e23, s, (0, 1))

    def test_embedding_respects_algebra_equality(self, e23, rng):
        # the directed system is compatible with the algebra inclusions
        for fiber, step in [((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 1), (1, 0))]:
            a = _random_core(e23, rng, fiber)
            assert algebra.equals(
                to_algebra(e23, embed(e23, a, step)), to_algebra(e23, a)
            )

    def test_embedding_twisted(self, tw23, rng):
        a = _random_core(tw23, rng, (1, 0))
        assert algebra.equals(
            to_algebra(tw23, embed(tw23, a, (0, 1))), to_algebra(tw23, a)
        )

    def test_embed_multiplicative(self, e23, rng):
        a = _random_core(e23, rng, (1, 0))
        b = _random_core(e23, rng, (1, 0))
        prod = multiply_core(e23, a, b)
        lhs = embed(e23, prod, (0, 1))
        rhs = multiply_core(e23, embed(e23, a, (0, 1)), embed(e23, b, (0, 1)))
        assert core_equal(e23, lhs, rhs)


class TestAlgebraRoundTrip:
    def test_round_trip(self, e23, rng):
        a = _random_core(e23, rng, (1, 1))
        back = from_algebra(to_algebra(e23, a))
        assert core_equal(e23, a, back)

    def test_from_algebra_rejects_degree(self, e23):
        a = algebra.isometry(e23, e23.monomial((1, 0), 0))
        with pytest.raises(ValueError):
            from_algebra(a)

    def test_from_algebra_merges_fibers(self, e23):
        # terms at fibers (1,0) and (0,1) meet in the (1,1) matrix algebra
        x = e23.monomial((1, 0), 0)
        y = e23.monomial((0, 1), 2)
        a = algebra.monomial_pair(e23, x, x) + algebra.monomial_pair(e23, y, y)
        out = from_algebra(a)
        assert out.fiber == (1, 1)
        assert algebra.equals(to_algebra(e23, out), a)

    def test_zero_element(self, e23):
        assert from_algebra(algebra.zero(e23)).is_zero()


class TestMultiplication:
    def test_matches_algebra_product(self, e23, rng):
        for fa, fb in [((1, 0), (1, 0)), ((1, 0), (0, 1)), ((1, 1), (1, 0))]:
            a = _random_core(e23, rng, fa)
            b = _random_core(e23, rng, fb)
            prod = multiply_core(e23, a, b)
            assert algebra.equals(
                to_algebra(e23, prod),
                algebra.multiply(to_algebra(e23, a), to_algebra(e23, b)),
            )

    def test_matches_algebra_product_twisted(self, tw23, rng):
        a = _random_core(tw23, rng, (1, 0))
        b = _random_core(tw23, rng, (0, 1))
        prod = multiply_core(tw23, a, b)
        assert algebra.equals(
            to_algebra(tw23, prod),
            algebra.multiply(to_algebra(tw23, a), to_algebra(tw23, b)),
        )

    def test_identity_neutral(self, e23, rng):
        a = _random_core(e23, rng, (1, 0))
        assert core_equal(e23, multiply_core(e23, a, identity_core(e23, (0, 1))), a)


class TestCornerShift:
    def test_unit_relation(self, tw23):
        # u_s u_t = omega(s, t) u_(s+t)
        s, t = (1, 0), (0, 1)
        phase, prod = tw23.mul_basis(twisted_unit(tw23, s), twisted_unit(tw23, t))
        assert prod == twisted_unit(tw23, (1, 1))
        assert phase == tw23.multiplier(s, t)

    def test_agrees_with_isometry_conjugation(self, e23, rng):
        for r in [(1, 0), (0, 1)]:
            a = _random_core(e23, rng, (1, 0))
            u = algebra.isometry(e23, twisted_unit(e23, r))
            lhs = to_algebra(e23, corner_shift(e23, a, r))
            rhs = algebra.multiply(
                algebra.multiply(u, to_algebra(e23, a)), u.adjoint()
            )
            assert algebra.equals(lhs, rhs)

    def test_agrees_with_isometry_conjugation_twisted(self, tw23, rng):
        a = _random_core(tw23, rng, (0, 1))
        u = algebra.isometry(tw23, twisted_unit(tw23, (1, 0)))
        lhs = to_algebra(tw23, corner_shift(tw23, a, (1, 0)))
        rhs = algebra.multiply(algebra.multiply(u, to_algebra(tw23, a)), u.adjoint())
        assert algebra.equals(lhs, rhs)

    def test_semigroup(self, e23, rng):
        a = _random_core(e23, rng, (1, 0))
        twice = corner_shift(e23, corner_shift(e23, a, (0, 1)), (1, 0))
        # composing unit corners multiplies the units, so this is the
        # (1,1)-corner up to the unit pairing
        once = corner_shift(e23, a, (1, 1))
        assert algebra.equals(to_algebra(e23, twice), to_algebra(e23, once))


class TestTrace:
    def test_normalized(self, e23):
        assert trace(e23, identity_core(e23, (1, 1))).is_one()
        assert trace(e23, zero_core(e23, (1, 0))).is_zero()

    def test_embedding_invariant(self, e23, rng):
        a = _random_core(e23, rng, (1, 0))
        assert trace(e23, a) == trace(e23, embed(e23, a, (0, 1)))

    def test_tracial_on_products(self, e23, rng):
        a = _random_core(e23, rng, (1, 0))
        b = _random_core(e23, rng, (1, 0))
        lhs = trace(e23, multiply_core(e23, a, b))
        rhs = trace(e23, multiply_core(e23, b, a))
        assert (lhs - rhs).is_zero()

    def test_rank_one_value(self, e23):
        u = rank_one_core(e23, e23.monomial((0, 1), 1), e23.monomial((0, 1), 1))
        assert trace(e23, u) == scalars.RATIONAL.coerce(Fraction(1, 3))


class TestFormatting:
    def test_dense(self, e23):
        s = core_element(e23, (1, 0), [[1, 0], [0, 1]])
        lines = format_core(s, print_scalar=lambda v: str(v.re)).splitlines()
        assert lines == ["1 0", "0 1"]

    def test_sparse_above_threshold(self):
        from cuntzlab.system import SystemSpec

        spec = SystemSpec((3,))
        s = identity_core(spec, (4,))  # 81x81
        text = format_core(s, print_scalar=lambda v: str(v.re))
        head = text.splitlines()[0].split()
        assert head == ["81", "81", "81"]
