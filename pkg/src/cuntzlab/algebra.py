"""The dense *-subalgebra spanned by products i(x) i(y)*.

Elements are finite sums  sum c * e(s;j) e(t;l)'  with scalar coefficients
from the system's field.  Multiplication rewrites inner products of adjoint
pairs back into the spanning family:

    i(y')* i(x')  =  sum_{x in B_s, y in B_t} <x'.y, y'.x> i(x) i(y)*

(s the fiber of x', t the fiber of y'), which for basis monomials leaves at
most dim(s) surviving terms along a stride.  Zero and equality testing go
through ``normal_form``: per degree g = p(x) - p(y), every term is raised to
the common bidegree (c, c - g), c the coordinatewise max of the left fibers,
using xy* = sum_f (x.f)(y.f)* over the basis of the missing fiber.  The
resulting matrix of coefficients vanishes exactly when the element is zero,
because the monomials at one bidegree are linearly independent whenever the
system admits a nontrivial Cuntz representation - which every twisted
lexicographic system does, and those are the only systems the engine builds.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .system import (
    BasisMonomial,
    Degree,
    Fiber,
    FiberVector,
    SystemSpec,
    add_fibers,
    max_fiber,
    same_system,
    sub_degree,
)


class Term(NamedTuple):
    coeff: object
    left: BasisMonomial
    right: BasisMonomial


def _term_sort_key(t: Term):
    degree = sub_degree(t.left.fiber, t.right.fiber)
    return (degree, t.left.fiber, t.left.index, t.right.index)


class AlgebraElement:
    """An immutable finite sum of terms c * e(left) e(right)'.

    Terms are kept merged, zero-pruned and canonically sorted (by degree,
    then left fiber, then indices), so ``==`` is structural identity of the
    canonical form.  Semantic equality in the algebra is ``equals``.
    """

    __slots__ = ("spec", "terms")

    def __init__(self, spec: SystemSpec, term_map: dict):
        self.spec = spec
        terms = [
            Term(c, x, y) for (x, y), c in term_map.items() if not c.is_zero()
        ]
        terms.sort(key=_term_sort_key)
        self.terms = tuple(terms)

    # -- construction -----------------------------------------------------

    @staticmethod
    def from_terms(spec: SystemSpec, triples: Iterable) -> "AlgebraElement":
        acc: dict = {}
        field = spec.field
        for coeff, x, y in triples:
            c = field.coerce(coeff)
            key = (x, y)
            cur = acc.get(key)
            acc[key] = c if cur is None else cur + c
        return AlgebraElement(spec, acc)

    def is_structurally_zero(self) -> bool:
        return not self.terms

    # -- linear structure ---------------------------------------------------

    def _require_same(self, other: "AlgebraElement"):
        if not same_system(self.spec, other.spec):
            raise ValueError("elements belong to different systems")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._require_same(other)
        acc = {(t.left, t.right): t.coeff for t in self.terms}
        for t in other.terms:
            key = (t.left, t.right)
            cur = acc.get(key)
            acc[key] = t.coeff if cur is None else cur + t.coeff
        return AlgebraElement(self.spec, acc)

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return AlgebraElement(
            self.spec, {(t.left, t.right): -t.coeff for t in self.terms}
        )

    def scaled(self, coeff) -> "AlgebraElement":
        c = self.spec.field.coerce(coeff)
        return AlgebraElement(
            self.spec, {(t.left, t.right): c * t.coeff for t in self.terms}
        )

    def __rmul__(self, other):
        if isinstance(other, AlgebraElement):
            return NotImplemented
        return self.scaled(other)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return self.scaled(other)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(
            self.spec, {(t.right, t.left): t.coeff.conj() for t in self.terms}
        )

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return same_system(self.spec, other.spec) and self.terms == other.terms

    def degrees(self) -> list[Degree]:
        seen = []
        for t in self.terms:
            g = sub_degree(t.left.fiber, t.right.fiber)
            if g not in seen:
                seen.append(g)
        return seen

    def __repr__(self):
        if not self.terms:
            return "AlgebraElement<0>"
        parts = [f"{t.coeff!r}*{t.left!r}{t.right!r}'" for t in self.terms[:4]]
        more = "" if len(self.terms) <= 4 else f" ... ({len(self.terms)} terms)"
        return "AlgebraElement<" + " + ".join(parts) + more + ">"


def zero(spec: SystemSpec) -> AlgebraElement:
    return AlgebraElement(spec, {})


def identity(spec: SystemSpec) -> AlgebraElement:
    e = spec.identity_monomial
    return AlgebraElement(spec, {(e, e): spec.field.one})


def monomial_pair(spec, x: BasisMonomial, y: BasisMonomial, coeff=1) -> AlgebraElement:
    spec.monomial(x.fiber, x.index)
    spec.monomial(y.fiber, y.index)
    return AlgebraElement(spec, {(x, y): spec.field.coerce(coeff)})


def isometry(spec, x: BasisMonomial) -> AlgebraElement:
    """The generator element i(x) = e(x) * identity'."""
    return monomial_pair(spec, x, spec.identity_monomial)


def vector_element(spec, v: FiberVector) -> AlgebraElement:
    """i(v) = sum_j v_j e(fiber;j)."""
    e = spec.identity_monomial
    return AlgebraElement.from_terms(
        spec,
        (
            (c, BasisMonomial(v.fiber, j), e)
            for j, c in enumerate(v.coeffs)
            if not c.is_zero()
        ),
    )


def vector_projection(spec, v: FiberVector) -> AlgebraElement:
    """The rank-one projection i(v) i(v)* / <v, v> (v need not be a unit)."""
    norm = spec.inner(v, v)
    if norm.is_zero():
        raise ValueError("cannot project along the zero vector")
    inv = norm.inv()
    acc: dict = {}
    for j, a in enumerate(v.coeffs):
        if a.is_zero():
            continue
        for l, b in enumerate(v.coeffs):
            if b.is_zero():
                continue
            acc[(BasisMonomial(v.fiber, j), BasisMonomial(v.fiber, l))] = (
                inv * a * b.conj()
            )
    return AlgebraElement(spec, acc)


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return a.adjoint()


# ---------------------------------------------------------------------------
# multiplication
# ---------------------------------------------------------------------------


def rewrite_pair(
    spec: SystemSpec, y_prime: BasisMonomial, x_prime: BasisMonomial
) -> AlgebraElement:
    """Expand i(y')* i(x') in the spanning family.

    When the fibers agree this collapses to <x'|y'> times the identity.
    Otherwise the surviving terms are exactly the basis pairs (x, y) with
    index(x'.y) == index(y'.x), each carrying the phase
    omega(s,t) * conj(omega(t,s)).
    """
    s, t = x_prime.fiber, y_prime.fiber
    field = spec.field
    if s == t:
        if x_prime.index != y_prime.index:
            return zero(spec)
        return identity(spec)
    dim_s, dim_t = spec.dim(s), spec.dim(t)
    phase = spec.multiplier(s, t) * spec.multiplier(t, s).conj()
    base = y_prime.index * dim_s - x_prime.index * dim_t
    acc: dict = {}
    for lx in range(dim_s):
        ly = base + lx
        if 0 <= ly < dim_t:
            acc[(BasisMonomial(s, lx), BasisMonomial(t, ly))] = phase
    return AlgebraElement(spec, acc)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._require_same(b)
    spec = a.spec
    field = spec.field
    acc: dict = {}
    rewrite_cache: dict = {}
    for ta in a.terms:
        for tb in b.terms:
            key = (ta.right, tb.left)
            mid = rewrite_cache.get(key)
            if mid is None:
                mid = rewrite_cache[key] = rewrite_pair(spec, ta.right, tb.left)
            c_ab = ta.coeff * tb.coeff
            for tm in mid.terms:
                ph_l, x = spec.mul_basis(ta.left, tm.left)
                ph_r, y = spec.mul_basis(tb.right, tm.right)
                coeff = c_ab * tm.coeff * ph_l * ph_r.conj()
                cur = acc.get((x, y))
                acc[(x, y)] = coeff if cur is None else cur + coeff
    return AlgebraElement(spec, acc)


# ---------------------------------------------------------------------------
# normal form
# ---------------------------------------------------------------------------


class NormalForm:
    """Canonical matrix data of an element: per degree g a block (c, matrix)
    with matrix[j][l] the coefficient of e(c;j) e(c-g;l)'.

    All-zero blocks are dropped, so the element is zero in the algebra
    exactly when ``blocks`` is empty.
    """

    __slots__ = ("spec", "blocks")

    def __init__(self, spec: SystemSpec, blocks: dict):
        self.spec = spec
        self.blocks = blocks  # degree -> (c, tuple of row tuples)

    def is_zero(self) -> bool:
        return not self.blocks

    def block(self, degree: Degree):
        return self.blocks.get(tuple(degree))

    def __repr__(self):
        keys = ", ".join(str(k) for k in sorted(self.blocks))
        return f"NormalForm<degrees: {keys or '0 (empty)'}>"


def normal_form(a: AlgebraElement) -> NormalForm:
    spec = a.spec
    field = spec.field
    by_degree: dict[Degree, list[Term]] = {}
    for t in a.terms:
        by_degree.setdefault(sub_degree(t.left.fiber, t.right.fiber), []).append(t)

    blocks: dict = {}
    for degree, terms in sorted(by_degree.items()):
        c = terms[0].left.fiber
        for t in terms[1:]:
            c = max_fiber(c, t.left.fiber)
        c_right = sub_degree(c, degree)  # in N^k since c >= every left fiber
        rows, cols = spec.dim(c), spec.dim(tuple(c_right))
        matrix = [[field.zero] * cols for _ in range(rows)]
        for t in terms:
            raise_by = sub_degree(c, t.left.fiber)
            fill = spec.dim(tuple(raise_by))
            phase = (
                spec.multiplier(t.left.fiber, tuple(raise_by))
                * spec.multiplier(t.right.fiber, tuple(raise_by)).conj()
            )
            coeff = t.coeff * phase
            row0 = t.left.index * fill
            col0 = t.right.index * fill
            for f in range(fill):
                row, col = row0 + f, col0 + f
                matrix[row][col] = matrix[row][col] + coeff
        if any(not x.is_zero() for row in matrix for x in row):
            blocks[degree] = (c, tuple(tuple(row) for row in matrix))
    return NormalForm(spec, blocks)


def expand_normal_form(nf: NormalForm) -> AlgebraElement:
    """Rebuild an element from its normal form blocks."""
    spec = nf.spec
    triples = []
    for degree, (c, matrix) in nf.blocks.items():
        c_right = tuple(sub_degree(c, degree))
        for j, row in enumerate(matrix):
            for l, coeff in enumerate(row):
                if not coeff.is_zero():
                    triples.append(
                        (coeff, BasisMonomial(c, j), BasisMonomial(c_right, l))
                    )
    return AlgebraElement.from_terms(spec, triples)


def equals(a: AlgebraElement, b: AlgebraElement) -> bool:
    """Equality in the algebra: structural fast path, then normal form."""
    a._require_same(b)
    if a.terms == b.terms:
        return True
    return normal_form(a - b).is_zero()


# ---------------------------------------------------------------------------
# gauge expectation and shift endomorphisms
# ---------------------------------------------------------------------------


def gauge_expectation(a: AlgebraElement) -> AlgebraElement:
    """Projection onto the degree-zero terms (the gauge-invariant part)."""
    acc = {
        (t.left, t.right): t.coeff
        for t in a.terms
        if t.left.fiber == t.right.fiber
    }
    return AlgebraElement(a.spec, acc)


def shift_endomorphism(a: AlgebraElement, s) -> AlgebraElement:
    """sum over the basis f of the fiber s of  i(f) a i(f)*."""
    spec = a.spec
    s = spec.check_fiber(s)
    acc: dict = {}
    for f in range(spec.dim(s)):
        fmon = BasisMonomial(s, f)
        for t in a.terms:
            ph_l, x = spec.mul_basis(fmon, t.left)
            ph_r, y = spec.mul_basis(fmon, t.right)
            coeff = t.coeff * ph_l * ph_r.conj()
            cur = acc.get((x, y))
            acc[(x, y)] = coeff if cur is None else cur + coeff
    return AlgebraElement(spec, acc)
