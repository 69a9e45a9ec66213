"""Exact finite model of the distinguished isometry representation.

Level N is the N-dimensional space V_N of step functions on the circle that
are constant on the intervals [i/N, (i+1)/N); its normalized indicator basis
is written e_i^N.  The generator monomial (r, j) acts exactly by

    e_i^N  |->  e_{j*N + i}^{N*dim(r)}

so every operator built from the generators has entries that are exact
scalars (0/1 patterns times coefficients) as long as adjoints only ever land
on integral levels.  ``evaluate`` therefore demands a base level divisible by
each term's right-fiber dimension and reports the minimal valid choice when
refused.  Twisted systems have no step model; evaluation on them is
rejected.

A term x y* with fibers (s, t) maps V_N into V_{N*dim(s)/dim(t)}.  Terms
whose dimension ratios agree land on the same output level and are summed as
matrices -- this is what makes the model blind to degree differences with
equal dimensions, the effect the nonsimplicity witnesses exercise.  Terms at
distinct output levels are reported as separate blocks of an
``OperatorFamily``; they are never summed, because comparing across levels
would need irrational refinement factors.  "Every block zero" is the family's
(sound) zero test.  Equality of step operators at one level only certifies
equality on that level's subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import linalg
from .system import BasisMonomial, FiberVector, SystemSpec, same_system


class UnsupportedRepresentationError(ValueError):
    """Raised when asking for the step model of a twisted system."""


class LevelError(ValueError):
    """Raised when a base level misses a required divisor."""

    def __init__(self, base_level: int, minimal: int):
        super().__init__(
            f"base level {base_level} is not divisible by {minimal}; "
            f"the minimal valid base level is {minimal}"
        )
        self.minimal = minimal


@dataclass(frozen=True)
class StepOperator:
    """A sparse matrix V_(level_in) -> V_(level_out); entries {(row, col): scalar}."""

    level_in: int
    level_out: int
    entries: dict

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.entries.values())

    def nnz(self) -> int:
        return sum(1 for v in self.entries.values() if not v.is_zero())

    def conj_transpose(self) -> "StepOperator":
        return StepOperator(
            self.level_out, self.level_in, linalg.sparse_conj_transpose(self.entries)
        )

    def compose(self, other: "StepOperator") -> "StepOperator":
        """self o other; other's output level must match self's input level."""
        if other.level_out != self.level_in:
            raise ValueError(
                f"cannot compose: inner levels differ "
                f"({other.level_out} vs {self.level_in})"
            )
        return StepOperator(
            other.level_in,
            self.level_out,
            linalg.sparse_matmul(self.entries, other.entries),
        )

    def equal(self, other: "StepOperator") -> bool:
        return (
            self.level_in == other.level_in
            and self.level_out == other.level_out
            and linalg.sparse_equal(self.entries, other.entries)
        )

    def apply(self, vector: "StepVector") -> "StepVector":
        if vector.level != self.level_in:
            raise ValueError(
                f"vector lives at level {vector.level}, operator expects "
                f"{self.level_in}"
            )
        out = [None] * self.level_out
        for (r, c), v in self.entries.items():
            contrib = v * vector.coeffs[c]
            out[r] = contrib if out[r] is None else out[r] + contrib
        zero = _zero_like(vector.coeffs)
        coeffs = tuple(c if c is not None else zero for c in out)
        return StepVector(self.level_out, coeffs, vector.norm_divisor)

    def serialize(self, print_scalar=repr) -> str:
        """Triplet text form: 'N_out N_in nnz' header then 'row col scalar' lines."""
        items = sorted(
            ((r, c, v) for (r, c), v in self.entries.items() if not v.is_zero())
        )
        lines = [f"{self.level_out} {self.level_in} {len(items)}"]
        lines.extend(f"{r} {c} {print_scalar(v)}" for r, c, v in items)
        return "\n".join(lines)


def _zero_like(coeffs):
    # all vectors carry at least one coefficient; reuse its field zero
    return coeffs[0] - coeffs[0]


@dataclass(frozen=True)
class OperatorFamily:
    """Evaluation result: one StepOperator block per output level."""

    base_level: int
    blocks: dict  # level_out -> StepOperator

    def is_zero(self) -> bool:
        return all(op.is_zero() for op in self.blocks.values())

    def single(self) -> StepOperator:
        nonzero = [op for op in self.blocks.values() if not op.is_zero()]
        if not nonzero:
            return StepOperator(self.base_level, self.base_level, {})
        if len(nonzero) > 1:
            raise ValueError(
                "element evaluates to blocks at several output levels: "
                + ", ".join(str(lv) for lv in sorted(self.blocks))
            )
        return nonzero[0]

    def equal(self, other: "OperatorFamily") -> bool:
        if self.base_level != other.base_level:
            return False
        for lv in self.blocks.keys() | other.blocks.keys():
            a, b = self.blocks.get(lv), other.blocks.get(lv)
            if a is None:
                if not b.is_zero():
                    return False
            elif b is None:
                if not a.is_zero():
                    return False
            elif not a.equal(b):
                return False
        return True


def _require_untwisted(spec: SystemSpec):
    if spec.is_twisted:
        raise UnsupportedRepresentationError(
            "the step-function model exists for untwisted systems only"
        )


def generator_operator(spec: SystemSpec, x: BasisMonomial, level: int) -> StepOperator:
    """The monomial isometry at a given level: e_i |-> e_(index*level + i)."""
    _require_untwisted(spec)
    spec.monomial(x.fiber, x.index)
    if level < 1:
        raise ValueError("levels are positive integers")
    one = spec.field.one
    entries = {(x.index * level + i, i): one for i in range(level)}
    return StepOperator(level, level * spec.dim(x.fiber), entries)


def vector_operator(spec: SystemSpec, v, level: int) -> StepOperator:
    """The isometry of a fiber vector at a given level.

    Linear extension of generator_operator: column t holds the vector's
    coefficients in the stripe pattern index*level + t.
    """
    _require_untwisted(spec)
    if level < 1:
        raise ValueError("levels are positive integers")
    entries = {}
    for idx, coeff in enumerate(v.coeffs):
        if coeff.is_zero():
            continue
        for t in range(level):
            entries[(idx * level + t, t)] = coeff
    return StepOperator(level, level * spec.dim(v.fiber), entries)


def minimal_level(a) -> int:
    """Least base level at which every term's adjoint lands integrally."""
    out = 1
    for t in a.terms:
        out = math.lcm(out, a.spec.dim(t.right.fiber))
    return out


def evaluate(a, base_level: int | None = None) -> OperatorFamily:
    """Evaluate an algebra element on V_(base_level), blocks keyed by output level."""
    spec = a.spec
    _require_untwisted(spec)
    required = minimal_level(a)
    if base_level is None:
        base_level = required
    if base_level < 1 or base_level % required != 0:
        raise LevelError(base_level, required)
    blocks: dict[int, dict] = {}
    for t in a.terms:
        dim_t = spec.dim(t.right.fiber)
        stripe = base_level // dim_t
        level_out = stripe * spec.dim(t.left.fiber)
        entries = blocks.setdefault(level_out, {})
        row0 = t.left.index * stripe
        col0 = t.right.index * stripe
        for u in range(stripe):
            key = (row0 + u, col0 + u)
            cur = entries.get(key)
            entries[key] = t.coeff if cur is None else cur + t.coeff
    out = {
        lv: StepOperator(base_level, lv, {k: v for k, v in e.items() if not v.is_zero()})
        for lv, e in blocks.items()
    }
    return OperatorFamily(base_level, out)


# ---------------------------------------------------------------------------
# character twists of the representation
# ---------------------------------------------------------------------------


class CharacterTwist:
    """A character of Z^k: one modulus-one scalar per generator.

    The twisted representation scales the generator monomial (r, x) by
    prod_a lambda_a^(r_a); on a term xy* of degree g this is the phase
    prod_a lambda_a^(g_a) with negative powers taken as conjugates.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        values = tuple(values)
        if not values:
            raise ValueError("a character needs one value per generator")
        for v in values:
            if not (v * v.conj()).is_one():
                raise ValueError(f"character value {v!r} is not of modulus one")
        self.values = values

    def phase(self, degree) -> object:
        out = None
        for v, g in zip(self.values, degree):
            if g == 0:
                continue
            base = v if g > 0 else v.conj()
            for _ in range(abs(g)):
                out = base if out is None else out * base
        if out is None:
            out = self.values[0] * self.values[0].conj()  # one, in lambda's field
        return out

    def __repr__(self):
        return f"CharacterTwist({list(self.values)})"


def evaluate_twisted(
    a, twist: CharacterTwist, base_level: int | None = None
) -> OperatorFamily:
    """Like ``evaluate`` but through the character-scaled generators."""
    spec = a.spec
    if len(twist.values) != spec.k:
        raise ValueError("character length does not match the generator count")
    from .scalars import common_field, field_of
    from .system import sub_degree

    field = spec.field
    for v in twist.values:
        field = common_field(field, field_of(v))

    plain = evaluate(a, base_level)
    blocks: dict[int, dict] = {}
    for t in a.terms:
        dim_t = spec.dim(t.right.fiber)
        stripe = plain.base_level // dim_t
        level_out = stripe * spec.dim(t.left.fiber)
        entries = blocks.setdefault(level_out, {})
        phase = field.coerce(twist.phase(sub_degree(t.left.fiber, t.right.fiber)))
        coeff = phase * field.coerce(t.coeff)
        row0 = t.left.index * stripe
        col0 = t.right.index * stripe
        for u in range(stripe):
            key = (row0 + u, col0 + u)
            cur = entries.get(key)
            entries[key] = coeff if cur is None else cur + coeff
    out = {
        lv: StepOperator(
            plain.base_level, lv, {k: v for k, v in e.items() if not v.is_zero()}
        )
        for lv, e in blocks.items()
    }
    return OperatorFamily(plain.base_level, out)


# ---------------------------------------------------------------------------
# step vectors and refinement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepVector:
    """A vector at one level; the represented function is coeffs / sqrt(norm_divisor).

    Refinement duplicates coefficients and multiplies the divisor instead of
    introducing irrational scalars, so repeated refinement stays exact.
    """

    level: int
    coeffs: tuple
    norm_divisor: int = 1

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)


def basis_step_vector(spec: SystemSpec, level: int, index: int) -> StepVector:
    coeffs = [spec.field.zero] * level
    coeffs[index] = spec.field.one
    return StepVector(level, tuple(coeffs))


def refine_vector(v: StepVector, factor: int) -> StepVector:
    """Rewrite v on the level*factor grid; represents the same function."""
    if factor < 1:
        raise ValueError("refinement factor must be >= 1")
    coeffs = tuple(c for c in v.coeffs for _ in range(factor))
    return StepVector(v.level * factor, coeffs, v.norm_divisor * factor)


def inner_step(v: StepVector, w: StepVector):
    """<v, w> as an exact scalar; defined when norm divisors make it exact."""
    if v.level != w.level:
        raise ValueError("refine to a common level before comparing")
    prod = v.norm_divisor * w.norm_divisor
    root = math.isqrt(prod)
    if root * root != prod:
        raise ValueError(
            "inner product would be irrational; refine both vectors from a "
            "common starting level"
        )
    acc = None
    for a, b in zip(v.coeffs, w.coeffs):
        term = a * b.conj()
        acc = term if acc is None else acc + term
    if root == 1:
        return acc
    from fractions import Fraction

    return acc * Fraction(1, root)
