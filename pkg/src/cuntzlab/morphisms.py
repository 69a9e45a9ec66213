"""Generator assignments and induced *-homomorphisms.

A representation of the algebra in another algebra (or in concrete step
operators) is pinned down by where the generator isometries go.  This module
checks the defining relations for a proposed assignment, extends verified
assignments to arbitrary basis monomials and algebra elements, and builds the
explicit isomorphism that absorbs one generator dimension into another
(``factor_iso``) together with a round-trip verifier.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import algebra
from .algebra import AlgebraElement
from .system import (
    BasisMonomial,
    ConfigurationError,
    SystemSpec,
    add_fibers,
    same_system,
)
from .steprep import UnsupportedRepresentationError, _require_untwisted


# ---------------------------------------------------------------------------
# Targets.  A target bundles the ambient arithmetic the generator images live
# in: identity/zero, product, sum, scaling, adjoint and an equality test.


class AlgebraTarget:
    """Images live in the dense *-algebra of ``spec``.

    Equality is exact normal-form equality, so relation reports against this
    target are conclusive in both directions.
    """

    def __init__(self, spec: SystemSpec):
        self.spec = spec

    conclusive = True

    def identity(self) -> AlgebraElement:
        return algebra.identity(self.spec)

    def zero(self) -> AlgebraElement:
        return algebra.zero(self.spec)

    def generator(self, x: BasisMonomial) -> AlgebraElement:
        return algebra.isometry(self.spec, x)

    def multiply(self, a, b):
        return algebra.multiply(a, b)

    def add(self, a, b):
        return a + b

    def scale(self, coeff, a):
        return a.scaled(coeff)

    def adjoint(self, a):
        return a.adjoint()

    def equal(self, a, b) -> bool:
        return algebra.equals(a, b)

    def coerce(self, coeff):
        return self.spec.field.coerce(coeff)


class StepTarget:
    """Images are formal words in the step isometries of an untwisted spec.

    Elements are tuples of ``(coeff, word)`` pairs where a word is a tuple of
    ``(BasisMonomial, star)`` atoms read left to right.  Equality is decided
    by evaluating both sides at finitely many probe levels: a disagreement is
    a conclusive refutation, while agreement only certifies the probed
    levels.  Reports built against this target are evidence, not proof.
    """

    conclusive = False

    def __init__(self, spec: SystemSpec, probe_multipliers=(1, 2)):
        _require_untwisted(spec)
        if not probe_multipliers:
            raise ValueError("at least one probe multiplier is required")
        self.spec = spec
        self.probe_multipliers = tuple(int(p) for p in probe_multipliers)
        if any(p < 1 for p in self.probe_multipliers):
            raise ValueError("probe multipliers are positive integers")

    def identity(self):
        return ((self.spec.field.one, ()),)

    def zero(self):
        return ()

    def generator(self, x: BasisMonomial):
        self.spec.check_fiber(x.fiber)
        if not 0 <= x.index < self.spec.dim(x.fiber):
            raise ValueError(f"index {x.index} out of range for fiber {x.fiber}")
        return ((self.spec.field.one, ((x, False),)),)

    @staticmethod
    def _word_key(word):
        return (len(word), tuple((m.fiber, m.index, s) for m, s in word))

    def _merge(self, pairs):
        acc = {}
        for coeff, word in pairs:
            cur = acc.get(word)
            acc[word] = coeff if cur is None else cur + coeff
        return tuple(
            (c, w)
            for w, c in sorted(acc.items(), key=lambda kv: self._word_key(kv[0]))
            if not c.is_zero()
        )

    def multiply(self, a, b):
        return self._merge(
            (ca * cb, wa + wb) for ca, wa in a for cb, wb in b
        )

    def add(self, a, b):
        return self._merge(list(a) + list(b))

    def scale(self, coeff, a):
        c = self.spec.field.coerce(coeff)
        return self._merge((c * ca, wa) for ca, wa in a)

    def adjoint(self, a):
        return self._merge(
            (c.conj(), tuple((m, not s) for m, s in reversed(w))) for c, w in a
        )

    def coerce(self, coeff):
        return self.spec.field.coerce(coeff)

    def _word_level(self, word) -> int:
        # Walking atoms right to left, a star atom divides the running level
        # by its fiber dimension and a plain atom multiplies it.  The base
        # level must clear every intermediate denominator.
        need = 1
        running = Fraction(1)
        for mono, star in reversed(word):
            d = self.spec.dim(mono.fiber)
            running = running / d if star else running * d
            need = lcm(need, running.denominator)
        return need

    def _apply_word(self, word, column: int, level: int):
        # Returns (row, level_out) or None when a star atom annihilates the
        # basis vector.  Levels stay integral by choice of the probe level.
        idx, lv = column, level
        for mono, star in reversed(word):
            d = self.spec.dim(mono.fiber)
            if star:
                base = lv // d
                lo = mono.index * base
                if not lo <= idx < lo + base:
                    return None
                idx -= lo
                lv = base
            else:
                idx = mono.index * lv + idx
                lv = lv * d
        return idx, lv

    def _evaluate(self, elem, level: int):
        blocks: dict = {}
        for coeff, word in elem:
            for col in range(level):
                hit = self._apply_word(word, col, level)
                if hit is None:
                    continue
                row, lv = hit
                block = blocks.setdefault(lv, {})
                key = (row, col)
                cur = block.get(key)
                block[key] = coeff if cur is None else cur + coeff
        return blocks

    def equal(self, a, b) -> bool:
        diff = self.add(a, self.scale(-1, b))
        if not diff:
            return True
        base = 1
        for _, word in diff:
            base = lcm(base, self._word_level(word))
        for mult in self.probe_multipliers:
            blocks = self._evaluate(diff, base * mult)
            for block in blocks.values():
                if any(not c.is_zero() for c in block.values()):
                    return False
        return True


# ---------------------------------------------------------------------------
# Assignments and relation checking.


@dataclass(frozen=True)
class RelationReport:
    """Outcome of checking the defining relations for an assignment.

    ``violations`` names every failed instance; ``ok`` is their absence.
    ``conclusive`` is False when equality was only sampled at probe levels.
    """

    ok: bool
    violations: tuple
    checked: int
    conclusive: bool

    def describe(self) -> str:
        head = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        tail = "" if self.conclusive else " (probe-level evidence)"
        lines = [f"relations: {head} out of {self.checked} checked{tail}"]
        lines.extend("  " + v for v in self.violations)
        return "\n".join(lines)


class GeneratorAssignment:
    """A choice of target image for every generator isometry.

    ``images`` maps ``(a, i)`` to a target element, where ``a`` is the
    1-based generator slot and ``0 <= i < m_a`` indexes its basis.  The
    relation report is computed lazily and cached; extension to monomials
    refuses to run until the report is clean.
    """

    def __init__(self, source: SystemSpec, target, images: dict):
        expected = {
            (a, i)
            for a in range(1, source.k + 1)
            for i in range(source.gen_dims[a - 1])
        }
        got = set(images)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            parts = []
            if missing:
                parts.append(f"missing images for {missing[:4]}")
            if extra:
                parts.append(f"unexpected keys {extra[:4]}")
            raise ConfigurationError("; ".join(parts))
        self.source = source
        self.target = target
        self.images = dict(images)
        self._report = None

    def image(self, a: int, i: int):
        return self.images[a, i]

    def report(self) -> RelationReport:
        if self._report is None:
            self._report = check_relations(self.source, self)
        return self._report

    def verified(self) -> bool:
        return self.report().ok


def canonical_assignment(spec: SystemSpec) -> GeneratorAssignment:
    """The identity assignment of a spec onto its own algebra."""
    target = AlgebraTarget(spec)
    images = {
        (a, i): target.generator(spec.monomial(spec.unit_fiber(a - 1), i))
        for a in range(1, spec.k + 1)
        for i in range(spec.gen_dims[a - 1])
    }
    return GeneratorAssignment(spec, target, images)


def check_relations(spec: SystemSpec, assignment: GeneratorAssignment) -> RelationReport:
    """Check every defining relation instance and name the failures.

    Within each generator slot: isometry ``U'U = I``, pairwise orthogonality
    of ranges, and the full range sum ``sum_i U U' = I``.  Across slots the
    images must commute the same way the source isometries do, including the
    scalar ratio a twisted source imposes.  Violations are report entries,
    not exceptions.
    """
    tgt = assignment.target
    one = tgt.identity()
    nothing = tgt.zero()
    violations = []
    checked = 0
    for a in range(1, spec.k + 1):
        d_a = spec.gen_dims[a - 1]
        us = [assignment.image(a, i) for i in range(d_a)]
        for i in range(d_a):
            for j in range(d_a):
                checked += 1
                prod = tgt.multiply(tgt.adjoint(us[i]), us[j])
                if i == j:
                    if not tgt.equal(prod, one):
                        violations.append(f"isometry: U({a},{i})' U({a},{i}) != I")
                elif not tgt.equal(prod, nothing):
                    violations.append(
                        f"orthogonality: U({a},{i})' U({a},{j}) != 0"
                    )
        total = nothing
        for i in range(d_a):
            total = tgt.add(total, tgt.multiply(us[i], tgt.adjoint(us[i])))
        checked += 1
        if not tgt.equal(total, one):
            violations.append(f"range sum: sum_i U({a},i) U({a},i)' != I")
    for a in range(1, spec.k + 1):
        e_a = spec.unit_fiber(a - 1)
        d_a = spec.gen_dims[a - 1]
        for b in range(a + 1, spec.k + 1):
            e_b = spec.unit_fiber(b - 1)
            d_b = spec.gen_dims[b - 1]
            ratio = spec.multiplier(e_a, e_b) * spec.multiplier(e_b, e_a).conj()
            for i in range(d_a):
                for j in range(d_b):
                    checked += 1
                    # U(a,i) U(b,j) lands on basis slot i*d_b + j of the
                    # mixed fiber; the reversed order reaches the same slot
                    # as p*d_a + q.
                    p, q = divmod(i * d_b + j, d_a)
                    lhs = tgt.multiply(assignment.image(a, i), assignment.image(b, j))
                    rhs = tgt.multiply(assignment.image(b, p), assignment.image(a, q))
                    rhs = tgt.scale(tgt.coerce(ratio), rhs)
                    if not tgt.equal(lhs, rhs):
                        violations.append(
                            f"commutation: U({a},{i}) U({b},{j}) != "
                            f"ratio * U({b},{p}) U({a},{q})"
                        )
    conclusive = bool(getattr(tgt, "conclusive", True))
    return RelationReport(not violations, tuple(violations), checked, conclusive)


def _require_verified(assignment: GeneratorAssignment):
    report = assignment.report()
    if not report.ok:
        raise ValueError(
            "assignment does not satisfy the generator relations; refusing "
            "to extend (first failure: " + report.violations[0] + ")"
        )


def _ordered_digits(spec: SystemSpec, x: BasisMonomial, order):
    if order is None:
        return spec.factor_monomial(x)
    slots = tuple(int(a) for a in order)
    if sorted(slots) != list(range(1, spec.k + 1)):
        raise ValueError(
            f"order must be a permutation of 1..{spec.k}, got {order!r}"
        )
    return spec.factor_monomial(x, tuple(a - 1 for a in slots))


def extend(spec: SystemSpec, assignment: GeneratorAssignment, x: BasisMonomial, order=None):
    """Image of a basis monomial under the verified assignment.

    The monomial is peeled into generator digits along ``order`` (a 1-based
    permutation of the generator slots; default is slot order) and the digit
    images are multiplied left to right.  For a twisted source the peeled
    product differs from ``x`` by the accumulated multiplier phase, so that
    phase is conjugated back in; the result is therefore independent of the
    chosen order.
    """
    if not same_system(spec, assignment.source):
        raise ValueError("monomial does not belong to the assignment's source")
    _require_verified(assignment)
    digits = _ordered_digits(spec, x, order)
    out = assignment.target.identity()
    if spec.is_twisted:
        phase = spec.field.one
        fiber = (0,) * spec.k
        for slot0, digit in digits:
            e_a = spec.unit_fiber(slot0)
            phase = phase * spec.multiplier(fiber, e_a)
            fiber = add_fibers(fiber, e_a)
            out = assignment.target.multiply(out, assignment.image(slot0 + 1, digit))
        if not phase == spec.field.one:
            out = assignment.target.scale(
                assignment.target.coerce(phase.conj()), out
            )
        return out
    for slot0, digit in digits:
        out = assignment.target.multiply(out, assignment.image(slot0 + 1, digit))
    return out


def map_element(assignment: GeneratorAssignment, element: AlgebraElement, order=None):
    """Image of an algebra element under the induced *-homomorphism."""
    _require_verified(assignment)
    if not same_system(element.spec, assignment.source):
        raise ValueError("element does not belong to the assignment's source")
    tgt = assignment.target
    out = tgt.zero()
    for term in element.terms:
        left = extend(assignment.source, assignment, term.left, order)
        right = extend(assignment.source, assignment, term.right, order)
        word = tgt.multiply(left, tgt.adjoint(right))
        out = tgt.add(out, tgt.scale(tgt.coerce(term.coeff), word))
    return out


# ---------------------------------------------------------------------------
# The dimension-absorbing isomorphism.  The system with generator dimensions
# (m, m*n) embeds its second family as products "second then first" inside
# the system with dimensions (m, n), and that map is invertible.


@dataclass(frozen=True)
class IsomorphismPair:
    """Mutually inverse assignments between two untwisted rank-2 systems.

    ``forward`` maps the (m, m*n) system into the algebra of the (m, n)
    system; ``backward`` goes the other way.
    """

    forward: GeneratorAssignment
    backward: GeneratorAssignment

    @property
    def source(self) -> SystemSpec:
        return self.forward.source

    @property
    def destination(self) -> SystemSpec:
        return self.backward.source


def factor_iso(m: int, n: int) -> IsomorphismPair:
    """Isomorphism pair between the (m, m*n) and (m, n) systems.

    Forward images: the first family goes to the first family, and the x-th
    second-slot isometry goes to the x-th basis isometry of the mixed fiber
    (1, 1).  Backward images: the first family comes back identically, and
    the j-th second-slot isometry of the small system is the sum over l of
    the mixed-fiber isometry at slot j*m + l times the adjoint of the l-th
    first-slot isometry.  For m = 1 the pair degenerates consistently: the
    single first-slot range projection is the identity.
    """
    if m < 1 or n < 1:
        raise ValueError("generator dimensions are positive integers")
    big = SystemSpec((m, m * n))
    small = SystemSpec((m, n))
    fwd_target = AlgebraTarget(small)
    fwd_images = {}
    for i in range(m):
        fwd_images[1, i] = fwd_target.generator(small.monomial((1, 0), i))
    for x in range(m * n):
        fwd_images[2, x] = fwd_target.generator(small.monomial((1, 1), x))
    bwd_target = AlgebraTarget(big)
    bwd_images = {}
    for i in range(m):
        bwd_images[1, i] = bwd_target.generator(big.monomial((1, 0), i))
    for j in range(n):
        acc = bwd_target.zero()
        for l in range(m):
            word = bwd_target.multiply(
                bwd_target.generator(big.monomial((0, 1), j * m + l)),
                bwd_target.adjoint(bwd_target.generator(big.monomial((1, 0), l))),
            )
            acc = bwd_target.add(acc, word)
        bwd_images[2, j] = acc
    return IsomorphismPair(
        GeneratorAssignment(big, fwd_target, fwd_images),
        GeneratorAssignment(small, bwd_target, bwd_images),
    )


def verify_roundtrip(pair: IsomorphismPair) -> bool:
    """Check that the two assignments are mutually inverse on generators.

    Relation reports for both assignments are computed first.  A pair whose
    assignments break the generator relations cannot consist of mutually
    inverse *-homomorphisms, so it verifies as False without attempting the
    composition; the named failures stay available on the reports.  A pair
    whose relations cannot be checked conclusively (non-algebra-valued
    targets) is refused.  The True answer states that composing the maps in
    both orders fixes every generator isometry, which pins the composites
    down as identity maps on the whole algebra.
    """
    for assignment in (pair.forward, pair.backward):
        if not isinstance(assignment.target, AlgebraTarget):
            raise TypeError(
                "round-trip verification needs algebra-valued assignments"
            )
        if not assignment.report().ok:
            return False
    big = pair.forward.source
    small = pair.backward.source
    for a in range(1, big.k + 1):
        for i in range(big.gen_dims[a - 1]):
            image = map_element(pair.backward, pair.forward.image(a, i))
            fixed = algebra.isometry(big, big.monomial(big.unit_fiber(a - 1), i))
            if not algebra.equals(image, fixed):
                return False
    for a in range(1, small.k + 1):
        for i in range(small.gen_dims[a - 1]):
            image = map_element(pair.forward, pair.backward.image(a, i))
            fixed = algebra.isometry(small, small.monomial(small.unit_fiber(a - 1), i))
            if not algebra.equals(image, fixed):
                return False
    return True


# ---------------------------------------------------------------------------
# Plain-text serialization: one "(a,i) = <expression>" line per generator.


def format_assignment(assignment: GeneratorAssignment) -> str:
    """Render an algebra-valued assignment as ``(a,i) = <expression>`` lines."""
    from . import expr

    if not isinstance(assignment.target, AlgebraTarget):
        raise TypeError("only algebra-valued assignments have a text form")
    lines = []
    for a in range(1, assignment.source.k + 1):
        for i in range(assignment.source.gen_dims[a - 1]):
            body = expr.format_element(assignment.image(a, i))
            lines.append(f"({a},{i}) = {body}")
    return "\n".join(lines) + "\n"


def parse_assignment(
    source: SystemSpec, target_spec: SystemSpec, text: str
) -> GeneratorAssignment:
    """Parse ``(a,i) = <expression>`` lines into an algebra-valued assignment.

    Expressions are parsed against ``target_spec``.  Every generator of the
    source must receive exactly one line; duplicates and malformed left-hand
    sides are configuration errors.
    """
    from . import expr

    target = AlgebraTarget(target_spec)
    images: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition("=")
        if not sep:
            raise ConfigurationError(f"line {lineno}: expected '(a,i) = <expression>'")
        head = head.strip()
        if not (head.startswith("(") and head.endswith(")")):
            raise ConfigurationError(f"line {lineno}: malformed generator key {head!r}")
        try:
            a_text, i_text = head[1:-1].split(",")
            key = (int(a_text), int(i_text))
        except ValueError:
            raise ConfigurationError(
                f"line {lineno}: malformed generator key {head!r}"
            ) from None
        if key in images:
            raise ConfigurationError(f"line {lineno}: duplicate image for {key}")
        images[key] = expr.parse_element(target_spec, body.strip())
    return GeneratorAssignment(source, target, images)
