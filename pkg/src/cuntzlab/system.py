"""Discrete product systems over N^k with lexicographic multiplication.

A system is described by k generator fiber dimensions (m_1, ..., m_k) and an
optional k x k angle matrix theta.  The fiber over s in N^k has dimension
prod_a m_a^(s_a); basis vectors multiply by

    (r, j) * (s, l)  =  omega(r, s) * (r + s, j * dim(s) + l)

where omega(r, s) = exp(2*pi*i * sum_ab theta[a][b] * r_a * s_b).  With theta
omitted the system is untwisted and every product phase is 1.  This
bicharacter-twisted lexicographic family is the only shape the engine
represents; anything else cannot be constructed.

Scalar mode choices and their constraints:

* ``rational``      -- untwisted systems only (phases stay Gaussian rational);
* ``cyclotomic:q``  -- every theta entry must be a fraction with denominator
                       dividing q, so each phase is an exact power of zeta_q;
* ``float``         -- arbitrary (e.g. irrational) angles, 1e-9 zero tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import (
    FLOAT,
    RATIONAL,
    Scalar,
    ScalarField,
    field_named,
)

Fiber = tuple[int, ...]
Degree = tuple[int, ...]


class SpecFormatError(ValueError):
    """A system description file failed to parse; carries the line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ConfigurationError(ValueError):
    """Inconsistent system parameters (dims, theta, scalar mode)."""


@dataclass(frozen=True)
class BasisMonomial:
    """The index-th standard basis vector of the fiber over ``fiber``."""

    fiber: Fiber
    index: int

    def __repr__(self):
        coords = ",".join(str(c) for c in self.fiber)
        return f"e({coords};{self.index})"


@dataclass(frozen=True)
class FiberVector:
    """A vector in one fiber: an explicit scalar coefficient per basis slot."""

    fiber: Fiber
    coeffs: tuple

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __repr__(self):
        return f"FiberVector({self.fiber}, {list(self.coeffs)})"


def add_fibers(s: Fiber, t: Fiber) -> Fiber:
    return tuple(a + b for a, b in zip(s, t))


def sub_degree(s: Fiber, t: Fiber) -> Degree:
    return tuple(a - b for a, b in zip(s, t))


def max_fiber(s: Fiber, t: Fiber) -> Fiber:
    return tuple(max(a, b) for a, b in zip(s, t))


def is_nonnegative(v: Degree) -> bool:
    return all(c >= 0 for c in v)


class SystemSpec:
    """Immutable description of one twisted lexicographic product system.

    ``gen_dims``   -- fiber dimensions of the k generators (each >= 1).
    ``theta``      -- optional k x k matrix of Fractions/floats; None means
                      untwisted.
    ``scalar_mode``-- 'rational', 'cyclotomic:<q>' or 'float'.
    """

    def __init__(self, gen_dims, theta=None, scalar_mode: str = "rational"):
        gen_dims = tuple(int(m) for m in gen_dims)
        if not gen_dims:
            raise ConfigurationError("a system needs at least one generator")
        if any(m < 1 for m in gen_dims):
            raise ConfigurationError("generator dimensions must be >= 1")
        self.k = len(gen_dims)
        self.gen_dims = gen_dims
        self.field: ScalarField = field_named(scalar_mode)
        self.scalar_mode = self.field.name

        if theta is not None:
            theta = tuple(tuple(row) for row in theta)
            if len(theta) != self.k or any(len(row) != self.k for row in theta):
                raise ConfigurationError(
                    f"theta must be a {self.k}x{self.k} matrix"
                )
            for row in theta:
                for entry in row:
                    if not isinstance(entry, (int, float, Fraction)):
                        raise ConfigurationError(
                            f"theta entries must be numbers, got {entry!r}"
                        )
        self.theta = theta

        trivial = theta is None or all(
            (isinstance(x, (int, Fraction)) and Fraction(x) % 1 == 0)
            or (isinstance(x, float) and x == int(x))
            for row in theta
            for x in row
        )
        self.is_twisted = not trivial

        if self.is_twisted:
            if self.field is RATIONAL:
                raise ConfigurationError(
                    "rational scalar mode supports untwisted systems only; "
                    "use cyclotomic:<q> or float"
                )
            if self.scalar_mode.startswith("cyclotomic:"):
                q = self.field.order
                for row in self.theta:
                    for x in row:
                        if isinstance(x, float):
                            raise ConfigurationError(
                                "cyclotomic scalar mode needs rational theta "
                                f"entries, got float {x!r}"
                            )
                        if q % Fraction(x).denominator != 0:
                            raise ConfigurationError(
                                f"theta entry {x} has denominator not dividing "
                                f"the cyclotomic order {q}"
                            )

        self._untwisted: SystemSpec | None = None

    # -- derived structure ------------------------------------------------

    def dim(self, s: Fiber) -> int:
        """Dimension of the fiber over s: prod_a m_a^(s_a)."""
        self.check_fiber(s)
        out = 1
        for m, e in zip(self.gen_dims, s):
            out *= m**e
        return out

    def check_fiber(self, s) -> Fiber:
        if len(s) != self.k or any((not isinstance(c, int)) or c < 0 for c in s):
            raise ValueError(f"{s!r} is not an N^{self.k} element")
        return tuple(s)

    def check_degree(self, g) -> Degree:
        if len(g) != self.k or any(not isinstance(c, int) for c in g):
            raise ValueError(f"{g!r} is not a Z^{self.k} element")
        return tuple(g)

    def unit_fiber(self, slot: int) -> Fiber:
        """The fiber with a single 1 at the given 0-based generator slot."""
        if not 0 <= slot < self.k:
            raise ValueError(f"generator slot {slot} out of range for k={self.k}")
        return tuple(1 if a == slot else 0 for a in range(self.k))

    def monomial(self, fiber, index: int) -> BasisMonomial:
        fiber = self.check_fiber(fiber)
        if not 0 <= index < self.dim(fiber):
            raise ValueError(
                f"index {index} out of range for fiber {fiber} "
                f"(dimension {self.dim(fiber)})"
            )
        return BasisMonomial(fiber, index)

    def basis(self, fiber) -> list[BasisMonomial]:
        fiber = self.check_fiber(fiber)
        return [BasisMonomial(fiber, j) for j in range(self.dim(fiber))]

    @property
    def identity_monomial(self) -> BasisMonomial:
        return BasisMonomial((0,) * self.k, 0)

    def vector(self, fiber, coeffs) -> FiberVector:
        fiber = self.check_fiber(fiber)
        coeffs = tuple(self.field.coerce(c) for c in coeffs)
        if len(coeffs) != self.dim(fiber):
            raise ValueError(
                f"fiber {fiber} has dimension {self.dim(fiber)}, "
                f"got {len(coeffs)} coefficients"
            )
        return FiberVector(fiber, coeffs)

    def unit_vector(self, x: BasisMonomial) -> FiberVector:
        coeffs = [self.field.zero] * self.dim(x.fiber)
        coeffs[x.index] = self.field.one
        return FiberVector(x.fiber, tuple(coeffs))

    # -- multiplication ----------------------------------------------------

    def _theta_pairing(self, s: Fiber, t: Fiber):
        total = None
        for a in range(self.k):
            if s[a] == 0:
                continue
            for b in range(self.k):
                if t[b] == 0:
                    continue
                x = self.theta[a][b]
                term = (Fraction(x) if not isinstance(x, float) else x) * s[a] * t[b]
                total = term if total is None else total + term
        return Fraction(0) if total is None else total

    def multiplier(self, s: Fiber, t: Fiber) -> Scalar:
        """omega(s, t) = exp(2*pi*i * <theta s, t>) in the scalar field."""
        s = self.check_fiber(s)
        t = self.check_fiber(t)
        if not self.is_twisted:
            return self.field.one
        pairing = self._theta_pairing(s, t)
        return self.field.root_of_unity(
            pairing if isinstance(pairing, float) else pairing % 1
        )

    def mul_basis(self, x: BasisMonomial, y: BasisMonomial) -> tuple[Scalar, BasisMonomial]:
        """Product of basis vectors: a phase and the resulting monomial."""
        phase = self.multiplier(x.fiber, y.fiber)
        dim_t = self.dim(y.fiber)
        return phase, BasisMonomial(
            add_fibers(x.fiber, y.fiber), x.index * dim_t + y.index
        )

    def mul_vectors(self, v: FiberVector, w: FiberVector) -> FiberVector:
        """Lexicographic product of two fiber vectors (a twisted tensor)."""
        phase = self.multiplier(v.fiber, w.fiber)
        dim_w = self.dim(w.fiber)
        out = [self.field.zero] * (self.dim(v.fiber) * dim_w)
        for j, a in enumerate(v.coeffs):
            if a.is_zero():
                continue
            for l, b in enumerate(w.coeffs):
                if b.is_zero():
                    continue
                out[j * dim_w + l] = phase * a * b
        return FiberVector(add_fibers(v.fiber, w.fiber), tuple(out))

    def inner(self, v: FiberVector, w: FiberVector) -> Scalar:
        """<v, w> = sum v_j * conj(w_j); conjugate-linear in the second slot."""
        if v.fiber != w.fiber:
            raise ValueError("inner product needs vectors in the same fiber")
        out = self.field.zero
        for a, b in zip(v.coeffs, w.coeffs):
            if not (a.is_zero() or b.is_zero()):
                out = out + a * b.conj()
        return out

    # -- factoring ----------------------------------------------------------

    def factor_monomial_sequence(
        self, x: BasisMonomial, sequence
    ) -> list[tuple[int, int]]:
        """Peel ``x`` into generator digits along an explicit generator list.

        ``sequence`` lists a generator index (0-based) once per unit of the
        fiber coordinate; its multiset must equal the fiber of x.  Returns
        [(generator, digit), ...] such that multiplying the corresponding
        generator monomials left-to-right in the untwisted system gives x.
        """
        fiber = x.fiber
        counts = [0] * self.k
        for a in sequence:
            if not 0 <= a < self.k:
                raise ValueError(f"generator index {a} out of range")
            counts[a] += 1
        if tuple(counts) != fiber:
            raise ValueError(
                f"sequence multiset {tuple(counts)} does not match fiber {fiber}"
            )
        remaining = list(fiber)
        idx = x.index
        digits: list[tuple[int, int]] = []
        for a in sequence:
            remaining[a] -= 1
            d = self.dim(tuple(remaining))
            digits.append((a, idx // d))
            idx %= d
        return digits

    def factor_monomial(self, x: BasisMonomial, order=None) -> list[tuple[int, int]]:
        """Digits of ``x`` with generator occurrences grouped by ``order``.

        ``order`` is a permutation of range(k) (default ascending).  The
        result multiplies back to x in the untwisted system regardless of
        the order chosen.
        """
        if order is None:
            order = tuple(range(self.k))
        order = tuple(order)
        if sorted(order) != list(range(self.k)):
            raise ValueError(f"{order!r} is not a permutation of range({self.k})")
        sequence = [a for a in order for _ in range(x.fiber[a])]
        return self.factor_monomial_sequence(x, sequence)

    # -- variants and identity ----------------------------------------------

    def untwisted(self) -> "SystemSpec":
        """The same dimensions with the trivial multiplier (rational mode)."""
        if not self.is_twisted and self.field is RATIONAL:
            return self
        if self._untwisted is None:
            self._untwisted = SystemSpec(self.gen_dims)
        return self._untwisted

    def __eq__(self, other):
        if not isinstance(other, SystemSpec):
            return NotImplemented
        return (
            self.gen_dims == other.gen_dims
            and self.theta == other.theta
            and self.scalar_mode == other.scalar_mode
        )

    def __repr__(self):
        twist = "" if self.theta is None else f", theta={self.theta!r}"
        return f"SystemSpec({self.gen_dims}{twist}, scalar_mode={self.scalar_mode!r})"


def same_system(a: SystemSpec, b: SystemSpec) -> bool:
    return a is b or a == b


# ---------------------------------------------------------------------------
# description file format
# ---------------------------------------------------------------------------
#
#   k = 2
#   dims = 2 3
#   theta = 0 1/4 0 0          (k*k entries, row-major; optional)
#   scalars = cyclotomic:4     (optional; default rational)
#
# '#' starts a comment; blank lines are ignored.


def _parse_number(token: str, line_number: int):
    try:
        if "/" in token:
            return Fraction(token)
        if any(c in token for c in ".eE") and not token.lstrip("+-").isdigit():
            return float(token)
        return Fraction(int(token))
    except (ValueError, ZeroDivisionError):
        raise SpecFormatError(line_number, f"bad numeric entry {token!r}") from None


def parse_spec_text(text: str) -> SystemSpec:
    values: dict[str, tuple[int, str]] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecFormatError(line_number, f"expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in ("k", "dims", "theta", "scalars"):
            raise SpecFormatError(line_number, f"unknown key {key!r}")
        if key in values:
            raise SpecFormatError(line_number, f"duplicate key {key!r}")
        values[key] = (line_number, value.strip())

    for required in ("k", "dims"):
        if required not in values:
            last = len(text.splitlines()) or 1
            raise SpecFormatError(last, f"missing required line '{required} = ...'")

    ln, raw_k = values["k"]
    if not raw_k.lstrip("+-").isdigit() or int(raw_k) < 1:
        raise SpecFormatError(ln, f"k must be a positive integer, got {raw_k!r}")
    k = int(raw_k)

    ln, raw_dims = values["dims"]
    tokens = raw_dims.split()
    if len(tokens) != k:
        raise SpecFormatError(ln, f"expected {k} dimensions, got {len(tokens)}")
    dims = []
    for tok in tokens:
        if not tok.isdigit() or int(tok) < 1:
            raise SpecFormatError(ln, f"bad dimension {tok!r}")
        dims.append(int(tok))

    theta = None
    if "theta" in values:
        ln, raw_theta = values["theta"]
        tokens = raw_theta.split()
        if len(tokens) != k * k:
            raise SpecFormatError(
                ln, f"theta needs {k * k} row-major entries, got {len(tokens)}"
            )
        entries = [_parse_number(tok, ln) for tok in tokens]
        theta = tuple(tuple(entries[r * k : (r + 1) * k]) for r in range(k))

    scalar_mode = "rational"
    if "scalars" in values:
        ln, scalar_mode = values["scalars"]
        try:
            field_named(scalar_mode)
        except ValueError as exc:
            raise SpecFormatError(ln, str(exc)) from None

    try:
        return SystemSpec(dims, theta=theta, scalar_mode=scalar_mode)
    except ConfigurationError as exc:
        raise SpecFormatError(values.get("theta", values["dims"])[0], str(exc)) from None


def load_spec(path) -> SystemSpec:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_spec_text(handle.read())


def spec_text(spec: SystemSpec) -> str:
    """Render a SystemSpec back into the description file format."""
    lines = [f"k = {spec.k}", "dims = " + " ".join(str(m) for m in spec.gen_dims)]
    if spec.theta is not None:
        flat = " ".join(str(x) for row in spec.theta for x in row)
        lines.append(f"theta = {flat}")
    if spec.scalar_mode != "rational":
        lines.append(f"scalars = {spec.scalar_mode}")
    return "\n".join(lines) + "\n"
