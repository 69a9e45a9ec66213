"""Command-line front end.

Every verification and construction in the package is reachable through a
subcommand.  Exit status encodes the verdict: 0 for success or a true
verdict, 1 for a false verdict or a reported violation, 2 for usage,
parse, or configuration errors.  Output ordering is deterministic (elements
print in their canonical degree-lexicographic term order), so runs on
identical inputs are textually identical.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import algebra, analysis, expr, morphisms, steprep
from .analysis import HypothesisViolationError
from .steprep import CharacterTwist, LevelError
from .system import (
    ConfigurationError,
    SpecFormatError,
    SystemSpec,
    parse_spec_text,
)


class UsageError(Exception):
    """Bad invocation: unreadable spec, malformed expression or flags."""


# built-in systems used by selftest; the twist satisfies UV = zeta_4 VU
# for U = e(0,1;0), V = e(1,0;0)
BUILTIN_SPECS = {
    "e23": "k = 2\ndims = 2 3\n",
    "e24": "k = 2\ndims = 2 4\n",
    "e48": "k = 2\ndims = 4 8\n",
    "e15": "k = 2\ndims = 1 5\n",
    "tw14": "k = 2\ndims = 1 1\ntheta = 0 0 1/4 0\nscalars = cyclotomic:4\n",
}


class Reporter:
    """Writes records as plain lines or as one JSON object per line."""

    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out if out is not None else sys.stdout

    def emit(self, text: str, **record):
        if self.fmt == "json-lines":
            print(json.dumps(record, sort_keys=True), file=self.out)
        else:
            print(text, file=self.out)


def _load_spec(path: str) -> SystemSpec:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise UsageError(f"cannot read spec file {path!r}: {err}") from None
    try:
        return parse_spec_text(text)
    except (SpecFormatError, ConfigurationError, ValueError) as err:
        raise UsageError(f"bad spec file {path!r}: {err}") from None


def _parse_element(spec: SystemSpec, text: str):
    try:
        return expr.parse_element(spec, text)
    except expr.ExpressionError as err:
        raise UsageError(f"in {text!r}: {err}") from None


def _parse_fiber(spec: SystemSpec, text: str):
    try:
        coords = tuple(int(p) for p in text.split(","))
        return spec.check_fiber(coords)
    except ValueError as err:
        raise UsageError(f"bad fiber {text!r}: {err}") from None


def _parse_character(spec: SystemSpec, text: str) -> CharacterTwist:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != spec.k:
        raise UsageError(
            f"--lambda needs {spec.k} comma-separated scalars, got {len(parts)}"
        )
    values = []
    for part in parts:
        try:
            values.append(expr.parse_scalar(spec, part))
        except expr.ExpressionError as err:
            raise UsageError(f"bad character value {part!r}: {err}") from None
    try:
        return CharacterTwist(values)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _parse_generator(spec: SystemSpec, text: str):
    """A CLI argument that must denote a single generator isometry."""
    elem = _parse_element(spec, text)
    if len(elem.terms) != 1:
        raise UsageError(f"{text!r} is not a single generator monomial")
    term = elem.terms[0]
    if term.right != spec.identity_monomial or not term.coeff.is_one():
        raise UsageError(f"{text!r} is not a plain generator monomial")
    return term.left


def _fiber_text(fiber) -> str:
    return "(" + ",".join(str(c) for c in fiber) + ")"


# ---------------------------------------------------------------------------
# subcommand handlers; each returns the process exit code


def _cmd_normalize(args, reporter: Reporter) -> int:
    spec = _load_spec(args.spec)
    element = _parse_element(spec, args.expression)
    canonical = algebra.expand_normal_form(algebra.normal_form(element))
    text = expr.format_element(canonical)
    reporter.emit(text, command="normalize", element=text)
    return 0


def _cmd_equals(args, reporter: Reporter) -> int:
    spec = _load_spec(args.spec)
    left = _parse_element(spec, args.left)
    right = _parse_element(spec, args.right)
    verdict = algebra.equals(left, right)
    reporter.emit("true" if verdict else "false", command="equals", equal=verdict)
    return 0 if verdict else 1


def _cmd_expect(args, reporter: Reporter) -> int:
    spec = _load_spec(args.spec)
    element = _parse_element(spec, args.expression)
    text = expr.format_element(algebra.gauge_expectation(element))
    reporter.emit(text, command="expect", element=text)
    return 0


def _cmd_alpha(args, reporter: Reporter) -> int:
    spec = _load_spec(args.spec)
    fiber = _parse_fiber(spec, args.fiber)
    element = _parse_element(spec, args.expression)
    text = expr.format_element(algebra.shift_endomorphism(element, fiber))
    reporter.emit(text, command="alpha", fiber=list(fiber), element=text)
    return 0


def _emit_family(family, reporter: Reporter, command: str) -> None:
    reporter.emit(
        f"base level: {family.base_level}",
        command=command,
        base_level=family.base_level,
    )
    for level_out in sorted(family.blocks):
        block = family.blocks[level_out]
        entries = sorted(
            (r, c, expr.format_scalar(v))
            for (r, c), v in block.entries.items()
            if not v.is_zero()
        )
        if not entries:
            reporter.emit(
                f"level {block.level_in} -> {level_out}: zero",
                command=command,
                level_in=block.level_in,
                level_out=level_out,
                entries=[],
            )
            continue
        reporter.emit(
            f"level {block.level_in} -> {level_out}: {len(entries)} entries",
            command=command,
            level_in=block.level_in,
            level_out=level_out,
            entries=[[r, c, v] for r, c, v in entries],
        )
        if reporter.fmt == "text":
            for r, c, v in entries:
                reporter.emit(f"  [{r},{c}] = {v}")


def _cmd_eval(args, reporter: Reporter) -> int:
    spec = _load_spec(args.spec)
    element = _parse_element(spec, args.expression)
    try:
        if args.lambda_values is not None:
            twist = _parse_character(spec, args.lambda_values)
            family = steprep.evaluate_twisted(element, twist, args.level)
        else:
            family = steprep.evaluate(element, args.level)
    except LevelError as err:
        raise UsageError(str(err)) from None
    except (ValueError, TypeError) as err:
        raise UsageError(str(err)) from None
    _emit_family(family, reporter, "eval")
    zero = family.is_zero()
    reporter.emit("zero" if zero else "nonzero", command="eval", zero=zero)
    return 0 if zero else 1


def _cmd_classify(args, reporter: Reporter) -> int:
    spec = _load_spec(args.spec)
    result = analysis.classify(spec)
    record = {
        "command": "classify",
        "verdict": result.verdict(),
        "kind": result.kind,
        "dims": list(result.gen_dims),
        "twisted": result.twisted,
        "rank": result.rank,
    }
    if result.witness is not None:
        record["witness"] = [list(result.witness[0]), list(result.witness[1])]
    if result.power_base is not None:
        record["power_base"] = list(result.power_base)
    reporter.emit(result.verdict(), **record)
    return 0 if result.kind != "Unknown" else 1


def _cmd_witness(args, reporter: Reporter) -> int:
    spec = _load_spec(args.spec)
    result = analysis.classify(spec)
    if result.witness is None:
        reporter.emit(
            "no witness: the dimension function is injective",
            command="witness",
            witness=None,
        )
        return 1
    s, t = result.witness
    try:
        element, twist = analysis.nonsimplicity_witness(spec, s, t)
    except ValueError as err:
        reporter.emit(f"no witness: {err}", command="witness", witness=None)
        return 1
    plain_zero = steprep.evaluate(element).is_zero()
    twisted_zero = steprep.evaluate_twisted(element, twist).is_zero()
    verdict = plain_zero and not twisted_zero
    reporter.emit(
        f"witness fibers: {_fiber_text(s)} {_fiber_text(t)}",
        command="witness",
        fibers=[list(s), list(t)],
    )
    reporter.emit(
        "character: " + ", ".join(expr.format_scalar(v) for v in twist.values),
        command="witness",
        character=[expr.format_scalar(v) for v in twist.values],
    )
    reporter.emit(
        "distinguished representation: " + ("zero" if plain_zero else "nonzero"),
        command="witness",
        plain_zero=plain_zero,
    )
    reporter.emit(
        "character-twisted: " + ("zero" if twisted_zero else "nonzero"),
        command="witness",
        twisted_zero=twisted_zero,
    )
    reporter.emit(
        "witness verified: " + ("true" if verdict else "false"),
        command="witness",
        verified=verdict,
    )
    return 0 if verdict else 1


def _cmd_kill(args, reporter: Reporter) -> int:
    spec = _load_spec(args.spec)
    x = _parse_generator(spec, args.x)
    y = _parse_generator(spec, args.y)
    shift = _parse_fiber(spec, args.shift) if args.shift else None
    try:
        instance = analysis.annihilation_instance(spec, [(x, y)], shift)
        vector = analysis.annihilating_vector(spec, instance)
    except HypothesisViolationError as err:
        reporter.emit(f"hypothesis violation: {err}", command="kill", error=str(err))
        return 1
    except ValueError as err:
        raise UsageError(str(err)) from None
    support = sum(1 for c in vector.coeffs if not c.is_zero())
    reporter.emit(
        f"shift fiber: {_fiber_text(instance.shift_fiber)}",
        command="kill",
        shift=list(instance.shift_fiber),
    )
    reporter.emit(
        f"vector fiber: {_fiber_text(vector.fiber)}, support {support} of "
        f"{spec.dim(vector.fiber)}",
        command="kill",
        vector_fiber=list(vector.fiber),
        support=support,
        dimension=spec.dim(vector.fiber),
    )
    verdict = analysis.verify_annihilation(spec, instance, vector)
    reporter.emit(
        "compressed pair: " + ("zero" if verdict else "nonzero"),
        command="kill",
        annihilated=verdict,
    )
    return 0 if verdict else 1


def _cmd_iso(args, reporter: Reporter) -> int:
    if args.m < 1 or args.n < 1:
        raise UsageError("m and n must be positive")
    pair = morphisms.factor_iso(args.m, args.n)
    forward = pair.forward.report()
    backward = pair.backward.report()
    reporter.emit(
        f"forward relations: {'ok' if forward.ok else 'violated'} "
        f"({forward.checked} checked)",
        command="iso",
        forward_ok=forward.ok,
        forward_checked=forward.checked,
    )
    reporter.emit(
        f"backward relations: {'ok' if backward.ok else 'violated'} "
        f"({backward.checked} checked)",
        command="iso",
        backward_ok=backward.ok,
        backward_checked=backward.checked,
    )
    verdict = morphisms.verify_roundtrip(pair)
    reporter.emit(
        "round trip: " + ("true" if verdict else "false"),
        command="iso",
        roundtrip=verdict,
    )
    return 0 if verdict else 1


def _cmd_relations(args, reporter: Reporter) -> int:
    spec = _load_spec(args.spec)
    target_spec = _load_spec(args.target) if args.target else spec
    try:
        with open(args.assignment, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise UsageError(f"cannot read assignment {args.assignment!r}: {err}") from None
    try:
        assignment = morphisms.parse_assignment(spec, target_spec, text)
    except (ConfigurationError, expr.ExpressionError) as err:
        raise UsageError(str(err)) from None
    report = assignment.report()
    reporter.emit(
        f"relations: {'ok' if report.ok else 'violated'} ({report.checked} checked)",
        command="relations",
        ok=report.ok,
        checked=report.checked,
        violations=list(report.violations),
    )
    if reporter.fmt == "text":
        for violation in report.violations:
            reporter.emit("  " + violation)
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# selftest battery


def _selftest_checks(spec: SystemSpec, name: str, rng: random.Random):
    """Yield (label, callable) pairs; each callable returns True on pass."""

    def cuntz_sums():
        for slot in range(spec.k):
            fiber = spec.unit_fiber(slot)
            total = algebra.zero(spec)
            for mono in spec.basis(fiber):
                iso = algebra.isometry(spec, mono)
                total = total + algebra.multiply(iso, iso.adjoint())
            if not algebra.equals(total, algebra.identity(spec)):
                return False
        return True

    def isometry_relations():
        for slot in range(spec.k):
            fiber = spec.unit_fiber(slot)
            for a in spec.basis(fiber):
                for b in spec.basis(fiber):
                    prod = algebra.multiply(
                        algebra.isometry(spec, a).adjoint(),
                        algebra.isometry(spec, b),
                    )
                    want = (
                        algebra.identity(spec) if a == b else algebra.zero(spec)
                    )
                    if not algebra.equals(prod, want):
                        return False
        return True

    def random_element():
        fibers = [(0,) * spec.k, spec.unit_fiber(0), spec.unit_fiber(spec.k - 1)]
        acc = algebra.zero(spec)
        for _ in range(3):
            s = rng.choice(fibers)
            t = rng.choice(fibers)
            acc = acc + algebra.monomial_pair(
                spec,
                spec.monomial(s, rng.randrange(spec.dim(s))),
                spec.monomial(t, rng.randrange(spec.dim(t))),
                Fraction(rng.randint(-2, 2) or 1),
            )
        return acc

    def normal_form_roundtrip():
        for _ in range(5):
            a = random_element()
            b = algebra.expand_normal_form(algebra.normal_form(a))
            if not algebra.equals(a, b):
                return False
            if not spec.is_twisted:
                fam_a = steprep.evaluate(a)
                fam_b = steprep.evaluate(b, fam_a.base_level)
                if not fam_a.equal(fam_b):
                    return False
        return True

    def printer_roundtrip():
        for _ in range(5):
            a = random_element()
            text = expr.format_element(a)
            if expr.parse_element(spec, text) != a:
                return False
        return True

    def alpha_unital():
        one = algebra.identity(spec)
        for slot in range(spec.k):
            shifted = algebra.shift_endomorphism(one, spec.unit_fiber(slot))
            if not algebra.equals(shifted, one):
                return False
        a = random_element()
        return algebra.equals(algebra.shift_endomorphism(a, (0,) * spec.k), a)

    yield "cuntz sums", cuntz_sums
    yield "isometry relations", isometry_relations
    yield "normal form round trip", normal_form_roundtrip
    yield "printer round trip", printer_roundtrip
    yield "alpha unital", alpha_unital


_SELFTEST_VERDICTS = {
    "e23": "SimplePurelyInfinite",
    "e24": "TensorCircle(2)",
    "e48": "TensorCircle(2)",
    "e15": "TensorCircle(5)",
    "tw14": "Unknown",
}


def _cmd_selftest(args, reporter: Reporter) -> int:
    rng = random.Random(20240817)
    failures = 0
    total = 0
    for name, text in BUILTIN_SPECS.items():
        spec = parse_spec_text(text)
        for label, check in _selftest_checks(spec, name, rng):
            total += 1
            ok = bool(check())
            failures += not ok
            reporter.emit(
                f"{'ok' if ok else 'FAIL'} {name}: {label}",
                command="selftest",
                spec=name,
                check=label,
                ok=ok,
            )
        total += 1
        verdict = analysis.classify(spec).verdict()
        ok = verdict == _SELFTEST_VERDICTS[name]
        failures += not ok
        reporter.emit(
            f"{'ok' if ok else 'FAIL'} {name}: classify -> {verdict}",
            command="selftest",
            spec=name,
            check="classify",
            ok=ok,
        )

    # the twisted builtin carries the commutation phase UV = zeta_4 VU
    twisted = parse_spec_text(BUILTIN_SPECS["tw14"])
    U = algebra.isometry(twisted, twisted.monomial((0, 1), 0))
    V = algebra.isometry(twisted, twisted.monomial((1, 0), 0))
    zeta = twisted.field.zeta_power(1)
    total += 1
    ok = algebra.equals(
        algebra.multiply(U, V), algebra.multiply(V, U).scaled(zeta)
    )
    failures += not ok
    reporter.emit(
        f"{'ok' if ok else 'FAIL'} tw14: UV = zeta*VU",
        command="selftest",
        spec="tw14",
        check="twist phase",
        ok=ok,
    )

    # witness for the dimension collision of e24, criterion-style
    e24 = parse_spec_text(BUILTIN_SPECS["e24"])
    element, twist = analysis.nonsimplicity_witness(e24, (2, 0), (0, 1))
    total += 1
    ok = steprep.evaluate(element).is_zero() and not steprep.evaluate_twisted(
        element, twist
    ).is_zero()
    failures += not ok
    reporter.emit(
        f"{'ok' if ok else 'FAIL'} e24: witness separates representations",
        command="selftest",
        spec="e24",
        check="witness",
        ok=ok,
    )

    reporter.emit(
        f"selftest: {total - failures} of {total} checks passed",
        command="selftest",
        passed=total - failures,
        total=total,
    )
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# argument surface


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuntzlab",
        description="Exact computer algebra for product-system Cuntz algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("--spec", required=True, help="path to a spec file")
        p.add_argument(
            "--format",
            choices=("text", "json-lines"),
            default="text",
            help="output format (default: text)",
        )

    p = sub.add_parser("normalize", help="canonical normal form of an expression")
    common(p)
    p.add_argument("expression")
    p.set_defaults(handler=_cmd_normalize)

    p = sub.add_parser("equals", help="decide equality of two expressions")
    common(p)
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(handler=_cmd_equals)

    p = sub.add_parser("expect", help="gauge-invariant expectation of an expression")
    common(p)
    p.add_argument("expression")
    p.set_defaults(handler=_cmd_expect)

    p = sub.add_parser("alpha", help="apply the shift endomorphism for a fiber")
    common(p)
    p.add_argument("fiber", help="comma-separated fiber, e.g. 1,0")
    p.add_argument("expression")
    p.set_defaults(handler=_cmd_alpha)

    p = sub.add_parser("eval", help="evaluate in the step representation")
    common(p)
    p.add_argument("--level", type=int, default=None, help="base level")
    p.add_argument(
        "--lambda",
        dest="lambda_values",
        default=None,
        help="comma-separated modulus-one scalars twisting the generators",
    )
    p.add_argument("expression")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("classify", help="simplicity classification of a spec")
    common(p)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("witness", help="nonsimplicity witness for a spec")
    common(p)
    p.set_defaults(handler=_cmd_witness)

    p = sub.add_parser("kill", help="annihilate a monomial pair by compression")
    common(p)
    p.add_argument("x", help="left generator monomial, e.g. 'e(1,0;0)'")
    p.add_argument("y", help="right generator monomial")
    p.add_argument("--shift", default=None, help="shift fiber (default: as summed)")
    p.set_defaults(handler=_cmd_kill)

    p = sub.add_parser("iso", help="dimension-absorbing isomorphism round trip")
    common(p, spec=False)
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.set_defaults(handler=_cmd_iso)

    p = sub.add_parser("relations", help="check a generator assignment file")
    common(p)
    p.add_argument(
        "--target", default=None, help="target spec path (default: --spec)"
    )
    p.add_argument("assignment", help="file of '(a,i) = <expression>' lines")
    p.set_defaults(handler=_cmd_relations)

    p = sub.add_parser("selftest", help="run the built-in verification battery")
    common(p, spec=False)
    p.set_defaults(handler=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    reporter = Reporter(args.format)
    try:
        return args.handler(args, reporter)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
