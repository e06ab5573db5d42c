"""Batch front end: reduce / verify / bounds / bench over a JSON function format.

Exit codes are a stable contract: 0 success, 1 verification failure,
2 malformed input, 3 enumeration guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

import mpmath

from . import bounds as bounds_mod
from .liftings import reduce_via_ft
from .model import (
    BoxDomain,
    Certificate,
    FunctionClass,
    FunctionSpec,
    LinearFn,
    QuadFn,
    SepQuadFn,
    SeparableFn,
    Shape,
    SizeGuardExceeded,
)
from .oracle import check_equivalent
from .reducelp import reduce_via_lp

SCHEMA_VERSION = "1"
ENV_MAX_POINTS = "GAPFORGE_MAX_POINTS"

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_GUARD = 3


def _parse_rational(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"exact rational required, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"cannot parse rational from {value!r}")


def _parse_int(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"integer required, got {value!r}")
    return value


def _emit_rational(value: Fraction):
    value = Fraction(value)
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


def _parse_shape(doc, n: int):
    raw = doc.get("shape")
    if raw is None:
        return ()
    if not isinstance(raw, list) or len(raw) != n:
        raise ValueError("shape must list one flag per coordinate")
    return tuple(Shape(s) for s in raw)


def parse_function_document(doc) -> FunctionSpec:
    """Validate and decode one FunctionDocument into a FunctionSpec."""
    if not isinstance(doc, dict):
        raise ValueError("document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    cls = FunctionClass(doc.get("class"))
    box = BoxDomain(_parse_int(doc.get("n")), _parse_int(doc.get("N")))

    if cls is FunctionClass.LINEAR:
        coeffs = doc.get("coeffs")
        if not isinstance(coeffs, list):
            raise ValueError("linear documents need a coeffs array")
        return LinearFn(box, tuple(_parse_rational(c) for c in coeffs))

    if cls is FunctionClass.SEPARABLE:
        tables = doc.get("tables")
        if not isinstance(tables, list) or not all(isinstance(r, list) for r in tables):
            raise ValueError("separable documents need an array of table rows")
        rows = tuple(tuple(_parse_int(v) for v in row) for row in tables)
        return SeparableFn(box, rows, _parse_shape(doc, box.n))

    if cls is FunctionClass.SEPARABLE_QUADRATIC:
        parts = []
        for name in ("alpha", "beta", "gamma"):
            arr = doc.get(name)
            if not isinstance(arr, list):
                raise ValueError(f"separable_quadratic documents need an {name} array")
            parts.append(tuple(_parse_rational(v) for v in arr))
        return SepQuadFn(box, parts[0], parts[1], parts[2], _parse_shape(doc, box.n))

    triples = doc.get("alpha")
    if not isinstance(triples, list):
        raise ValueError("quadratic documents need an alpha array of [i, j, value]")
    n = box.n
    alpha = [Fraction(0)] * (n * (n + 1) // 2)
    seen = set()
    for entry in triples:
        if not (isinstance(entry, list) and len(entry) == 3):
            raise ValueError("alpha entries must be [i, j, value] triples")
        i, j = _parse_int(entry[0]) - 1, _parse_int(entry[1]) - 1
        if not 0 <= i <= j < n:
            raise ValueError(f"alpha indices ({entry[0]}, {entry[1]}) out of range")
        if (i, j) in seen:
            raise ValueError(f"duplicate alpha entry ({entry[0]}, {entry[1]})")
        seen.add((i, j))
        alpha[QuadFn.pair_index(i, j, n)] = _parse_rational(entry[2])
    beta = doc.get("beta")
    if not isinstance(beta, list):
        raise ValueError("quadratic documents need a beta array")
    gamma = _parse_rational(doc.get("gamma", 0))
    return QuadFn(box, tuple(alpha), tuple(_parse_rational(v) for v in beta), gamma)


def function_document(spec: FunctionSpec, cert: Certificate | None = None) -> dict:
    """Encode a FunctionSpec (and optional certificate) as a FunctionDocument."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "class": spec.function_class.value,
        "n": spec.box.n,
        "N": spec.box.N,
    }
    if isinstance(spec, LinearFn):
        doc["coeffs"] = [_emit_rational(c) for c in spec.coeffs]
    elif isinstance(spec, SeparableFn):
        doc["tables"] = [[_emit_rational(v) for v in row] for row in spec.tables]
        doc["shape"] = [s.value for s in spec.shape]
    elif isinstance(spec, SepQuadFn):
        doc["alpha"] = [_emit_rational(v) for v in spec.alpha]
        doc["beta"] = [_emit_rational(v) for v in spec.beta]
        doc["gamma"] = [_emit_rational(v) for v in spec.gamma]
        doc["shape"] = [s.value for s in spec.shape]
    elif isinstance(spec, QuadFn):
        triples = []
        pos = 0
        for i in range(spec.box.n):
            for j in range(i, spec.box.n):
                if spec.alpha[pos] != 0:
                    triples.append([i + 1, j + 1, _emit_rational(spec.alpha[pos])])
                pos += 1
        doc["alpha"] = triples
        doc["beta"] = [_emit_rational(v) for v in spec.beta]
        doc["gamma"] = _emit_rational(spec.gamma)
    else:
        raise ValueError(f"cannot serialize {type(spec).__name__}")
    if cert is not None:
        doc["certificate"] = {
            "method": cert.method.value,
            "gap": str(cert.gap),
            "bound": str(cert.bound),
            "verified": cert.verified,
            "counterexample": (
                None
                if cert.counterexample is None
                else {
                    "x": list(cert.counterexample[0]),
                    "y": list(cert.counterexample[1]),
                }
            ),
        }
    return doc


def _resolve_max_points(args) -> int | None:
    if getattr(args, "max_points", None) is not None:
        return args.max_points
    env = os.environ.get(ENV_MAX_POINTS)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"{ENV_MAX_POINTS} must be an integer, got {env!r}") from exc
    return None


def _load_document(path: str) -> FunctionSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_function_document(json.load(fh))


def cmd_reduce(args) -> int:
    spec = _load_document(args.input)
    max_points = _resolve_max_points(args)
    if args.method == "lp":
        g, cert = reduce_via_lp(spec, max_points=max_points)
    else:
        try:
            g, cert = reduce_via_ft(spec, verify=True, max_points=max_points)
        except SizeGuardExceeded:
            if args.verify:
                raise
            g, cert = reduce_via_ft(spec, verify=False, max_points=max_points)
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(function_document(g, cert), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.verify and not cert.verified:
        print("verification failed", file=sys.stderr)
        if cert.counterexample:
            print(f"counterexample: {cert.counterexample}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    print(f"reduced: gap={cert.gap} bound={cert.bound} verified={cert.verified}")
    return EXIT_OK


def cmd_verify(args) -> int:
    f = _load_document(args.f)
    g = _load_document(args.g)
    if f.box != g.box:
        raise ValueError("functions must share the same n and N")
    verdict = check_equivalent(f, g, _resolve_max_points(args))
    if verdict.equivalent:
        print("Equivalent")
        return EXIT_OK
    ce = verdict.counterexample
    print(f"Counterexample: x={list(ce.x)} y={list(ce.y)} reason={ce.reason.value}")
    return EXIT_VERIFY_FAILED


def _format_mpf(value) -> str:
    return mpmath.nstr(value, 12)


def cmd_bounds(args) -> int:
    cls = FunctionClass(args.cls)
    report = bounds_mod.bound_report(cls, args.n, args.N)
    if args.json:
        payload = {
            "class": cls.value,
            "n": report.n,
            "N": report.N,
            "d": report.d,
            "a": report.a,
            "dfact_bound": str(report.exact_dfact_bound),
            "rho_upper": _format_mpf(report.rho),
            "simple_bounds": {k: str(v) for k, v in report.simple_bound.items()},
            "prior_bounds": {k: str(v) for k, v in report.prior_bounds.items()},
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"class={cls.value} n={report.n} N={report.N} (d={report.d}, a={report.a})")
    print(f"  exact d!*a^d:        {report.exact_dfact_bound}")
    print(f"  rho (rounded up):    {_format_mpf(report.rho)}")
    for label, value in report.simple_bound.items():
        print(f"  {label}: {value}")
    for label, value in report.prior_bounds.items():
        print(f"  {label}: {value}")
    return EXIT_OK


def _random_instance(cls: FunctionClass, box: BoxDomain, rng: random.Random, bound: int):
    n, N = box.n, box.N

    def draw() -> int:
        return rng.randint(-bound, bound)

    if cls is FunctionClass.LINEAR:
        return LinearFn(box, tuple(draw() for _ in range(n)))
    if cls is FunctionClass.SEPARABLE:
        rows = tuple(tuple(draw() for _ in range(2 * N + 1)) for _ in range(n))
        return SeparableFn(box, rows)
    if cls is FunctionClass.SEPARABLE_QUADRATIC:
        return SepQuadFn(
            box,
            tuple(draw() for _ in range(n)),
            tuple(draw() for _ in range(n)),
            (Fraction(0),) * n,
        )
    return QuadFn(
        box,
        tuple(draw() for _ in range(n * (n + 1) // 2)),
        tuple(draw() for _ in range(n)),
        Fraction(0),
    )


def cmd_bench(args) -> int:
    cls = FunctionClass(args.cls)
    box = BoxDomain(args.n, args.N)
    rng = random.Random(args.seed)
    max_points = _resolve_max_points(args)
    d, a = bounds_mod.lp_dimensions(cls, args.n, args.N)
    dfact = bounds_mod.dfact_bound(d, a)
    rho_str = _format_mpf(bounds_mod.rho(cls, args.n, args.N))
    print(
        f"# bench class={cls.value} n={args.n} N={args.N} trials={args.trials} "
        f"seed={args.seed} method={args.method} coeff_bound={args.coeff_bound}"
    )
    print(f"{'trial':>5}  {'gap':>16}  {'dfact_bound':>16}  {'rho_upper':>20}  verified")
    for trial in range(args.trials):
        f = _random_instance(cls, box, rng, args.coeff_bound)
        if args.method == "lp":
            _, cert = reduce_via_lp(f, max_points=max_points)
        else:
            _, cert = reduce_via_ft(f, verify=True, max_points=max_points)
        print(
            f"{trial:>5}  {cert.gap:>16}  {dfact:>16}  {rho_str:>20}  "
            f"{str(cert.verified).lower()}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapforge",
        description="Order-equivalent objective compression with gap certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="replace a function by an equivalent one")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--method", choices=("lp", "ft"), required=True)
    p.add_argument("--verify", action="store_true", help="fail on any counterexample")
    p.add_argument("--max-points", type=int, default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="check order equivalence of two functions")
    p.add_argument("-f", required=True)
    p.add_argument("-g", required=True)
    p.add_argument("--max-points", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="print the bound table for a configuration")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-N", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bench", help="seeded random instances through a reducer")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-N", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--method", choices=("lp", "ft"), default="lp")
    p.add_argument("--coeff-bound", type=int, default=10**6)
    p.add_argument("--max-points", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeGuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
