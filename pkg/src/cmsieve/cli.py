"""Command-line interface.

Exit codes: 0 success, 2 hypothesis violation (degenerate curve),
3 resource cap exceeded, 4 parse error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bounds import AndreOortParams, HeegnerParams, andre_oort_c11, heegner_c1
from .dirichlet import RealCharacter, l_one
from .errors import CurveParseError, DegenerateCurveError, ResourceLimitError
from .hilbert import hilbert_class_poly
from .quadform import as_discriminant, class_group, two_torsion_size
from .sieve import (
    CapVsBound,
    derive_c9,
    parse_curve,
    report_to_json_text,
    sieve,
    strip_degenerate,
)

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_RESOURCE = 3
EXIT_PARSE = 4


def _curve_argument(value: str, field_degree: int):
    if os.path.exists(value):
        with open(value) as fh:
            value = fh.read()
    return parse_curve(value, field_degree)


def _print_bound_report(report):
    print(f"threshold: {report.threshold}")
    print(f"  (about 2^{report.threshold.bit_length() - 1}, "
          f"epsilon1={report.epsilon1}, epsilon2={report.epsilon2})")
    print("  one exceptional imaginary quadratic field can never be excluded")
    print("audit:")
    for entry in report.audit:
        print(f"  {entry.name} = {entry.value}    [{entry.formula}]")


def _eps_grid(arg):
    if not arg:
        return None
    grid = []
    for pair in arg:
        parts = pair.split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(
                f"--eps-grid entries look like '0.12,0.04', got {pair!r}"
            )
        grid.append((float(parts[0]), float(parts[1])))
    return grid


def cmd_classgroup(args):
    d = as_discriminant(args.D)
    structure = class_group(d)
    print(f"discriminant {d.value} = {d.conductor}^2 * {d.fundamental_part}"
          f" (conductor {d.conductor})")
    print(f"h = {structure.order}")
    divisors = structure.elementary_divisors
    print("elementary divisors: " + (" | ".join(map(str, divisors)) or "1"))
    print(f"two-torsion: {structure.two_torsion_size}"
          f" (genus count {two_torsion_size(d)})")
    print("reduced forms:")
    for f in structure.reduced_forms:
        print(f"  ({f.a}, {f.b}, {f.c})")
    return EXIT_OK


def cmd_hilbert(args):
    poly = hilbert_class_poly(as_discriminant(args.D))
    print(f"H_{args.D}(x) = {poly}")
    return EXIT_OK


def cmd_lvalue(args):
    d = as_discriminant(args.D)
    chi = RealCharacter.for_discriminant(d)
    print(f"L(1, chi_{d.value}) = {l_one(chi, args.tol):.12f}  (+- {args.tol})")
    return EXIT_OK


def cmd_bound_heegner(args):
    report = heegner_c1(
        HeegnerParams(r=args.r, c5=args.c5, c6=args.deg_pi),
        eps_grid=_eps_grid(args.eps_grid),
    )
    _print_bound_report(report)
    return EXIT_OK


def cmd_bound_ao(args):
    curve = _curve_argument(args.curve, args.field_degree)
    stripped, _ = strip_degenerate(curve)
    report = andre_oort_c11(AndreOortParams(n=2, c9=derive_c9(stripped)))
    _print_bound_report(report)
    return EXIT_OK


def cmd_sieve(args):
    curve = _curve_argument(args.curve, args.field_degree)
    report = sieve(curve, cap_override=args.cap, eps_grid=_eps_grid(args.eps_grid))
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(report_to_json_text(report) + "\n")
        print(f"wrote {args.json}")
    print(f"curve: {report.curve.expr()} = 0")
    if report.z_prime:
        print("stripped fiber components (Z'):")
        for comp in report.z_prime:
            print(f"  {comp}  (multiplicity {comp.multiplicity})")
    print(f"rigorous |D| bound: {report.c11.threshold}"
          f"  (about 2^{report.c11.threshold.bit_length() - 1})")
    print(f"scanned |D| <= {report.enumeration_cap}: {report.cap_vs_bound.value}")
    if report.cap_vs_bound is CapVsBound.CAP_BELOW_BOUND:
        print("  the scan does NOT certify completeness up to the bound")
    print(f"hits: {len(report.hits)}")
    for hit in report.hits:
        kind = "same CM field" if hit.same_cm_field else "distinct CM fields"
        print(f"  D1={hit.d1.value} D2={hit.d2.value}  [{kind}]"
              f"  witness {hit.witness.as_expr()} = 0")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cmsieve",
        description="class groups, effective bounds, and the special-point"
        " sieve for plane curves in Y(1)^2",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classgroup", help="class group of a discriminant")
    p.add_argument("D", type=int)
    p.set_defaults(func=cmd_classgroup)

    p = sub.add_parser("hilbert", help="Hilbert class polynomial")
    p.add_argument("D", type=int)
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("lvalue", help="L(1, chi_D) for fundamental D")
    p.add_argument("D", type=int)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_lvalue)

    p = sub.add_parser("bound-heegner", help="discriminant threshold c1")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--c5", type=float, required=True)
    p.add_argument("--deg-pi", type=int, required=True)
    p.add_argument("--eps-grid", nargs="*", metavar="E1,E2")
    p.set_defaults(func=cmd_bound_heegner)

    p = sub.add_parser("bound-ao", help="discriminant threshold c11")
    p.add_argument("--curve", required=True, metavar="FILE|EXPR")
    p.add_argument("--field-degree", type=int, default=1)
    p.set_defaults(func=cmd_bound_ao)

    p = sub.add_parser("sieve", help="special-point sieve for a plane curve")
    p.add_argument("--curve", required=True, metavar="FILE|EXPR")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--field-degree", type=int, default=1)
    p.add_argument("--eps-grid", nargs="*", metavar="E1,E2")
    p.add_argument("--json", metavar="OUT.json")
    p.set_defaults(func=cmd_sieve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateCurveError as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except CurveParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
