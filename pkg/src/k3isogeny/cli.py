"""Command line interface.

Verbs:
    decompose   factor a rational isometry into reflections
    lift        lift one reflection through its B-field to the Mukai lattice
    chain       run the full pipeline and emit an isogeny certificate
    verify      re-run every check recorded in a certificate
    demo        print a built-in input document

Exit codes: 0 all checks pass, 1 parse or usage error, 2 a mathematical
precondition fails, 3 a verification check fails.
"""

from __future__ import annotations

import argparse
import json
import sys

from .pipeline import (
    DEMO_NAMES,
    InputError,
    PreconditionError,
    demo_document,
    decompose_document,
    lift_report,
    parse_input_document,
    parse_lattice,
    parse_mat,
    run_pipeline,
    verify_certificate,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_PRECONDITION = 2
EXIT_VERIFICATION = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; this tool reserves 2 for
    # mathematical preconditions, so usage errors map to 1 instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_PARSE)


def _read_input(args):
    try:
        if args.input and args.input != "-":
            with open(args.input) as fh:
                return json.load(fh)
        return json.load(sys.stdin)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read input: {exc}") from exc


def _write_output(args, doc):
    text = json.dumps(doc, indent=2)
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _print_report(report, quiet):
    if quiet:
        return
    for check in report["checks"]:
        mark = "PASS" if check["pass"] else "FAIL"
        print(f"{mark} {check['name']}", file=sys.stderr)
    total = len(report["checks"])
    good = sum(1 for c in report["checks"] if c["pass"])
    print(f"{good}/{total} checks passed", file=sys.stderr)


def _cmd_decompose(args):
    doc = _read_input(args)
    if not isinstance(doc, dict) or "lattice" not in doc or "isometry" not in doc:
        raise InputError("decompose input needs 'lattice' and 'isometry'")
    lat = parse_lattice(doc["lattice"])
    from .exact import freeze
    from .isometries import NotAnIsometryError, RationalIsometry
    try:
        phi = RationalIsometry(lat, lat, freeze(parse_mat(doc["isometry"])))
    except NotAnIsometryError as exc:
        raise PreconditionError(str(exc)) from exc
    out = decompose_document(lat, phi)
    _write_output(args, out)
    if not args.quiet:
        print(f"{out['length']} reflections (rank {out['rank']}), "
              f"recomposes: {out['recomposes']}", file=sys.stderr)
    return EXIT_OK if out["recomposes"] else EXIT_VERIFICATION


def _cmd_lift(args):
    out = lift_report(_read_input(args))
    _write_output(args, out)
    if not args.quiet:
        print(f"n = {out['n']}, Lambda_B index {out['lambda_B_index']}, "
              f"orientation {out['orientation_before']} -> "
              f"{out['orientation_after']}", file=sys.stderr)
    return EXIT_OK


def _cmd_chain(args):
    doc = _read_input(args)
    parse_input_document(doc)  # surface InputError before heavy work
    out = run_pipeline(doc, decompose_only=args.decompose_only)
    _write_output(args, out)
    if out.get("decompose_only"):
        return EXIT_OK if out["recomposes"] else EXIT_VERIFICATION
    _print_report(out["verification"], args.quiet)
    return EXIT_OK if out["verification"]["all_pass"] else EXIT_VERIFICATION


def _cmd_verify(args):
    report = verify_certificate(_read_input(args))
    _write_output(args, report)
    _print_report(report, args.quiet)
    return EXIT_OK if report["all_pass"] else EXIT_VERIFICATION


def _cmd_demo(args):
    _write_output(args, demo_document(args.name, seed=args.seed))
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="k3isogeny", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--input", help="input JSON file ('-' or omitted: stdin)")
        p.add_argument("--output", help="output JSON file (default: stdout)")
        p.add_argument("--quiet", action="store_true",
                       help="suppress per-check progress lines")

    p = sub.add_parser("decompose", help="factor an isometry into reflections")
    common(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("lift", help="lift a reflection to the Mukai lattice")
    common(p)
    p.set_defaults(func=_cmd_lift)

    p = sub.add_parser("chain", help="emit a full isogeny certificate")
    common(p)
    p.add_argument("--decompose-only", action="store_true",
                   help="stop after the reflection factorization")
    p.set_defaults(func=_cmd_chain)

    p = sub.add_parser("verify", help="re-check an isogeny certificate")
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("demo", help="print a built-in input document")
    p.add_argument("name", choices=DEMO_NAMES)
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the randomized demo document")
    p.add_argument("--output", help="output JSON file (default: stdout)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"k3isogeny: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"k3isogeny: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
