"""Command-line front end.

Thin client over the handlers in :mod:`ppcomp.api`: reads the referenced
files, dispatches, and renders either human-readable text or the
structured report object (schema "ppcomp/1").

Exit codes: 0 = yes/pass, 1 = no, 2 = usage or parse error, 3 = budget
exceeded.  The environment variable PPCOMP_BUDGET overrides the default
variable-count guard.
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import api
from .errors import BudgetExceededError, PPCompError
from .evaluate import DEFAULT_VAR_BUDGET

EXIT_YES = 0
EXIT_NO = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3


def _read(path):
    return Path(path).read_text()


def _budget(args):
    if args.budget is not None:
        return args.budget
    env = os.environ.get("PPCOMP_BUDGET")
    return int(env) if env else DEFAULT_VAR_BUDGET


def _inputs(args):
    paths = {}
    for field in ("structure", "phi", "psi", "input", "lhs", "rhs", "package"):
        value = getattr(args, field, None)
        if value is not None:
            paths[field] = value
    pentagons = getattr(args, "pentagons", None)
    if pentagons:
        paths["pentagons"] = list(pentagons)
    return paths


def _emit(report, args, started):
    if args.format == "json":
        report = dict(report)
        report["inputs"] = _inputs(args)
        report["timing"] = round(time.monotonic() - started, 6)
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    verdict = report.get("verdict")
    if verdict is not None:
        print(verdict)
        if verdict == "no" and args.witness and report.get("witness") is not None:
            print(f"witness: {json.dumps(report['witness'], sort_keys=True)}")
    elif "ok" in report:
        print("ok" if report["ok"] else "FAILED")
        for failure in report.get("failures", []):
            print(f"  - {failure}")
    else:
        for key, value in report.items():
            if key in ("schema", "command"):
                continue
            print(f"{key}: {json.dumps(value, sort_keys=True)}")


def _exit_code(report):
    verdict = report.get("verdict")
    if verdict is not None:
        return EXIT_YES if verdict == "yes" else EXIT_NO
    if "ok" in report:
        return EXIT_YES if report["ok"] else EXIT_NO
    verification = report.get("verification")
    if verification is not None and not verification["ok"]:
        return EXIT_NO
    return EXIT_YES


def _load_package_file(path):
    """A package file is JSON; keys ending in _file (or the values of
    'algebra', 'source', and entries of 'pentagons') reference grammar
    files relative to the JSON file."""
    base = Path(path).parent
    raw = json.loads(_read(path))
    out = {}
    for key, value in raw.items():
        if key in ("algebra", "source"):
            out[key] = (base / value).read_text()
        elif key == "pentagons":
            out[key] = [(base / p).read_text() for p in value]
        else:
            out[key] = value
    return out


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ppcomp",
        description="Equivalence and containment of pp-formulas over finite "
        "structures, with reduction pipelines.",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--witness", action="store_true", help="print witnesses")
    parser.add_argument("--budget", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("ppeq", "ppcon"):
        p = sub.add_parser(name)
        p.add_argument("structure")
        p.add_argument("phi")
        p.add_argument("psi")

    p = sub.add_parser("entail")
    p.add_argument("phi")
    p.add_argument("psi")
    p.add_argument("pentagons", nargs="+")

    p = sub.add_parser("analyze")
    p.add_argument("input")

    p = sub.add_parser("dnf")
    p.add_argument("input")

    p = sub.add_parser("latineq")
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.add_argument("pentagons", nargs="+")
    p.add_argument("--generators", action="store_true",
                   help="restrict assignments to the pentagon generators")

    p = sub.add_parser("validate")
    p.add_argument("kind", choices=("pentagon", "unary", "amalgam"))
    p.add_argument("input")
    p.add_argument("--skip-axiom4", action="store_true")

    p = sub.add_parser("reduce")
    p.add_argument("pipeline", choices=("unary", "latterm", "sorted"))
    p.add_argument("--package", help="package JSON file (unary and sorted)")
    p.add_argument("--pentagons", nargs="+", default=[],
                   help="pentagon files (latterm)")
    p.add_argument("--phi", help="first input file (formula or term)")
    p.add_argument("--psi", help="second input file")
    p.add_argument("--out", help="directory for emitted formula files")
    p.add_argument("--verify", action="store_true")
    return parser


def _dispatch(args):
    budget = _budget(args)
    if args.command in ("ppeq", "ppcon"):
        runner = api.run_ppeq if args.command == "ppeq" else api.run_ppcon
        return runner(_read(args.structure), _read(args.phi), _read(args.psi), budget)
    if args.command == "entail":
        return api.run_entail(
            _read(args.phi), _read(args.psi),
            [_read(p) for p in args.pentagons], budget,
        )
    if args.command == "analyze":
        return api.run_analyze(_read(args.input))
    if args.command == "dnf":
        return api.run_dnf(_read(args.input))
    if args.command == "latineq":
        return api.run_latineq(
            _read(args.lhs), _read(args.rhs),
            [_read(p) for p in args.pentagons], args.generators,
        )
    if args.command == "validate":
        if args.kind == "pentagon":
            payload = {
                "pentagon": _read(args.input),
                "skip_axiom4": args.skip_axiom4,
            }
        else:
            payload = _load_package_file(args.input)
        return api.run_validate(args.kind, payload)
    if args.command == "reduce":
        if args.pipeline == "latterm":
            payload = {
                "pentagons": [_read(p) for p in args.pentagons],
                "lhs": _read(args.phi),
                "rhs": _read(args.psi),
            }
        else:
            payload = {
                "package": _load_package_file(args.package),
                "phi": _read(args.phi),
                "psi": _read(args.psi),
            }
        report = api.run_reduce(args.pipeline, payload, args.verify, budget)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            for key, text in report["outputs"].items():
                (out / f"{key}.ppf").write_text(text + "\n")
        return report
    raise AssertionError(args.command)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        report = _dispatch(args)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PPCompError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _emit(report, args, started)
    return _exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
