"""Command-line front end.

Every verification suite is exposed as a subcommand; output formats are
``text`` (default), ``json``, and ``latex``.  Exit status: 0 when every
check passes, 1 on check failures or refused reductions, 2 on usage
errors.  With ``--server URL`` the command is executed by a running
service instead of in-process, and the response is rendered locally.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .algebra import AlgebraError, UnsupportedOperation
from .parser import ParseError
from .suites import (Report, Check, report_latex, report_text, run_classify,
                     run_eval, run_reduce, run_table, run_verify_solutions,
                     run_verify_symmetries, run_verify_system)

_FORMATS = ("text", "json", "latex")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="susyfluid",
        description="Graded symbolic verification suites for the "
                    "supersymmetric two-phase fluid system")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=_FORMATS, default="text")
        p.add_argument("--server", metavar="URL", default=None,
                       help="run the command against a running service")

    common(sub.add_parser("table", help="supercommutation table of the six "
                                        "symmetry generators"))
    common(sub.add_parser("verify-system",
                          help="operator identities, coordinate expansion, "
                               "classical limits, Riemann-invariant form"))
    common(sub.add_parser("verify-symmetries",
                          help="finite-flow symmetry checks for all six "
                               "generators"))

    p = sub.add_parser("classify", help="subalgebra classification")
    p.add_argument("--level", choices=("A", "B", "C", "G", "L"), required=True)
    p.add_argument("--sample-conjugacy", type=int, default=0, metavar="TRIALS")
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("reduce", help="invariant chart and reduced system")
    p.add_argument("--subalgebra", required=True, metavar="ID")
    common(p)

    p = sub.add_parser("verify-solutions", help="residuals of the catalogued "
                                                "solution families")
    p.add_argument("--id", default=None, metavar="FAMILY")
    common(p)

    p = sub.add_parser("eval", help="evaluate a program file")
    p.add_argument("--input", required=True, metavar="FILE")
    common(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _run_local(args) -> Report:
    if args.command == "table":
        return run_table()
    if args.command == "verify-system":
        return run_verify_system()
    if args.command == "verify-symmetries":
        return run_verify_symmetries()
    if args.command == "classify":
        return run_classify(args.level, args.sample_conjugacy, args.seed)
    if args.command == "reduce":
        return run_reduce(args.subalgebra)
    if args.command == "verify-solutions":
        return run_verify_solutions(args.id)
    if args.command == "eval":
        with open(args.input, "r", encoding="utf-8") as fh:
            return run_eval(fh.read())
    raise AssertionError(args.command)


def _run_remote(args) -> Report:
    import httpx

    base = args.server.rstrip("/")
    if args.command == "table":
        resp = httpx.get(f"{base}/table")
    elif args.command == "verify-system":
        resp = httpx.get(f"{base}/verify/system")
    elif args.command == "verify-symmetries":
        resp = httpx.get(f"{base}/verify/symmetries")
    elif args.command == "classify":
        resp = httpx.get(f"{base}/classify/{args.level}",
                         params={"sample_conjugacy": args.sample_conjugacy,
                                 "seed": args.seed})
    elif args.command == "reduce":
        resp = httpx.get(f"{base}/reduce/{args.subalgebra}")
    elif args.command == "verify-solutions":
        params = {} if args.id is None else {"id": args.id}
        resp = httpx.get(f"{base}/solutions/verify", params=params)
    elif args.command == "eval":
        with open(args.input, "r", encoding="utf-8") as fh:
            resp = httpx.post(f"{base}/eval", json={"source": fh.read()})
    else:
        raise AssertionError(args.command)
    resp.raise_for_status()
    data = resp.json()
    report = Report(data["suite"])
    for c in data["checks"]:
        report.checks.append(Check(c["name"], c["passed"], c.get("details", ""),
                                   c.get("payload")))
    return report


def render_report(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2)
    if fmt == "latex":
        return report_latex(report)
    return report_text(report)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        report = _run_remote(args) if args.server else _run_local(args)
    except UnsupportedOperation as err:
        print(f"diagnostic: {err}", file=sys.stderr)
        return 1
    except (ParseError, FileNotFoundError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except AlgebraError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    print(render_report(report, args.format))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
