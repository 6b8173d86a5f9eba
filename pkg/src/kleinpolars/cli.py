"""Command line: ``kleinpolars verify SUITE``, plus dumps and certificate replay."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .cache import CACHE_ENV, Cache
from .certificate import IntegrityError, seal
from .suites import CASES, SUITES, Flags, Session, UsageError, recheck_path, run_suite

EMITTABLE = ("census.K",) + tuple(f"containment.{c}" for c in CASES)


def _suite_flags(p: argparse.ArgumentParser):
    p.add_argument("--case", choices=CASES, help="containment case to run")
    p.add_argument("--long", action="store_true", help="also run long-running checks")
    p.add_argument("--no-cache", action="store_true", help="recompute instead of reading the cache")
    p.add_argument("--budget-spairs", type=int, metavar="N", help="S-pair budget for Groebner runs")
    p.add_argument("--budget-wall", type=float, metavar="SECONDS", help="wall-clock budget for Groebner runs")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.add_argument("--certs", metavar="DIR", help="write certificates into DIR")
    p.add_argument("--k", type=int, default=2, help="depth of the pullback chain (iterate)")
    p.add_argument("--cache-dir", metavar="DIR", help=f"cache directory (default: ${CACHE_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kleinpolars", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a named suite")
    v.add_argument("suite", nargs="?", help=f"one of {', '.join(SUITES)}, all")
    v.add_argument("--suite", dest="suite_opt", help="same as the positional argument")
    _suite_flags(v)

    # shorthands: `kleinpolars census` == `kleinpolars verify census`
    for name in SUITES + ("all",):
        s = sub.add_parser(name, help=f"verify {name}")
        if name in ("group", "catalogue"):
            s.add_argument("action", nargs="?", choices=("dump",), help="print the canonical dump")
        _suite_flags(s)

    r = sub.add_parser("recheck", help="replay a certificate file")
    r.add_argument("path")

    e = sub.add_parser("emit", help="compute a check and write its certificate")
    e.add_argument("check", choices=EMITTABLE)
    e.add_argument("path")
    e.add_argument("--no-cache", action="store_true")
    e.add_argument("--cache-dir", metavar="DIR")
    return parser


def _flags(args) -> Flags:
    return Flags(case=args.case, long=args.long, no_cache=args.no_cache,
                 budget_spairs=args.budget_spairs, budget_wall=args.budget_wall,
                 k=args.k, certs=args.certs)


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _dump(kind: str, args) -> int:
    session = Session(Flags(no_cache=args.no_cache), Cache(args.cache_dir, enabled=not args.no_cache))
    if kind == "group":
        payload = session.data.G.dump()
    else:
        payload = seal({name: entry for name, entry in session.data.cat.dump().items()})
    _write(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "recheck":
            res = recheck_path(args.path)
            print(json.dumps(res, indent=2, sort_keys=True))
            return 0 if res.get("ok") else 1
        if args.command == "emit":
            return _emit(args)
        if getattr(args, "action", None) == "dump":
            return _dump(args.command, args)
        if args.command == "verify":
            name = args.suite or args.suite_opt
            if not name:
                parser.error("verify needs a suite name")
        else:
            name = args.command
        flags = _flags(args)
        cache = Cache(args.cache_dir, enabled=not args.no_cache)
        report = run_suite(name, flags, cache)
    except UsageError as exc:
        parser.error(str(exc))
    except IntegrityError as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return 1
    text = report.to_json() if args.format == "json" else report.to_table()
    _write(text, args.out)
    return report.exit_code


def _emit(args) -> int:
    flags = Flags(no_cache=args.no_cache)
    session = Session(flags, Cache(args.cache_dir, enabled=not args.no_cache))
    if args.check == "census.K":
        session.census()
    else:
        session.containment(args.check.split(".", 1)[1], True)
    Path(args.path).write_text(json.dumps(session.certificate(args.check), sort_keys=True))
    print(f"wrote {args.check} certificate to {args.path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
