"""Command line interface: ``tetrasieve <command> ...``.

Exit codes: 0 success, 2 verification failure, 3 backend or fixture
failure, 4 usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

import mpmath

from . import bridge
from . import sieve as SV
from .classgroup import ClassGroupError, class_group
from .config import ConfigError, resolve
from .cubic import (FieldError, NotShanks, cubic_discriminant, factorization_profile,
                    period_polynomial, shanks_classify)

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_BACKEND = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tetrasieve", description="Sieve for tetrahedral mod-3 representations of prime conductor.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("sieve", help="run the four-condition sieve up to a bound")
    s.add_argument("--max", type=int, required=True, dest="max_value")
    src = s.add_mutually_exclusive_group()
    src.add_argument("--live", action="store_true", help="query the backend for ray class data")
    src.add_argument("--fixtures", nargs="?", const="", default=None, metavar="DIR",
                     help="use stored fixtures (default store if DIR is omitted)")
    s.add_argument("--jobs", type=int, default=None)
    s.add_argument("--emit", default="table", choices=["table", "csv", "structured", "structured-text"])
    s.add_argument("--backend", default=None, help="backend command line")
    s.add_argument("--timeout", type=float, default=None)

    sub.add_parser("verify", help="run the dimension and group-theory checks")

    c = sub.add_parser("classify", help="classify a tame inertia trace")
    c.add_argument("--trace", type=int, required=True)
    c.add_argument("--level", type=int, required=True)
    c.add_argument("--prime", type=int, required=True)

    pp = sub.add_parser("periods", help="period polynomial of the cubic subfield")
    pp.add_argument("--prime", type=int, required=True)

    cg = sub.add_parser("classgroup", help="class group of the cubic subfield")
    cg.add_argument("--prime", type=int, required=True)
    cg.add_argument("--cross-check", action="store_true", help="compare with the backend")

    r = sub.add_parser("rayclass", help="show (and optionally record) ray class data")
    r.add_argument("--prime", type=int, required=True)
    r.add_argument("--live", action="store_true")
    r.add_argument("--fixtures", default=None, metavar="DIR")
    r.add_argument("--record", default=None, metavar="DIR", help="write the fixture into DIR")
    r.add_argument("--backend", default=None)
    r.add_argument("--timeout", type=float, default=None)
    return p


def _kv(pairs) -> str:
    return "".join("%s: %s\n" % (k, v) for k, v in pairs)


def cmd_sieve(args) -> int:
    if args.max_value < 7:
        raise UsageError("--max must be at least 7")
    settings = resolve({"backend": args.backend, "timeout": args.timeout, "jobs": args.jobs,
                        "fixtures": args.fixtures or None})
    mode = "live" if args.live else "fixture"
    reports = SV.run_sieve(args.max_value, mode=mode, fixtures=settings.fixtures,
                           jobs=settings.jobs, settings=settings)
    fmt = "structured" if args.emit == "structured-text" else args.emit
    meta = dict(settings.describe(), mode=mode, max=str(args.max_value))
    sys.stdout.write(SV.emit_report(reports, fmt, meta=meta))
    bad = [r for r in reports if r.status != SV.STATUS_OK]
    for r in bad:
        print("ell=%d: %s" % (r.ell, r.status), file=sys.stderr)
    return EXIT_BACKEND if bad else EXIT_OK


def cmd_verify(args) -> int:
    rows = SV.verify_lemmas()
    sys.stdout.write(SV.verify_table(rows))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_VERIFY


def cmd_classify(args) -> int:
    try:
        res = SV.classify_inertia(args.trace, args.level, args.prime)
    except SV.InertiaRejected as exc:
        sys.stdout.write(_kv([("trace", args.trace), ("level", args.level), ("ell", args.prime),
                              ("branch", "rejected"), ("explanation", exc)]))
        return EXIT_VERIFY
    sys.stdout.write(_kv([("trace", res.trace), ("level", res.level), ("ell", res.ell),
                          ("branch", res.branch), ("explanation", res.explanation)]))
    return EXIT_OK


def cmd_periods(args) -> int:
    L = period_polynomial(args.prime)
    sh = shanks_classify(args.prime)
    with mpmath.workdps(20):
        etas = ", ".join(mpmath.nstr(v, 15) for v in L.period_values(30))
    sys.stdout.write(_kv([
        ("ell", L.ell),
        ("poly", " ".join(str(c) for c in L.poly)),
        ("poly_disc", cubic_discriminant(L.poly)),
        ("disc_field", L.disc_field),
        ("poly_index", L.poly_index),
        ("shanks", "-" if isinstance(sh, NotShanks) else sh.a),
        ("profile_at_ell", "(%d, %d, %d)" % factorization_profile(L.ell, L)),
        ("periods", etas),
    ]))
    return EXIT_OK


def cmd_classgroup(args) -> int:
    L = period_polynomial(args.prime)
    res = class_group(L, cross_check=args.cross_check)
    pairs = [("ell", res.ell), ("h", res.h),
             ("invariants", " ".join(str(d) for d in res.invariants) or "1"),
             ("condition2", "true" if res.h % 2 == 0 else "false")]
    pairs += [("cert." + k, v) for k, v in res.certificate.items()]
    if args.cross_check:
        pairs.append(("cross_check", "agrees with backend"))
    sys.stdout.write(_kv(pairs))
    return EXIT_OK


def cmd_rayclass(args) -> int:
    settings = resolve({"backend": args.backend, "timeout": args.timeout, "fixtures": args.fixtures})
    if args.live:
        f = bridge.fetch_rayclass(args.prime, "live", backend=bridge.Backend(settings))
    else:
        f = bridge.fetch_rayclass(args.prime, "fixture", store=settings.fixtures)
    sys.stdout.write(bridge.serialize(f))
    m, n, ram_ok = bridge.condition3_and_4(f)
    print("# m=%d n=%d ram_ok=%s" % (m, n, "true" if ram_ok else "false"))
    if args.record:
        print("# recorded %s" % bridge.record_fixture(f, args.record))
    return EXIT_OK


COMMANDS = {
    "sieve": cmd_sieve,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "periods": cmd_periods,
    "classgroup": cmd_classgroup,
    "rayclass": cmd_rayclass,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, FieldError, ConfigError, ValueError) as exc:
        print("tetrasieve: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (bridge.BridgeError, ClassGroupError) as exc:
        print("tetrasieve: %s" % exc, file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
