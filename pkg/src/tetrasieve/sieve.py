"""End-to-end sieve, inertia classification and the verification table.

For each prime ell = 1 mod 3 the sieve evaluates, in order,

1. ell is a prime congruent to 1 mod 3;
2. the class number of the cubic subfield L of Q(zeta_ell) is even;
3. the 3-elementary ray class module of the A4 field K (modulus supported
   on 3 and ell) contains an Ad0 summand;
4. no Ad0 quotient of that module is unramified at ell.

Evaluation stops at the first failing condition, and the report records
where.  Members also carry the Selmer ledger and the rank-zero verdict.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import bridge
from . import cohomology as C
from . import groups as G
from . import modules as M
from . import selmer as S
from .classgroup import class_group
from .config import Settings, resolve
from .cubic import NotShanks, is_prime, period_polynomial, shanks_classify, sieve_candidates

STATUS_OK = "ok"
STATUS_PENDING = "pending backend"


# ---------------------------------------------------------------------------
# Reports

@dataclass(frozen=True)
class SieveReport:
    ell: int
    cond1: bool
    cond2: Optional[bool] = None
    cond3: Optional[bool] = None
    cond4: Optional[bool] = None
    h_L: Optional[int] = None
    class_group: Tuple[int, ...] = ()
    shanks: Optional[int] = None
    m: Optional[int] = None
    n: Optional[int] = None
    ram_ok: Optional[bool] = None
    balance: str = ""
    certificate: str = ""
    verdict: bool = False
    status: str = STATUS_OK

    @property
    def stage(self) -> str:
        """The first condition that failed or was not reached, or 'all'."""
        for k, v in enumerate((self.cond1, self.cond2, self.cond3, self.cond4), start=1):
            if v is not True:
                return str(k)
        return "all"

    @property
    def passed(self) -> Tuple[Optional[bool], ...]:
        return (self.cond1, self.cond2, self.cond3, self.cond4)


def _evaluate(ell: int, mode: str, store: Optional[str], settings: Optional[Settings]) -> SieveReport:
    base: Dict[str, object] = {"ell": ell, "cond1": is_prime(ell) and ell % 3 == 1}
    sh = shanks_classify(ell)
    base["shanks"] = None if isinstance(sh, NotShanks) else sh.a
    if not base["cond1"]:
        return SieveReport(**base)
    try:
        cg = class_group(period_polynomial(ell))
        base.update(h_L=cg.h, class_group=tuple(cg.invariants), cond2=cg.h % 2 == 0)
        if cg.h % 2 == 0 and cg.h % 4:
            raise AssertionError("even class number %d not divisible by 4" % cg.h)
        if not base["cond2"]:
            return SieveReport(**base)
        backend = bridge.Backend(settings) if mode == "live" else None
        try:
            fx = bridge.fetch_rayclass(ell, mode, store=store, backend=backend)
        except (bridge.MissingFixture, bridge.BackendUnavailable) as exc:
            return SieveReport(**base, status="%s: %s" % (STATUS_PENDING, exc))
        m, n, ram_ok = bridge.condition3_and_4(fx)
        base.update(m=m, n=n, ram_ok=ram_ok, cond3=m >= 1)
        if m < 1:
            return SieveReport(**base)
        base["cond4"] = ram_ok
        if not ram_ok:
            return SieveReport(**base)
        g = S.canonical_ledger(ell)
        cert = S.rank_zero_certificate(g, m, ram_ok)
        base.update(balance="difference=%d" % S.wiles_difference(g),
                    certificate=type(cert).__name__, verdict=isinstance(cert, S.RankZero))
        return SieveReport(**base)
    except Exception as exc:  # localized to this prime
        return SieveReport(**base, status="error: %s: %s" % (type(exc).__name__, exc))


def _evaluate_args(args):
    return _evaluate(*args)


def run_sieve(max_value: int, mode: str = "fixture", fixtures=None, jobs: int = 1,
              settings: Optional[Settings] = None) -> List[SieveReport]:
    """Reports for every prime ell = 1 mod 3 up to ``max_value``, ascending."""
    if mode not in ("fixture", "live"):
        raise ValueError("mode must be 'fixture' or 'live'")
    settings = settings or resolve()
    store = str(fixtures if fixtures is not None else settings.fixtures)
    work = [(ell, mode, store, settings) for ell in sieve_candidates(max_value)]
    if jobs <= 1 or len(work) < 2:
        return [_evaluate(*w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate_args, work, chunksize=4))


def lambda_set(reports: Sequence[SieveReport]) -> List[int]:
    return [r.ell for r in reports if r.verdict]


def lambda_bar_set(reports: Sequence[SieveReport]) -> List[int]:
    """Primes passing conditions (1) and (2)."""
    return [r.ell for r in reports if r.cond1 and r.cond2]


# ---------------------------------------------------------------------------
# Emission

REPORT_FIELDS = [f.name for f in fields(SieveReport)]
FORMATS = ("table", "csv", "structured")


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "x".join(str(x) for x in v) if v else "1"
    return str(v)


def _unfmt(name: str, s: str):
    if name in ("cond1", "cond2", "cond3", "cond4", "ram_ok", "verdict"):
        return None if s == "-" else {"true": True, "false": False}[s]
    if name in ("ell", "h_L", "shanks", "m", "n"):
        return None if s == "-" else int(s)
    if name == "class_group":
        return () if s == "1" else tuple(int(x) for x in s.split("x"))
    return s


def emit_report(reports: Sequence[SieveReport], fmt: str = "table",
                meta: Optional[Dict[str, str]] = None) -> str:
    """Render reports as an aligned table, CSV, or structured text."""
    reports = sorted(reports, key=lambda r: r.ell)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for r in reports:
            w.writerow([_fmt(getattr(r, k)) for k in REPORT_FIELDS])
        return buf.getvalue()
    if fmt == "structured":
        out = ["# tetrasieve report"]
        for k, v in sorted((meta or {}).items()):
            out.append("# %s: %s" % (k, v))
        for r in reports:
            out.append("")
            out.append("[report]")
            out.extend("%s: %s" % (k, _fmt(getattr(r, k))) for k in REPORT_FIELDS)
        return "\n".join(out) + "\n"
    if fmt == "table":
        cols = ["ell", "c1", "c2", "c3", "c4", "h_L", "Cl", "shanks", "m", "n", "ram", "verdict", "status"]
        rows = [[_fmt(r.ell), _fmt(r.cond1), _fmt(r.cond2), _fmt(r.cond3), _fmt(r.cond4), _fmt(r.h_L),
                 _fmt(r.class_group), _fmt(r.shanks), _fmt(r.m), _fmt(r.n), _fmt(r.ram_ok),
                 "in" if r.verdict else "out", r.status] for r in reports]
        widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(cols)]
        line = lambda row: "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip()
        out = [line(cols), line(["-" * w for w in widths])]
        out.extend(line(row) for row in rows)
        lam = lambda_set(reports)
        cands = sum(1 for r in reports if r.cond1)
        out.append("")
        out.append("Lambda: {%s}" % ", ".join(str(x) for x in lam))
        out.append("passing conditions 1-2: %d of %d; members: %d (density %.4f)"
                   % (len(lambda_bar_set(reports)), cands, len(lam), len(lam) / cands if cands else 0.0))
        return "\n".join(out) + "\n"
    raise ValueError("unknown format %r; choose from %s" % (fmt, ", ".join(FORMATS)))


def load_reports(text: str) -> List[SieveReport]:
    """Inverse of ``emit_report(..., 'structured')``."""
    reports = []
    block: Optional[Dict[str, str]] = None

    def flush():
        if block is not None:
            missing = set(REPORT_FIELDS) - set(block)
            if missing:
                raise ValueError("report block lacks %s" % ", ".join(sorted(missing)))
            reports.append(SieveReport(**{k: _unfmt(k, block[k]) for k in REPORT_FIELDS}))

    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        if line == "[report]":
            flush()
            block = {}
            continue
        if block is None:
            raise ValueError("data outside a [report] block: %r" % line)
        key, sep, val = line.partition(": ")
        if not sep or key not in REPORT_FIELDS:
            raise ValueError("bad report line %r" % line)
        block[key] = val
    flush()
    return reports


# ---------------------------------------------------------------------------
# Inertia

UNIVERSAL = "UniversalLift"
BANAL = "BanalLift"


class InertiaRejected(ValueError):
    pass


@dataclass(frozen=True)
class InertiaClassification:
    trace: int
    level: int
    ell: int
    branch: str
    explanation: str


def _orders_with_trace(t: int, level: int) -> List[int]:
    table = G.enumerate_sl2(level)
    q = G.modulus(level)
    return sorted({table.element_order(i) for i, x in enumerate(table.elements)
                   if G.mat_trace(x, level) % q == t % q})


def _is_power_of_3(k: int) -> bool:
    while k % 3 == 0:
        k //= 3
    return k == 1


def classify_inertia(trace: int, level: int, ell: int) -> InertiaClassification:
    """Branch of the lift determined by the trace of the tame inertia image.

    Trace 2 means characteristic polynomial (x - 1)^2, so 1 is an
    eigenvalue and the lift is the universal one.  Trace -1 means
    eigenvalues zeta_3 and zeta_3^-1, so the inertia image has order 3, its
    (ell - 1)-th power is trivial and the lift is the banal one.  Modulo 3
    the two traces coincide; at level 1 the literal value 2 or -1 decides.
    """
    if level < 1:
        raise ValueError("level must be at least 1")
    if not (is_prime(ell) and ell % 3 == 1):
        raise InertiaRejected("ell=%d is not a prime congruent to 1 mod 3" % ell)
    q = 3 ** level
    t = trace % q
    scan = _orders_with_trace(t, level) if level in G.SUPPORTED_LEVELS else None
    if t % 3 != 2:
        detail = ("elements of SL(2, Z/%d) with trace %d have orders %s" % (q, t, scan)
                  if scan is not None else "reduction mod 3 has trace %d" % (t % 3))
        raise InertiaRejected("trace %d mod %d cannot come from tame inertia: %s, and the image of "
                              "tame inertia is a pro-3 group (trace 2 mod 3)" % (t, q, detail))
    if scan is not None and not any(_is_power_of_3(k) for k in scan):
        raise InertiaRejected("no element of 3-power order has trace %d mod %d" % (t, q))
    universal = t == 2 % q
    banal = t == (-1) % q
    if universal and banal:
        if trace == 2:
            banal = False
        elif trace == -1:
            universal = False
        else:
            raise InertiaRejected("at level 1 the traces 2 and -1 agree mod 3; pass 2 or -1 explicitly")
    if universal:
        return InertiaClassification(t, level, ell, UNIVERSAL,
                                     "trace 2 mod %d: characteristic polynomial (x-1)^2, so 1 is an "
                                     "eigenvalue and the lift is the universal one" % q)
    if banal:
        return InertiaClassification(t, level, ell, BANAL,
                                     "trace -1 mod %d: eigenvalues zeta_3, zeta_3^-1, so the inertia "
                                     "image has order 3 and its (ell-1)-th power is I since 3 | %d; "
                                     "the lift is the banal one" % (q, ell - 1))
    raise InertiaRejected("trace %d mod %d is neither 2 (eigenvalue 1) nor -1 (order 3); no tame "
                          "inertia image of the lift has this trace" % (t, q))


# ---------------------------------------------------------------------------
# Verification table

@dataclass(frozen=True)
class VerifyRow:
    claim: str
    anchor: str
    expected: str
    observed: str

    @property
    def passed(self) -> bool:
        return self.expected == self.observed


def _fr_iso_ad0() -> str:
    fr = G.frattini_quotient_gamma()
    ad = M.ad0_sl2()
    isos = [f for f in M.hom_space(fr, ad) if M.fl.is_invertible(f, 3)]
    return "isomorphic" if fr.dim == 3 and isos else "not isomorphic"


def _checks() -> List[Tuple[str, str, str, Callable[[], str]]]:
    ad = M.ad0_sl2()
    sl = G.enumerate_sl2(1)

    def tame(ell):
        return str(C.tame_local_cohomology(G.residual_datum(ell), ad).dims())

    def unr(ell):
        return str(C.unramified_h1(G.residual_datum(ell), ad)[0])

    def at3(attr):
        return lambda: str(getattr(C.local_at_3_report(C.unramified_at_3(S.DEFAULT_FROB3)), attr))

    def a4_facts():
        psl = G.projectivize(sl)
        a4 = G.a4_table()
        v4 = G.klein_subgroup(a4)
        ok = (psl.order == 12 and len(set(G.psl_to_a4(psl, a4))) == 12
              and len(v4) == 4 and a4.is_normal(v4))
        return "A4 with normal V4" if ok else "fail"

    return [
        ("(h0,h1,h2) of Ad0 at ell=163", "local cohomology at the tame prime", "(1, 2, 1)", lambda: tame(163)),
        ("(h0,h1,h2) of Ad0 at ell=277", "local cohomology at the tame prime", "(1, 2, 1)", lambda: tame(277)),
        ("dim H1_unr of Ad0 at ell=163", "unramified condition at the tame prime", "1", lambda: unr(163)),
        ("h2 of Ad0 at 3", "local cohomology at 3", "0", at3("h2")),
        ("Euler gap h1-h0-h2 of Ad0 at 3", "local Euler characteristic at 3", "3", at3("euler_gap")),
        ("(h0,h1,h2) of Ad0 at oo", "complex conjugation acts trivially",
         "(3, 0, 0)", lambda: str(C.archimedean_cohomology(np.eye(3, dtype=np.int64)).dims())),
        ("Wiles difference at ell=163", "balanced Selmer setting", "0",
         lambda: str(S.wiles_difference(S.canonical_ledger(163)))),
        ("difference with full H1 at ell=163", "relaxed condition at the tame prime", "1",
         lambda: str(S.wiles_difference(S.full_h1_variant(S.canonical_ledger(163))))),
        ("H2(SL(2,F3),Ad0)=0", "vanishing of the global obstruction group", "0",
         lambda: str(C.finite_group_cohomology(sl, ad).h2)),
        ("|SL(2,F3)|", "residual image", "24", lambda: str(sl.order)),
        ("PSL(2,F3) = A4, V4 normal", "projective image is tetrahedral", "A4 with normal V4", a4_facts),
        ("order of [[1,1],[0,1]] in SL(2,Z/9)", "unipotent lift at level 2", "9",
         lambda: str(G.element_order((1, 1, 0, 1), 2))),
        ("Fr(Gamma) = Ad0", "Frattini quotient of the congruence subgroup", "isomorphic", _fr_iso_ad0),
    ]


def verify_lemmas() -> List[VerifyRow]:
    rows = []
    for claim, anchor, expected, fn in _checks():
        try:
            observed = fn()
        except Exception as exc:
            observed = "error: %s" % exc
        rows.append(VerifyRow(claim, anchor, expected, observed))
    return rows


def verify_table(rows: Sequence[VerifyRow]) -> str:
    w = max(len(r.claim) for r in rows)
    lines = ["%-4s  %-*s  %-18s  %s" % ("", w, "claim", "observed", "anchor")]
    for r in rows:
        lines.append("%-4s  %-*s  %-18s  %s" % ("PASS" if r.passed else "FAIL", w, r.claim, r.observed, r.anchor))
    return "\n".join(lines) + "\n"
