"""Selmer-condition bookkeeping over the places {ell, 3, oo}.

A ledger records, for every place v, the dimension of the local condition
N_v and of the local invariants H^0(G_v, M) (and of the dual twist).  The
difference ``dim Selmer - dim dual Selmer`` then follows from Wiles' formula

    h0(M) - h0(M*) + sum_v (dim N_v - dim H^0(G_v, M)).

The canonical ledger is assembled from the cohomology routines rather than
typed in, and each number keeps the name of the routine that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import cohomology as C
from .groups import residual_datum
from .modules import ad0_sl2, dual, is_irreducible

PLACE_KINDS = ("ell", "3", "inf")

# Frobenius image at 3 used when none is supplied: an element of order 4.
DEFAULT_FROB3 = (0, 2, 1, 0)


class LedgerError(ValueError):
    pass


@dataclass(frozen=True)
class PlaceRecord:
    kind: str
    label: str
    dim_N: int
    dim_h0: int
    dim_h0_dual: int
    dim_h1: Optional[int] = None
    provenance: str = ""

    def __post_init__(self):
        if self.kind not in PLACE_KINDS:
            raise LedgerError("unknown place kind %r" % self.kind)
        for name in ("dim_N", "dim_h0", "dim_h0_dual"):
            if getattr(self, name) < 0:
                raise LedgerError("%s must be nonnegative" % name)
        if self.dim_h1 is not None and self.dim_N > self.dim_h1:
            raise LedgerError("local condition larger than local H^1 at %s" % self.label)

    @property
    def gap(self) -> int:
        return self.dim_N - self.dim_h0


@dataclass
class GlobalSetting:
    records: List[PlaceRecord]
    h0_global: int = 0
    h0_global_dual: int = 0
    notes: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        kinds = sorted(r.kind for r in self.records)
        if kinds != sorted(PLACE_KINDS):
            raise LedgerError("a global setting needs exactly one record per place ell, 3, oo; got %s" % kinds)

    def record(self, kind: str) -> PlaceRecord:
        return next(r for r in self.records if r.kind == kind)

    def replace_record(self, rec: PlaceRecord) -> "GlobalSetting":
        recs = [rec if r.kind == rec.kind else r for r in self.records]
        return GlobalSetting(recs, self.h0_global, self.h0_global_dual, dict(self.notes))


def wiles_difference(g: GlobalSetting) -> int:
    """``dim Selmer - dim dual Selmer`` from the ledger."""
    return g.h0_global - g.h0_global_dual + place_sum(g.records)


def place_sum(records: Sequence[PlaceRecord]) -> int:
    """The local part of Wiles' formula; additive over disjoint place sets."""
    return sum(r.gap for r in records)


def check_balanced(g: GlobalSetting) -> bool:
    return wiles_difference(g) == 0


@dataclass(frozen=True)
class RankZero:
    inference: str = "deformation ring is Z_3: balanced of rank zero"


@dataclass(frozen=True)
class NotRankZero:
    reason: str


def rank_zero_certificate(g: GlobalSetting, m: int, ram_ok: Optional[bool]):
    """Rank-zero verdict from a balanced ledger and the ray-class data.

    Rank zero needs at least one Ad0 summand (``m >= 1``) and every Ad0
    quotient of the ray class group to be ramified at ell (``ram_ok``).
    """
    if not check_balanced(g):
        raise LedgerError("global setting is not balanced (difference %d)" % wiles_difference(g))
    if m < 1:
        return NotRankZero("condition (3) fails")
    if not ram_ok:
        return NotRankZero("unramified adjoint extension exists")
    return RankZero()


# ---------------------------------------------------------------------------
# Canonical ledger

def _global_h0_guard() -> Dict[str, str]:
    ad = ad0_sl2()
    ok, _ = is_irreducible(ad)
    ok_dual, _ = is_irreducible(dual(ad))
    if not (ok and ok_dual):
        raise LedgerError("global H^0 may be nonzero: Ad0 or its dual is reducible")
    if ad.invariants().shape[1] or dual(ad).invariants().shape[1]:
        raise LedgerError("Ad0 or its dual has invariants under SL(2, F_3)")
    return {"global_h0": "zero: Ad0 and its dual are irreducible of dimension 3 "
                         "over the image SL(2, F_3)"}


def canonical_ledger(ell: int, frob3: Sequence[int] = DEFAULT_FROB3) -> GlobalSetting:
    """The ledger for Ad0 of the residual representation ramified at ``ell``.

    * at ell: unramified condition, from the tame complex;
    * at 3: the whole local H^1, from local duality and Euler characteristic;
    * at oo: zero condition, complex conjugation acting trivially.
    """
    ad = ad0_sl2()
    d = residual_datum(ell)
    tame = C.tame_local_cohomology(d, ad)
    n_unr, _ = C.unramified_h1(d, ad)
    rec_ell = PlaceRecord("ell", str(ell), n_unr, tame.h0, int(tame.meta["dual_h0"]), tame.h1,
                          "cohomology.unramified_h1 / cohomology.tame_local_cohomology")
    rep3 = C.local_at_3_report(C.unramified_at_3(frob3))
    rec_3 = PlaceRecord("3", "3", rep3.h1, rep3.h0, rep3.dual_h0, rep3.h1,
                        "cohomology.local_at_3_report")
    arch = C.archimedean_cohomology(np.eye(3, dtype=np.int64))
    rec_inf = PlaceRecord("inf", "oo", 0, arch.h0, arch.h0, arch.h1,
                          "cohomology.archimedean_cohomology")
    notes = _global_h0_guard()
    return GlobalSetting([rec_ell, rec_3, rec_inf], 0, 0, notes)


def full_h1_variant(g: GlobalSetting) -> GlobalSetting:
    """The same ledger with the full local H^1 allowed at ell."""
    rec = g.record("ell")
    if rec.dim_h1 is None:
        raise LedgerError("local H^1 at ell is unknown")
    return g.replace_record(replace(rec, dim_N=rec.dim_h1, provenance=rec.provenance + " (full H^1)"))


# ---------------------------------------------------------------------------
# Emission

LEDGER_FIELDS = ("kind", "label", "dim_N", "dim_h0", "dim_h0_dual", "dim_h1", "provenance")


def ledger_table(g: GlobalSetting) -> str:
    head = "%-5s %-6s %5s %6s %11s %6s  %s" % ("place", "label", "N", "h0", "h0(dual)", "h1", "source")
    lines = [head, "-" * len(head)]
    for r in g.records:
        lines.append("%-5s %-6s %5d %6d %11d %6s  %s" % (
            r.kind, r.label, r.dim_N, r.dim_h0, r.dim_h0_dual,
            "-" if r.dim_h1 is None else r.dim_h1, r.provenance))
    lines.append("global h0=%d h0(dual)=%d  difference=%d  balanced=%s" % (
        g.h0_global, g.h0_global_dual, wiles_difference(g), check_balanced(g)))
    return "\n".join(lines)


def ledger_records(g: GlobalSetting) -> str:
    """One ``key=value`` record per place, separated by ``;``."""
    out = []
    for r in g.records:
        out.append(";".join("%s=%s" % (k, "" if getattr(r, k) is None else getattr(r, k))
                            for k in LEDGER_FIELDS))
    return "\n".join(out)


def parse_ledger_records(text: str, h0_global: int = 0, h0_global_dual: int = 0) -> GlobalSetting:
    recs = []
    for line in text.strip().splitlines():
        kv = dict(item.split("=", 1) for item in line.split(";"))
        recs.append(PlaceRecord(kv["kind"], kv["label"], int(kv["dim_N"]), int(kv["dim_h0"]),
                                int(kv["dim_h0_dual"]),
                                int(kv["dim_h1"]) if kv["dim_h1"] else None, kv["provenance"]))
    return GlobalSetting(recs, h0_global, h0_global_dual)
