"""Bridge to an external computer-algebra backend, plus the fixture store.

Ray class groups of the degree-12 field K are out of reach of this
package, so they are computed by a GP-compatible backend.  The protocol is
one-shot: a script assembled from the templates in ``templates/`` is sent
on standard input and the backend prints ``key: value`` lines between
``BEGIN <task>`` and ``END <task>`` markers, followed by a ``checksum``
line echoing the request hash.

Results are normalized to a canonical basis and kept as text fixtures so
that the sieve runs offline and reproducibly.
"""

from __future__ import annotations

import hashlib
import json
import os
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from string import Template
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import fplinalg as fl
from .config import Settings, resolve
from .groups import a4_table
from .modules import GModule, ad0_multiplicity_of_quotient, decompose, spin

P = 3
TEMPLATE_DIR = Path(__file__).resolve().parent / "templates"
TASKS = ("build-K", "rayclass", "classnumber")
_TEMPLATE_FILES = {"build-K": "buildk.gp", "rayclass": "rayclass.gp", "classnumber": "classnumber.gp"}
MODULUS_EXPONENTS_AT_3 = (2, 3, 4)
NORMALIZATION = "spin-inertia-shortlex"


class BridgeError(RuntimeError):
    """Base class for backend and fixture failures."""


class BackendUnavailable(BridgeError):
    pass


class BackendProtocolError(BridgeError):
    pass


class FixtureInvalid(BridgeError):
    pass


class FixtureChecksumError(FixtureInvalid):
    pass


class MissingFixture(BridgeError):
    pass


# ---------------------------------------------------------------------------
# Fixtures

Matrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class RayClassFixture:
    """The F_3[A4]-module Gal(K_T^(3)/K) with inertia data at ell.

    ``g1`` and ``g2`` are the images of (12)(34) and (123); ``inertia``
    holds one vector per prime of K above ell.
    """

    ell: int
    polyK: Tuple[int, ...]
    dim: int
    g1: Matrix
    g2: Matrix
    inertia: Tuple[Tuple[int, ...], ...]
    meta: Tuple[Tuple[str, str], ...] = field(default=())

    def matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        shape = (self.dim, self.dim)
        return (np.array(self.g1, dtype=np.int64).reshape(shape),
                np.array(self.g2, dtype=np.int64).reshape(shape))

    def meta_dict(self) -> Dict[str, str]:
        return dict(self.meta)

    def module(self) -> GModule:
        a, b = self.matrices()
        return GModule([a, b], group=a4_table(), name="rayclass(%d)" % self.ell)

    def same_data(self, other: "RayClassFixture") -> bool:
        """Equality of everything except the metadata."""
        return (self.ell, self.polyK, self.dim, self.g1, self.g2, self.inertia) == \
            (other.ell, other.polyK, other.dim, other.g1, other.g2, other.inertia)

    def validate(self) -> "RayClassFixture":
        d = self.dim
        if d < 0:
            raise FixtureInvalid("negative dimension")
        if len(self.polyK) != 13 or self.polyK[0] != 1:
            raise FixtureInvalid("polyK must be a monic polynomial of degree 12")
        for name in ("g1", "g2"):
            rows = getattr(self, name)
            if len(rows) != d or any(len(r) != d for r in rows):
                raise FixtureInvalid("%s is not a %d x %d matrix" % (name, d, d))
            if any(x not in (0, 1, 2) for r in rows for x in r):
                raise FixtureInvalid("%s has entries outside 0..2" % name)
        if not self.inertia:
            raise FixtureInvalid("inertia list is empty")
        for v in self.inertia:
            if len(v) != d or any(x not in (0, 1, 2) for x in v):
                raise FixtureInvalid("inertia vector %r does not match dimension %d" % (v, d))
        a, b = self.matrices()
        eye = np.eye(d, dtype=np.int64)
        ab = fl.matmul(a, b, P)
        for label, m, k in (("g1^2", a, 2), ("g2^3", b, 3), ("(g1 g2)^3", ab, 3)):
            if not np.array_equal(fl.mat_pow(m, k, P), eye):
                raise FixtureInvalid("action violates the A4 relation %s = 1" % label)
        order = len(_matrix_group(a, b))
        if 12 % order:
            raise FixtureInvalid("action matrices generate a group of order %d" % order)
        _check_inertia_orbit(a, b, self.inertia)
        return self


def _key(m: np.ndarray) -> bytes:
    return np.ascontiguousarray(np.mod(m, P), dtype=np.int8).tobytes()


def _matrix_group(a: np.ndarray, b: np.ndarray, limit: int = 13) -> List[np.ndarray]:
    eye = np.eye(a.shape[0], dtype=np.int64)
    seen = {_key(eye): eye}
    frontier = [eye]
    while frontier and len(seen) <= limit:
        new = []
        for x in frontier:
            for g in (a, b):
                y = fl.matmul(x, g, P)
                k = _key(y)
                if k not in seen:
                    seen[k] = y
                    new.append(y)
        frontier = new
    return list(seen.values())


def _check_inertia_orbit(a, b, inertia) -> None:
    """Inertia vectors of the primes above ell form one A4-orbit up to sign."""
    group = _matrix_group(a, b)
    v0 = np.array(inertia[0], dtype=np.int64)
    orbit = set()
    for g in group:
        w = fl.matmul(g, v0.reshape(-1, 1), P).ravel()
        orbit.add(tuple(int(x) for x in w))
        orbit.add(tuple(int(x) for x in np.mod(-w, P)))
    for v in inertia:
        if tuple(v) not in orbit:
            raise FixtureInvalid("inertia vector %r is not in the orbit of %r" % (v, tuple(inertia[0])))


def _digits(v: Iterable[int]) -> str:
    return "".join(str(int(x)) for x in v)


def _undigits(s: str) -> Tuple[int, ...]:
    if not s.isdigit():
        raise FixtureInvalid("bad residue string %r" % s)
    return tuple(int(c) for c in s)


FIELDS = ("ell", "polyK", "dim", "g1", "g2", "inertia", "meta")


def _body(f: RayClassFixture) -> str:
    meta = "; ".join("%s=%s" % (k, v) for k, v in sorted(f.meta))
    lines = [
        "ell: %d" % f.ell,
        "polyK: " + " ".join(str(c) for c in f.polyK),
        "dim: %d" % f.dim,
        "g1: " + " ".join(_digits(r) for r in f.g1),
        "g2: " + " ".join(_digits(r) for r in f.g2),
        "inertia: " + " ".join(_digits(v) for v in f.inertia),
        "meta: " + meta,
    ]
    return "\n".join(lines) + "\n"


def fixture_sha256(f: RayClassFixture) -> str:
    return hashlib.sha256(_body(f).encode("utf-8")).hexdigest()


def serialize(f: RayClassFixture) -> str:
    body = _body(f)
    return body + "sha256: %s\n" % hashlib.sha256(body.encode("utf-8")).hexdigest()


def parse(text: str) -> RayClassFixture:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != len(FIELDS) + 1:
        raise FixtureInvalid("expected %d lines, found %d" % (len(FIELDS) + 1, len(lines)))
    kv = {}
    for line, key in zip(lines, FIELDS + ("sha256",)):
        prefix = key + ":"
        if not line.startswith(prefix):
            raise FixtureInvalid("expected field %r, found %r" % (key, line[:30]))
        kv[key] = line[len(prefix):].strip()
    body = "\n".join(lines[:-1]) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if digest != kv["sha256"]:
        raise FixtureChecksumError("sha256 mismatch: stored %s, computed %s" % (kv["sha256"], digest))
    try:
        dim = int(kv["dim"])
        meta = tuple(tuple(item.split("=", 1)) for item in kv["meta"].split("; ") if item)
        f = RayClassFixture(
            ell=int(kv["ell"]),
            polyK=tuple(int(c) for c in kv["polyK"].split()),
            dim=dim,
            g1=tuple(_undigits(r) for r in kv["g1"].split()),
            g2=tuple(_undigits(r) for r in kv["g2"].split()),
            inertia=tuple(_undigits(v) for v in kv["inertia"].split()),
            meta=tuple(sorted(meta)),
        )
    except ValueError as exc:
        raise FixtureInvalid("malformed fixture: %s" % exc) from None
    if serialize(f) != text:
        raise FixtureInvalid("fixture text is not in canonical form")
    return f.validate()


def fixture_filename(f: RayClassFixture) -> str:
    return "rayclass_%04d_%s.txt" % (f.ell, fixture_sha256(f)[:12])


def record_fixture(f: RayClassFixture, store) -> Path:
    """Write ``f`` under a content-derived name; idempotent, atomic rename."""
    f.validate()
    store = Path(store)
    store.mkdir(parents=True, exist_ok=True)
    text = serialize(f)
    path = store / fixture_filename(f)
    if path.exists() and path.read_text(encoding="utf-8") == text:
        return path
    fd, tmp = tempfile.mkstemp(dir=store, prefix=".tmp-", suffix=".txt")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def fixture_paths(ell: int, store) -> List[Path]:
    return sorted(Path(store).glob("rayclass_%04d_*.txt" % ell))


def load_fixture(ell: int, store) -> RayClassFixture:
    paths = fixture_paths(ell, store)
    if not paths:
        raise MissingFixture("no fixture rayclass_%04d_*.txt in %s" % (ell, store))
    if len(paths) > 1:
        raise FixtureInvalid("several fixtures for ell=%d: %s" % (ell, ", ".join(p.name for p in paths)))
    path = paths[0]
    f = parse(path.read_text(encoding="utf-8"))
    if f.ell != ell:
        raise FixtureInvalid("%s holds ell=%d" % (path.name, f.ell))
    if path.name != fixture_filename(f):
        raise FixtureChecksumError("%s does not match its content hash" % path.name)
    return f


# ---------------------------------------------------------------------------
# Basis normalization

def canonical_basis(a: np.ndarray, b: np.ndarray, inertia: Sequence[Sequence[int]]) -> np.ndarray:
    """Columns: the spin of the inertia vectors in shortlex word order,
    completed by standard basis vectors.

    The spin part depends only on the module and the inertia data, not on
    the basis the backend happened to return.
    """
    d = a.shape[0]
    chosen: List[np.ndarray] = []

    def take(v) -> bool:
        v = np.mod(np.asarray(v, dtype=np.int64), P)
        if not v.any():
            return False
        trial = np.vstack(chosen + [v]) if chosen else v.reshape(1, -1)
        if fl.rank(trial, P) > len(chosen):
            chosen.append(v)
            return True
        return False

    queue = [np.asarray(v, dtype=np.int64) for v in inertia]
    for v in queue:
        take(v)
    head = 0
    while head < len(chosen) and len(chosen) < d:
        v = chosen[head]
        head += 1
        for g in (a, b):
            take(fl.matmul(g, v.reshape(-1, 1), P).ravel())
    for i in range(d):
        if len(chosen) == d:
            break
        take(np.eye(d, dtype=np.int64)[i])
    return np.array(chosen, dtype=np.int64).T.reshape(d, d)


def normalize(ell: int, polyK: Sequence[int], a, b, inertia, meta: Dict[str, str]) -> RayClassFixture:
    a = np.mod(np.asarray(a, dtype=np.int64), P)
    b = np.mod(np.asarray(b, dtype=np.int64), P)
    d = a.shape[0]
    basis = canonical_basis(a, b, inertia)
    bi = fl.inverse(basis, P)
    na = fl.matmul(fl.matmul(bi, a, P), basis, P)
    nb = fl.matmul(fl.matmul(bi, b, P), basis, P)
    ni = [fl.matmul(bi, np.asarray(v, dtype=np.int64).reshape(-1, 1), P).ravel() for v in inertia]
    meta = dict(meta, normalization=NORMALIZATION)
    f = RayClassFixture(
        ell=int(ell),
        polyK=tuple(int(c) for c in polyK),
        dim=d,
        g1=tuple(tuple(int(x) for x in r) for r in na),
        g2=tuple(tuple(int(x) for x in r) for r in nb),
        inertia=tuple(tuple(int(x) for x in v) for v in ni),
        meta=tuple(sorted((str(k), str(v)) for k, v in meta.items())),
    )
    return f.validate()


# ---------------------------------------------------------------------------
# Conditions (3) and (4)

def condition3_and_4(f: RayClassFixture) -> Tuple[int, int, bool]:
    """``(m, n, ram_ok)`` for a validated fixture.

    ``m`` is the number of Ad0 summands, ``n`` the dimension of the
    complement, and ``ram_ok`` says that V/W has no Ad0 quotient, W being
    the submodule generated by the inertia vectors.
    """
    v = f.module()
    dec = decompose(v)
    w = spin(v, [np.array(x, dtype=np.int64) for x in f.inertia])
    ram_ok = ad0_multiplicity_of_quotient(v, w.T) == 0
    return dec.m, dec.n, bool(ram_ok)


# ---------------------------------------------------------------------------
# Backend protocol

def _template(task: str) -> str:
    if task not in TASKS:
        raise ValueError("unknown task %r" % task)
    return (TEMPLATE_DIR / _TEMPLATE_FILES[task]).read_text(encoding="utf-8")


def request_checksum(task: str, params: Dict[str, object]) -> str:
    text = task + "\n" + json.dumps(params, sort_keys=True) + "\n" + _template(task)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def build_script(task: str, params: Dict[str, object]) -> Tuple[str, str]:
    """The GP script for ``task`` and the checksum it must echo."""
    checksum = request_checksum(task, params)
    common = (TEMPLATE_DIR / "common.gp").read_text(encoding="utf-8")
    body = Template(_template(task)).substitute({k: str(v) for k, v in params.items()}, checksum=checksum)
    return common + body, checksum


def _value(text: str):
    try:
        return json.loads(text)
    except ValueError:
        return text


def parse_response(stdout: str, task: str, checksum: str) -> Dict[str, object]:
    lines = [ln.rstrip() for ln in stdout.splitlines()]
    try:
        start = lines.index("BEGIN " + task)
        end = lines.index("END " + task, start)
    except ValueError:
        raise BackendProtocolError("response has no %s block" % task) from None
    out: Dict[str, object] = {}
    for ln in lines[start + 1:end]:
        key, sep, val = ln.partition(":")
        if not sep or not key or key in out:
            raise BackendProtocolError("unparseable or repeated line %r" % ln)
        out[key.strip()] = _value(val.strip())
    echoed = [ln.partition(":")[2].strip() for ln in lines[end + 1:] if ln.startswith("checksum:")]
    if echoed != [checksum]:
        raise BackendProtocolError("checksum not echoed correctly")
    return out


class Backend:
    """One-shot subprocess invocations of a GP-compatible interpreter."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or resolve()

    @property
    def command(self) -> List[str]:
        return list(self.settings.backend)

    def run(self, task: str, **params) -> Dict[str, object]:
        script, checksum = build_script(task, params)
        try:
            proc = subprocess.run(self.command, input=script, capture_output=True, text=True,
                                  timeout=self.settings.timeout)
        except FileNotFoundError:
            raise BackendUnavailable("backend %r not found" % self.command[0]) from None
        except subprocess.TimeoutExpired:
            raise BridgeError("backend timed out after %g s on %s" % (self.settings.timeout, task)) from None
        if proc.returncode:
            tail = proc.stderr.strip().splitlines()[-3:]
            if proc.returncode == 2 and "not installed" in proc.stderr:
                raise BackendUnavailable(" ".join(tail))
            raise BridgeError("backend exited with %d: %s" % (proc.returncode, " | ".join(tail)))
        out = parse_response(proc.stdout, task, checksum)
        out["_script_sha256"] = checksum
        return out

    def identity(self, version) -> str:
        exe = Path(self.command[-1] if self.command[-1].endswith("gpshim") else self.command[0]).name
        if isinstance(version, list):
            version = ".".join(str(x) for x in version)
        return "%s/pari-%s" % (exe, version)


def _as_matrix(flat, d: int) -> np.ndarray:
    arr = np.array(flat if d else [], dtype=np.int64)
    if arr.size != d * d:
        raise BackendProtocolError("matrix has %d entries, expected %d" % (arr.size, d * d))
    return arr.reshape(d, d)


def compute_rayclass(ell: int, backend: Optional[Backend] = None) -> RayClassFixture:
    """Live computation, raising the 3-adic modulus until the quotient is stable."""
    backend = backend or Backend()
    for e3 in MODULUS_EXPONENTS_AT_3:
        r = backend.run("rayclass", ell=ell, e3=e3)
        if int(r["ell"]) != ell:
            raise BackendProtocolError("backend answered for ell=%s" % r["ell"])
        if r["dim"] == r["dim_stab"]:
            break
    else:
        raise BridgeError("3-elementary ray class quotient did not stabilize for ell=%d" % ell)
    if (r["order_g1"], r["order_g2"]) != (2, 3):
        raise BackendProtocolError("automorphisms of orders %s, %s" % (r["order_g1"], r["order_g2"]))
    d = int(r["dim"])
    a, b = _as_matrix(r["g1"], d), _as_matrix(r["g2"], d)
    inertia = [list(v) for v in r["inertia"]]
    meta = {
        "backend": backend.identity(r.get("version")),
        "script_sha256": r["_script_sha256"][:16],
        "modulus": "3^%d*rad(ell)" % e3,
        "stable_at": "3^%d" % (e3 + 1),
        "frob3_order": str(r["frob3_order"]),
        "primes_above_ell": str(len(inertia)),
    }
    return normalize(ell, r["polyK"], a, b, inertia, meta)


def backend_class_group(ell: int, backend: Optional[Backend] = None) -> List[int]:
    backend = backend or Backend()
    r = backend.run("classnumber", ell=ell)
    if int(r["certified"]) != 1:
        raise BridgeError("backend could not certify the class group for ell=%d" % ell)
    return sorted(int(c) for c in r["cyc"])


def fetch_rayclass(ell: int, mode: str = "fixture", store=None,
                   backend: Optional[Backend] = None) -> RayClassFixture:
    """Ray-class data for ``ell`` from the fixture store or a live backend."""
    if mode == "fixture":
        store = store if store is not None else resolve().fixtures
        return load_fixture(ell, store)
    if mode == "live":
        return compute_rayclass(ell, backend)
    raise ValueError("mode must be 'live' or 'fixture'")
