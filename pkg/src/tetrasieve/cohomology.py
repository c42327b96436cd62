"""Cohomology of F_3-modules in degrees 0, 1 and 2.

Three sources are handled:

* finite groups, through the inhomogeneous bar complex;
* the tame local Galois group at a prime ``ell != 3``, through the
  one-relator complex of the presentation <sigma, tau | sigma tau sigma^-1 = tau^ell>;
* the archimedean place, as cohomology of Z/2.

The place above 3 is covered by :func:`local_at_3_report`, which works from
local duality and the local Euler characteristic rather than from an explicit
complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import fplinalg as fl
from .groups import GroupTable, Mat2, TameLocalDatum, mat, mat_det
from .modules import GModule, ModuleError, build_dual_twist, conjugation_matrix

P = 3

# Largest number of degree-2 cochain coordinates the streamed kernel keeps
# in memory (|G|^2 * dim M).  SL(2, Z/9) in degree 2 exceeds this.
MAX_DEGREE2_COCHAINS = 200_000


class CohomologyValidationError(AssertionError):
    """A duality or Euler-characteristic identity failed."""


@dataclass
class CohomologyReport:
    h0: int
    h1: int
    h2: Optional[int]
    cocycles: List[Tuple[np.ndarray, ...]] = field(default_factory=list)
    meta: Dict[str, object] = field(default_factory=dict)

    def dims(self) -> Tuple[int, int, Optional[int]]:
        return (self.h0, self.h1, self.h2)


def normalize_vector(v) -> np.ndarray:
    """Scale so that the first nonzero coordinate is 1."""
    v = np.mod(np.asarray(v, dtype=np.int64), P)
    nz = np.nonzero(v)[0]
    if nz.size == 0:
        return v
    return np.mod(v * fl.fp_inv(int(v[nz[0]]), P), P)


# ---------------------------------------------------------------------------
# Finite groups

def bar_differential(group: GroupTable, mats: np.ndarray, n: int, f: np.ndarray) -> np.ndarray:
    """Apply the bar differential d_n to cochains.

    ``f`` has shape ``(|G|,)*n + (d, r)``: ``r`` cochains with values in a
    ``d``-dimensional module.  ``mats`` holds the action of every element.
    Returns the image with shape ``(|G|,)*(n+1) + (d, r)``.
    """
    mul = group.mul
    if n == 0:
        return np.mod(np.einsum("gij,jr->gir", mats, f) - f[None], P)
    if n == 1:
        t0 = np.einsum("gij,hjr->ghir", mats, f)
        t1 = f[mul]  # f(gh)
        t2 = f[:, None]  # f(g)
        return np.mod(t0 - t1 + t2, P)
    if n == 2:
        t0 = np.einsum("gij,hkjr->ghkir", mats, f)
        t1 = f[mul]  # f(gh, k): index [g, h] -> gh, then k
        t2 = f[np.arange(len(mul))[:, None, None], mul[None, :, :]]  # f(g, hk)
        t3 = f[:, :, None]  # f(g, h)
        return np.mod(t0 - t1 + t2 - t3, P)
    raise ValueError("degree %d not supported" % n)


def _block_kernel_update(k: np.ndarray, block: np.ndarray) -> np.ndarray:
    """Restrict a kernel basis ``k`` (columns) by the extra equations ``block @ k``."""
    if k.shape[1] == 0 or not block.any():
        return k
    ker = fl.kernel_matrix(block, P)
    if ker.shape[1] == k.shape[1]:
        return k
    return fl.matmul(k, ker, P)


def cocycle_space(group: GroupTable, mats: np.ndarray, n: int, chunk: int = 64) -> np.ndarray:
    """Basis (columns) of Z^n = ker d_n, by streaming the rows of d_n.

    The kernel basis is refined one block of equations at a time, so the
    full differential matrix is never materialized.
    """
    g_ord = group.order
    d = mats.shape[1]
    size = g_ord ** n * d
    k = np.eye(size, dtype=np.int64)
    mul = group.mul
    if n == 0:
        block = bar_differential(group, mats, 0, k).reshape(-1, size)
        return _block_kernel_update(k, block)
    hstep = max(1, chunk // g_ord)
    for g in range(g_ord):
        if n == 1:
            f = k.reshape(g_ord, d, -1)
            block = np.mod(np.einsum("ij,hjr->hir", mats[g], f) - f[mul[g]] + f[g][None], P)
            k = _block_kernel_update(k, block.reshape(-1, k.shape[1]))
            continue
        for start in range(0, g_ord, hstep):
            hs = np.arange(start, min(g_ord, start + hstep))
            f = k.reshape(g_ord, g_ord, d, -1)
            t0 = np.einsum("ij,hkjr->hkir", mats[g], f[hs])
            t1 = f[mul[g, hs]]  # f(gh, k)
            t2 = f[g][mul[hs]]  # f(g, hk)
            t3 = f[g, hs][:, None]  # f(g, h)
            block = np.mod(t0 - t1 + t2 - t3, P)
            k = _block_kernel_update(k, block.reshape(-1, k.shape[1]))
    return k


def finite_group_cohomology(group: GroupTable, module: GModule, degree: int = 2) -> CohomologyReport:
    """Dimensions of H^0, H^1 and (optionally) H^2 via the bar complex."""
    if module.group is None or (module.group is not group and
                                not np.array_equal(module.group.mul, group.mul)):
        raise ModuleError("module is not defined over this group")
    if degree not in (0, 1, 2):
        raise ValueError("degree must be 0, 1 or 2")
    mats = module.element_matrices()
    d = module.dim
    g_ord = group.order
    if degree == 2 and g_ord ** 2 * d > MAX_DEGREE2_COCHAINS:
        raise ValueError("degree-2 cochain space of size %d exceeds the streaming limit %d"
                         % (g_ord ** 2 * d, MAX_DEGREE2_COCHAINS))
    z0 = cocycle_space(group, mats, 0).shape[1]
    h1 = h2 = None
    z1 = None
    if degree >= 1:
        z1 = cocycle_space(group, mats, 1).shape[1]
        h1 = z1 - (d - z0)
    if degree >= 2:
        z2 = cocycle_space(group, mats, 2).shape[1]
        h2 = z2 - (g_ord * d - z1)
    meta = {"group": group.name, "order": g_ord, "dim": d}
    return CohomologyReport(z0, h1 if h1 is not None else 0, h2, meta=meta)


# ---------------------------------------------------------------------------
# Tame local cohomology

def local_module(datum: TameLocalDatum, module: GModule) -> GModule:
    """Restriction of ``module`` to the decomposition group at ``datum.ell``.

    ``module`` is either a module over SL(2, F_3) (the images of sigma and
    tau are looked up in its group table) or already a two-generator module
    on (sigma, tau).
    """
    if module.group is None:
        if len(module.gens) != 2:
            raise ModuleError("a local module needs exactly the generators (sigma, tau)")
        return module
    g = module.group
    sig = mat(datum.sigma, 1)
    tau = mat(datum.tau, 1)
    if sig not in g.index or tau not in g.index:
        raise ModuleError("datum images are not elements of %s" % g.name)
    return GModule([module.act(g.index[sig]), module.act(g.index[tau])], name="local")


def ad0_local(datum: TameLocalDatum) -> GModule:
    """Ad0 restricted to the tame group, on the generators (sigma, tau)."""
    return GModule([conjugation_matrix(mat(datum.sigma, 1)), conjugation_matrix(mat(datum.tau, 1))],
                   name="Ad0@%d" % datum.ell)


def _matrix_order(m: np.ndarray, bound: int = 10_000) -> int:
    one = np.eye(m.shape[0], dtype=np.int64)
    x, k = m.copy(), 1
    while not np.array_equal(x, one):
        x = fl.matmul(x, m, P)
        k += 1
        if k > bound:
            raise RuntimeError("matrix order exceeds %d" % bound)
    return k


def _tau_norm(t: np.ndarray, ell: int) -> np.ndarray:
    """N = 1 + t + ... + t^(ell-1), using the finite order of t."""
    e = _matrix_order(t)
    d = t.shape[0]
    powers = [np.eye(d, dtype=np.int64)]
    for _ in range(e - 1):
        powers.append(fl.matmul(powers[-1], t, P))
    full = np.mod(sum(powers), P)
    rest = np.mod(sum(powers[: ell % e], np.zeros((d, d), dtype=np.int64)), P)
    return np.mod((ell // e) * full + rest, P)


def tame_differentials(ell: int, m: GModule) -> Tuple[np.ndarray, np.ndarray]:
    """The two maps of the one-relator complex M -> M^2 -> M.

    ``d0(x) = ((S-1)x, (T-1)x)`` and, from the Fox derivatives of the
    relator ``sigma tau sigma^-1 tau^-ell``,
    ``d1(a, b) = (1 - T^ell) a + (S - N_ell(T)) b``.
    """
    s, t = m.gens
    d = m.dim
    one = np.eye(d, dtype=np.int64)
    d0 = np.mod(np.vstack([s - one, t - one]), P)
    t_ell = fl.mat_pow(t, ell, P)
    d1 = np.mod(np.hstack([one - t_ell, s - _tau_norm(t, ell)]), P)
    return d0, d1


def _check_tame(ell: int, m: GModule) -> None:
    s, t = m.gens
    lhs = fl.matmul(fl.matmul(s, t, P), fl.inverse(s, P), P)
    if not np.array_equal(lhs, fl.mat_pow(t, ell, P)):
        raise ValueError("tame relation sigma tau sigma^-1 = tau^ell fails on the module")
    if math.gcd(_matrix_order(t), ell) != 1:
        raise ValueError("inertia acts with order divisible by ell; the action is not tame")


def _tame_dims(ell: int, m: GModule) -> Tuple[int, int, int, np.ndarray, np.ndarray]:
    d0, d1 = tame_differentials(ell, m)
    d = m.dim
    r0 = fl.rank(d0, P)
    z1 = fl.kernel_matrix(d1, P)
    r1 = fl.rank(d1, P)
    return d - r0, z1.shape[1] - r0, d - r1, z1, d0


def tame_dual(ell: int, m: GModule) -> GModule:
    """Dual twist on the tame group: sigma picks up chi(sigma) = ell mod 3."""
    return build_dual_twist(m, [ell % P, 1])


def tame_local_cohomology(datum: TameLocalDatum, module: GModule, validate: bool = True) -> CohomologyReport:
    """(h0, h1, h2) of the tame local group acting on ``module``.

    With ``validate`` the local Euler characteristic (h1 = h0 + h2) and local
    duality (h2 equals the invariants of the dual twist) are checked, and a
    :class:`CohomologyValidationError` is raised if either fails.
    """
    m = local_module(datum, module)
    ell = datum.ell
    _check_tame(ell, m)
    h0, h1, h2, z1, d0 = _tame_dims(ell, m)
    # H^1 representatives: extend a basis of B^1 inside Z^1
    b1 = fl.row_space(d0.T, P) if d0.size else np.zeros((0, 2 * m.dim), dtype=np.int64)
    reps = []
    basis = b1
    for col in z1.T:
        trial = np.vstack([basis, col]) if basis.size else col.reshape(1, -1)
        if fl.rank(trial, P) > (basis.shape[0] if basis.size else 0):
            basis = fl.row_space(trial, P)
            v = normalize_vector(col)
            reps.append((v[:m.dim], v[m.dim:]))
    report = CohomologyReport(h0, h1, h2, cocycles=reps, meta={"ell": ell})
    if validate:
        dual_h0 = tame_dual(ell, m).invariants().shape[1]
        report.meta["dual_h0"] = dual_h0
        if h1 != h0 + h2:
            raise CohomologyValidationError("Euler characteristic fails: h1=%d, h0+h2=%d" % (h1, h0 + h2))
        if h2 != dual_h0:
            raise CohomologyValidationError("local duality fails: h2=%d, dual h0=%d" % (h2, dual_h0))
    return report


@dataclass
class UnramifiedLine:
    """A cocycle class given by its values on (sigma, tau)."""

    sigma_value: np.ndarray
    tau_value: np.ndarray


def unramified_h1(datum: TameLocalDatum, module: GModule) -> Tuple[int, List[UnramifiedLine]]:
    """Unramified classes: H^1 of the Frobenius quotient on the inertia invariants.

    The dimension is ``dim M^T - rank((S-1) on M^T)``; a normalized basis of
    representatives (value at sigma, zero at tau) is returned with it.
    """
    m = local_module(datum, module)
    _check_tame(datum.ell, m)
    s, t = m.gens
    d = m.dim
    one = np.eye(d, dtype=np.int64)
    inv = fl.kernel_matrix(np.mod(t - one, P), P)  # M^T
    if inv.shape[1] == 0:
        return 0, []
    image = fl.matmul(np.mod(s - one, P), inv, P)  # (S-1) M^T
    img_rows = fl.row_space(image.T, P) if image.any() else np.zeros((0, d), dtype=np.int64)
    lines = []
    basis = img_rows
    for col in inv.T:
        trial = np.vstack([basis, col])
        if fl.rank(trial, P) > basis.shape[0]:
            basis = fl.row_space(trial, P)
            lines.append(UnramifiedLine(normalize_vector(col), np.zeros(d, dtype=np.int64)))
    return len(lines), lines


# ---------------------------------------------------------------------------
# Archimedean place and the place above 3

def archimedean_cohomology(module) -> CohomologyReport:
    """Cohomology of Z/2 = <c> acting on ``module``.

    ``module`` is a one-generator GModule or the matrix of ``c`` itself.
    """
    c = module.gens[0] if isinstance(module, GModule) else fl.as_fp(module, P)
    d = c.shape[0]
    one = np.eye(d, dtype=np.int64)
    if d and not np.array_equal(fl.matmul(c, c, P), one):
        raise ValueError("complex conjugation must act as an involution")
    if d == 0:
        return CohomologyReport(0, 0, 0)
    cm = np.mod(c - one, P)
    cp = np.mod(c + one, P)
    h0 = d - fl.rank(cm, P)
    h1 = (d - fl.rank(cp, P)) - fl.rank(cm, P)
    h2 = (d - fl.rank(cm, P)) - fl.rank(cp, P)
    return CohomologyReport(h0, h1, h2)


@dataclass
class Local3Report:
    h0: int
    h1: int
    h2: int
    dual_h0: int
    euler_gap: int
    frob_order: int
    frob: Tuple[int, ...]


def local_at_3_report(module: GModule, frob: Optional[Sequence[int]] = None) -> Local3Report:
    """Dimensions at p = 3 for a module unramified at 3.

    ``module`` is a two-generator module on (Frobenius, inertia) with
    inertia acting trivially.  The mod-3 cyclotomic character is trivial on
    the chosen Frobenius and equals -1 on the inertia generator, so inertia
    acts by -1 on the dual twist.  Local duality gives h2 = dim H^0 of the
    dual twist and the local Euler characteristic over Q_3 gives
    h1 = h0 + h2 + dim M.
    """
    if module.dim != 3:
        raise ValueError("expected a 3-dimensional module, got dimension %d" % module.dim)
    if len(module.gens) != 2:
        raise ModuleError("expected generators (Frobenius, inertia)")
    fr, inert = module.gens
    if not np.array_equal(inert, np.eye(3, dtype=np.int64)):
        raise ValueError("module is ramified at 3")
    h0 = module.invariants().shape[1]
    dual = build_dual_twist(module, [1, -1])
    dual_h0 = dual.invariants().shape[1]
    h2 = dual_h0
    h1 = h0 + h2 + module.dim
    return Local3Report(h0, h1, h2, dual_h0, h1 - h0, _matrix_order(fr),
                        tuple(frob) if frob is not None else tuple(fr.ravel().tolist()))


def unramified_at_3(frob: Sequence[int]) -> GModule:
    """Ad0 as a module for (Frobenius, inertia) at 3, Frobenius acting by conjugation."""
    g = mat(frob, 1)
    if mat_det(g, 1) != 1:
        raise ValueError("Frobenius image must lie in SL(2, F_3)")
    return GModule([conjugation_matrix(g), np.eye(3, dtype=np.int64)], name="Ad0@3")
