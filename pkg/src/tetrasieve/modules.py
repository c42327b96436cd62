"""F_3[G]-modules for G = A4 and G = SL(2, F_3).

A module is given by one invertible matrix per group generator, acting on
column vectors.  When a :class:`~tetrasieve.groups.GroupTable` is attached,
the representation is extended to every element along shortest generator
words and checked against the whole multiplication table, so a module that
violates any group relation is rejected at construction time.

Over A4 in characteristic 3 there are exactly two simple modules: the
trivial line and Ad0 (traceless 2x2 matrices under conjugation).  Ad0 has
defect zero, so it is projective and injective and therefore splits off
every module it occurs in.  :func:`decompose` makes that splitting explicit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import fplinalg as fl
from .groups import (A4_G1, A4_G2, GroupTable, Mat2, a4_table, a4_word_matrix,
                     enumerate_sl2, mat, mat_det, mat_inv, mat_mul)

P = 3


class ModuleError(ValueError):
    """Raised when action matrices do not define a module."""


class GModule:
    """A finite-dimensional F_3-representation given on generators."""

    def __init__(self, gens: Sequence, group: Optional[GroupTable] = None,
                 name: str = "", check: bool = True):
        mats = [fl.as_fp(g, P) for g in gens]
        if not mats:
            raise ModuleError("at least one generator is required")
        d = mats[0].shape[0]
        for m in mats:
            if m.shape != (d, d):
                raise ModuleError("action matrices must be square of equal size")
            if d and not fl.is_invertible(m, P):
                raise ModuleError("action matrices must be invertible")
        self.gens: List[np.ndarray] = mats
        self.dim = d
        self.group = group
        self.name = name
        self._elements: Optional[np.ndarray] = None
        if group is not None:
            if len(group.gens) != len(mats):
                raise ModuleError("expected %d generator images, got %d" % (len(group.gens), len(mats)))
            if check:
                self._build_elements()

    def __repr__(self) -> str:
        label = self.name or "GModule"
        return "<%s dim=%d gens=%d>" % (label, self.dim, len(self.gens))

    def _build_elements(self) -> np.ndarray:
        g = self.group
        words = g.words()
        d = self.dim
        out = np.zeros((g.order, d, d), dtype=np.int64)
        for i, w in enumerate(words):
            m = np.eye(d, dtype=np.int64)
            for k in w:
                m = fl.matmul(m, self.gens[k], P)
            out[i] = m
        # rho(s) rho(x) == rho(s x) for all generators s and elements x
        for k, s in enumerate(g.gens):
            lhs = np.mod(np.einsum("ij,njk->nik", self.gens[k], out), P)
            rhs = out[g.mul[s, :]]
            if not np.array_equal(lhs, rhs):
                raise ModuleError("action matrices violate the relations of %s" % (g.name or "the group"))
        self._elements = out
        return out

    def element_matrices(self) -> np.ndarray:
        """Array of shape (|G|, dim, dim), indexed like ``group.elements``."""
        if self.group is None:
            raise ModuleError("module has no group table attached")
        if self._elements is None:
            self._build_elements()
        return self._elements

    def act(self, element: int) -> np.ndarray:
        return self.element_matrices()[element]

    def with_gens(self, gens: Sequence, name: str = "") -> "GModule":
        return GModule(gens, group=self.group, name=name)

    def change_basis(self, b) -> "GModule":
        """Module in the basis given by the columns of ``b``."""
        b = fl.as_fp(b, P)
        bi = fl.inverse(b, P)
        return self.with_gens([fl.matmul(fl.matmul(bi, g, P), b, P) for g in self.gens], self.name)

    def invariants(self) -> np.ndarray:
        """Basis (columns) of the fixed vectors."""
        if self.dim == 0:
            return np.zeros((0, 0), dtype=np.int64)
        stacked = np.vstack([np.mod(g - np.eye(self.dim, dtype=np.int64), P) for g in self.gens])
        return fl.kernel_matrix(stacked, P)

    def is_trivial(self) -> bool:
        return all(np.array_equal(g, np.eye(self.dim, dtype=np.int64)) for g in self.gens)


def direct_sum(*mods: GModule, name: str = "") -> GModule:
    k = len(mods[0].gens)
    gens = []
    for i in range(k):
        blocks = [m.gens[i] for m in mods]
        d = sum(b.shape[0] for b in blocks)
        out = np.zeros((d, d), dtype=np.int64)
        o = 0
        for b in blocks:
            s = b.shape[0]
            out[o:o + s, o:o + s] = b
            o += s
        gens.append(out)
    return GModule(gens, group=mods[0].group, name=name)


def trivial_module(dim: int, group: Optional[GroupTable] = None, ngens: int = 2) -> GModule:
    k = len(group.gens) if group is not None else ngens
    return GModule([np.eye(dim, dtype=np.int64) for _ in range(k)], group=group, name="trivial")


# ---------------------------------------------------------------------------
# Ad0 and its dual twist

def ad0_coords(x: Mat2) -> Tuple[int, int, int]:
    """Coordinates of a traceless matrix in the basis (E+, H, E-)."""
    a, b, c, _ = x
    return (b % P, a % P, c % P)


AD0_BASIS: Tuple[Mat2, Mat2, Mat2] = ((0, 1, 0, 0), (1, 0, 0, 2), (0, 0, 1, 0))


def conjugation_matrix(g: Sequence[int]) -> np.ndarray:
    """Matrix of ``X -> g X g^-1`` on traceless matrices over F_3."""
    g = mat(g, 1)
    if mat_det(g, 1) == 0:
        raise ModuleError("image %r is not invertible" % (g,))
    gi = mat_inv(g, 1)
    cols = [ad0_coords(mat_mul(mat_mul(g, b, 1), gi, 1)) for b in AD0_BASIS]
    return np.array(cols, dtype=np.int64).T


def build_ad0(images: Sequence[Sequence[int]], group: Optional[GroupTable] = None) -> GModule:
    """Ad0 of a representation given by its images of the generators."""
    for x in images:
        if mat_det(mat(x, 1), 1) != 1:
            raise ModuleError("generator image %r does not have determinant 1" % (tuple(x),))
    return GModule([conjugation_matrix(x) for x in images], group=group, name="Ad0")


def ad0_sl2() -> GModule:
    """Ad0 for the identity representation of SL(2, F_3)."""
    g = enumerate_sl2(1)
    return build_ad0([g.elements[i] for i in g.gens], group=g)


def ad0_a4(group: Optional[GroupTable] = None) -> GModule:
    """Ad0 as an A4-module, on the generators (12)(34) and (123)."""
    a4 = group if group is not None else a4_table()
    perms = [a4.elements[i] for i in a4.gens]
    return build_ad0([a4_word_matrix(p) for p in perms], group=a4)


def build_dual_twist(m: GModule, chi: Sequence[int]) -> GModule:
    """Contragredient of ``m`` multiplied by the character values ``chi``.

    ``chi`` gives the value of the mod-3 cyclotomic character on each
    generator.
    """
    if len(chi) != len(m.gens):
        raise ModuleError("need one character value per generator")
    vals = [int(c) % P for c in chi]
    if any(v == 0 for v in vals):
        raise ModuleError("character values must be units mod 3")
    gens = [np.mod(v * fl.inverse(g, P).T, P) for v, g in zip(vals, m.gens)]
    return GModule(gens, group=m.group, name=(m.name + "*") if m.name else "dual")


def dual(m: GModule) -> GModule:
    return build_dual_twist(m, [1] * len(m.gens))


# ---------------------------------------------------------------------------
# Submodules and irreducibility

def spin(m: GModule, vectors, transpose: bool = False) -> np.ndarray:
    """Basis (rows, in RREF) of the submodule generated by ``vectors``.

    With ``transpose`` the transposed action is used, which spins inside the
    dual module.
    """
    gens = [g.T for g in m.gens] if transpose else m.gens
    vs = [np.mod(np.asarray(v, dtype=np.int64).ravel(), P) for v in vectors]
    if not vs:
        return np.zeros((0, m.dim), dtype=np.int64)
    basis = fl.row_space(np.vstack(vs), P)
    frontier = list(basis)
    while frontier:
        new = []
        for v in frontier:
            for g in gens:
                w = fl.matmul(g, v.reshape(-1, 1), P).ravel()
                trial = np.vstack([basis, w])
                if fl.rank(trial, P) > basis.shape[0]:
                    basis = fl.row_space(trial, P)
                    new.append(w)
        frontier = new
    return basis


def is_submodule(m: GModule, basis_rows) -> bool:
    rows = fl.as_fp(basis_rows, P) if np.asarray(basis_rows).size else np.zeros((0, m.dim), dtype=np.int64)
    if rows.shape[0] == 0:
        return True
    rk = fl.rank(rows, P)
    for g in m.gens:
        img = fl.matmul(g, rows.T, P).T
        if fl.rank(np.vstack([rows, img]), P) != rk:
            return False
    return True


def _projective_points(basis: np.ndarray) -> List[np.ndarray]:
    """One representative per line in the span of the columns of ``basis``."""
    k = basis.shape[1]
    pts = []
    for coeffs in itertools.product(range(P), repeat=k):
        nz = [c for c in coeffs if c]
        if not nz or nz[0] != 1:
            continue
        pts.append(fl.matmul(basis, np.array(coeffs).reshape(-1, 1), P).ravel())
    return pts


def _random_algebra_element(m: GModule, rng: np.random.Generator) -> np.ndarray:
    if m.group is not None:
        mats = m.element_matrices()
        idx = rng.choice(len(mats), size=min(len(mats), 4), replace=False)
        coeffs = rng.integers(0, P, size=len(idx))
        return np.mod(np.einsum("n,nij->ij", coeffs, mats[idx]), P)
    d = m.dim
    out = np.zeros((d, d), dtype=np.int64)
    for _ in range(4):
        w = np.eye(d, dtype=np.int64)
        for _ in range(int(rng.integers(1, 5))):
            w = fl.matmul(w, m.gens[int(rng.integers(len(m.gens)))], P)
        out = np.mod(out + int(rng.integers(0, P)) * w, P)
    return out


def is_irreducible(m: GModule, seed: int = 0, max_tries: int = 200) -> Tuple[bool, Optional[np.ndarray]]:
    """Irreducibility test with a witness submodule when reducible.

    Small modules (dim <= 4) are checked exhaustively by spinning every
    line.  Larger ones use Norton's criterion: for a random group-algebra
    element ``A`` with small nullity, every line of ``ker A`` must spin to
    the whole module and some vector of ``ker A^T`` must spin to the whole
    dual.  The witness is returned as row basis of a proper submodule.
    """
    d = m.dim
    if d == 0:
        return False, None
    if d <= 4:
        for v in _projective_points(np.eye(d, dtype=np.int64)):
            s = spin(m, [v])
            if s.shape[0] < d:
                return False, s
        return True, None
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        a = _random_algebra_element(m, rng)
        ker = fl.kernel_matrix(a, P)
        k = ker.shape[1]
        if k == 0 or k > 3:
            continue
        for v in _projective_points(ker):
            s = spin(m, [v])
            if s.shape[0] < d:
                return False, s
        kt = fl.kernel_matrix(a.T, P)
        w = kt[:, 0]
        s = spin(m, [w], transpose=True)
        if s.shape[0] < d:
            # annihilator of a proper dual submodule is a proper submodule
            return False, fl.kernel_matrix(s, P).T
        return True, None
    raise RuntimeError("no suitable group-algebra element found")


# ---------------------------------------------------------------------------
# Homomorphisms and decomposition

def hom_space(v: GModule, w: GModule) -> List[np.ndarray]:
    """Basis of Hom_G(v, w) as ``w.dim x v.dim`` matrices."""
    dv, dw = v.dim, w.dim
    if dv == 0 or dw == 0:
        return []
    if len(v.gens) != len(w.gens):
        raise ModuleError("modules are over different generator sets")
    rows = []
    for a, b in zip(v.gens, w.gens):
        # row-major vec: vec(B F) = (B kron I) vec F, vec(F A) = (I kron A^T) vec F
        rows.append(np.kron(b, np.eye(dv, dtype=np.int64)) - np.kron(np.eye(dw, dtype=np.int64), a.T))
    ker = fl.kernel_basis(np.mod(np.vstack(rows), P), P)
    return [k.reshape(dw, dv) for k in ker]


def is_equivariant(f, v: GModule, w: GModule) -> bool:
    f = fl.as_fp(f, P)
    return all(np.array_equal(fl.matmul(b, f, P), fl.matmul(f, a, P)) for a, b in zip(v.gens, w.gens))


def _ad0_for(v: GModule) -> GModule:
    if v.group is None:
        return build_ad0([a4_word_matrix(A4_G1), a4_word_matrix(A4_G2)])
    if v.group.order == 24:
        return ad0_sl2()
    return ad0_a4(v.group)


def ad0_multiplicity(v: GModule) -> int:
    """``dim Hom_G(v, Ad0)``, the number of Ad0 summands of ``v``."""
    return len(hom_space(v, _ad0_for(v)))


@dataclass
class Decomposition:
    """``V = Ad0^m (+) W`` with explicit maps.

    ``projections`` are the m equivariant surjections V -> Ad0, ``sections``
    the matching equivariant embeddings Ad0 -> V with ``p_i s_j = delta_ij``,
    ``complement`` a column basis of W = ker(projections) and ``iso`` the
    invertible matrix ``[s_1 | ... | s_m | complement]``.
    """

    m: int
    n: int
    projections: List[np.ndarray]
    sections: List[np.ndarray]
    complement: np.ndarray
    iso: np.ndarray
    complement_module: GModule
    complement_trivial: bool
    notes: List[str] = field(default_factory=list)


def quotient_module(v: GModule, sub_cols) -> Tuple[GModule, np.ndarray]:
    """Action on ``V/W`` where the columns of ``sub_cols`` span ``W``.

    Returns the quotient module and the change-of-basis matrix used.
    """
    sub_cols = np.asarray(sub_cols, dtype=np.int64).reshape(v.dim, -1)
    rows = fl.row_space(sub_cols.T, P) if sub_cols.size else np.zeros((0, v.dim), dtype=np.int64)
    if not is_submodule(v, rows):
        raise ModuleError("subspace is not G-stable")
    k = rows.shape[0]
    b = fl.extend_to_basis(list(rows), v.dim, P)
    bi = fl.inverse(b, P)
    gens = [fl.matmul(fl.matmul(bi, g, P), b, P)[k:, k:] for g in v.gens]
    return GModule(gens if v.dim - k else [np.zeros((0, 0), dtype=np.int64)] * len(gens),
                   group=v.group, name="quotient", check=v.dim - k > 0), b


def submodule_action(v: GModule, cols) -> GModule:
    """Action of ``v`` restricted to the stable subspace spanned by ``cols``."""
    cols = fl.as_fp(cols, P)
    gens = []
    for g in v.gens:
        gens.append(fl.solve(cols, fl.matmul(g, cols, P), P))
        if gens[-1] is None:
            raise ModuleError("subspace is not G-stable")
    return GModule(gens, group=v.group, name="sub", check=cols.shape[1] > 0)


def decompose(v: GModule) -> Decomposition:
    """Split every Ad0 summand off an A4-module (or SL(2, F_3)-module).

    The multiplicity is the dimension of Hom_G(V, Ad0).  Because Ad0 is
    projective the stacked projection V -> Ad0^m has an equivariant section,
    found by solving a linear system inside Hom_G(Ad0^m, V).  The result is
    checked by conjugating V into block-diagonal form with the produced
    isomorphism.
    """
    if v.group is not None and v.group.order not in (12, 24):
        raise ModuleError("decompose supports A4 and SL(2, F_3) only")
    if v.group is not None:
        v.element_matrices()  # re-validates relations
    ad0 = _ad0_for(v)
    d = v.dim
    projs = hom_space(v, ad0)
    m = len(projs)
    if m == 0:
        eye = np.eye(d, dtype=np.int64)
        return Decomposition(0, d, [], [], eye, eye, v, v.is_trivial())
    big = np.vstack(projs)  # 3m x d
    if fl.rank(big, P) != 3 * m:
        raise AssertionError("stacked projection is not surjective")
    ad0m = direct_sum(*([ad0] * m))
    homs = hom_space(ad0m, v)  # each d x 3m
    # find c with sum_k c_k (big @ homs[k]) = I_{3m}
    target = np.eye(3 * m, dtype=np.int64).ravel()
    system = np.stack([fl.matmul(big, h, P).ravel() for h in homs], axis=1)
    c = fl.solve(system, target, P)
    if c is None:
        raise AssertionError("no equivariant section; Ad0 failed to split off")
    sec = np.zeros((d, 3 * m), dtype=np.int64)
    for ck, h in zip(c, homs):
        sec = np.mod(sec + int(ck) * h, P)
    comp = fl.kernel_matrix(big, P)
    iso = np.hstack([sec, comp]) if comp.size else sec
    if not fl.is_invertible(iso, P):
        raise AssertionError("section and complement do not span V")
    wmod = submodule_action(v, comp) if comp.shape[1] else GModule(
        [np.zeros((0, 0), dtype=np.int64)] * len(v.gens), name="zero", check=False)
    # verify block-diagonal form
    isoi = fl.inverse(iso, P)
    for g, a, wg in zip(v.gens, ad0m.gens, wmod.gens):
        block = fl.matmul(fl.matmul(isoi, g, P), iso, P)
        expect = np.zeros_like(block)
        expect[:3 * m, :3 * m] = a
        expect[3 * m:, 3 * m:] = wg
        if not np.array_equal(block, expect):
            raise AssertionError("decomposition isomorphism is not equivariant")
    n = d - 3 * m
    if n and hom_space(wmod, ad0):
        raise AssertionError("complement still has an Ad0 quotient")
    notes = []
    trivial = wmod.is_trivial() if n else True
    if not trivial:
        notes.append("complement has trivial composition factors but nontrivial action")
    sections = [sec[:, 3 * i:3 * i + 3] for i in range(m)]
    return Decomposition(m, n, projs, sections, comp, iso, wmod, trivial, notes)


def ad0_multiplicity_of_quotient(v: GModule, sub_cols) -> int:
    """Ad0-multiplicity of ``V/W`` for a stable subspace ``W``."""
    q, _ = quotient_module(v, sub_cols)
    if q.dim == 0:
        return 0
    return ad0_multiplicity(q)


# ---------------------------------------------------------------------------
# Constructions used in tests and demos

A4_RELATORS: Tuple[Tuple[int, ...], ...] = ((0, 0), (1, 1, 1), (0, 1, 0, 1, 0, 1))


def extension_cocycles(sub: GModule, k: int) -> np.ndarray:
    """Generator data of extensions ``0 -> sub -> E -> trivial^k -> 0``.

    An extension acts by ``[[A(g), C(g)], [0, I]]``; the admissible
    generator values ``(C(g1), C(g2))`` form the kernel of a linear map
    coming from the A4 relators.  Returns a basis of that kernel as columns,
    each column holding ``C(g1)`` then ``C(g2)`` in row-major order.
    """
    d = sub.dim
    nvar = 2 * d * k
    rows = []
    for rel in A4_RELATORS:
        # top-right block of a product: sum_i A(s_1..s_{i-1}) C(s_i)
        coeff = np.zeros((d * k, nvar), dtype=np.int64)
        prefix = np.eye(d, dtype=np.int64)
        for s in rel:
            blk = np.kron(prefix, np.eye(k, dtype=np.int64))
            coeff[:, s * d * k:(s + 1) * d * k] += blk
            prefix = fl.matmul(prefix, sub.gens[s], P)
        rows.append(np.mod(coeff, P))
    return fl.kernel_matrix(np.vstack(rows), P)


def extension_module(sub: GModule, k: int, data) -> GModule:
    """The extension of trivial^k by ``sub`` with cocycle values ``data``."""
    d = sub.dim
    data = np.mod(np.asarray(data, dtype=np.int64).ravel(), P)
    gens = []
    for s in range(2):
        c = data[s * d * k:(s + 1) * d * k].reshape(d, k)
        g = np.eye(d + k, dtype=np.int64)
        g[:d, :d] = sub.gens[s]
        g[:d, d:] = c
        gens.append(g)
    return GModule(gens, group=sub.group, name="extension")


def a4_catalog(group: Optional[GroupTable] = None) -> List[GModule]:
    """Small indecomposable-or-not building blocks for random A4-modules."""
    a4 = group if group is not None else a4_table()
    triv = trivial_module(1, a4)
    # g2 acts through A4/V4 = Z/3: Jordan blocks give uniserial trivial-factor modules
    j2 = GModule([np.eye(2, dtype=np.int64), np.array([[1, 1], [0, 1]])], group=a4, name="J2")
    j3 = GModule([np.eye(3, dtype=np.int64), np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]])], group=a4, name="J3")
    perm = GModule([_perm_matrix(a4.elements[i]) for i in a4.gens], group=a4, name="perm4")
    return [ad0_a4(a4), triv, j2, j3, perm]


def _perm_matrix(p: Sequence[int]) -> np.ndarray:
    n = len(p)
    out = np.zeros((n, n), dtype=np.int64)
    for i, j in enumerate(p):
        out[j, i] = 1
    return out
