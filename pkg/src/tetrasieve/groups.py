"""Finite matrix groups over Z/3^n and the tetrahedral group.

A 2x2 matrix over Z/3^n is stored as a tuple ``(a, b, c, d)`` of residues in
``[0, 3^n)`` meaning ``[[a, b], [c, d]]``.  Group tables materialize every
element together with a dense multiplication table, which is cheap at the
two levels used here (24 and 648 elements).

A4 is realized twice: as PSL(2, F_3) and as even permutations of four
letters.  The identification comes from the action of PSL(2, F_3) on the
projective line P^1(F_3) = {0, 1, 2, oo} with the letters fixed once and for
all as ``1 -> 0, 2 -> 1, 0 -> 2, oo -> 3`` (zero-based letter indices).
Under this labelling ``[[0, -1], [1, 0]]`` acts as (12)(34) and
``[[1, 1], [0, 1]]`` acts as (123).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

Mat2 = Tuple[int, int, int, int]
Perm = Tuple[int, ...]

SUPPORTED_LEVELS = (1, 2)

# Fixed generators of SL(2, Z) whose reductions generate SL(2, Z/3^n).
S_GEN: Mat2 = (0, -1, 1, 0)
T_GEN: Mat2 = (1, 1, 0, 1)

# A4 generators as permutations of {0, 1, 2, 3}; (p o q)[i] = p[q[i]].
A4_G1: Perm = (1, 0, 3, 2)  # (12)(34)
A4_G2: Perm = (1, 2, 0, 3)  # (123)


# ---------------------------------------------------------------------------
# 2x2 matrices mod 3^n

def modulus(level: int) -> int:
    if level < 1:
        raise ValueError("level must be >= 1")
    return 3 ** level


def mat(x: Sequence[int], level: int) -> Mat2:
    q = modulus(level)
    a, b, c, d = (int(v) % q for v in x)
    return (a, b, c, d)


def mat_mul(x: Mat2, y: Mat2, level: int) -> Mat2:
    q = modulus(level)
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % q, (a * f + b * h) % q,
            (c * e + d * g) % q, (c * f + d * h) % q)


def mat_det(x: Mat2, level: int) -> int:
    a, b, c, d = x
    return (a * d - b * c) % modulus(level)


def mat_trace(x: Mat2, level: int) -> int:
    return (x[0] + x[3]) % modulus(level)


def mat_inv(x: Mat2, level: int) -> Mat2:
    q = modulus(level)
    det = mat_det(x, level)
    if det % 3 == 0:
        raise ValueError("matrix %r is not invertible mod %d" % (x, q))
    di = pow(det, -1, q)
    a, b, c, d = x
    return mat((d * di, -b * di, -c * di, a * di), level)


def mat_pow(x: Mat2, k: int, level: int) -> Mat2:
    result: Mat2 = mat((1, 0, 0, 1), level)
    base = mat(x, level)
    if k < 0:
        base = mat_inv(base, level)
        k = -k
    while k:
        if k & 1:
            result = mat_mul(result, base, level)
        base = mat_mul(base, base, level)
        k >>= 1
    return result


def mat_neg(x: Mat2, level: int) -> Mat2:
    return mat(tuple(-v for v in x), level)


def reduce_level(x: Mat2, level: int) -> Mat2:
    return mat(x, level)


def identity(level: int) -> Mat2:
    return mat((1, 0, 0, 1), level)


def element_order(x: Sequence[int], level: int) -> int:
    """Multiplicative order of an invertible 2x2 matrix mod 3^level."""
    g = mat(x, level)
    if mat_det(g, level) % 3 == 0:
        raise ValueError("matrix is not invertible")
    one = identity(level)
    y, k = g, 1
    # |GL(2, Z/3^n)| bounds the order
    bound = 48 * 81 ** (level - 1)
    while y != one:
        y = mat_mul(y, g, level)
        k += 1
        if k > bound:
            raise RuntimeError("order search did not terminate")
    return k


def det_minus_identity(x: Mat2, level: int) -> int:
    """``det(x - I)`` mod 3^level; equals ``2 - trace(x)`` when det x = 1."""
    a, b, c, d = x
    return ((a - 1) * (d - 1) - b * c) % modulus(level)


# ---------------------------------------------------------------------------
# Group tables

@dataclass
class GroupTable:
    """A finite group given by an element list and a multiplication table.

    ``mul[i, j]`` is the index of ``elements[i] * elements[j]``.
    """

    elements: List[Hashable]
    mul: np.ndarray
    gens: List[int]
    name: str = ""
    level: Optional[int] = None
    index: Dict[Hashable, int] = field(init=False, repr=False)
    identity: int = field(init=False)
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        ident = [i for i in range(n) if (self.mul[i] == np.arange(n)).all()]
        if len(ident) != 1:
            raise ValueError("multiplication table has no unique identity")
        self.identity = ident[0]
        inv = np.argmax(self.mul == self.identity, axis=1)
        if not (self.mul[np.arange(n), inv] == self.identity).all():
            raise ValueError("multiplication table is not a group")
        self.inverse = inv

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def product(self, *idx: int) -> int:
        out = self.identity
        for i in idx:
            out = int(self.mul[out, i])
        return out

    def power(self, i: int, k: int) -> int:
        if k < 0:
            i, k = int(self.inverse[i]), -k
        out = self.identity
        for _ in range(k):
            out = int(self.mul[out, i])
        return out

    def element_order(self, i: int) -> int:
        k, y = 1, i
        while y != self.identity:
            y = int(self.mul[y, i])
            k += 1
        return k

    def center(self) -> List[int]:
        m = self.mul
        return [i for i in range(self.order) if (m[i, :] == m[:, i]).all()]

    def conjugate(self, g: int, h: int) -> int:
        """``g h g^-1``."""
        return int(self.mul[self.mul[g, h], self.inverse[g]])

    def generated_subgroup(self, gens: Sequence[int]) -> List[int]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.mul[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def is_normal(self, sub: Sequence[int]) -> bool:
        s = set(sub)
        return all(self.conjugate(g, h) in s for g in range(self.order) for h in sub)

    def commutator_subgroup(self) -> List[int]:
        comms = {int(self.mul[self.mul[a, b], self.mul[self.inverse[a], self.inverse[b]]])
                 for a in range(self.order) for b in range(self.order)}
        return self.generated_subgroup(sorted(comms))

    def subgroups_of_order(self, k: int, max_gens: int = 2) -> List[List[int]]:
        """Subgroups of order ``k`` generated by at most ``max_gens`` elements."""
        found = set()
        for r in range(1, max_gens + 1):
            for gens in itertools.combinations(range(self.order), r):
                sub = tuple(self.generated_subgroup(gens))
                if len(sub) == k:
                    found.add(sub)
        return [list(s) for s in sorted(found)]

    def words(self) -> List[Tuple[int, ...]]:
        """Shortest generator word (shortlex, BFS order) for every element."""
        out: List[Optional[Tuple[int, ...]]] = [None] * self.order
        out[self.identity] = ()
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for k, g in enumerate(self.gens):
                y = int(self.mul[x, g])
                if out[y] is None:
                    out[y] = out[x] + (k,)
                    queue.append(y)
        if any(w is None for w in out):
            raise ValueError("generators do not generate the group")
        return out  # type: ignore[return-value]


def _table_from_closure(gens: Sequence[Hashable], mul_fn, one: Hashable,
                        name: str, level: Optional[int] = None) -> GroupTable:
    elements = [one]
    index = {one: 0}
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul_fn(x, g)
            if y not in index:
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)
    n = len(elements)
    mul = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            mul[i, j] = index[mul_fn(x, y)]
    return GroupTable(elements, mul, [index[g] for g in gens], name=name, level=level)


def enumerate_sl2(level: int) -> GroupTable:
    """SL(2, Z/3^level) as an explicit table, generated by S and T."""
    if level not in SUPPORTED_LEVELS:
        raise ValueError("unsupported level %r; tables exist for %s" % (level, SUPPORTED_LEVELS))
    return _cached_sl2(level)


_SL2_CACHE: Dict[int, GroupTable] = {}


def _cached_sl2(level: int) -> GroupTable:
    if level not in _SL2_CACHE:
        gens = [mat(S_GEN, level), mat(T_GEN, level)]
        _SL2_CACHE[level] = _table_from_closure(
            gens, lambda x, y: mat_mul(x, y, level), identity(level),
            name="SL(2,Z/%d)" % modulus(level), level=level)
    return _SL2_CACHE[level]


def count_sl2_bruteforce(level: int) -> int:
    """Number of determinant-one matrices mod 3^level, by direct count."""
    q = modulus(level)
    r = np.arange(q)
    a, b, c, d = np.meshgrid(r, r, r, r, indexing="ij")
    return int(np.count_nonzero((a * d - b * c) % q == 1))


def cyclic_table(n: int) -> GroupTable:
    """Z/n written additively on the residues 0..n-1, generated by 1 (or 0 if n = 1)."""
    if n < 1:
        raise ValueError("order must be positive")
    r = np.arange(n)
    mul = (r[:, None] + r[None, :]) % n
    return GroupTable(list(range(n)), mul, [1 % n], name="Z/%d" % n)


def _psl_rep(x: Mat2) -> Mat2:
    return min(x, mat_neg(x, 1))


def projectivize(g: GroupTable) -> GroupTable:
    """Quotient of SL(2, F_3) by its center {+-I}.

    Each coset is represented by the lexicographically smaller of ``x`` and
    ``-x``.
    """
    if g.level != 1 or g.order != 24:
        raise ValueError("projectivize expects the SL(2, F_3) table")
    gens = [_psl_rep(g.elements[i]) for i in g.gens]
    return _table_from_closure(gens, lambda x, y: _psl_rep(mat_mul(x, y, 1)),
                               _psl_rep(identity(1)), name="PSL(2,F_3)", level=1)


def psl_class(x: Sequence[int]) -> Mat2:
    """Canonical representative of the image of ``x`` in PSL(2, F_3)."""
    return _psl_rep(mat(x, 1))


# ---------------------------------------------------------------------------
# A4 as permutations

# P^1(F_3) points as (x, y) projective coordinates, keyed by letter index.
_P1_POINTS = {0: (1, 1), 1: (2, 1), 2: (0, 1), 3: (1, 0)}


def _p1_letter(x: int, y: int) -> int:
    x, y = x % 3, y % 3
    if y == 0:
        return 3
    z = (x * pow(y, -1, 3)) % 3
    return {1: 0, 2: 1, 0: 2}[z]


def p1_permutation(x: Sequence[int]) -> Perm:
    """Permutation of the four letters induced by a matrix over F_3."""
    a, b, c, d = mat(x, 1)
    out = []
    for letter in range(4):
        u, v = _P1_POINTS[letter]
        out.append(_p1_letter(a * u + b * v, c * u + d * v))
    return tuple(out)


def perm_mul(p: Perm, q: Perm) -> Perm:
    """Composition ``p o q`` (apply q first)."""
    return tuple(p[i] for i in q)


def perm_sign(p: Perm) -> int:
    sign, seen = 1, set()
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def a4_table() -> GroupTable:
    """Even permutations of four letters, generated by (12)(34) and (123)."""
    return _table_from_closure([A4_G1, A4_G2], perm_mul, (0, 1, 2, 3), name="A4")


def psl_to_a4(p: GroupTable, a: GroupTable) -> List[int]:
    """Index map PSL(2, F_3) -> A4 via the action on P^1(F_3).

    The map is verified to be a bijective homomorphism before it is returned.
    """
    phi = [a.index[p1_permutation(x)] for x in p.elements]
    if sorted(phi) != list(range(a.order)):
        raise AssertionError("P^1 action is not a bijection onto A4")
    for i in range(p.order):
        for j in range(p.order):
            if phi[int(p.mul[i, j])] != int(a.mul[phi[i], phi[j]]):
                raise AssertionError("P^1 action is not a homomorphism")
    return phi


def a4_word_matrix(word_perm: Perm) -> Mat2:
    """A matrix in SL(2, F_3) whose P^1 action is the given even permutation."""
    sl = enumerate_sl2(1)
    for x in sl.elements:
        if p1_permutation(x) == tuple(word_perm):
            return x
    raise ValueError("%r is not an even permutation of four letters" % (word_perm,))


def klein_subgroup(a: GroupTable) -> List[int]:
    """The unique normal subgroup of order 4 of A4."""
    subs = [s for s in a.subgroups_of_order(4) if a.is_normal(s)]
    if len(subs) != 1:
        raise AssertionError("expected exactly one normal subgroup of order 4")
    return subs[0]


# ---------------------------------------------------------------------------
# Twists, lifts and tame data

def central_twist_normalize(sigma: Sequence[int], tau: Sequence[int]) -> Tuple[int, int]:
    """Signs ``(e_s, e_t)`` with ``e_s*sigma = I`` and ``e_t*tau = [[1,1],[0,1]]``.

    Both inputs live in SL(2, F_3) and must agree with their targets up to the
    center {+-I}.
    """
    s, t = mat(sigma, 1), mat(tau, 1)
    signs = []
    for x, target in ((s, identity(1)), (t, mat(T_GEN, 1))):
        if x == target:
            signs.append(1)
        elif mat_neg(x, 1) == target:
            signs.append(-1)
        else:
            raise ValueError("%r is not congruent to %r modulo the center" % (x, target))
    return signs[0], signs[1]


def hensel_sqrt_ell(ell: int, level: int) -> int:
    """The square root of ``ell`` mod 3^level that is congruent to 1 mod 3."""
    if ell % 3 != 1:
        raise ValueError("ell must be 1 mod 3, got %d" % ell)
    q = modulus(level)
    x = 1
    for _ in range(level):
        x = (x - (x * x - ell) * pow(2 * x, -1, q)) % q
    assert (x * x - ell) % q == 0 and x % 3 == 1
    return x


@dataclass(frozen=True)
class TameLocalDatum:
    """Images of Frobenius and tame inertia at a prime ``ell != 3``."""

    ell: int
    sigma: Mat2
    tau: Mat2
    level: int = 1

    def __post_init__(self):
        if self.ell == 3:
            raise ValueError("tame data need ell != 3")
        if not self.relation_holds():
            raise ValueError("tame relation sigma tau sigma^-1 = tau^ell fails")

    def relation_holds(self) -> bool:
        n = self.level
        lhs = mat_mul(mat_mul(self.sigma, self.tau, n), mat_inv(self.sigma, n), n)
        return lhs == mat_pow(self.tau, self.ell, n)


def residual_datum(ell: int) -> TameLocalDatum:
    """The normalized residual datum: sigma = I, tau = [[1,1],[0,1]] over F_3."""
    return TameLocalDatum(ell, identity(1), mat(T_GEN, 1), 1)


def c_ell_template(ell: int, level: int, y: int = 0) -> TameLocalDatum:
    """Upper-triangular lift of the residual datum to Z/3^level.

    ``sigma = [[s, y], [0, s^-1]]`` with ``s`` the square root of ``ell``
    that is 1 mod 3, and ``tau = [[1, 1], [0, 1]]``.
    """
    if y % 3:
        raise ValueError("y must lie in the maximal ideal (divisible by 3)")
    s = hensel_sqrt_ell(ell, level)
    q = modulus(level)
    sigma = mat((s, y, 0, pow(s, -1, q)), level)
    return TameLocalDatum(ell, sigma, mat(T_GEN, level), level)


def frattini_quotient_gamma():
    """The level-3 congruence kernel of SL(2, Z/9) as an F_3[SL(2, F_3)]-module.

    Elements ``I + 3X`` of SL(2, Z/9) are recorded by the coordinates of ``X``
    mod 3 in the basis (E+, H, E-).  SL(2, F_3) acts by conjugation through
    lifts taken from the level-2 table.
    """
    from .modules import GModule  # local import: modules depends on groups

    g9 = enumerate_sl2(2)
    g3 = enumerate_sl2(1)
    kernel = [x for x in g9.elements if mat(x, 1) == identity(1)]
    if len(kernel) != 27:
        raise AssertionError("congruence kernel should have 27 elements")
    # elementary abelian: commutative and of exponent 3
    for x in kernel:
        if mat_pow(x, 3, 2) != identity(2):
            raise AssertionError("congruence kernel is not of exponent 3")
        for y in kernel:
            if mat_mul(x, y, 2) != mat_mul(y, x, 2):
                raise AssertionError("congruence kernel is not abelian")

    def coords(x: Mat2) -> Tuple[int, int, int]:
        a, b, c, _ = x
        return ((b // 3) % 3, ((a - 1) // 3) % 3, (c // 3) % 3)

    def element(v: Sequence[int]) -> Mat2:
        e, h, f = v
        return mat((1 + 3 * h, 3 * e, 3 * f, 1 - 3 * h), 2)

    # additivity of the coordinate map: (I+3X)(I+3Y) = I + 3(X+Y) mod 9
    basis = [element(v) for v in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    actions = []
    for gi in g3.gens:
        target = g3.elements[gi]
        lift = next(x for x in g9.elements if mat(x, 1) == target)
        li = mat_inv(lift, 2)
        cols = [coords(mat_mul(mat_mul(lift, b, 2), li, 2)) for b in basis]
        actions.append(np.array(cols, dtype=np.int64).T)
    return GModule(actions, group=g3, name="Fr(Gamma)")
