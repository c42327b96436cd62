"""The cyclic cubic subfield of Q(zeta_ell) through Gaussian periods.

For a prime ``ell = 1 mod 3`` let C_0 be the subgroup of cubes in
(Z/ell)^* and C_k = g^k C_0 its cosets for a primitive root g.  The periods
``eta_k = sum_{t in C_k} zeta^t`` form an integral basis of the ring of
integers O_L of the cubic subfield L.  Everything here is exact arithmetic
in that basis:

* ``eta_i * eta_j`` is expanded by counting coset sums, with the constant
  term rewritten via ``1 = -(eta_0 + eta_1 + eta_2)``;
* the generator of Gal(L/Q) induced by ``zeta -> zeta^g`` shifts the index
  ``k -> k + 1``;
* the real embeddings send ``eta_k`` to ``sum_{t in C_k} cos(2 pi t / ell)``
  (the sum is real because -1 is a cube mod ell).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import math

import mpmath
import numpy as np

from . import fplinalg as fl


class FieldError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Primes

def primes_upto(n: int) -> List[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.nonzero(sieve)[0].tolist()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = int(math.isqrt(n))
    return all(n % d for d in range(3, r + 1, 2))


def sieve_candidates(max_value: int) -> List[int]:
    """Primes ``ell <= max_value`` with ``ell = 1 mod 3``, ascending."""
    return [p for p in primes_upto(max_value) if p % 3 == 1]


@dataclass(frozen=True)
class Shanks:
    a: int


@dataclass(frozen=True)
class NotShanks:
    pass


def shanks_classify(ell: int) -> Union[Shanks, NotShanks]:
    """``Shanks(a)`` when ``ell = a^2 + 3a + 9`` with ``a >= -1``."""
    disc = 4 * ell - 27
    if disc < 0:
        return NotShanks()
    r = math.isqrt(disc)
    if r * r != disc or (r - 3) % 2:
        return NotShanks()
    a = (r - 3) // 2
    if a < -1 or a * a + 3 * a + 9 != ell:
        return NotShanks()
    return Shanks(a)


def simplest_cubic(a: int) -> List[int]:
    """Coefficients ``[1, -a, -(a+3), -1]`` of Shanks' simplest cubic."""
    return [1, -a, -(a + 3), -1]


# ---------------------------------------------------------------------------
# Periods

def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise FieldError("no primitive root mod %d" % p)


def _prime_factors(n: int) -> List[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def coset_index(ell: int) -> np.ndarray:
    """``idx[t]`` is k with t in C_k (and -1 for t = 0)."""
    g = primitive_root(ell)
    idx = np.full(ell, -1, dtype=np.int64)
    x = 1
    for e in range(ell - 1):
        idx[x] = e % 3
        x = (x * g) % ell
    return idx


def period_structure(ell: int) -> np.ndarray:
    """Integer tensor ``T`` with ``eta_i eta_j = sum_k T[i, j, k] eta_k``."""
    if ell % 3 != 1 or not is_prime(ell):
        raise FieldError("ell must be a prime congruent to 1 mod 3, got %d" % ell)
    idx = coset_index(ell)
    f = (ell - 1) // 3
    cosets = [np.nonzero(idx == k)[0] for k in range(3)]
    t = np.zeros((3, 3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            sums = (cosets[i][:, None] + cosets[j][None, :]) % ell
            labels = idx[sums.ravel()]
            zero = int(np.count_nonzero(labels == -1))
            counts = np.bincount(labels[labels >= 0], minlength=3)
            if np.any(counts % f):
                raise AssertionError("coset-sum counts are not constant on cosets")
            t[i, j] = counts // f - zero
    return t


def _charpoly3(m: Sequence[Sequence[int]]) -> List[int]:
    """Characteristic polynomial ``[1, c2, c1, c0]`` of a 3x3 integer matrix."""
    m = [[int(x) for x in row] for row in m]
    tr = m[0][0] + m[1][1] + m[2][2]
    minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0]
              + m[0][0] * m[2][2] - m[0][2] * m[2][0]
              + m[1][1] * m[2][2] - m[1][2] * m[2][1])
    return [1, -tr, minors, -fl.int_det(m)]


def cubic_discriminant(poly: Sequence[int]) -> int:
    one, a, b, c = (int(x) for x in poly)
    if one != 1:
        raise FieldError("monic polynomial expected")
    return a * a * b * b - 4 * b ** 3 - 4 * a ** 3 * c - 27 * c * c + 18 * a * b * c


@dataclass
class CubicField:
    """The cubic subfield of Q(zeta_ell) in the period basis."""

    ell: int
    poly: List[int]
    disc_field: int
    shanks: Optional[int]
    structure: np.ndarray = field(repr=False)
    poly_index: int = 1

    @property
    def is_shanks(self) -> bool:
        return self.shanks is not None

    # exact arithmetic on integer coordinate vectors -------------------------
    def mul(self, x: Sequence[int], y: Sequence[int]) -> List[int]:
        t = self.structure
        out = [0, 0, 0]
        for i in range(3):
            if not x[i]:
                continue
            for j in range(3):
                if not y[j]:
                    continue
                c = int(x[i]) * int(y[j])
                for k in range(3):
                    out[k] += c * int(t[i, j, k])
        return out

    def mult_matrix(self, x: Sequence[int]) -> List[List[int]]:
        """Matrix of multiplication by ``x``: column j is ``x * eta_j``."""
        cols = [self.mul(x, e) for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1])]
        return [[cols[j][i] for j in range(3)] for i in range(3)]

    def norm(self, x: Sequence[int]) -> int:
        return fl.int_det(self.mult_matrix(x))

    def trace(self, x: Sequence[int]) -> int:
        return -sum(int(v) for v in x)

    def charpoly(self, x: Sequence[int]) -> List[int]:
        return _charpoly3(self.mult_matrix(x))

    @staticmethod
    def sigma(x: Sequence[int], k: int = 1) -> List[int]:
        """Galois action: the coefficient of eta_i moves to eta_{i+k}."""
        k %= 3
        return [int(x[(i - k) % 3]) for i in range(3)]

    def one(self) -> List[int]:
        return [-1, -1, -1]

    def integer(self, n: int) -> List[int]:
        return [-n, -n, -n]

    def trace_form(self) -> List[List[int]]:
        t = self.structure
        return [[-int(t[i, j].sum()) for j in range(3)] for i in range(3)]

    # embeddings ------------------------------------------------------------
    def period_values(self, dps: int = 30) -> List[mpmath.mpf]:
        return _period_values(self.ell, dps)

    def embed(self, x: Sequence[int], dps: int = 30) -> List[mpmath.mpf]:
        """The three real embeddings, indexed by the Galois power applied."""
        eta = self.period_values(dps)
        with mpmath.workdps(dps + 10):
            return [mpmath.fsum(int(x[i]) * eta[(i + j) % 3] for i in range(3)) for j in range(3)]


@lru_cache(maxsize=None)
def _period_values(ell: int, dps: int) -> List[mpmath.mpf]:
    idx = coset_index(ell)
    with mpmath.workdps(dps + 10):
        vals = []
        for k in range(3):
            ts = np.nonzero(idx == k)[0]
            vals.append(mpmath.fsum(mpmath.cos(2 * mpmath.pi * int(t) / ell) for t in ts))
        return vals


def numerical_periods(ell: int, dps: int = 40) -> List[mpmath.mpf]:
    """Periods summed directly from roots of unity (independent of the basis code)."""
    with mpmath.workdps(dps):
        g = primitive_root(ell)
        out = []
        for k in range(3):
            s = mpmath.mpc(0)
            for e in range(k, ell - 1, 3):
                s += mpmath.expjpi(2 * mpmath.mpf(pow(g, e, ell)) / ell)
            out.append(s.real)
    return out


def period_polynomial(ell: int) -> CubicField:
    """Minimal polynomial of eta_0 and the checked cubic field it defines."""
    if ell % 3 != 1:
        raise FieldError("ell must be congruent to 1 mod 3, got %d" % ell)
    return _period_polynomial(ell)


@lru_cache(maxsize=None)
def _period_polynomial(ell: int) -> CubicField:
    t = period_structure(ell)
    tmp = CubicField(ell, [], 0, None, t)
    e0, e1, e2 = [1, 0, 0], [0, 1, 0], [0, 0, 1]
    poly = tmp.charpoly(e0)
    if poly[1] != 1:
        raise AssertionError("sum of periods must be -1")
    # e2 and e3 recomputed from symmetric functions as a cross-check
    p01, p02, p12 = tmp.mul(e0, e1), tmp.mul(e0, e2), tmp.mul(e1, e2)
    s2 = [a + b + c for a, b, c in zip(p01, p02, p12)]
    if len(set(s2)) != 1:
        raise AssertionError("second symmetric function is not rational")
    p012 = tmp.mul(p01, e2)
    if len(set(p012)) != 1:
        raise AssertionError("third symmetric function is not rational")
    if poly != [1, 1, -s2[0], p012[0]]:
        raise AssertionError("characteristic polynomial disagrees with symmetric functions")
    disc_poly = cubic_discriminant(poly)
    disc_field = fl.int_det(tmp.trace_form())
    if disc_field != ell * ell:
        raise AssertionError("field discriminant %d is not ell^2" % disc_field)
    q, r = divmod(disc_poly, disc_field)
    idx = math.isqrt(q) if q >= 0 else -1
    if r or idx * idx != q:
        raise AssertionError("polynomial discriminant is not ell^2 times a square")
    sh = shanks_classify(ell)
    return CubicField(ell, poly, disc_field, sh.a if isinstance(sh, Shanks) else None, t, idx)


# ---------------------------------------------------------------------------
# Ramification and residue maps

def degree_one_homs(L: CubicField, p: int) -> List[Tuple[int, int, int]]:
    """All ring homomorphisms O_L -> F_p, as images of (eta_0, eta_1, eta_2)."""
    t = np.mod(L.structure, p)
    a = np.arange(p, dtype=np.int64)
    x0, x1 = np.meshgrid(a, a, indexing="ij")
    x0, x1 = x0.ravel(), x1.ravel()
    x2 = np.mod(-1 - x0 - x1, p)
    xs = [x0, x1, x2]
    ok = np.ones(x0.shape, dtype=bool)
    for i in range(3):
        for j in range(i, 3):
            lhs = np.mod(xs[i] * xs[j], p)
            rhs = np.mod(t[i, j, 0] * x0 + t[i, j, 1] * x1 + t[i, j, 2] * x2, p)
            ok &= lhs == rhs
    return [(int(u), int(v), int(w)) for u, v, w in zip(x0[ok], x1[ok], x2[ok])]


def _poly_mod_is_cube_of_linear(poly: Sequence[int], p: int) -> Optional[int]:
    _, a, b, c = (int(x) % p for x in poly)
    # (x - r)^3 = x^3 - 3r x^2 + 3r^2 x - r^3
    r = (-a * pow(3, -1, p)) % p
    if (3 * r * r - b) % p == 0 and (-(r ** 3) - c) % p == 0:
        return r
    return None


def factorization_profile(p: int, L: CubicField) -> Tuple[int, int, int]:
    """``(e, f, g)`` for the rational prime ``p`` in the Galois cubic L.

    The count of residue fields comes from the trace form of O_L/p (its
    radical is the nilradical since p > 3), so the answer does not depend on
    whether the period polynomial is p-maximal.  When ``p`` does not divide
    the polynomial index the result is cross-checked against the polynomial
    factorization mod p.
    """
    if p <= 3:
        raise FieldError("only primes p > 3 are supported")
    tf = [[x % p for x in row] for row in L.trace_form()]
    r = fl.rank(np.array(tf, dtype=np.int64), p)
    if r == 1:
        profile = (3, 1, 1)
    elif r == 3:
        g = len(degree_one_homs(L, p))
        if g == 3:
            profile = (1, 1, 3)
        elif g == 0:
            profile = (1, 3, 1)
        else:
            raise AssertionError("unexpected splitting in a Galois cubic")
    else:
        raise AssertionError("trace form rank %d impossible for a Galois cubic" % r)
    if L.poly_index % p:
        cube = _poly_mod_is_cube_of_linear(L.poly, p)
        if (profile == (3, 1, 1)) != (cube is not None):
            raise AssertionError("period polynomial factorization disagrees with the trace form")
    return profile


def same_field_element(L: CubicField, poly: Sequence[int], dps: int = 40) -> Optional[List[int]]:
    """An element of O_L with characteristic polynomial ``poly``, if one exists.

    Candidates come from solving for the period coordinates of a root of
    ``poly`` numerically, for each cyclic ordering of its roots; the returned
    element is certified by exact characteristic polynomial comparison.
    """
    with mpmath.workdps(dps):
        roots = sorted(mpmath.polyroots([mpmath.mpf(c) for c in poly], maxsteps=200, extraprec=dps))
        if any(abs(mpmath.im(r)) > mpmath.mpf(10) ** (-dps // 2) for r in roots):
            return None
        roots = [mpmath.re(r) for r in roots]
        eta = L.period_values(dps)
        e = mpmath.matrix([[eta[(i + j) % 3] for i in range(3)] for j in range(3)])
        for perm in ((0, 1, 2), (0, 2, 1)):
            for shift in range(3):
                rr = [roots[perm[(j + shift) % 3]] for j in range(3)]
                x = mpmath.lu_solve(e, mpmath.matrix(rr))
                coords = [int(mpmath.nint(x[i])) for i in range(3)]
                if max(abs(x[i] - coords[i]) for i in range(3)) > mpmath.mpf(10) ** (-dps // 3):
                    continue
                if L.charpoly(coords) == [int(c) for c in poly]:
                    return coords
    return None
