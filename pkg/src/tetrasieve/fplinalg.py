"""Exact linear algebra over small prime fields and over the integers.

Matrices over F_p are plain ``numpy`` int64 arrays whose entries are kept
reduced to ``[0, p)``.  Integer matrices are lists of lists of Python ints so
that entries never overflow.
"""

from __future__ import annotations

from typing import List, NamedTuple, Sequence, Tuple

import numpy as np


def as_fp(m, p: int = 3) -> np.ndarray:
    """Return ``m`` as a 2-d int64 array reduced mod ``p``."""
    a = np.asarray(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    return np.mod(a, p)


def fp_inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod %d" % p)
    return pow(a, p - 2, p)


def rref(m, p: int = 3) -> Tuple[np.ndarray, List[int], int]:
    """Reduced row echelon form over F_p.

    Returns ``(R, pivots, rank)``.
    """
    a = as_fp(m, p).copy()
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = fp_inv(int(a[r, c]), p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        if col.any():
            a -= np.outer(col, a[r])
            np.mod(a, p, out=a)
        pivots.append(c)
        r += 1
    return a, pivots, r


def rank(m, p: int = 3) -> int:
    return rref(m, p)[2]


def kernel_basis(m, p: int = 3) -> List[np.ndarray]:
    """Basis of the right kernel ``{x : m x = 0}`` as a list of column vectors."""
    a = as_fp(m, p)
    cols = a.shape[1]
    r, pivots, rk = rref(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-r[i, f]) % p
        basis.append(v)
    return basis


def kernel_matrix(m, p: int = 3) -> np.ndarray:
    """Kernel basis packed as the columns of a ``cols x k`` matrix."""
    a = as_fp(m, p)
    basis = kernel_basis(a, p)
    if not basis:
        return np.zeros((a.shape[1], 0), dtype=np.int64)
    return np.stack(basis, axis=1)


def row_space(m, p: int = 3) -> np.ndarray:
    """Rows of the RREF spanning the row space (zero rows dropped)."""
    r, _, rk = rref(m, p)
    return r[:rk]


def matmul(a, b, p: int = 3) -> np.ndarray:
    """Matrix product mod p.

    Goes through float64 BLAS when the accumulated sums stay exactly
    representable, which is the common case for p = 3.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner and (p - 1) ** 2 * inner < 2**52:
        prod = np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
        return np.mod(prod, p)
    return np.mod(a @ b, p)


def inverse(m, p: int = 3) -> np.ndarray:
    a = as_fp(m, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    aug = np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1)
    r, pivots, rk = rref(aug, p)
    if pivots[:n] != list(range(n)) or rk < n:
        raise ValueError("matrix is singular mod %d" % p)
    return r[:, n:]


def is_invertible(m, p: int = 3) -> bool:
    a = as_fp(m, p)
    return a.shape[0] == a.shape[1] and rank(a, p) == a.shape[0]


def solve(a, b, p: int = 3) -> np.ndarray | None:
    """One solution ``x`` of ``a x = b`` (b a vector or matrix), or None."""
    a = as_fp(a, p)
    b = np.asarray(b, dtype=np.int64)
    vec = b.ndim == 1
    bm = np.mod(b.reshape(-1, 1) if vec else b, p)
    n = a.shape[1]
    aug = np.concatenate([a, bm], axis=1)
    r, pivots, rk = rref(aug, p)
    if any(c >= n for c in pivots):
        return None
    x = np.zeros((n, bm.shape[1]), dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = r[i, n:]
    return x[:, 0] if vec else x


def mat_pow(m, k: int, p: int = 3) -> np.ndarray:
    a = as_fp(m, p)
    result = np.eye(a.shape[0], dtype=np.int64)
    if k < 0:
        a = inverse(a, p)
        k = -k
    while k:
        if k & 1:
            result = matmul(result, a, p)
        a = matmul(a, a, p)
        k >>= 1
    return result


def extend_to_basis(vectors: Sequence[np.ndarray], dim: int, p: int = 3) -> np.ndarray:
    """Columns: an independent subset of ``vectors`` followed by unit vectors.

    The result is an invertible ``dim x dim`` matrix whose leading columns span
    the same space as ``vectors``.
    """
    cols: List[np.ndarray] = []
    cur = np.zeros((0, dim), dtype=np.int64)
    candidates = [np.mod(np.asarray(v, dtype=np.int64), p) for v in vectors]
    candidates += list(np.eye(dim, dtype=np.int64))
    rk = 0
    for v in candidates:
        trial = np.vstack([cur, v])
        if rank(trial, p) > rk:
            cur = trial
            rk += 1
            cols.append(v)
            if rk == dim:
                break
    return np.stack(cols, axis=1) if cols else np.zeros((dim, 0), dtype=np.int64)


# ---------------------------------------------------------------------------
# Integer matrices

class SmithForm(NamedTuple):
    invariants: List[int]
    U: List[List[int]]
    V: List[List[int]]
    D: List[List[int]]


def _identity(n: int) -> List[List[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def int_matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> List[List[int]]:
    if not a:
        return []
    bt = list(zip(*b)) if b else []
    ncols = len(b[0]) if b else 0
    if not bt:
        return [[0] * ncols for _ in a]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def int_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    a = [list(map(int, r)) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(m: Sequence[Sequence[int]]) -> SmithForm:
    """Smith normal form with unimodular transforms, ``U * m * V == D``.

    Pivots are chosen by minimal absolute value; the invariants come out
    nonnegative with ``d_i | d_{i+1}`` (zeros last).
    """
    a = [list(map(int, r)) for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    U = _identity(rows)
    V = _identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        if q:
            ra, rs = a[dst], a[src]
            for k in range(cols):
                ra[k] += q * rs[k]
            ua, us = U[dst], U[src]
            for k in range(rows):
                ua[k] += q * us[k]

    def add_col(dst, src, q):  # col_dst += q * col_src
        if q:
            for r in a:
                r[dst] += q * r[src]
            for r in V:
                r[dst] += q * r[src]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                ri = a[i]
                for j in range(t, cols):
                    if ri[j] and (best is None or abs(ri[j]) < best[0]):
                        best = (abs(ri[j]), i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // piv))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // piv))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            # pivot must divide the whole remaining block
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if t < rows and t < cols and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
    invariants = [a[i][i] for i in range(min(rows, cols))]
    return SmithForm(invariants, U, V, a)


def invariant_factors(m: Sequence[Sequence[int]]) -> List[int]:
    return smith_normal_form(m).invariants
