"""Random test data shared by the unit tests and the acceptance suite."""

import numpy as np

from tetrasieve import fplinalg as fl
from tetrasieve import groups as G
from tetrasieve import modules as M

A4 = G.a4_table()
AD0 = M.ad0_a4(A4)
TRIV = M.trivial_module(1, A4)


def random_invertible(rng, n):
    while True:
        b = rng.integers(0, 3, (n, n))
        if fl.is_invertible(b):
            return b


J2 = np.array([[1, 1], [0, 1]])
J3 = np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]])


def tame_block(rng, ell):
    """One indecomposable-ish block (S, T) satisfying S T S^-1 = T^ell."""
    sign = int(rng.choice([1, 2]))
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return np.array([[sign]]), np.array([[1]])
    if kind == 1:
        return np.array([[sign]]), np.array([[2]])
    if kind == 2:
        k = int(rng.integers(0, 3))
        if ell % 3 == 1:
            s = fl.mat_pow(J2, k)
        else:
            s = fl.matmul(np.diag([1, 2]), fl.mat_pow(J2, k))
        return np.mod(sign * s, 3), J2
    if ell % 3 == 1:
        return np.mod(sign * fl.mat_pow(J3, int(rng.integers(0, 3))), 3), J3
    return np.array([[sign]]), np.array([[1]])


def random_tame_module(rng):
    """Random tame data (ell, module on (S, T)) in a random basis."""
    ell = int(rng.choice([5, 7, 11, 13, 17, 19, 31, 37, 43, 61, 163, 277]))
    blocks = [tame_block(rng, ell) for _ in range(int(rng.integers(1, 4)))]
    d = sum(b[0].shape[0] for b in blocks)
    s = np.zeros((d, d), dtype=np.int64)
    t = np.zeros((d, d), dtype=np.int64)
    o = 0
    for bs, bt in blocks:
        k = bs.shape[0]
        s[o:o + k, o:o + k] = bs
        t[o:o + k, o:o + k] = bt
        o += k
    while True:
        b = rng.integers(0, 3, (d, d))
        if fl.is_invertible(b):
            break
    bi = fl.inverse(b)
    conj = lambda x: fl.matmul(fl.matmul(b, x), bi)
    return ell, M.GModule([conj(s), conj(t)])


def random_a4_module(rng):
    cat = M.a4_catalog(A4)
    blocks, dim = [], 0
    while True:
        choice = int(rng.integers(0, len(cat) + 1))
        if choice == len(cat):
            z = M.extension_cocycles(AD0, 1)
            c = fl.matmul(z, rng.integers(0, 3, (z.shape[1], 1)))
            blk = M.extension_module(AD0, 1, c)
        else:
            blk = cat[choice]
        if dim + blk.dim > 9:
            break
        blocks.append(blk)
        dim += blk.dim
        if rng.random() < 0.3:
            break
    if not blocks:
        blocks = [TRIV]
    v = M.direct_sum(*blocks)
    return v.change_basis(random_invertible(rng, v.dim)), blocks
