"""Walk through the four sieve conditions for a single prime.

Run with ``python demos/walk_163.py [ell]`` (default 163).  Uses the
shipped ray class fixtures, so no backend is needed.
"""

import sys

from tetrasieve import bridge
from tetrasieve import selmer as S
from tetrasieve.classgroup import class_group
from tetrasieve.config import DEFAULT_FIXTURES
from tetrasieve.cubic import factorization_profile, period_polynomial, shanks_classify


def main(ell=163):
    L = period_polynomial(ell)
    print("cubic subfield of Q(zeta_%d): %s" % (ell, L.poly))
    print("field discriminant %d, profile at ell %s" % (L.disc_field, factorization_profile(ell, L)))
    print("Shanks form:", shanks_classify(ell))

    cg = class_group(L)
    print("class group invariants %s, h = %d" % (list(cg.invariants), cg.h))
    print("certificate ratio h'R'/hR = %s" % cg.certificate["ratio"])
    if cg.h % 2:
        print("h is odd, so the prime stops here")
        return

    f = bridge.load_fixture(ell, DEFAULT_FIXTURES)
    m, n, ram_ok = bridge.condition3_and_4(f)
    print("3-part of the ray class group: dim %d = 3*%d + %d, ramification ok: %s" % (f.dim, m, n, ram_ok))

    ledger = S.canonical_ledger(ell)
    print(S.ledger_table(ledger))
    print("Selmer balance:", S.wiles_difference(ledger))
    print("verdict:", S.rank_zero_certificate(ledger, m, ram_ok))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 163)
