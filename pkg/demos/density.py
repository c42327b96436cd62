"""Print the running count of sieve members against the bound.

Run with ``python demos/density.py [max]`` (default 2000).  Takes about
two minutes at the default bound because every class group is computed
from scratch.
"""

import sys

from tetrasieve.sieve import lambda_set, run_sieve


def main(max_value=2000):
    reports = run_sieve(max_value)
    members = lambda_set(reports)
    passed12 = [r.ell for r in reports if r.cond1 and r.cond2]
    print("candidates %d, with even class number %d, members %d"
          % (len(reports), len(passed12), len(members)))
    step = max(max_value // 10, 1)
    for x in range(step, max_value + 1, step):
        print("%6d  %3d" % (x, sum(1 for e in members if e <= x)))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 2000)
