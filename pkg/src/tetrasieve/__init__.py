"""Sieve for even tetrahedral mod-3 Galois representations of prime conductor.

The package is organized bottom-up:

* :mod:`tetrasieve.fplinalg`   exact linear algebra over F_p and Z
* :mod:`tetrasieve.groups`     SL(2, Z/3^n), A4 and tame local data
* :mod:`tetrasieve.modules`    F_3[G]-modules, Ad0 and decomposition
* :mod:`tetrasieve.cohomology` bar resolution, tame and archimedean cohomology
* :mod:`tetrasieve.selmer`     Selmer-condition bookkeeping
* :mod:`tetrasieve.cubic`      Gaussian periods and the cyclic cubic field
* :mod:`tetrasieve.classgroup` class groups of cyclic cubic fields
* :mod:`tetrasieve.bridge`     computer-algebra backend and fixture store
* :mod:`tetrasieve.sieve`      end-to-end sieve, reports and inertia classifier
"""

__version__ = "0.1.0"
