"""Resolvent witnesses and norm-balancing similarities.

Two constructive certificates around the spectral radius of a positive map:

* if r(phi) < s, then w = (id - phi/s)^(-1)(1) satisfies phi(w) = s(w - 1)
  and w >= 1, witnessing the strict bound;
* a matrix admits a similarity with norm equal to its spectral radius exactly
  when its normalized powers stay bounded.  The trace-corner map shows the
  subtlety: its normalized powers are bounded, yet no strictly positive w
  satisfies tau(w) <= r w, so no conjugation achieves the norm.
"""

import numpy as np

from cpspectra import (
    PreconditionError,
    algebra_map,
    balance_similarity,
    neumann_witness,
    norm_achieving_check,
    spectral_radius_of,
)
from cpspectra.reference_maps import trace_corner_map

phi = algebra_map(trace_corner_map())
print("trace-corner map: tau(X) = trace(X) E11 on M_2, spectral radius", spectral_radius_of(phi))
print()

w = neumann_witness(phi, s=2.0)
print("witness of r < 2:  w =", np.round(np.diag(w).real, 12), "(diagonal)")
print("residual of phi(w) = 2(w - 1):", np.linalg.norm(phi(w) - 2.0 * (w - np.eye(2))))
print()

print("attempting a norm-achieving conjugation (must fail):")
for w_try in (np.eye(2), np.diag([3.0, 1.0])):
    try:
        norm_achieving_check(phi, w_try.astype(complex))
    except PreconditionError as exc:
        print("  w =", np.diag(w_try), "->", exc)
print()

print("matrix balancing:")
a = np.array([[1.0, 0, 0], [0, 0.5, 100.0], [0, 0, 0.5]])
result = balance_similarity(a)
print("  interior Jordan block scaled away: ||P A P^-1|| =", result.norm,
      "(radius", result.radius, ")")
try:
    balance_similarity(np.array([[1.0, 1.0], [0.0, 1.0]]))
except PreconditionError as exc:
    print("  peripheral Jordan block rejected:", exc)
