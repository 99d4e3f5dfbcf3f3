"""Irreducibility on a block algebra is not visible in a raw Kraus list.

On the diagonal algebra M_1 + M_1, the map X -> 2 trace(X) 1 is strictly
positive, hence irreducible.  Yet it can be written with two Kraus operators
that share the invariant span of (1, 1) and generate only a 2-dimensional
algebra.  The honest test extends the map canonically to the full matrix
algebra, takes a Kraus list from the extension's Choi matrix, and asks
whether that list generates all of M_m.
"""

import numpy as np

from cpspectra import algebra_basis, canonical_extension, irreducible_cp
from cpspectra.reference_maps import double_trace_map

tau = double_trace_map()
a, b = tau.kraus
print("Kraus pair of the map X -> 2 trace(X) 1 on the diagonal algebra of M_2:")
print("A =\n", a.real, "\nB =\n", b.real)
print()

v = np.array([1.0, 1.0])
print("A (1,1)^T =", (a @ v).real, " B (1,1)^T =", (b @ v).real)
print("-> both images lie in span{(1,1)}: a common invariant subspace")
raw = algebra_basis([a, b], unital=False)
print("algebra generated by the raw pair has dimension", raw.dimension, "(of 4)")
print()

ext = canonical_extension(tau)
print("canonical extension has", len(ext.kraus), "Kraus operators from its Choi matrix")
report = irreducible_cp(tau)
print("generated-algebra dimension of the extension:", report.dimension)
print("irreducible:", report.irreducible)
print("strict-positivity probes passed:", report.strict_probes, "/", report.probes)
