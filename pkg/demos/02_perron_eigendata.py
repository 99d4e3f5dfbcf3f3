"""Constructive Perron data for a positive map with golden-ratio growth.

The maximal part of a positive map is the Cesaro limit of its normalized
powers.  Applied to the identity it yields a genuine Perron eigenvector, and
for irreducible CP maps it factors as X -> trace(R X) L with a strictly
positive eigenvector L and a strictly positive density matrix R.  Conjugating
by sqrt(L) produces a map whose norm equals its spectral radius.
"""

import numpy as np

from cpspectra import (
    algebra_map,
    conjugate_map,
    maximal_factorization,
    maximal_part,
    perron_vector,
    positive_map_norm,
    psd_sqrt,
    spectral_radius_of,
)
from cpspectra.reference_maps import golden_ratio_map

tau = golden_ratio_map()
phi = algebra_map(tau)
r = spectral_radius_of(phi)
print("block map on M_2 + M_1, spectral radius:", r)
print("golden ratio                           :", (1 + np.sqrt(5)) / 2)
print()

mp = maximal_part(phi)
print("maximal part: degeneracy index =", mp.degeneracy, "| idempotent =", mp.idempotent)
print("projection route vs Cesaro route gap   :", mp.route_gap)
print()

ell = perron_vector(phi)
print("Perron eigenvector L = maximal_part(1):")
print(np.round(ell.real, 10))
print("residual ||tau(L) - r L||:", np.linalg.norm(phi(ell) - r * ell))
print()

fact = maximal_factorization(tau)
print("rank-one factorization  X -> trace(R X) L")
print("density matrix R diagonal:", np.round(np.diag(fact.state).real, 10))
print("trace(R L) =", np.trace(fact.state @ fact.eigenvector).real)
print()

sigma = conjugate_map(phi, psd_sqrt(ell))
print("norm of the sqrt(L)-conjugated map:", positive_map_norm(sigma))
print("... equals the spectral radius: the infimum over scalings is attained")
