"""Dimensions of generated matrix algebras from Choi ranks.

The span of any Kraus list of a CP map (its coefficient space) is an
invariant of the map, readable from the range of the conjugated Choi matrix.
Summing scaled powers of the map, e.g. the resolvent (1 - b tau)^(-1), yields
CP maps whose coefficient spaces are exactly the unital / non-unital algebras
generated by the original tuple, so algebra dimensions become Choi ranks.
"""

import numpy as np

from cpspectra import (
    AlgebraShape,
    CpMap,
    algebra_basis,
    choi_of_superop,
    exp_eta,
    numerical_rank,
    resolvent_gamma,
)


def unit(i, j):
    e = np.zeros((2, 2), dtype=complex)
    e[i, j] = 1.0
    return e


examples = {
    "shift pair {E12, E21}": [unit(0, 1), unit(1, 0)],
    "single nilpotent {E12}": [unit(0, 1)],
    "commuting diagonal {diag(2,1)}": [np.diag([2.0, 1.0]).astype(complex)],
}

for name, mats in examples.items():
    tau = CpMap(tuple(mats), AlgebraShape.full(2))
    gen0 = algebra_basis(mats, unital=True)
    gen1 = algebra_basis(mats, unital=False)
    g0, g1 = resolvent_gamma(tau)
    e0, e1 = exp_eta(tau, d=1.0)
    print(name)
    print("  unital algebra dimension    :", gen0.dimension,
          "| Choi rank of the resolvent :", numerical_rank(choi_of_superop(g0)),
          "| of the exponential         :", numerical_rank(choi_of_superop(e0)))
    print("  non-unital algebra dimension:", gen1.dimension,
          "| Choi rank with 1 removed   :", numerical_rank(choi_of_superop(g1)),
          "|                            :", numerical_rank(choi_of_superop(e1)))
    print("  stabilized at word length   :", gen0.stabilization_index, "(bound m^2 = 4)")
    print()
