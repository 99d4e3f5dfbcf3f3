"""Outer spectral radius and joint spectral radius bounds.

The outer radius of a matrix tuple is the square root of the spectral radius
of the CP map X -> sum A_i* X A_i.  It upper-bounds the joint spectral radius
(the growth rate of the worst product of tuple members), and Kronecker powers
squeeze that bound: with rho_k the outer radius of the k-fold Kronecker-power
tuple,

    d^(-1/2k) * rho_k^(1/k)  <=  jsr  <=  rho_k^(1/k).

This script shows the squeeze on the classic pair of triangular 0/1 matrices
whose joint spectral radius is the golden ratio.
"""

import numpy as np

from cpspectra import jsr_brute, jsr_tensor_approx, outer_radius, outer_radius_gelfand

GOLD = (1 + np.sqrt(5)) / 2

pair = [np.array([[1.0, 1.0], [0.0, 1.0]]), np.array([[1.0, 0.0], [1.0, 1.0]])]

print("pair of matrices with joint spectral radius = golden ratio", GOLD)
print()

rho = outer_radius(pair)
print(f"outer radius                      : {rho:.12f}")
for n in (4, 16, 64):
    print(f"Gelfand estimate at n = {n:3d}       : {outer_radius_gelfand(pair, n):.12f}")
print()

brute = jsr_brute(pair, n_max=12)
print(f"brute-force bounds (words <= 12)  : [{brute.lower:.12f}, {brute.upper:.12f}]")
for k in (1, 2, 3):
    est = jsr_tensor_approx(pair, k)
    print(f"tensor-power bounds at k = {k}      : [{est.lower:.12f}, {est.upper:.12f}]")
print()
print(f"every interval contains the true value {GOLD:.12f}")
