#!/usr/bin/env python3
"""Measures, growth constants, and the delta quasi-distance on cubes.

Walks through the exact finite reductions: growth constants attained on the
pairwise-distance threshold set, and the delta(Q, R) coefficient with its
additivity along concentric chains and its dilation/log bounds.
"""
import numpy as np

from czkit import (Cube, concentric_hull, delta, generate_measure,
                   growth_constant, k_coeff, scale)

mu = generate_measure("cantor", {"depth": 6})
print(f"Cantor measure: {mu.size} atoms, growth exponent n = {mu.growth_exponent:.4f}")

rep = growth_constant(mu)
ci, r = rep.ball_witness
print(f"minimal C0 over closed balls : {rep.ball_constant:.6f}"
      f"  (attained at atom {ci}, r = {r:.3g})")
print(f"minimal C0 over closed cubes : {rep.cube_constant:.6f}")

# delta is exactly additive along concentric chains
x = mu.points[0]
P, Q, R = Cube(x, 0.01), Cube(x, 0.2), Cube(x, 2.5)
lhs = delta(mu, P, R)
rhs = delta(mu, P, Q) + delta(mu, Q, R)
print(f"concentric additivity defect : {abs(lhs - rhs):.3e}")

# dilation bound delta(Q, rho Q) <= C0 2^n rho^n
n = mu.growth_exponent
for rho in (1.5, 2.0, 4.0):
    dv = delta(mu, Q, scale(Q, rho))
    bound = rep.cube_constant * 2 ** n * rho ** n
    print(f"delta(Q, {rho} Q) = {dv:8.4f}   <=   C0 2^n rho^n = {bound:8.4f}")

# K_{Q,R} = 1 + delta for nested cubes, via the concentric hull
H = concentric_hull(P, R)
print(f"hull of (P, R) has side {H.side:.3g};  K_(P,R) = {k_coeff(mu, P, R):.4f}")
