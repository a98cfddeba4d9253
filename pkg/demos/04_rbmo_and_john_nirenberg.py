#!/usr/bin/env python3
"""RBMO norms, atomic blocks, and John-Nirenberg superlevel decay.

The regularized BMO norm couples oscillation control on doubling cubes with
mean coherence across nested doubling pairs weighted by K = 1 + delta.  For a
normalized function the superlevel fractions of |f - m_Q f| decay
exponentially in lambda, and so does the mass outside the oscillation-stable
set Z(Q, lambda).
"""
import numpy as np

from czkit import CanonicalFamily, generate_measure, jn_profile, rbmo_norm, z_set
from czkit.spaces import mean

mu = generate_measure("cantor", {"depth": 6})
rng = np.random.default_rng(3)
f = rng.standard_normal(mu.size)
est = rbmo_norm(mu, f)
f = f / est.value
print(f"canonical doubling family: {est.cube_family_size} cubes")
print(f"RBMO norm after normalization: {rbmo_norm(mu, f).value:.6f}")

fam = CanonicalFamily(mu)
Q = max((fam.cube(ci, si) for ci in range(mu.size)
         for si in range(len(fam.sides[ci]))), key=lambda q: q.side)
mask = Q.contains_points(mu.points)
mass_q = float(np.sum(mu.weights[mask]))
mq = mean(mu, f, Q)
top = float(np.max(np.abs(f[mask] - mq)))

print(f"\n{'lambda':>8} | {'JN fraction':>12} | {'1 - mu(Z)/mu(Q)':>16}")
for lam in np.linspace(0.1, 1.0, 7) * top:
    fr = jn_profile(mu, f, Q, [lam])[0][1]
    z = z_set(mu, f, Q, float(lam), fam)
    zfr = 1.0 - float(np.sum(mu.weights[z])) / mass_q
    print(f"{lam:8.4f} | {fr:12.6f} | {zfr:16.6f}")
