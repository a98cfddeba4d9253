#!/usr/bin/env python3
"""Doubling-cube searches at prescribed delta depth and the generation
families that replace dyadic scales on a non-doubling measure.

For each depth target alpha the search returns a doubling cube centered at x
with delta(Q, 2R0) close to alpha; the Besicovich pass then covers every
deep-enough point by finitely overlapping cubes (the m-th generation), with
the leftovers as point-cubes.
"""
import numpy as np

from czkit import build_generation, generate_measure
from czkit.corpus import bounding_cube
from czkit.covering import ConcentricSearcher

mu = generate_measure("cantor", {"depth": 6})
R0 = bounding_cube(mu)
searcher = ConcentricSearcher(mu, R0)

depths = [searcher.point_delta(i) for i in range(mu.size)]
maxd = max(depths)
print(f"delta(x, 2R0) over the support: min {min(depths):.3f}, max {maxd:.3f}")

x = int(np.argmax(depths))
for frac in (0.25, 0.5, 0.75):
    res = searcher.find(x, frac * maxd)
    print(f"target {frac * maxd:7.3f}: cube side {res.cube.side:9.3e}, "
          f"achieved delta {res.delta_achieved:7.3f} "
          f"(deviation {res.eps1_achieved:.3f})")

A = maxd / 3.0
for m in (1, 2, 3, 4):
    gen = build_generation(mu, R0, m, A, searcher=searcher)
    print(f"generation m={m}: {gen.n_volume} volume cubes, "
          f"{len(gen.point_indices)} point-cubes, "
          f"overlap {gen.overlap_achieved}, eps1 {gen.eps1_achieved:.3f}")
