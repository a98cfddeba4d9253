"""The committed deterministic test corpus.

Measures are grouped in tiers by what they can afford: LP-heavy suites run on
the small tier, delta/cover suites on the medium tier, and the growth checks
on the large tier.  The geometric cascade measure is the one family whose
delta range grows linearly in the atom count (each scale ring contributes
unit kernel mass), so it is the instance that exercises several generations
of the decomposition engine at parameters that still satisfy the descent
chain.
"""
from __future__ import annotations

import numpy as np

from .cubes import Cube
from .measure import DiscreteMeasure, generate_measure


def cascade_measure(levels: int, ratio: float = 0.25, dim: int = 1,
                    n: float = 1.0) -> DiscreteMeasure:
    """Atoms at ratio^k on the first axis with weights ratio^(k n), plus the
    origin; every scale ring adds roughly one unit of kernel mass at 0."""
    if not (0 < ratio < 0.5) or levels < 1:
        raise ValueError("need 0 < ratio < 1/2 and levels >= 1")
    pts = np.zeros((levels + 1, dim))
    w = np.empty(levels + 1)
    for k in range(levels):
        pts[k, 0] = ratio ** k
        w[k] = ratio ** (k * n)
    w[levels] = ratio ** ((levels - 1) * n)
    return DiscreteMeasure(dim, n, pts, w)


def two_atom() -> DiscreteMeasure:
    return DiscreteMeasure(1, 1.0, [[0.0], [1.0]], [1.0, 1.0])


def small_measures() -> dict:
    """LP-affordable instances (N <= 32)."""
    return {
        "two_atom": two_atom(),
        "grid1d_8": generate_measure("grid", {"points_per_axis": 8}),
        "grid2d_4": generate_measure("grid", {"points_per_axis": 4, "dim": 2, "n": 2.0}),
        "cantor_d5": generate_measure("cantor", {"depth": 5}),
        "clustered_1d": generate_measure(
            "clustered", {"clusters": 4, "points_per_cluster": 6, "spread": 0.03}, seed=7),
        "clustered_2d": generate_measure(
            "clustered", {"clusters": 3, "points_per_cluster": 5, "spread": 0.04,
                          "dim": 2, "n": 1.5}, seed=11),
    }


def medium_measures() -> dict:
    """Covering / RBMO scale instances (N <= 96)."""
    return {
        "cantor_d6": generate_measure("cantor", {"depth": 6}),
        "grid1d_32": generate_measure("grid", {"points_per_axis": 32}),
        "grid2d_7": generate_measure("grid", {"points_per_axis": 7, "dim": 2, "n": 2.0}),
        "cascade_60": cascade_measure(60),
        "clustered_64": generate_measure(
            "clustered", {"clusters": 8, "points_per_cluster": 8, "spread": 0.02}, seed=3),
    }


def large_measures() -> dict:
    """Size-scaling instances (N up to 256)."""
    return {
        "cantor_d8": generate_measure("cantor", {"depth": 8}),
        "cascade_200": cascade_measure(200),
    }


def mainlemma_measures() -> dict:
    """Instances whose delta range supports nontrivial generations.

    The descent chain forces A of order 60-90 search deviations, so only the
    cascade family (delta range = level count) reaches past the first
    generation under the 256-atom desk-scale cap.
    """
    return {
        "cascade_120": cascade_measure(120),
        "cascade_250": cascade_measure(250),
        "cantor_d6": generate_measure("cantor", {"depth": 6}),
    }


def bounding_cube(mu: DiscreteMeasure, margin: float = 1.0) -> Cube:
    """A support-centered cube, doubling by construction, holding every atom."""
    spans = [float(np.max(mu.chebyshev_dist(mu.points[i]))) for i in range(mu.size)]
    ci = int(np.argmin(spans))
    return Cube(mu.points[ci], 2.0 * margin * max(spans[ci], np.finfo(float).tiny))


def delta_profile_function(mu: DiscreteMeasure, seed: int = 0,
                           ripple: float = 0.05) -> np.ndarray:
    """Mean-zero BMO-type function: the delta grading itself plus a ripple.

    f(x) ~ delta(x, 2 R0) has bounded RBMO norm while its sup norm grows with
    the measure's delta range, which is exactly the regime where the
    decomposition engine must produce nontrivial potentials.
    """
    from .covering import ConcentricSearcher

    R0 = bounding_cube(mu)
    searcher = ConcentricSearcher(mu, R0)
    f = np.array([searcher.point_delta(i) for i in range(mu.size)])
    rng = np.random.default_rng(seed)
    f = f + ripple * rng.standard_normal(mu.size)
    f -= np.sum(f * mu.weights) / np.sum(mu.weights)
    return f


def seeded_function(mu: DiscreteMeasure, seed: int, mean_zero: bool = True,
                    normalized: bool = False) -> np.ndarray:
    """Deterministic rough test function; optionally mean-zero / RBMO-normalized."""
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(mu.size)
    f += 0.5 * np.sign(np.sin(7.0 * np.arange(mu.size)))
    if mean_zero:
        f -= np.sum(f * mu.weights) / np.sum(mu.weights)
    if normalized:
        from .spaces import rbmo_norm
        val = rbmo_norm(mu, f).value
        if val > 0:
            f = f / val
    return f
