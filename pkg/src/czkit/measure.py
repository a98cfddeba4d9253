"""Finitely supported measures on R^d with a power growth exponent.

A DiscreteMeasure is a weighted point cloud: atoms ``points[i]`` carrying mass
``weights[i] > 0``, together with the exponent ``n`` of the intended growth
bound  mu(B(x, r)) <= C0 * r^n.  Because masses of balls and cubes are step
functions of the radius/side, every supremum over scales is attained on the
finite set of pairwise-distance thresholds; ``growth_constant`` exploits this
to report the exact minimal C0 for closed balls and closed cubes.

Conventions (fixed once for the whole package):
  * balls are closed Euclidean balls, cubes are closed l-infinity balls;
  * membership ties on a boundary are resolved inclusively;
  * a single-atom measure has no positive critical radius, so its growth
    report carries ``degenerate=True`` and uses the reference scale r = 1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyMeasure, InvalidParams, SchemaError


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted point cloud in R^d.

    Parameters
    ----------
    dim : int
        Ambient dimension d >= 1.
    growth_exponent : float
        The exponent n with 0 < n <= d used by every kernel |x-y|^(-n).
    points : (N, d) float array
        Pairwise distinct support points.
    weights : (N,) float array
        Strictly positive atom masses.
    """

    dim: int
    growth_exponent: float
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        w = np.asarray(self.weights, dtype=float).ravel()
        if self.dim < 1 or int(self.dim) != self.dim:
            raise InvalidParams(f"dim must be a positive integer, got {self.dim}")
        if not (0.0 < self.growth_exponent <= self.dim):
            raise InvalidParams(
                f"growth exponent must lie in (0, d], got {self.growth_exponent}")
        if pts.size == 0:
            raise EmptyMeasure("measure needs at least one atom")
        if pts.shape[1] != self.dim:
            raise DimensionMismatch(f"points are {pts.shape[1]}-dim, measure is {self.dim}-dim")
        if len(w) != len(pts):
            raise InvalidParams("points and weights must have equal length")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(w)):
            raise InvalidParams("points and weights must be finite")
        if np.any(w <= 0):
            raise InvalidParams("weights must be strictly positive")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise InvalidParams("support points must be pairwise distinct")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    # -- basic queries -------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def index_of(self, x) -> int:
        """Index of the atom exactly at x, or -1."""
        x = np.asarray(x, dtype=float).ravel()
        hits = np.nonzero(np.all(self.points == x[None, :], axis=1))[0]
        return int(hits[0]) if len(hits) else -1

    def mass_ball(self, center, radius: float) -> float:
        """mu of the closed Euclidean ball B(center, radius)."""
        c = np.asarray(center, dtype=float).ravel()
        d2 = np.sum((self.points - c[None, :]) ** 2, axis=1)
        return float(np.sum(self.weights[d2 <= radius * radius]))

    def chebyshev_dist(self, center) -> np.ndarray:
        """l-infinity distances from every atom to ``center``."""
        c = np.asarray(center, dtype=float).ravel()
        return np.max(np.abs(self.points - c[None, :]), axis=1)


def mass_cube(mu: DiscreteMeasure, cube) -> float:
    """mu(Q) for a closed axis-parallel cube; a side-0 cube is the point {z_Q}."""
    if cube.dim != mu.dim:
        raise DimensionMismatch(f"cube is {cube.dim}-dim, measure is {mu.dim}-dim")
    return float(np.sum(mu.weights[cube.contains_points(mu.points)]))


@dataclass(frozen=True)
class GrowthReport:
    """Exact minimal growth constants over the critical-threshold set."""

    ball_constant: float
    cube_constant: float
    ball_witness: tuple            # (center index, radius)
    cube_witness: tuple            # (center index, side)
    degenerate: bool = False
    tolerance: float = 0.0         # slack of the empirical exponent fit, generators only


def growth_constant(mu: DiscreteMeasure) -> GrowthReport:
    """Minimal C0 with mu(B(x,r)) <= C0 r^n over closed balls, and the cube analogue.

    The supremum over r > 0 is attained on the pairwise-distance set because
    masses are right-continuous step functions of r while r^n increases, so
    only the jump radii matter.  Radius 0 is excluded; a single-atom measure
    is reported as degenerate with the convention C0 = weight at r = 1.
    """
    n = mu.growth_exponent
    if mu.size == 1:
        w = float(mu.weights[0])
        return GrowthReport(w, w, (0, 1.0), (0, 1.0), degenerate=True)

    best_ball, ball_wit = 0.0, (0, 0.0)
    best_cube, cube_wit = 0.0, (0, 0.0)
    for i in range(mu.size):
        x = mu.points[i]
        d2 = np.sqrt(np.sum((mu.points - x[None, :]) ** 2, axis=1))
        dinf = np.max(np.abs(mu.points - x[None, :]), axis=1) if mu.dim > 1 else d2
        order = np.argsort(d2, kind="stable")
        csum = np.cumsum(mu.weights[order])
        radii = d2[order]
        pos = radii > 0
        if np.any(pos):
            # closed ball of radius r captures every atom with distance <= r;
            # equal radii: take the last occurrence's cumulative mass
            for r in np.unique(radii[pos]):
                m = csum[np.searchsorted(radii, r, side="right") - 1]
                val = m / r ** n
                if val > best_ball:
                    best_ball, ball_wit = float(val), (i, float(r))
        order_inf = np.argsort(dinf, kind="stable")
        csum_inf = np.cumsum(mu.weights[order_inf])
        tinf = dinf[order_inf]
        for t in np.unique(tinf[tinf > 0]):
            s = 2.0 * t                     # cube of side s centered at x reaches l-inf distance s/2
            m = csum_inf[np.searchsorted(tinf, t, side="right") - 1]
            val = m / s ** n
            if val > best_cube:
                best_cube, cube_wit = float(val), (i, float(s))
    return GrowthReport(best_ball, best_cube, ball_wit, cube_wit)


# -- generators --------------------------------------------------------------

def generate_measure(kind: str, params: dict | None = None, seed: int = 0) -> DiscreteMeasure:
    """Deterministic test-corpus generators.

    kind = 'grid'      params: points_per_axis (int), dim (default 1),
                       spacing (default 1.0), n (default dim).
    kind = 'cantor'    params: depth, ratio (default 1/3) or target exponent n
                       (then ratio = 2**(-1/n)), dim must be 1.
    kind = 'clustered' params: clusters, points_per_cluster, spread (ratio of
                       cluster radius to the unit box), dim (default 1),
                       n (default dim).
    """
    params = dict(params or {})
    if kind == "grid":
        d = int(params.get("dim", 1))
        k = int(params.get("points_per_axis", 4))
        spacing = float(params.get("spacing", 1.0))
        if k < 1 or d < 1 or spacing <= 0:
            raise InvalidParams("grid needs points_per_axis >= 1, dim >= 1, spacing > 0")
        axes = [np.arange(k, dtype=float) * spacing for _ in range(d)]
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        n = float(params.get("n", d))
        return DiscreteMeasure(d, n, pts, np.ones(len(pts)))

    if kind == "cantor":
        depth = int(params.get("depth", 5))
        if depth < 1:
            raise InvalidParams("cantor depth must be >= 1")
        if "n" in params and "ratio" not in params:
            n = float(params["n"])
            ratio = 2.0 ** (-1.0 / n)
        else:
            ratio = float(params.get("ratio", 1.0 / 3.0))
            n = np.log(2.0) / np.log(1.0 / ratio)
        if not (0 < ratio < 0.5):
            raise InvalidParams("cantor ratio must lie in (0, 1/2)")
        d = int(params.get("dim", 1))
        if d != 1:
            raise InvalidParams("cantor generator is 1-dimensional")
        # left endpoints of the depth-L intervals of the two-map IFS
        pts = np.zeros(1)
        for lvl in range(depth):
            off = (1.0 - ratio) * ratio ** lvl
            pts = np.concatenate([pts, pts + off])
        pts = np.sort(pts)
        w = np.full(len(pts), 2.0 ** float(-depth))
        return DiscreteMeasure(1, float(n), pts.reshape(-1, 1), w)

    if kind == "clustered":
        d = int(params.get("dim", 1))
        k = int(params.get("clusters", 3))
        m = int(params.get("points_per_cluster", 5))
        spread = float(params.get("spread", 0.02))
        if k < 1 or m < 1 or not (0 < spread < 0.5) or d < 1:
            raise InvalidParams("clustered needs clusters >= 1, points >= 1, 0 < spread < 1/2")
        rng = np.random.default_rng(seed)
        centers = rng.uniform(0.0, 1.0, size=(k, d))
        pts = (centers[:, None, :] + rng.uniform(-spread, spread, size=(k, m, d))).reshape(-1, d)
        w = rng.uniform(0.5, 1.5, size=len(pts))
        # seeded draws collide with probability 0; fail loudly rather than dedupe
        if len(np.unique(pts, axis=0)) != len(pts):
            raise InvalidParams("clustered generator produced duplicate points; change seed")
        n = float(params.get("n", d))
        return DiscreteMeasure(d, n, pts, w)

    raise InvalidParams(f"unknown generator kind {kind!r}")


# -- JSON round trip ---------------------------------------------------------

def measure_to_json(mu: DiscreteMeasure) -> dict:
    return {
        "dim": mu.dim,
        "n": mu.growth_exponent,
        "points": [[float(v) for v in p] for p in mu.points],
        "weights": [float(w) for w in mu.weights],
    }


def measure_from_json(obj: dict) -> DiscreteMeasure:
    try:
        dim = int(obj["dim"])
        n = float(obj["n"])
        pts = np.asarray(obj["points"], dtype=float)
        w = np.asarray(obj["weights"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed measure payload: {exc}") from exc
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(w)):
        raise SchemaError("measure file contains NaN or Inf")
    if np.any(w <= 0):
        raise SchemaError("measure file contains nonpositive weights")
    if len(pts) and len(np.unique(pts, axis=0)) != len(pts):
        raise SchemaError("measure file contains duplicate points")
    try:
        return DiscreteMeasure(dim, n, pts, w)
    except (InvalidParams, EmptyMeasure, DimensionMismatch) as exc:
        raise SchemaError(str(exc)) from exc


def save_measure(mu: DiscreteMeasure, path) -> None:
    with open(path, "w") as fh:
        json.dump(measure_to_json(mu), fh, indent=1)
        fh.write("\n")


def load_measure(path) -> DiscreteMeasure:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return measure_from_json(obj)
