"""Cube algebra, the delta(Q, R) coefficient, and doubling-cube searches.

delta(Q, R) is the symmetrized truncated-kernel mass between two closed
axis-parallel cubes:

    delta(Q, R) = max( sum_{y in Q_R \\ Q} w_y / |y - z_Q|^n ,
                       sum_{y in R_Q \\ R} w_y / |y - z_R|^n ),

where Q_R is the smallest cube concentric with Q containing Q and R.  On a
finitely supported measure both sums are finite, 1 + delta behaves as a
quasi-distance on cubes, and delta is exactly additive along concentric
chains.  Points x in the support are treated as side-0 cubes {x}; the atom at
x itself is always excluded from delta({x}, .), which keeps every value
finite.

Distance conventions: cube membership uses the l-infinity norm, the kernel
uses the Euclidean norm (the measure integrates |x - z|^(-n) over cube-shaped
regions).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, InvalidParams, NotInSupport, NotNested,
                     NotReachable)
from .measure import DiscreteMeasure, mass_cube


@dataclass(frozen=True)
class Cube:
    """Closed axis-parallel cube: center z_Q and side >= 0 (side 0 = point-cube)."""

    center: np.ndarray
    side: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float)).ravel()
        if not np.all(np.isfinite(c)):
            raise InvalidParams("cube center must be finite")
        s = float(self.side)
        if not np.isfinite(s) or s < 0:
            raise InvalidParams(f"cube side must be finite and >= 0, got {self.side}")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "side", s)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def is_point(self) -> bool:
        return self.side == 0.0

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        """Boolean mask of rows of ``pts`` lying in the closed cube."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        dinf = np.max(np.abs(pts - self.center[None, :]), axis=1)
        return dinf <= self.side / 2.0

    def contains_point(self, x) -> bool:
        return bool(self.contains_points(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def contains_cube(self, other: "Cube") -> bool:
        """Closed containment other subset-of self."""
        if other.dim != self.dim:
            raise DimensionMismatch("cube dimensions differ")
        off = float(np.max(np.abs(other.center - self.center)))
        return off + other.side / 2.0 <= self.side / 2.0

    def intersects(self, other: "Cube") -> bool:
        off = float(np.max(np.abs(other.center - self.center)))
        return off <= (self.side + other.side) / 2.0

    def corners(self) -> np.ndarray:
        h = self.side / 2.0
        d = self.dim
        signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * d), indexing="ij")).reshape(d, -1).T
        return self.center[None, :] + h * signs

    def __eq__(self, other):
        if not isinstance(other, Cube):
            return NotImplemented
        return self.side == other.side and np.array_equal(self.center, other.center)

    def __hash__(self):
        return hash((self.center.tobytes(), self.side))

    def __repr__(self):
        c = ",".join(f"{v:g}" for v in self.center)
        return f"Cube([{c}], side={self.side:g})"


def scale(Q: Cube, rho: float) -> Cube:
    """rho*Q: the concentric cube with side rho * l(Q)."""
    if rho <= 0:
        raise InvalidParams("scale factor must be positive")
    return Cube(Q.center, rho * Q.side)


def concentric_hull(Q: Cube, R: Cube) -> Cube:
    """Q_R: the smallest cube concentric with Q containing both Q and R."""
    if Q.dim != R.dim:
        raise DimensionMismatch("cube dimensions differ")
    reach = float(np.max(np.abs(R.center - Q.center))) + R.side / 2.0
    return Cube(Q.center, max(Q.side, 2.0 * reach))


@dataclass(frozen=True)
class DoublingParams:
    """(alpha, beta)-doubling test parameters; default (2, 2^(d+1))."""

    alpha: float = 2.0
    beta: float = 8.0

    def __post_init__(self):
        if self.alpha <= 1:
            raise InvalidParams("alpha must exceed 1")
        if self.beta <= 1:
            raise InvalidParams("beta must exceed 1")

    @classmethod
    def default(cls, dim: int) -> "DoublingParams":
        return cls(2.0, 2.0 ** (dim + 1))

    def check_against(self, growth_exponent: float) -> None:
        """Big doubling cubes exist only when beta > alpha^n."""
        if self.beta <= self.alpha ** growth_exponent:
            raise InvalidParams(
                f"beta={self.beta} must exceed alpha^n={self.alpha ** growth_exponent}")


# -- delta -------------------------------------------------------------------

def _one_sided_delta(mu: DiscreteMeasure, Q: Cube, other: Cube) -> float:
    """sum over supp in Q_other minus Q of w / |y - z_Q|^n."""
    hull = concentric_hull(Q, other)
    mask = hull.contains_points(mu.points) & ~Q.contains_points(mu.points)
    if not np.any(mask):
        return 0.0
    diffs = mu.points[mask] - Q.center[None, :]
    dist = np.sqrt(np.sum(diffs * diffs, axis=1))
    return float(np.sum(mu.weights[mask] / dist ** mu.growth_exponent))


def delta(mu: DiscreteMeasure, Q: Cube, R: Cube) -> float:
    """The symmetric coefficient delta(Q, R); always finite on discrete measures."""
    if Q.dim != R.dim or Q.dim != mu.dim:
        raise DimensionMismatch("cube/measure dimensions differ")
    return max(_one_sided_delta(mu, Q, R), _one_sided_delta(mu, R, Q))


def k_coeff(mu: DiscreteMeasure, Q: Cube, R: Cube) -> float:
    """K_{Q,R} = 1 + delta(Q, R) for nested cubes Q inside R."""
    if not R.contains_cube(Q):
        raise NotNested("k_coeff requires Q to be contained in R")
    return 1.0 + delta(mu, Q, R)


def is_doubling(mu: DiscreteMeasure, Q: Cube, p: DoublingParams | None = None) -> bool:
    """mu(alpha Q) <= beta mu(Q); a point-cube is doubling (alpha Q = Q)."""
    p = p or DoublingParams.default(mu.dim)
    return mass_cube(mu, scale(Q, p.alpha) if Q.side > 0 else Q) <= p.beta * mass_cube(mu, Q)


def smallest_doubling_ancestor(mu: DiscreteMeasure, Q: Cube,
                               p: DoublingParams | None = None) -> Cube:
    """The smallest (alpha, beta)-doubling cube of the form 2^k Q, k >= 0.

    Terminates for every finite measure: once 2^k Q swallows the support the
    doubling inequality is an equality.
    """
    p = p or DoublingParams.default(mu.dim)
    cur = Q
    span = 2.0 * float(np.max(mu.chebyshev_dist(Q.center))) if mu.size else 0.0
    while not is_doubling(mu, cur, p):
        cur = scale(cur, 2.0)
        if cur.side > 4.0 * max(span, Q.side, 1.0) and mass_cube(mu, cur) == mu.total_mass:
            # alpha*cur already holds everything; the test cannot keep failing
            break
    return cur


@dataclass(frozen=True)
class CubeSearchResult:
    """Outcome of a delta-targeted doubling-cube search."""

    cube: Cube
    eps1_achieved: float       # |delta(cube, 2R0) - alpha|
    delta_achieved: float      # delta(cube, 2R0)
    dyadic_steps: int          # k of the seed cube side 2^-k l(R0)
    ancestor_delta: float      # delta(seed, cube): the C3-type penalty paid


def find_cube_at_delta(mu: DiscreteMeasure, x, R0: Cube, alpha: float,
                       p: DoublingParams | None = None) -> CubeSearchResult:
    """Doubling cube centered at x inside 2*R0 with delta(Q, 2R0) close to alpha.

    Procedure: take the largest cube Q1 centered at x with side 2^-k l(R0),
    k >= 1, such that delta(Q1, 2R0) >= alpha, then return the smallest
    doubling ancestor 2^j Q1.  The achieved deviation |delta(Q, 2R0) - alpha|
    is reported rather than assumed; it is bounded by the concentric ancestor
    penalty plus the dyadic overshoot.

    Raises NotReachable when delta({x}, 2R0) <= alpha (the hypothesis of the
    search fails) or when the doubling ancestor escapes 2*R0, which signals
    that alpha sits below the instance's reachable range.
    """
    p = p or DoublingParams.default(mu.dim)
    x = np.asarray(x, dtype=float).ravel()
    if mu.index_of(x) < 0:
        raise NotInSupport("search center must be a support point")
    if not R0.contains_point(x):
        raise NotInSupport("search center must lie in R0")
    if alpha <= 0:
        raise InvalidParams("alpha must be positive")
    ref = scale(R0, 2.0)
    point = Cube(x, 0.0)
    delta_pt = delta(mu, point, ref)
    if delta_pt <= alpha:
        raise NotReachable(f"delta(x, 2R0) = {delta_pt:.6g} <= alpha = {alpha:.6g}")

    # delta(Q_k, 2R0) increases as the concentric seed shrinks and reaches
    # delta({x}, 2R0) once the seed isolates the atom, so the scan terminates.
    dists = mu.chebyshev_dist(x)
    min_gap = float(np.min(dists[dists > 0])) if np.any(dists > 0) else R0.side
    k = 1
    while True:
        seed = Cube(x, R0.side * 2.0 ** (-k))
        dval = delta(mu, seed, ref)
        if dval >= alpha:
            break
        if seed.side < min_gap:
            raise NotReachable("dyadic scan isolated the atom without reaching alpha")
        k += 1

    cube = smallest_doubling_ancestor(mu, seed, p)
    if not ref.contains_cube(cube):
        raise NotReachable(
            f"doubling ancestor (side {cube.side:.6g}) escapes 2R0; alpha too small")
    d_final = delta(mu, cube, ref)
    return CubeSearchResult(cube=cube,
                            eps1_achieved=abs(d_final - alpha),
                            delta_achieved=d_final,
                            dyadic_steps=k,
                            ancestor_delta=delta(mu, seed, cube))


class DeltaCache:
    """Optional memo table for delta values; behaves exactly as if absent."""

    def __init__(self, mu: DiscreteMeasure):
        self.mu = mu
        self._table: dict = {}
        self._lock = threading.Lock()

    @staticmethod
    def _key(Q: Cube, R: Cube):
        a = (Q.center.tobytes(), Q.side)
        b = (R.center.tobytes(), R.side)
        return (a, b) if a <= b else (b, a)

    def delta(self, Q: Cube, R: Cube) -> float:
        key = self._key(Q, R)
        with self._lock:
            hit = self._table.get(key)
        if hit is not None:
            return hit
        val = delta(self.mu, Q, R)
        with self._lock:
            self._table[key] = val
        return val


# -- canonical cube family ---------------------------------------------------

def canonical_sides(mu: DiscreteMeasure, center_index: int,
                    include_halves: bool = True) -> np.ndarray:
    """Sides {2 t} (and t, if requested) over l-inf thresholds t from the center."""
    t = mu.chebyshev_dist(mu.points[center_index])
    t = np.unique(t[t > 0])
    sides = np.concatenate([2.0 * t, t]) if include_halves else 2.0 * t
    return np.unique(sides)


def canonical_family(mu: DiscreteMeasure, p: DoublingParams | None = None,
                     doubling_only: bool = True, include_halves: bool = True):
    """All canonical cubes: support-point centers x threshold sides.

    Returns a list of Cubes, optionally filtered to the (alpha, beta)-doubling
    ones. Masses are step functions of the side, so every distinct cube mass
    over centered cubes is realized inside this family.
    """
    p = p or DoublingParams.default(mu.dim)
    fam = []
    for i in range(mu.size):
        for s in canonical_sides(mu, i, include_halves):
            Q = Cube(mu.points[i], float(s))
            if not doubling_only or is_doubling(mu, Q, p):
                fam.append(Q)
    return fam
