"""Coverings on finite point sets: Besicovich selection, Whitney decomposition
of a box-union region, and the delta-graded generation families D_m.

A Region here is a finite union of closed axis-parallel boxes.  All the set
predicates a covering needs (cube inside the union, cube meeting the
complement) are decided exactly by splitting the query cube along the box
edge coordinates and testing one interior point per elementary cell; no
sampling error is involved.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cubes import Cube, CubeSearchResult, DoublingParams, delta, scale
from .errors import (DimensionMismatch, InvalidParams, NotInSupport, NotReachable,
                     OmegaIsEverything, PropertyViolated, ZeroSideCube)
from .measure import DiscreteMeasure


# -- exact box-union geometry -------------------------------------------------

class Region:
    """Finite union of closed boxes (cubes); the empty union is allowed."""

    def __init__(self, boxes: list[Cube]):
        self.boxes = list(boxes)
        if self.boxes:
            d = self.boxes[0].dim
            if any(b.dim != d for b in self.boxes):
                raise DimensionMismatch("all region boxes must share a dimension")

    def __bool__(self):
        return bool(self.boxes)

    @property
    def dim(self):
        return self.boxes[0].dim if self.boxes else 0

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        mask = np.zeros(len(pts), dtype=bool)
        for b in self.boxes:
            mask |= b.contains_points(pts)
        return mask

    def contains_point(self, x) -> bool:
        return bool(self.contains_points(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def covers_cube(self, Q: Cube) -> bool:
        """Exact test: closed cube Q inside the closed union."""
        if not self.boxes:
            return False
        if Q.is_point:
            return self.contains_point(Q.center)
        lo = Q.center - Q.side / 2.0
        hi = Q.center + Q.side / 2.0
        cuts = []
        for ax in range(Q.dim):
            c = {lo[ax], hi[ax]}
            for b in self.boxes:
                for edge in (b.center[ax] - b.side / 2.0, b.center[ax] + b.side / 2.0):
                    if lo[ax] < edge < hi[ax]:
                        c.add(edge)
            cuts.append(np.array(sorted(c)))
        mids = [0.5 * (c[:-1] + c[1:]) for c in cuts]
        grids = np.meshgrid(*mids, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        return bool(np.all(self.contains_points(pts)))

    def meets_complement(self, Q: Cube) -> bool:
        return not self.covers_cube(Q)


def pointwise_overlap(cubes: list[Cube]) -> int:
    """Exact maximum number of closed cubes sharing a point.

    The count, as a function of the point, is maximized on the grid of box
    edge coordinates, since every superlevel set of the count is a finite
    union of closed boxes whose corners live on that grid.
    """
    if not cubes:
        return 0
    d = cubes[0].dim
    axes = []
    for ax in range(d):
        vals = set()
        for b in cubes:
            vals.add(b.center[ax] - b.side / 2.0)
            vals.add(b.center[ax] + b.side / 2.0)
        axes.append(np.array(sorted(vals)))
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    counts = np.zeros(len(pts), dtype=int)
    for b in cubes:
        counts += b.contains_points(pts)
    return int(np.max(counts))


# -- Besicovich ----------------------------------------------------------------

@dataclass
class BesicovichCover:
    """Greedy Besicovich cover: selected centered cubes, colored into disjoint
    subfamilies, with the exact achieved overlap recorded."""

    selected: list            # (point index, Cube)
    families: list            # list of lists of selection indices
    overlap_achieved: int

    @property
    def cubes(self) -> list:
        return [c for _, c in self.selected]


def besicovich_cover(centers: np.ndarray, cube_of: Callable[[int], Cube]) -> BesicovichCover:
    """Greedy cover of ``centers`` by the centered cubes ``cube_of(i)``.

    Cubes are visited in decreasing side order (ties by index) and selected
    exactly when their center is not yet covered; the intersection graph of
    the selection is then greedily colored.  Every input center ends up
    covered and cubes within one color class are pairwise disjoint.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    m = len(centers)
    cubes = [cube_of(i) for i in range(m)]
    for i, c in enumerate(cubes):
        if c.side <= 0:
            raise ZeroSideCube(f"cube {i} has side {c.side}")
        if not np.all(c.center == centers[i]):
            raise InvalidParams(f"cube {i} is not centered at its point")
    order = sorted(range(m), key=lambda i: (-cubes[i].side, i))
    selected: list[tuple[int, Cube]] = []
    for i in order:
        covered = any(c.contains_point(centers[i]) for _, c in selected)
        if not covered:
            selected.append((i, cubes[i]))

    # greedy coloring in selection order
    colors: list[int] = []
    for k, (_, ck) in enumerate(selected):
        used = {colors[j] for j in range(k) if selected[j][1].intersects(ck)}
        col = 0
        while col in used:
            col += 1
        colors.append(col)
    ncol = (max(colors) + 1) if colors else 0
    families = [[k for k, c in enumerate(colors) if c == p] for p in range(ncol)]
    overlap = pointwise_overlap([c for _, c in selected])
    return BesicovichCover(selected=selected, families=families, overlap_achieved=overlap)


# -- concentric delta profiles ---------------------------------------------------

class ConcentricSearcher:
    """Per-center prefix tables for cubes concentric at a support point,
    relative to the fixed reference cube 2*R0.

    For a center y in R0 and side s <= l(R0), the hull of (Q_s, 2R0) is the
    fixed cube of reach max_corner |corner - y|_inf, so

        delta(Q_s, 2R0) = K(reach) - K(s/2),

    where K is the cumulative kernel mass w/|y' - y|_2^n in l-inf distance
    order.  Every delta evaluation, mass, doubling test, and dyadic search
    becomes a pair of binary searches; results agree exactly with the direct
    formulas in ``czkit.cubes``.
    """

    def __init__(self, mu: DiscreteMeasure, R0: Cube, p: DoublingParams | None = None):
        self.mu = mu
        self.R0 = R0
        self.ref = scale(R0, 2.0)
        self.params = p or DoublingParams.default(mu.dim)
        self._prof: dict[int, tuple] = {}

    def _profile(self, ci: int):
        hit = self._prof.get(ci)
        if hit is not None:
            return hit
        mu = self.mu
        c = mu.points[ci]
        dinf = mu.chebyshev_dist(c)
        order = np.argsort(dinf, kind="stable")
        ds = dinf[order]
        de = np.sqrt(np.sum((mu.points[order] - c[None, :]) ** 2, axis=1))
        kern = np.where(ds > 0, mu.weights[order] /
                        np.where(de > 0, de, 1.0) ** mu.growth_exponent, 0.0)
        reach = float(np.max(np.abs(self.ref.center - c))) + self.ref.side / 2.0
        prof = (ds, np.cumsum(mu.weights[order]), np.cumsum(kern), reach)
        self._prof[ci] = prof
        return prof

    def _kernel_below(self, ci: int, radius: float) -> float:
        ds, _, kcum, _ = self._profile(ci)
        k = int(np.searchsorted(ds, radius, side="right")) - 1
        return float(kcum[k]) if k >= 0 else 0.0

    def mass_side(self, ci: int, s: float) -> float:
        ds, wcum, _, _ = self._profile(ci)
        k = int(np.searchsorted(ds, s / 2.0, side="right")) - 1
        return float(wcum[k]) if k >= 0 else 0.0

    def point_delta(self, ci: int) -> float:
        _, _, _, reach = self._profile(ci)
        return self._kernel_below(ci, reach)

    def delta_side(self, ci: int, s: float) -> float:
        """delta(Cube(y_ci, s), 2R0); valid for cubes inside the hull regime."""
        _, _, _, reach = self._profile(ci)
        if s > 2.0 * reach:
            return delta(self.mu, Cube(self.mu.points[ci], s), self.ref)
        return self._kernel_below(ci, reach) - self._kernel_below(ci, s / 2.0)

    def is_doubling_side(self, ci: int, s: float) -> bool:
        if s == 0.0:
            return True
        return self.mass_side(ci, self.params.alpha * s) <= \
            self.params.beta * self.mass_side(ci, s)

    def contains_in_ref(self, ci: int, s: float) -> bool:
        off = float(np.max(np.abs(self.mu.points[ci] - self.ref.center)))
        return off + s / 2.0 <= self.ref.side / 2.0

    def find(self, ci: int, alpha: float) -> CubeSearchResult:
        """Same contract as cubes.find_cube_at_delta, via the prefix tables."""
        if alpha <= 0:
            raise InvalidParams("alpha must be positive")
        if not self.R0.contains_point(self.mu.points[ci]):
            raise NotInSupport("search center must lie in R0")
        dpt = self.point_delta(ci)
        if dpt <= alpha:
            raise NotReachable(f"delta(x, 2R0) = {dpt:.6g} <= alpha = {alpha:.6g}")
        ds, _, _, _ = self._profile(ci)
        pos = ds[ds > 0]
        min_gap = float(np.min(pos)) if len(pos) else self.R0.side
        k = 1
        while True:
            s = self.R0.side * 2.0 ** (-k)
            dval = self.delta_side(ci, s)
            if dval >= alpha:
                break
            if s < min_gap:
                raise NotReachable("dyadic scan isolated the atom without reaching alpha")
            k += 1
        seed_side = s
        while not self.is_doubling_side(ci, s):
            s *= 2.0
        if not self.contains_in_ref(ci, s):
            raise NotReachable(
                f"doubling ancestor (side {s:.6g}) escapes 2R0; alpha too small")
        d_final = self.delta_side(ci, s)
        return CubeSearchResult(cube=Cube(self.mu.points[ci], s),
                                eps1_achieved=abs(d_final - alpha),
                                delta_achieved=d_final,
                                dyadic_steps=k,
                                ancestor_delta=self.delta_side(ci, seed_side) - d_final)


# -- generations ---------------------------------------------------------------

@dataclass
class Generation:
    """The family D_m = D'_m (volume cubes) + D''_m (residual point-cubes).

    Volume cubes are doubling cubes centered at support points y_i with
    delta(y_i, 2R0) > m*A, each hitting the target |delta(Q, 2R0) - m*A|
    within the recorded eps1; the greedy Besicovich subfamily covers every
    such support point.  Point-cubes are the support points of R0 with
    delta <= m*A left uncovered.
    """

    m: int
    R0: Cube
    A: float
    volume_indices: np.ndarray        # support indices y_i of the volume cubes
    volume_cubes: list                # Cube per volume index
    volume_deltas: np.ndarray         # delta(Q_i, 2R0)
    point_indices: np.ndarray         # support indices of D''_m
    families: list                    # Besicovich coloring (lists of volume positions)
    eps1_achieved: float
    overlap_achieved: int
    membership: np.ndarray = field(repr=False)   # (n_volume, N) bool, closed membership
    weights: np.ndarray = field(repr=False)      # (n_volume, N) float, w_{i,m} at atoms
    point_deltas: dict = field(default_factory=dict, repr=False)
    _points: np.ndarray = field(default=None, repr=False)

    @property
    def n_volume(self) -> int:
        return len(self.volume_cubes)

    def covers(self) -> np.ndarray:
        """Mask of support points lying in some volume cube."""
        if self.n_volume == 0:
            return np.zeros(self.membership.shape[1], dtype=bool)
        return np.any(self.membership, axis=0)

    def weight_of_point(self, support_index: int) -> float:
        """w for the point-cube at a D''_m member (chi of the singleton)."""
        return 1.0 if support_index in set(self.point_indices.tolist()) else 0.0

    def to_json(self) -> list:
        out = []
        for pos, i in enumerate(self.volume_indices):
            c = self.volume_cubes[pos]
            out.append({"center": [float(v) for v in c.center], "side": c.side,
                        "kind": "volume", "delta_to_2R0": float(self.volume_deltas[pos])})
        for i in self.point_indices:
            out.append({"center": [float(v) for v in np.atleast_1d(np.asarray(
                self._points[i]))], "side": 0.0, "kind": "point",
                "delta_to_2R0": float(self.point_deltas.get(int(i), np.nan))})
        return out


def build_generation(mu: DiscreteMeasure, R0: Cube, m: int, A: float,
                     p: DoublingParams | None = None,
                     searcher: ConcentricSearcher | None = None) -> Generation:
    """Build D_m for the ambient doubling cube R0 and depth step A.

    For every support point x in R0 with delta(x, 2R0) > m*A a doubling cube
    at delta-target m*A is found; the greedy Besicovich pass selects the
    volume subfamily.  Points with delta <= m*A that stay uncovered become
    the point-cubes.  A NotReachable search among the mandatory points means
    A is too small for this instance and raises PropertyViolated.
    """
    if A <= 0 or m < 1:
        raise InvalidParams("need A > 0 and m >= 1")
    p = p or DoublingParams.default(mu.dim)
    searcher = searcher or ConcentricSearcher(mu, R0, p)
    inside = R0.contains_points(mu.points)
    idx_inside = np.nonzero(inside)[0]
    pt_deltas = {int(i): searcher.point_delta(int(i)) for i in idx_inside}
    target = m * A
    need = [i for i in idx_inside if pt_deltas[int(i)] > target]

    results: dict[int, CubeSearchResult] = {}
    for i in need:
        try:
            results[int(i)] = searcher.find(int(i), target)
        except NotReachable as exc:
            raise PropertyViolated("generation", f"m={m}",
                                   f"search failed at support index {i}: {exc}") from exc

    if need:
        cover = besicovich_cover(mu.points[np.array(need)],
                                 lambda j: results[int(need[j])].cube)
        vol_pos = [need[i] for i, _ in cover.selected]
        vol_cubes = [c for _, c in cover.selected]
        families = cover.families
        overlap = cover.overlap_achieved
    else:
        vol_pos, vol_cubes, families, overlap = [], [], [], 0

    membership = np.zeros((len(vol_cubes), mu.size), dtype=bool)
    for r, c in enumerate(vol_cubes):
        membership[r] = c.contains_points(mu.points)
    counts = membership.sum(axis=0)
    weights = np.zeros_like(membership, dtype=float)
    covered = counts > 0
    if len(vol_cubes):
        weights[:, covered] = membership[:, covered] / counts[covered]

    covered_inside = covered[idx_inside] if len(vol_cubes) else np.zeros(len(idx_inside), bool)
    pt_idx = np.array([i for j, i in enumerate(idx_inside)
                       if pt_deltas[int(i)] <= target and not covered_inside[j]], dtype=int)

    vol_deltas = np.array([results[int(i)].delta_achieved for i in vol_pos])
    eps1 = max((results[int(i)].eps1_achieved for i in need), default=0.0)
    gen = Generation(m=m, R0=R0, A=A,
                     volume_indices=np.array(vol_pos, dtype=int),
                     volume_cubes=vol_cubes,
                     volume_deltas=vol_deltas,
                     point_indices=pt_idx,
                     families=families,
                     eps1_achieved=float(eps1),
                     overlap_achieved=overlap,
                     membership=membership,
                     weights=weights,
                     point_deltas=pt_deltas)
    gen._points = mu.points
    return gen


# -- Whitney -------------------------------------------------------------------

WHITNEY_BETA = 60.0


@dataclass
class WhitneyDecomposition:
    """Maximal dyadic cubes Q_i with 20Q_i inside Omega and 60Q_i meeting its
    complement; disjoint interiors by construction."""

    cubes: list
    beta: float
    overlap_bound: int        # D: max count of 10Q_i met by one 10Q_k

    def __len__(self):
        return len(self.cubes)


def whitney_decompose(omega: Region, bounding: Cube, min_level: int,
                      focus_points: np.ndarray | None = None) -> WhitneyDecomposition:
    """Dyadic Whitney selection inside ``bounding`` down to ``min_level`` splits.

    Selects the maximal dyadic cubes Q with 20Q inside Omega; maximality makes
    60Q meet the complement (the parent's 20-fold dilation sticks out and is
    contained in 60Q).  Raises OmegaIsEverything when even the 60-fold
    dilation of the bounding cube lies inside Omega.

    With ``focus_points`` the recursion visits only branches whose 3/2-dilate
    can still reach one of the points, which returns the subfamily relevant to
    a finite support (all Whitney invariants are inherited by subfamilies).
    """
    if min_level < 0:
        raise InvalidParams("min_level must be >= 0")
    if not omega:
        return WhitneyDecomposition([], WHITNEY_BETA, 0)
    if omega.covers_cube(scale(bounding, WHITNEY_BETA)):
        raise OmegaIsEverything("Omega covers the 60-fold bounding cube")
    focus = None if focus_points is None else np.atleast_2d(np.asarray(focus_points,
                                                                       dtype=float))
    selected: list[Cube] = []
    d = bounding.dim
    signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * d), indexing="ij")).reshape(d, -1).T
    stack = [(bounding, 0)]
    while stack:
        q, level = stack.pop()
        if focus is not None and not np.any(scale(q, 1.5).contains_points(focus)):
            continue
        if omega.covers_cube(scale(q, 20.0)):
            selected.append(q)
            continue
        if level >= min_level:
            continue
        h = q.side / 4.0
        for s in signs:
            child = Cube(q.center + h * s, q.side / 2.0)
            if any(b.intersects(child) for b in omega.boxes):
                stack.append((child, level + 1))
    tens = [scale(q, 10.0) for q in selected]
    dmax = 0
    for k, tk in enumerate(tens):
        dmax = max(dmax, sum(1 for ti in tens if tk.intersects(ti)))
    return WhitneyDecomposition(selected, WHITNEY_BETA, dmax)
