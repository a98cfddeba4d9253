import numpy as np
import pytest

from czkit import Cube, Region, besicovich_cover, build_generation, whitney_decompose
from czkit.covering import ConcentricSearcher, pointwise_overlap
from czkit.errors import OmegaIsEverything, ZeroSideCube
from czkit.measure import generate_measure


def test_region_exact_cover():
    # two boxes leaving a pinhole between them
    region = Region([Cube([0.0], 2.0), Cube([2.0], 2.0)])       # [-1,1] u [1,3]
    assert region.covers_cube(Cube([1.0], 3.0))                 # [-0.5, 2.5]
    assert not region.covers_cube(Cube([1.0], 4.5))             # sticks out left
    gap = Region([Cube([0.0], 2.0), Cube([3.0], 2.0)])          # hole (1, 2)
    assert not gap.covers_cube(Cube([1.5], 2.0))
    assert gap.covers_cube(Cube([0.0], 1.0))
    # 2-d: an L of three boxes does not cover the missing quadrant corner
    ell = Region([Cube([0.0, 0.0], 2.0), Cube([2.0, 0.0], 2.0), Cube([0.0, 2.0], 2.0)])
    assert not ell.covers_cube(Cube([1.0, 1.0], 2.0))
    assert ell.covers_cube(Cube([0.5, 0.5], 1.0))


def test_pointwise_overlap_exact():
    cubes = [Cube([0.0], 2.0), Cube([0.5], 2.0), Cube([5.0], 1.0)]
    assert pointwise_overlap(cubes) == 2
    nested = [Cube([0.0, 0.0], s) for s in (1.0, 2.0, 4.0)]
    assert pointwise_overlap(nested) == 3


def test_besicovich_singleton():
    cover = besicovich_cover(np.array([[0.0]]), lambda i: Cube([0.0], 1.0))
    assert len(cover.selected) == 1
    assert len(cover.families) == 1
    assert cover.overlap_achieved == 1


def test_besicovich_three_points_side3():
    pts = np.array([[0.0], [1.0], [2.0]])
    cover = besicovich_cover(pts, lambda i: Cube(pts[i], 3.0))
    # the first cube covers the other centers, so the greedy pass keeps one
    assert len(cover.selected) <= 2
    assert cover.overlap_achieved <= 2
    covered = np.zeros(3, dtype=bool)
    for _, c in cover.selected:
        covered |= c.contains_points(pts)
    assert covered.all()
    # selected centers were uncovered at selection time (greedy invariant)
    for k, (i, c) in enumerate(cover.selected):
        for j, (_, prev) in enumerate(cover.selected[:k]):
            assert not prev.contains_point(pts[i])


def test_besicovich_rejects_zero_side():
    with pytest.raises(ZeroSideCube):
        besicovich_cover(np.array([[0.0]]), lambda i: Cube([0.0], 0.0))


def test_besicovich_families_disjoint():
    rng = np.random.default_rng(8)
    pts = rng.uniform(0, 1, size=(25, 2))
    sides = rng.uniform(0.05, 0.4, size=25)
    cover = besicovich_cover(pts, lambda i: Cube(pts[i], float(sides[i])))
    for fam in cover.families:
        for a in range(len(fam)):
            for b in range(a + 1, len(fam)):
                assert not cover.selected[fam[a]][1].intersects(cover.selected[fam[b]][1])


def test_whitney_interval():
    omega = Region([Cube([0.0], 2.0)])                  # (-1, 1) as a box
    whit = whitney_decompose(omega, Cube([0.0], 4.0), min_level=8)
    assert len(whit.cubes) > 0
    for q in whit.cubes:
        assert omega.covers_cube(Cube(q.center, 20.0 * q.side))
        assert not omega.covers_cube(Cube(q.center, 60.0 * q.side))
    # disjoint interiors
    for i, qi in enumerate(whit.cubes):
        for qj in whit.cubes[i + 1:]:
            if qi.intersects(qj):
                off = float(np.max(np.abs(qi.center - qj.center)))
                assert off >= (qi.side + qj.side) / 2.0 - 1e-12
    assert whit.overlap_bound >= 1


def test_whitney_empty_and_everything():
    assert len(whitney_decompose(Region([]), Cube([0.0], 4.0), 4).cubes) == 0
    with pytest.raises(OmegaIsEverything):
        whitney_decompose(Region([Cube([0.0], 1000.0)]), Cube([0.0], 1.0), 4)


def _bounding(mu):
    spans = [float(np.max(mu.chebyshev_dist(mu.points[i]))) for i in range(mu.size)]
    ci = int(np.argmin(spans))
    return Cube(mu.points[ci], 2.0 * spans[ci])


def test_generation_all_points_when_A_large():
    mu = generate_measure("cantor", {"depth": 5})
    R0 = _bounding(mu)
    searcher = ConcentricSearcher(mu, R0)
    maxd = max(searcher.point_delta(i) for i in range(mu.size))
    gen = build_generation(mu, R0, 1, 2.0 * maxd)
    assert gen.n_volume == 0
    assert len(gen.point_indices) == mu.size


def test_generation_cantor_structure():
    mu = generate_measure("cantor", {"depth": 6})
    R0 = _bounding(mu)
    searcher = ConcentricSearcher(mu, R0)
    maxd = max(searcher.point_delta(i) for i in range(mu.size))
    A = maxd / 3.0
    gen1 = build_generation(mu, R0, 1, A, searcher=searcher)
    assert gen1.n_volume >= 1
    # every deep point is covered by a volume cube
    deep = [i for i in range(mu.size)
            if R0.contains_point(mu.points[i]) and searcher.point_delta(i) > A]
    assert np.all(gen1.covers()[deep])
    # volume cubes are doubling and hit the delta target within eps1
    from czkit import is_doubling
    for pos, Q in enumerate(gen1.volume_cubes):
        assert is_doubling(mu, Q)
        assert abs(gen1.volume_deltas[pos] - A) <= gen1.eps1_achieved + 1e-12
    # weights form a partition on covered points
    cov = gen1.covers()
    sums = gen1.weights.sum(axis=0)
    assert np.allclose(sums[cov], 1.0)
    assert np.allclose(sums[~cov], 0.0)
    # generation 4 at this depth is pure point-cubes
    gen4 = build_generation(mu, R0, 4, A, searcher=searcher)
    assert gen4.n_volume == 0


def test_generation_size_separation():
    mu = generate_measure("cantor", {"depth": 6})
    R0 = _bounding(mu)
    searcher = ConcentricSearcher(mu, R0)
    maxd = max(searcher.point_delta(i) for i in range(mu.size))
    A = maxd / 3.0
    gens = [build_generation(mu, R0, m, A, searcher=searcher) for m in (1, 2)]
    worst = 0.0
    for Q in gens[0].volume_cubes:
        for P in gens[1].volume_cubes:
            if Q.intersects(P):
                worst = max(worst, P.side / Q.side)
    if worst > 0:
        assert worst < 1.0          # strict shrink across generations
