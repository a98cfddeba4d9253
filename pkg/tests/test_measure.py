import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from czkit import Cube, DiscreteMeasure, generate_measure, growth_constant, mass_cube
from czkit.errors import DimensionMismatch, EmptyMeasure, InvalidParams, SchemaError
from czkit.measure import load_measure, measure_from_json, measure_to_json, save_measure

from conftest import brute_mass_cube


def test_invariants_rejected():
    with pytest.raises(InvalidParams):
        DiscreteMeasure(1, 1.0, [[0.0], [0.0]], [1.0, 1.0])     # duplicate points
    with pytest.raises(InvalidParams):
        DiscreteMeasure(1, 1.0, [[0.0]], [0.0])                 # zero weight
    with pytest.raises(InvalidParams):
        DiscreteMeasure(1, 1.5, [[0.0]], [1.0])                 # n > d
    with pytest.raises(EmptyMeasure):
        DiscreteMeasure(1, 1.0, np.zeros((0, 1)), [])


def test_mass_cube_examples(two_atom):
    assert mass_cube(two_atom, Cube([0.0], 1.0)) == 1.0          # [-0.5, 0.5]
    assert mass_cube(two_atom, Cube([0.0], 2.0)) == 2.0          # boundary included
    assert mass_cube(two_atom, Cube([0.5], 0.0)) == 0.0          # point off support
    assert mass_cube(two_atom, Cube([1.0], 0.0)) == 1.0
    with pytest.raises(DimensionMismatch):
        mass_cube(two_atom, Cube([0.0, 0.0], 1.0))


def test_mass_monotone_and_additive(cantor5):
    rng = np.random.default_rng(0)
    for _ in range(40):
        ci = rng.integers(0, cantor5.size)
        s = float(rng.uniform(0.0, 2.0))
        small = mass_cube(cantor5, Cube(cantor5.points[ci], s))
        big = mass_cube(cantor5, Cube(cantor5.points[ci], 2.0 * s))
        assert small <= big
        assert small == brute_mass_cube(cantor5, cantor5.points[ci], s)
    hull = Cube(cantor5.points[0], 4.0)
    assert mass_cube(cantor5, hull) == pytest.approx(cantor5.total_mass)


def test_growth_constant_grid4(grid4):
    # brute-force oracle over all centers and pairwise radii
    best = 0.0
    for i in range(grid4.size):
        for j in range(grid4.size):
            r = abs(float(grid4.points[j, 0] - grid4.points[i, 0]))
            if r == 0:
                continue
            best = max(best, grid4.mass_ball(grid4.points[i], r) / r)
    rep = growth_constant(grid4)
    assert rep.ball_constant == pytest.approx(best)
    assert rep.ball_constant == pytest.approx(3.0)               # center 1, r = 1
    assert not rep.degenerate
    # certificate: every (center, critical radius) pair obeys the constant
    for i in range(grid4.size):
        for j in range(grid4.size):
            r = abs(float(grid4.points[j, 0] - grid4.points[i, 0]))
            if r > 0:
                assert grid4.mass_ball(grid4.points[i], r) <= rep.ball_constant * r + 1e-12


def test_growth_single_atom_degenerate():
    rep = growth_constant(DiscreteMeasure(2, 1.5, [[0.0, 0.0]], [7.0]))
    assert rep.degenerate
    assert rep.ball_constant == 7.0


def test_growth_scaling_homogeneity(cantor5):
    rep1 = growth_constant(cantor5)
    mu3 = DiscreteMeasure(1, cantor5.growth_exponent, cantor5.points,
                          3.0 * cantor5.weights)
    rep3 = growth_constant(mu3)
    assert rep3.ball_constant == pytest.approx(3.0 * rep1.ball_constant)
    assert rep3.cube_constant == pytest.approx(3.0 * rep1.cube_constant)


def test_generator_grid_matches_example(grid4):
    assert np.allclose(grid4.points.ravel(), [0.0, 1.0, 2.0, 3.0])
    assert np.all(grid4.weights == 1.0)


def test_generator_determinism():
    a = generate_measure("clustered", {"clusters": 3, "points_per_cluster": 4}, seed=9)
    b = generate_measure("clustered", {"clusters": 3, "points_per_cluster": 4}, seed=9)
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.weights, b.weights)


def test_generator_cantor_growth_near_analytic():
    mu = generate_measure("cantor", {"depth": 5})
    assert mu.size == 32
    rep = growth_constant(mu)
    # depth-infinity analytic constant for the 1/3 Cantor measure is 2:
    # a closed ball of radius 3^-k about an atom holds at most two depth-k
    # pieces of mass 2^-k each, and r^n = 2^-k at n = log 2 / log 3
    assert rep.ball_constant <= 4 * 2.0
    assert rep.ball_constant >= 2.0 / 4
    with pytest.raises(InvalidParams):
        generate_measure("cantor", {"depth": 5, "ratio": 0.6})


def test_json_round_trip(tmp_path, cantor5):
    path = tmp_path / "m.json"
    save_measure(cantor5, path)
    back = load_measure(path)
    assert np.array_equal(back.points, cantor5.points)
    assert np.array_equal(back.weights, cantor5.weights)
    assert back.growth_exponent == cantor5.growth_exponent


@pytest.mark.parametrize("mutation", [
    lambda obj: obj.update(weights=[-1.0] * len(obj["weights"])),
    lambda obj: obj.update(points=[obj["points"][0]] * len(obj["points"])),
    lambda obj: obj.update(weights=[float("nan")] * len(obj["weights"])),
    lambda obj: obj.pop("dim"),
])
def test_loader_rejects_bad_payload(two_atom, mutation):
    obj = measure_to_json(two_atom)
    mutation(obj)
    with pytest.raises(SchemaError):
        measure_from_json(obj)


@given(scale=st.floats(min_value=0.1, max_value=10.0),
       side=st.floats(min_value=0.0, max_value=8.0))
@settings(max_examples=60, deadline=None)
def test_mass_scaling_property(scale, side):
    mu = DiscreteMeasure(1, 1.0, [[0.0], [1.0], [2.5]], [1.0, 2.0, 0.5])
    m1 = mass_cube(mu, Cube([1.0], side))
    mu_s = DiscreteMeasure(1, 1.0, mu.points * scale, mu.weights)
    m2 = mass_cube(mu_s, Cube([scale], side * scale))
    assert m1 == m2
