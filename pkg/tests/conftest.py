import numpy as np
import pytest

from czkit import Cube, DiscreteMeasure
from czkit.measure import generate_measure


@pytest.fixture
def two_atom():
    return DiscreteMeasure(1, 1.0, [[0.0], [1.0]], [1.0, 1.0])


@pytest.fixture
def grid4():
    return generate_measure("grid", {"points_per_axis": 4})


@pytest.fixture
def cantor5():
    return generate_measure("cantor", {"depth": 5})


@pytest.fixture
def grid2d():
    return generate_measure("grid", {"points_per_axis": 3, "dim": 2, "n": 2.0})


def brute_mass_cube(mu, center, side):
    """Independent O(N d) membership sum used as the mass oracle."""
    total = 0.0
    for p, w in zip(mu.points, mu.weights):
        if max(abs(float(a) - float(b)) for a, b in zip(p, np.atleast_1d(center))) <= side / 2.0:
            total += float(w)
    return total


def brute_delta(mu, zq, sq, zr, sr):
    """Direct two-orientation delta sum, no prefix tricks."""
    n = mu.growth_exponent

    def hull_side(zc, sc, zo, so):
        reach = max(abs(float(a) - float(b)) for a, b in
                    zip(np.atleast_1d(zo), np.atleast_1d(zc))) + so / 2.0
        return max(sc, 2.0 * reach)

    def one_side(zc, sc, zo, so):
        hs = hull_side(zc, sc, zo, so)
        acc = 0.0
        for p, w in zip(mu.points, mu.weights):
            dinf = max(abs(float(a) - float(b)) for a, b in zip(p, np.atleast_1d(zc)))
            if dinf <= hs / 2.0 and dinf > sc / 2.0:
                dist = float(np.linalg.norm(np.asarray(p, dtype=float) -
                                            np.atleast_1d(np.asarray(zc, dtype=float))))
                acc += float(w) / dist ** n
        return acc

    return max(one_side(zq, sq, zr, sr), one_side(zr, sr, zq, sq))
