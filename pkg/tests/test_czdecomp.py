import numpy as np
import pytest

from czkit import Cube, DiscreteMeasure, cz_decompose, truncate_sequence
from czkit.czdecomp import doubling_origin_scales
from czkit.errors import LambdaNonpositive, NotEnoughScales
from czkit.maximal import hl_field


def test_trivial_level(grid4):
    f = np.array([0.5, -0.25, 0.1, 0.0])
    m2 = hl_field(grid4, f, 2.0, True)
    dec = cz_decompose(grid4, f, float(np.max(m2)) * 2.0)
    assert len(dec.omega) == 0
    assert np.array_equal(dec.g, f)
    assert np.all(dec.b == 0.0)
    rep = dec.invariant_report(grid4, f)
    assert all(rep.values()), rep


def test_lambda_positive(grid4):
    with pytest.raises(LambdaNonpositive):
        cz_decompose(grid4, np.ones(4), 0.0)


def test_spec_instance_all_invariants(grid4):
    # grid {0..3}, f = (8, 0, 0, 0), lambda = 1: the bad set is nonempty and
    # every structural invariant is re-checked by direct summation
    f = np.array([8.0, 0.0, 0.0, 0.0])
    dec = cz_decompose(grid4, f, 1.0)
    assert len(dec.omega) >= 1
    rep = dec.invariant_report(grid4, f)
    assert all(rep.values()), rep
    # direct reconstruction and the alpha integral matching, by hand
    assert np.allclose(dec.g + dec.b, f)
    for i in range(len(dec.hosts)):
        lhs = float(np.sum(dec.alphas[i] * grid4.weights))
        rhs = float(np.sum(f * dec.partition_weights[i] * grid4.weights))
        assert lhs == pytest.approx(rhs, abs=1e-12)
    # half-mass at every recorded step
    for i, ratio in dec.half_mass_log:
        assert ratio >= 0.5 - 1e-12
    # the partition sums to one exactly on the bad set
    wsum = np.sum(dec.partition_weights, axis=0)
    assert np.allclose(wsum[dec.omega], 1.0)
    # g is controlled at the recorded constant
    assert np.max(np.abs(dec.g)) <= dec.constants["C_g"] * 1.0 + 1e-9


def test_mean_zero_gives_mean_zero_b(cantor5):
    rng = np.random.default_rng(2)
    f = rng.standard_normal(cantor5.size)
    f -= np.sum(f * cantor5.weights) / np.sum(cantor5.weights)
    m2 = hl_field(cantor5, f, 2.0, True)
    lam = float(np.median(m2[m2 > 0]))
    dec = cz_decompose(cantor5, f, lam)
    assert abs(float(np.sum(dec.b * cantor5.weights))) <= 1e-10
    assert abs(float(np.sum(dec.g * cantor5.weights))) <= 1e-10
    rep = dec.invariant_report(cantor5, f)
    assert all(rep.values()), rep


def test_whitney_hosts_meet_complement(cantor5):
    f = np.abs(np.sin(np.arange(cantor5.size) * 3.1)) * 4.0
    m2 = hl_field(cantor5, f, 2.0, True)
    lam = float(np.median(m2[m2 > 0]))
    dec = cz_decompose(cantor5, f, lam)
    for i, host in enumerate(dec.hosts):
        assert dec.omega_region.meets_complement(host)
        q = dec.whitney.cubes[i]
        assert dec.omega_region.covers_cube(Cube(q.center, 20.0 * q.side))
        # R_i = 6^k Q_i for some k >= 1
        k = np.log(host.side / q.side) / np.log(6.0)
        assert abs(k - round(k)) < 1e-9 and round(k) >= 1


def test_truncation_examples(grid4):
    # supp f inside Q_1 and mean zero: the truncation is the identity
    f = np.array([1.0, -1.0, 0.0, 0.0])
    scales = doubling_origin_scales(grid4, 1)
    assert scales[0].contains_points(grid4.points[:2]).all()
    f1 = truncate_sequence(grid4, f, 1)
    assert np.allclose(f1, f, atol=1e-15)
    # mean zero at every k, general mean-zero f
    g = np.array([2.0, 1.0, -0.5, 3.0])
    g -= np.sum(g * grid4.weights) / np.sum(grid4.weights)
    for k in (1, 2, 3):
        gk = truncate_sequence(grid4, g, k)
        assert abs(float(np.sum(gk * grid4.weights))) <= 1e-12 * np.sum(np.abs(g))
    # stabilization: once Q_k swallows the support the L1 error vanishes
    errs = [float(np.sum(np.abs(g - truncate_sequence(grid4, g, k)) * grid4.weights))
            for k in (1, 2, 3, 4)]
    assert errs[-1] <= 1e-12
    assert errs == sorted(errs, reverse=True) or errs[-1] < errs[0]


def test_not_enough_scales():
    mu = DiscreteMeasure(1, 1.0, [[1e9]], [1.0])
    with pytest.raises(NotEnoughScales):
        doubling_origin_scales(mu, 5, max_exponent=2)
