import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from czkit import (AtomicBlock, CanonicalFamily, Cube, DiscreteMeasure, h1_upper_bound,
                   jn_profile, mass_cube, mean, rbmo_norm, scale, validate_atomic_block,
                   z_set)
from czkit.errors import NotMeanZero, ZeroMassCube
from czkit.spaces import function_from_json, function_to_json


def test_mean_examples(two_atom):
    Q = Cube([0.5], 2.0)
    assert mean(two_atom, [3.0, 3.0], Q) == 3.0
    assert mean(two_atom, [1.0, -1.0], Q) == 0.0
    assert mean(two_atom, [1.0, -1.0], Cube([1.0], 0.0)) == -1.0     # point-cube
    with pytest.raises(ZeroMassCube):
        mean(two_atom, [1.0, 1.0], Cube([0.4], 0.1))


def test_rbmo_examples(two_atom):
    assert rbmo_norm(two_atom, [5.0, 5.0]).value == 0.0
    est = rbmo_norm(two_atom, [1.0, -1.0])
    assert est.value == pytest.approx(1.0)
    assert est.cube_family_size > 0
    # mean-oscillation invariance and absolute homogeneity
    assert rbmo_norm(two_atom, [8.0, 6.0]).value == pytest.approx(est.value)
    assert rbmo_norm(two_atom, [-3.0, 3.0]).value == pytest.approx(3.0 * est.value)


def test_rbmo_seminorm_triangle(cantor5):
    rng = np.random.default_rng(12)
    f = rng.standard_normal(cantor5.size)
    g = rng.standard_normal(cantor5.size)
    nf = rbmo_norm(cantor5, f).value
    ng = rbmo_norm(cantor5, g).value
    nfg = rbmo_norm(cantor5, f + g).value
    assert nfg <= nf + ng + 1e-9 * (nf + ng)


def test_rbmo_zero_iff_constant(cantor5):
    assert rbmo_norm(cantor5, np.full(cantor5.size, 2.5)).value == 0.0
    f = np.zeros(cantor5.size)
    f[7] = 1.0
    assert rbmo_norm(cantor5, f).value > 0.0


def test_atomic_block_validation(two_atom):
    host = Cube([0.5], 2.0)
    cap = 1.0 / mass_cube(two_atom, scale(host, 2.0))       # K_{R,R} = 1
    f = np.array([1.0, -1.0])
    blk = AtomicBlock(host=host, atoms=[(host, f * cap, 4.0)])
    res = validate_atomic_block(two_atom, blk)
    assert res.ok and res.value == pytest.approx(4.0)

    tilted = AtomicBlock(host=host, atoms=[(host, np.array([1.0, -0.5]) * cap, 1.0)])
    bad = validate_atomic_block(two_atom, tilted)
    assert not bad.ok
    assert any(kind == "cancellation" for kind, _ in bad.violations)

    oversized = AtomicBlock(host=host, atoms=[(host, 2.0 * f * cap, 1.0)])
    bad2 = validate_atomic_block(two_atom, oversized)
    assert not bad2.ok
    assert any("size condition" in kind for kind, _ in bad2.violations)

    stray = AtomicBlock(host=Cube([0.0], 1.0), atoms=[(Cube([0.0], 1.0), f * cap, 1.0)])
    bad3 = validate_atomic_block(two_atom, stray)
    assert not bad3.ok
    assert any("support" in kind for kind, _ in bad3.violations)


def test_h1_upper_bound_basics(two_atom):
    bound, blocks = h1_upper_bound(two_atom, np.zeros(2))
    assert bound == 0.0 and blocks == []
    f = np.array([1.0, -1.0])
    bound, blocks = h1_upper_bound(two_atom, f)
    # fallback single block gives ||f||_inf mu(2R), the bound can only improve
    host_mass = mass_cube(two_atom, Cube([0.0], 4.0))
    assert bound <= 1.0 * host_mass + 1e-12
    assert bound >= float(np.sum(np.abs(f) * two_atom.weights)) - 1e-12
    for blk in blocks:
        assert validate_atomic_block(two_atom, blk).ok
    with pytest.raises(NotMeanZero):
        h1_upper_bound(two_atom, np.array([1.0, 2.0]))


def test_h1_reconstructs_f(cantor5):
    rng = np.random.default_rng(4)
    f = rng.standard_normal(cantor5.size)
    f -= np.sum(f * cantor5.weights) / np.sum(cantor5.weights)
    bound, blocks = h1_upper_bound(cantor5, f)
    total = np.zeros(cantor5.size)
    for blk in blocks:
        assert validate_atomic_block(cantor5, blk).ok
        total += blk.values(cantor5)
    assert np.allclose(total, f, atol=1e-9 * max(1.0, np.max(np.abs(f))))
    assert bound >= float(np.sum(np.abs(f) * cantor5.weights)) - 1e-12


def test_jn_profile_shape(cantor5):
    f = np.sin(np.arange(cantor5.size))
    fam = CanonicalFamily(cantor5)
    Q = max((fam.cube(ci, si) for ci in range(cantor5.size)
             for si in range(len(fam.sides[ci]))), key=lambda q: q.side)
    prof = jn_profile(cantor5, f, Q, [0.0, 0.1, 0.5, 1.0, 5.0])
    fracs = [fr for _, fr in prof]
    assert fracs[0] <= 1.0
    assert fracs[-1] == 0.0                          # above max deviation
    assert all(a >= b - 1e-15 for a, b in zip(fracs, fracs[1:]))
    # weak-type consequence of the def-1 oscillation bound
    norm = rbmo_norm(cantor5, f).value
    for lam, fr in prof:
        if lam > 0:
            assert fr <= min(1.0, norm / lam) + 1e-9


def test_z_set_examples(cantor5):
    f = np.sin(np.arange(cantor5.size) * 0.9)
    fam = CanonicalFamily(cantor5)
    Q = max((fam.cube(ci, si) for ci in range(cantor5.size)
             for si in range(len(fam.sides[ci]))), key=lambda q: q.side)
    inq = np.nonzero(Q.contains_points(cantor5.points))[0]
    # huge lambda keeps everything
    z = z_set(cantor5, f, Q, 2.0 * float(np.max(np.abs(f))) + 1.0, fam)
    assert set(z.tolist()) == set(inq.tolist())
    # constant function keeps everything at lambda = 0
    zc = z_set(cantor5, np.ones(cantor5.size), Q, 0.0, fam)
    assert set(zc.tolist()) == set(inq.tolist())
    # monotone in lambda
    masses = []
    for lam in (0.01, 0.1, 0.5, 1.0):
        z = z_set(cantor5, f, Q, lam, fam)
        masses.append(float(np.sum(cantor5.weights[z])))
    assert all(a <= b + 1e-15 for a, b in zip(masses, masses[1:]))


def test_function_json_round_trip():
    f = np.array([1.0, -2.5, 1e-17])
    assert np.array_equal(function_from_json(function_to_json(f)), f)


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5))
@settings(max_examples=30, deadline=None)
def test_rbmo_shift_invariance(a, b):
    mu = DiscreteMeasure(1, 1.0, [[0.0], [1.0], [3.0]], [1.0, 1.0, 2.0])
    f = np.array([a, b, a - b])
    base = rbmo_norm(mu, f).value
    shifted = rbmo_norm(mu, f + 3.7).value
    assert shifted == pytest.approx(base, abs=1e-12)
