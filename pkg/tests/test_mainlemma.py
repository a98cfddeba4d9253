import numpy as np
import pytest

from czkit import corpus
from czkit.covering import ConcentricSearcher, build_generation
from czkit.cubes import is_doubling
from czkit.errors import ParamsInfeasible
from czkit.mainlemma import (MainParams, companions, companion_targets, decompose_main,
                             default_cap_const, phi_kernel, phi_lp_feasibility,
                             probe_achieved_eps, psi_kernel, verify_claims)


@pytest.fixture(scope="module")
def cascade():
    mu = corpus.cascade_measure(120)
    R0 = corpus.bounding_cube(mu)
    params = MainParams.derive(mu, R0)
    return mu, R0, params


def test_params_validation():
    with pytest.raises(ParamsInfeasible):
        MainParams(A=10.0, alpha1=1.0, alpha2=2.0, alpha3=5.0, sigma=1.0)   # a1 <= 2 sigma
    with pytest.raises(ParamsInfeasible):
        MainParams(A=10.0, alpha1=3.0, alpha2=0.5, alpha3=9.0, sigma=1.0)   # a2 <= sigma
    with pytest.raises(ParamsInfeasible):
        MainParams(A=10.0, alpha1=3.0, alpha2=1.5, alpha3=9.0, sigma=1.0)   # 10 a2 >= a3
    p = MainParams(A=300.0, alpha1=9.0, alpha2=4.0, alpha3=41.0, sigma=1.0)
    assert p.doubled().A == 600.0


def test_companion_targets_descend():
    p = MainParams(A=300.0, alpha1=9.0, alpha2=4.0, alpha3=41.0, sigma=1.0)
    t = companion_targets(2, p)
    chain = ["base", "q1dcheck", "q1check", "q1", "q1hat", "q2", "q2hat", "q3",
             "q3hathat"]
    vals = [t[name] for name in chain]
    assert vals == sorted(vals, reverse=True)


def test_companions_nesting_and_targets(cascade):
    mu, R0, params = cascade
    searcher = ConcentricSearcher(mu, R0, params.doubling)
    deep = max(range(mu.size), key=lambda i: searcher.point_delta(i)
               if searcher.ref.contains_point(mu.points[i]) else -1)
    comp = companions(mu, deep, 1, R0, params, searcher=searcher)
    chain = ["base", "q1dcheck", "q1check", "q1", "q1hat", "q2", "q2hat", "q3",
             "q3hathat"]
    for inner, outer in zip(chain, chain[1:]):
        qi, qo = comp.cubes[inner], comp.cubes[outer]
        if not qo.is_point:
            assert qo.contains_cube(qi)
    targets = companion_targets(1, params)
    for name in chain:
        q = comp.cubes[name]
        if q.side > 0 and name != "base":
            assert is_doubling(mu, q)
            assert abs(comp.deltas[name] - targets[name]) <= comp.eps1_achieved + 1e-9
    # shallow points degrade to point-cubes without error
    shallow = min(range(mu.size), key=lambda i: searcher.point_delta(i)
                  if searcher.ref.contains_point(mu.points[i]) else np.inf)
    comp2 = companions(mu, shallow, 1, R0, params, searcher=searcher)
    assert comp2.cubes["q2"].is_point or comp2.cubes["q2"].side > 0


def test_degenerate_q2hat_forces_zero_psi(cascade):
    mu, R0, params = cascade
    searcher = ConcentricSearcher(mu, R0, params.doubling)
    shallow = min(range(mu.size), key=lambda i: searcher.point_delta(i)
                  if searcher.ref.contains_point(mu.points[i]) else np.inf)
    comp = companions(mu, shallow, 3, R0, params, searcher=searcher)
    if comp.cubes["q2hat"].is_point:
        psi, diag = psi_kernel(mu, comp)
        assert np.all(psi == 0.0)
        assert diag["degenerate"]


def test_psi_conditions(cascade):
    mu, R0, params = cascade
    searcher = ConcentricSearcher(mu, R0, params.doubling)
    n = mu.growth_exponent
    cap_const = default_cap_const(n)
    checked = 0
    for ci in range(0, mu.size, 9):
        if not searcher.ref.contains_point(mu.points[ci]):
            continue
        comp = companions(mu, ci, 1, R0, params, searcher=searcher)
        psi, diag = psi_kernel(mu, comp)
        if diag["degenerate"]:
            continue
        checked += 1
        q1, q2h, q3 = comp.cubes["q1"], comp.cubes["q2hat"], comp.cubes["q3"]
        r = np.linalg.norm(mu.points - mu.points[ci][None, :], axis=1)
        cap = cap_const / q1.side ** n if q1.side > 0 else np.inf
        with np.errstate(divide="ignore"):
            bound = np.minimum(cap, np.where(r > 0, r ** -n, np.inf))
        assert np.all(psi <= np.where(np.isfinite(bound), bound, np.inf) * (1 + 1e-12))
        ring = q2h.contains_points(mu.points) & ~q1.contains_points(mu.points)
        assert np.all(psi[ring] == r[ring] ** -n)
        outside = ~q3.contains_points(mu.points)
        assert np.all(psi[outside] == 0.0)
        assert np.isfinite(diag["C12_achieved"])
    assert checked > 0


def test_engine_trivial_function(cascade):
    mu, R0, params = cascade
    f = corpus.seeded_function(mu, 5) * 1e-3
    dec = decompose_main(mu, f, R0, params)
    assert dec.reconstruction_residual() <= 1e-8 * float(np.sum(np.abs(f) * mu.weights))
    report = verify_claims(dec)
    assert all(entry["passed"] for entry in report.values())


def test_engine_exploratory_regime():
    # only the deep cascade reaches past the descent-chain floor of A
    mu = corpus.cascade_measure(250)
    R0 = corpus.bounding_cube(mu)
    params = MainParams.derive(mu, R0)
    f = corpus.delta_profile_function(mu)
    dec = decompose_main(mu, f, R0, params, enforce_claims=False)
    l1 = float(np.sum(np.abs(f) * mu.weights))
    # exact telescoping regardless of the parameter regime
    assert dec.reconstruction_residual() <= 1e-10 * l1
    report = verify_claims(dec)
    # structural claims hold below the asymptotic parameter range too
    for tag in ("reconstruction", "g1", "g3", "cl1", "cl4", "b", "h"):
        assert report[tag]["passed"], (tag, report[tag])
    # the potential acted somewhere: something was classified
    acted = any(np.any(rec.good) or np.any(rec.bad) for rec in dec.records)
    assert acted
    # budget field is finite and recorded
    assert np.isfinite(dec.ledger["C_budget_achieved"])


def test_engine_enforced_retries_to_green():
    mu = corpus.cascade_measure(120)
    R0 = corpus.bounding_cube(mu)
    params = MainParams.derive(mu, R0)
    f = corpus.delta_profile_function(mu)
    dec = decompose_main(mu, f, R0, params)
    report = verify_claims(dec)
    assert all(entry["passed"] for entry in report.values())
    assert dec.retries_used >= 0
    assert dec.reconstruction_residual() <= 1e-8 * float(np.sum(np.abs(f) * mu.weights))


def test_phi_kernel_mass_and_feasibility():
    mu = corpus.cascade_measure(60)
    R0 = corpus.bounding_cube(mu)
    params = MainParams.derive(mu, R0)
    searcher = ConcentricSearcher(mu, R0, params.doubling)
    gen = build_generation(mu, R0, 1, params.A, searcher=searcher)
    comps, table = {}, {}
    ys = [i for i in range(0, mu.size, 11)
          if searcher.ref.contains_point(mu.points[i])]
    for yi in ys:
        phi = phi_kernel(mu, gen, comps, yi, params.alpha2, table,
                         R0=R0, p=params, searcher=searcher)
        assert np.all(phi >= 0)
        if np.any(phi != 0):
            feas = phi_lp_feasibility(mu, phi, yi)
            assert np.isfinite(feas) and feas > 0


def test_probe_eps_nonnegative(cascade):
    mu, R0, _ = cascade
    e0, e1 = probe_achieved_eps(mu, R0)
    assert e0 >= 0 and e1 >= 0


def test_engine_zero_function(cascade):
    mu, R0, params = cascade
    dec = decompose_main(mu, np.zeros(mu.size), R0, params)
    assert np.all(dec.h0 == 0.0)
    assert dec.ledger["M_max"] == 0
    assert all(v == 0 for v in dec.ledger.values())
    report = verify_claims(dec)
    assert all(entry["passed"] for entry in report.values())
