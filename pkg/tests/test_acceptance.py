"""Acceptance suite: the ten package criteria, one test and one printed
pass/fail line each.

Every threshold is pinned here or read from the committed calibration file
(czkit/_calibration.json); a missing calibration key fails loudly.  Run with
``pytest tests/test_acceptance.py -v -s`` to see the lines as they print.
"""
import pytest

from czkit import verify
from czkit.constants import load_frozen

FROZEN = load_frozen()


@pytest.fixture(scope="module")
def frozen():
    assert FROZEN, "calibration file missing; run python -m czkit.calibration"
    return FROZEN


def _report(num, name, achieved):
    print(f"ACCEPTANCE {num:>2} {name}: PASS {achieved}")


@pytest.fixture(scope="module")
def cubes_results(frozen):
    # criteria 1 and 2 share one corpus sweep
    return verify.suite_cubes(frozen=frozen)


def test_criterion_01_delta_algebra(cubes_results):
    # symmetry exact, concentric additivity within 1e-9, dilate and log bounds
    assert cubes_results["concentric_defect"] <= 1e-9
    _report(1, "delta-algebra", {"concentric_defect": cubes_results["concentric_defect"]})


def test_criterion_02_doubling_search(cubes_results):
    # |delta(Q, 2R0) - alpha| <= C3_achieved + C0 16^n on every reachable pair
    assert cubes_results["search_deviation_ratio"] <= 1.0
    _report(2, "doubling-search", {k: v for k, v in cubes_results.items()
                                   if k.startswith(("C3", "search"))})


def test_criterion_03_maximal_sandwich(frozen):
    out = verify.suite_maximal(frozen=frozen)
    _report(3, "maximal-sandwich", out)


def test_criterion_04_easy_implication(frozen):
    out = verify.suite_easy_implication(frozen=frozen)
    # regression tolerance: 1.05 x frozen, enforced inside the suite
    assert out["C_easy"] <= frozen["C_easy"] * 1.05 + 1e-12
    _report(4, "easy-implication", out)


def test_criterion_05_h1_maximal_ratio(frozen):
    out = verify.suite_sandwich(frozen=frozen)
    assert frozen["r_min"] * (1 - 1e-9) <= out["r_min"]
    assert out["r_max"] <= frozen["r_max"] * (1 + 1e-9)
    assert out["r_growth"] <= 2.0
    _report(5, "h1-vs-maximal ratio", out)


def test_criterion_06_cz_decomposition(frozen):
    out = verify.suite_czdecomp(frozen=frozen)
    _report(6, "cz-decomposition", out)


def test_criterion_07_whitney_besicovich(frozen):
    out = verify.suite_covering(frozen=frozen)
    for key, val in out.items():
        assert val <= frozen[key], (key, val, frozen[key])
    _report(7, "whitney-besicovich", out)


def test_criterion_08_john_nirenberg(frozen):
    out = verify.suite_jn(frozen=frozen)
    assert out["jn_slope"] <= -0.1
    assert out["jn_z_slope"] <= -0.1
    _report(8, "john-nirenberg decay", out)


def test_criterion_09_main_lemma(frozen):
    out = verify.suite_mainlemma(frozen=frozen)
    assert out["C_budget"] <= frozen["C_budget"] * (1 + 1e-9)
    assert out["C_pack"] <= frozen["C_pack"] * (1 + 1e-9) + 1e-15
    _report(9, "main-lemma engine", out)


def test_criterion_10_kernel_family(frozen):
    out = verify.suite_kernels(frozen=frozen)
    assert out["C12"] <= frozen["C12"] * (1 + 1e-9)
    assert out["eps2"] <= frozen["eps2"] * (1 + 1e-9)
    assert out["eps3"] <= frozen["eps3"] * (1 + 1e-9)
    _report(10, "kernel family", out)
