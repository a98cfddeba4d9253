"""The acceptance suites.

Every suite runs deterministic checks over the committed corpus and returns
the dictionary of achieved constants.  With ``frozen`` provided (the
committed calibration thresholds) the suite also *asserts*: any excess raises
PropertyViolated.  With ``frozen=None`` the suite only records, which is the
calibration mode that produces ``_calibration.json`` in the first place.

Numbered comments refer to the package's acceptance criteria:
 1 delta algebra          6 CZ decomposition invariants
 2 doubling-cube search   7 Whitney / Besicovich bounds
 3 maximal sandwich       8 John-Nirenberg decay
 4 easy implication       9 Main-Lemma engine
 5 H1 vs maximal ratio   10 kernel family
"""
from __future__ import annotations

import numpy as np

from . import corpus
from .covering import ConcentricSearcher, build_generation
from .cubes import Cube, DoublingParams, delta, is_doubling, scale
from .czdecomp import cz_decompose
from .errors import NotReachable, PropertyViolated
from .mainlemma import (MainParams, companions, decompose_main, phi_kernel,
                        phi_lp_feasibility, psi_kernel, verify_claims)
from .maximal import grand_maximal_lower, grand_maximal_upper, hl_field
from .measure import DiscreteMeasure, growth_constant, mass_cube
from .spaces import (AtomicBlock, CanonicalFamily, h1_upper_bound, jn_profile,
                     mean, rbmo_norm, validate_atomic_block, z_thresholds)


def _require(ok: bool, tag: str, detail: str):
    if not ok:
        raise PropertyViolated(tag, detail="" if ok else detail, location="")


def _against(frozen, key, achieved, headroom=1.0 + 1e-9, tag=""):
    if frozen is None:
        return
    if key not in frozen:
        raise PropertyViolated(tag or key, detail=f"missing calibration key {key}")
    if achieved > float(frozen[key]) * headroom:
        raise PropertyViolated(tag or key,
                               detail=f"achieved {achieved:.6g} exceeds frozen "
                                      f"{frozen[key]:.6g} (headroom {headroom})")


# -- criterion 1 + 2 ---------------------------------------------------------------

def suite_cubes(frozen: dict | None = None) -> dict:
    achieved = {}
    rng = np.random.default_rng(2024)
    measures = {**corpus.small_measures(), **corpus.medium_measures()}
    worst_conc = 0.0
    for name, mu in measures.items():
        rep = growth_constant(mu)
        c0 = rep.cube_constant
        n = mu.growth_exponent
        for _ in range(200):
            ci, cj, ck = rng.integers(0, mu.size, size=3)
            t = mu.chebyshev_dist(mu.points[ci])
            tmax = float(np.max(t))
            sQ, sR, sP = rng.uniform(0.05, 2.0, size=3) * max(tmax, 1e-9)
            Q = Cube(mu.points[ci], sQ)
            R = Cube(mu.points[cj], sR)
            P = Cube(mu.points[ck], sP)
            # symmetry is exact by construction
            _require(delta(mu, Q, R) == delta(mu, R, Q), "delta-symmetry", name)
            # concentric additivity
            small, big = min(sQ, sR), max(sQ, sR) * 2.0
            Pc = Cube(mu.points[ci], small)
            Qc = Cube(mu.points[ci], (small + big) / 2.0)
            Rc = Cube(mu.points[ci], big)
            defect = abs(delta(mu, Pc, Rc) -
                         (delta(mu, Pc, Qc) + delta(mu, Qc, Rc)))
            worst_conc = max(worst_conc, defect)
            _require(defect <= 1e-9, "concentric-additivity", f"{name}: {defect}")
            # dilation bound
            for rho in (1.5, 2.0, 4.0):
                dv = delta(mu, Q, scale(Q, rho))
                _require(dv <= c0 * 2.0 ** n * rho ** n * (1 + 1e-9),
                         "delta-scale-bound", f"{name}: rho={rho}, delta={dv}")
            # log bound for nested pairs
            if sQ > 0:
                big_cube = Cube(mu.points[ci], sQ * 2.0 ** rng.integers(1, 8))
                dv = delta(mu, Q, big_cube)
                bound = c0 * 4.0 ** n * (2.0 + np.log2(big_cube.side / Q.side))
                _require(dv <= bound * (1 + 1e-9), "delta-log-bound",
                         f"{name}: {dv} > {bound}")
    achieved["concentric_defect"] = worst_conc

    # criterion 2: the search hits its target within C3 + C0 16^n
    worst_ratio = 0.0
    for name in ("cantor_d5", "cantor_d6", "cantor_d8"):
        mu = (corpus.small_measures() | corpus.medium_measures() |
              corpus.large_measures())[name]
        R0 = corpus.bounding_cube(mu)
        searcher = ConcentricSearcher(mu, R0)
        c0 = growth_constant(mu).cube_constant
        n = mu.growth_exponent
        stride = max(1, mu.size // 16)
        results = []
        for ci in range(0, mu.size, stride):
            dpt = searcher.point_delta(ci)
            for frac in (0.2, 0.45, 0.7, 0.9):
                a = frac * dpt
                if a <= 0:
                    continue
                try:
                    res = searcher.find(ci, a)
                except NotReachable:
                    continue
                results.append(res)
                _require(is_doubling(mu, res.cube), "search-doubling", name)
                _require(scale(R0, 2.0).contains_cube(res.cube), "search-inside", name)
        c3 = max((r.ancestor_delta for r in results), default=0.0)
        bound = c3 + c0 * 16.0 ** n
        for r in results:
            worst_ratio = max(worst_ratio, r.eps1_achieved / bound)
            _require(r.eps1_achieved <= bound * (1 + 1e-9), "search-deviation",
                     f"{name}: eps1 {r.eps1_achieved} > C3+C0*16^n = {bound}")
        achieved[f"C3_{name}"] = c3
    achieved["search_deviation_ratio"] = worst_ratio
    return achieved


# -- criterion 3 -------------------------------------------------------------------

def suite_maximal(frozen: dict | None = None) -> dict:
    achieved = {"sandwich_gap": 0.0}
    for name, mu in corpus.small_measures().items():
        f = corpus.seeded_function(mu, seed=5)
        stride = max(1, mu.size // 8)
        for qi in range(0, mu.size, stride):
            x = mu.points[qi]
            up, _ = grand_maximal_upper(mu, f, x)
            lo, _ = grand_maximal_lower(mu, f, x)
            _require(lo <= up * (1 + 1e-9) + 1e-12, "sandwich",
                     f"{name}: lower {lo} > upper {up} at {x}")
            if up > 0:
                achieved["sandwich_gap"] = max(achieved["sandwich_gap"],
                                               (up - lo) / up)
            # homogeneity and translation equivariance
            up3, _ = grand_maximal_upper(mu, 3.0 * f, x)
            _require(abs(up3 - 3.0 * up) <= 1e-9 * max(1.0, up), "homogeneity",
                     f"{name}: {up3} vs {3 * up}")
            shift = np.full(mu.dim, 0.75)
            mu_t = DiscreteMeasure(mu.dim, mu.growth_exponent,
                                   mu.points + shift[None, :], mu.weights)
            up_t, _ = grand_maximal_upper(mu_t, f, x + shift)
            _require(abs(up_t - up) <= 1e-9 * max(1.0, up), "translation",
                     f"{name}: {up_t} vs {up}")
            lo_t, _ = grand_maximal_lower(mu_t, f, x + shift)
            lo0, _ = grand_maximal_lower(mu, f, x)
            _require(abs(lo_t - lo0) <= 1e-9 * max(1.0, lo0), "translation-lower", name)
        # M_(rho) <= M^(rho) pointwise
        weak = hl_field(mu, f, 2.0, centered_variant=True)
        strong = hl_field(mu, f, 2.0, centered_variant=False)
        _require(bool(np.all(weak <= strong * (1 + 1e-12) + 1e-15)), "hl-domination", name)

    # single-atom closed forms, exact
    for w in (1.0, 0.5, 2.0):
        for r in (0.5, 2.0):
            mu1 = DiscreteMeasure(1, 1.0, [[0.0]], [w])
            up, _ = grand_maximal_upper(mu1, [2.0], [r])
            expect = (2.0 * w) * min(1.0 / w, r ** -1.0)
            _require(abs(up - expect) <= 1e-12 * max(1.0, expect),
                     "single-atom-closed-form", f"w={w}, r={r}: {up} vs {expect}")
    return achieved


# -- criterion 4 -------------------------------------------------------------------

def _random_block(mu: DiscreteMeasure, fam: CanonicalFamily, rng) -> AtomicBlock | None:
    cubes = [(ci, si) for ci in range(mu.size) for si in range(len(fam.sides[ci]))]
    if not cubes:
        return None
    ci, si = cubes[rng.integers(0, len(cubes))]
    host = fam.cube(ci, si)
    members = np.nonzero(host.contains_points(mu.points))[0]
    if len(members) < 2:
        return None
    atoms = []
    for _ in range(2):
        cj = int(members[rng.integers(0, len(members))])
        t = mu.chebyshev_dist(mu.points[cj])
        t_in = t[(t > 0)]
        side_cap = (host.side / 2.0 - float(np.max(np.abs(mu.points[cj] - host.center))))
        side = min(2.0 * float(np.min(t_in)) if len(t_in) else host.side / 4.0,
                   2.0 * max(side_cap, 0.0))
        Qj = Cube(mu.points[cj], max(side, 0.0))
        if not host.contains_cube(Qj):
            Qj = Cube(mu.points[cj], 0.0)
        m2q = mass_cube(mu, scale(Qj, 2.0)) if Qj.side > 0 else mass_cube(mu, Qj)
        if m2q <= 0:
            return None
        from .cubes import k_coeff
        cap = 1.0 / (m2q * k_coeff(mu, Qj, host))
        vals = np.zeros(mu.size)
        inq = Qj.contains_points(mu.points)
        vals[inq] = rng.uniform(-1.0, 1.0, size=int(np.sum(inq)))
        amax = float(np.max(np.abs(vals)))
        if amax == 0:
            return None
        vals *= cap * rng.uniform(0.3, 1.0) / amax
        atoms.append((Qj, vals, float(rng.uniform(0.5, 2.0))))
    (q1, a1, l1), (q2, a2, l2) = atoms
    i1 = float(np.sum(a1 * mu.weights))
    i2 = float(np.sum(a2 * mu.weights))
    if i2 == 0:
        return None
    l2 = -l1 * i1 / i2
    return AtomicBlock(host=host, atoms=[(q1, a1, l1), (q2, a2, l2)])


def suite_easy_implication(frozen: dict | None = None, blocks_per_measure: int = 50) -> dict:
    worst = 0.0
    for name, mu in corpus.small_measures().items():
        fam = CanonicalFamily(mu)
        rng = np.random.default_rng(99)
        made = 0
        guard = 0
        while made < blocks_per_measure and guard < 40 * blocks_per_measure:
            guard += 1
            blk = _random_block(mu, fam, rng)
            if blk is None:
                continue
            res = validate_atomic_block(mu, blk)
            if not res.ok or res.value == 0:
                continue
            made += 1
            b = blk.values(mu)
            total = 0.0
            for qi in range(mu.size):
                up, _ = grand_maximal_upper(mu, b, mu.points[qi])
                total += mu.weights[qi] * up
            worst = max(worst, total / res.value)
        _require(made == blocks_per_measure, "easy-block-generation",
                 f"{name}: only {made} valid blocks")
    _against(frozen, "C_easy", worst, headroom=1.05, tag="easy-implication")
    return {"C_easy": worst}


# -- criterion 5 -------------------------------------------------------------------

def _sandwich_ratio(mu: DiscreteMeasure, f: np.ndarray) -> float:
    bound, _ = h1_upper_bound(mu, f)
    l1 = float(np.sum(np.abs(f) * mu.weights))
    lower_l1 = 0.0
    for qi in range(mu.size):
        lo, _ = grand_maximal_lower(mu, f, mu.points[qi])
        lower_l1 += mu.weights[qi] * lo
    return bound / (l1 + lower_l1)


def suite_sandwich(frozen: dict | None = None) -> dict:
    small = corpus.small_measures()["cantor_d5"]          # 32 atoms
    large = corpus.large_measures()["cantor_d8"]          # 256 atoms
    rs = [_sandwich_ratio(small, corpus.seeded_function(small, s)) for s in range(4)]
    rl = [_sandwich_ratio(large, corpus.seeded_function(large, s)) for s in range(2)]
    out = {"r_min": float(min(rs + rl)), "r_max": float(max(rs + rl)),
           "r_growth": float(np.median(rl) / np.median(rs))}
    if frozen is not None:
        if out["r_min"] < float(frozen["r_min"]) * (1 - 1e-9):
            raise PropertyViolated("sandwich-ratio", detail=f"r_min {out['r_min']}")
        if out["r_max"] > float(frozen["r_max"]) * (1 + 1e-9):
            raise PropertyViolated("sandwich-ratio", detail=f"r_max {out['r_max']}")
        if out["r_growth"] > 2.0:
            raise PropertyViolated("sandwich-growth", detail=str(out["r_growth"]))
    return out


# -- criterion 6 -------------------------------------------------------------------

def _check_host_minimal(mu, Q, host, region):
    p6 = DoublingParams(6.0, 6.0 ** (mu.growth_exponent + 1.0))
    k = int(round(np.log(host.side / Q.side) / np.log(6.0)))
    for j in range(1, k):
        cand = scale(Q, 6.0 ** j)
        if is_doubling(mu, cand, p6) and region.meets_complement(cand):
            return False
    return is_doubling(mu, host, p6) and region.meets_complement(host)


def suite_czdecomp(frozen: dict | None = None) -> dict:
    achieved = {"B": 0.0, "C_g": 0.0}
    measures = {**corpus.small_measures(),
                "cantor_d6": corpus.medium_measures()["cantor_d6"],
                "cascade_60": corpus.medium_measures()["cascade_60"]}
    for name, mu in measures.items():
        for seed, mean_zero in ((1, True), (2, False)):
            f = corpus.seeded_function(mu, seed, mean_zero=mean_zero)
            m2 = hl_field(mu, f, 2.0, centered_variant=True)
            med = float(np.median(m2[m2 > 0])) if np.any(m2 > 0) else 1.0
            for fac in (0.25, 1.0, 4.0):
                lam = fac * med
                if lam <= 0:
                    continue
                dec = cz_decompose(mu, f, lam)
                rep = dec.invariant_report(mu, f)
                for key, ok in rep.items():
                    _require(ok, f"cz-{key}", f"{name}: lambda={lam}")
                for i, host in enumerate(dec.hosts):
                    _require(_check_host_minimal(mu, dec.whitney.cubes[i], host,
                                                 dec.omega_region),
                             "cz-host-minimal", f"{name} cube {i}")
                for i, ratio in dec.half_mass_log:
                    _require(ratio >= 0.5 - 1e-12, "cz-half-mass",
                             f"{name}: cube {i} ratio {ratio}")
                if mean_zero:
                    ib = float(np.sum(dec.b * mu.weights))
                    _require(abs(ib) <= 1e-10 * max(1.0, float(np.sum(np.abs(f) * mu.weights))),
                             "cz-b-mean", f"{name}: int b = {ib}")
                achieved["B"] = max(achieved["B"], dec.constants["B"])
                achieved["C_g"] = max(achieved["C_g"], dec.constants["C_g"])
    return achieved


# -- criterion 7 -------------------------------------------------------------------

def suite_covering(frozen: dict | None = None) -> dict:
    achieved = {}
    for name, mu in {**corpus.small_measures(),
                     "cantor_d6": corpus.medium_measures()["cantor_d6"]}.items():
        d = mu.dim
        f = corpus.seeded_function(mu, 3)
        m2 = hl_field(mu, f, 2.0, centered_variant=True)
        if not np.any(m2 > 0):
            continue
        lam = float(np.median(m2[m2 > 0]))
        dec = cz_decompose(mu, f, lam)
        whit = dec.whitney
        for q in whit.cubes:
            _require(dec.omega_region.covers_cube(scale(q, 20.0)), "whitney-20Q",
                     f"{name}: {q}")
            _require(dec.omega_region.meets_complement(scale(q, 60.0)), "whitney-60Q",
                     f"{name}: {q}")
        for i, qi in enumerate(whit.cubes):
            for qj in whit.cubes[i + 1:]:
                inter = qi.intersects(qj)
                if inter:
                    off = np.max(np.abs(qi.center - qj.center))
                    _require(off >= (qi.side + qj.side) / 2.0 - 1e-12,
                             "whitney-disjoint-interiors", name)
        key = f"D_whitney_d{d}"
        achieved[key] = max(achieved.get(key, 0), whit.overlap_bound)
        _against(frozen, key, whit.overlap_bound, tag="whitney-overlap")

        R0 = corpus.bounding_cube(mu)
        searcher = ConcentricSearcher(mu, R0)
        maxd = max(searcher.point_delta(i) for i in range(mu.size)
                   if scale(R0, 2.0).contains_point(mu.points[i]))
        try:
            gen = build_generation(mu, R0, 1, maxd / 3.0, searcher=searcher)
        except PropertyViolated:
            continue
        _require(bool(np.all(gen.covers()[
            [i for i in range(mu.size)
             if searcher.point_delta(i) > maxd / 3.0 and R0.contains_point(mu.points[i])]]))
            if gen.n_volume else True, "besicovich-coverage", name)
        for fam_members in gen.families:
            for a in range(len(fam_members)):
                for b in range(a + 1, len(fam_members)):
                    _require(not gen.volume_cubes[fam_members[a]].intersects(
                        gen.volume_cubes[fam_members[b]]),
                        "besicovich-family-disjoint", name)
        key = f"N_besicovich_d{d}"
        achieved[key] = max(achieved.get(key, 0), gen.overlap_achieved)
        _against(frozen, key, gen.overlap_achieved, tag="besicovich-overlap")
    return achieved


# -- criterion 8 -------------------------------------------------------------------

def _fit_slope(xs, ys):
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    xm, ym = np.mean(xs), np.mean(ys)
    denom = float(np.sum((xs - xm) ** 2))
    return float(np.sum((xs - xm) * (ys - ym)) / denom) if denom > 0 else 0.0


def suite_jn(frozen: dict | None = None) -> dict:
    worst_slope = -np.inf
    worst_zslope = -np.inf
    for name, mu in {"grid1d_8": corpus.small_measures()["grid1d_8"],
                     "cantor_d5": corpus.small_measures()["cantor_d5"],
                     "clustered_1d": corpus.small_measures()["clustered_1d"],
                     "cantor_d6": corpus.medium_measures()["cantor_d6"]}.items():
        fam = CanonicalFamily(mu)
        best = None
        for ci in range(mu.size):
            for si in range(len(fam.sides[ci])):
                Q = fam.cube(ci, si)
                if best is None or Q.side > best.side:
                    best = Q
        for seed in range(20):
            f = corpus.seeded_function(mu, 100 + seed)
            raw = rbmo_norm(mu, f).value
            if raw <= 0:
                continue
            f = f / raw
            norm = 1.0          # exact homogeneity of the canonical-family max
            mask = best.contains_points(mu.points)
            mq = mean(mu, f, best)
            devs = np.sort(np.unique(np.abs(f[mask] - mq)))
            devs = devs[devs > 0]
            if len(devs) < 2:
                continue
            lams = np.concatenate([[devs[0] / 2.0], (devs[:-1] + devs[1:]) / 2.0])
            prof = jn_profile(mu, f, best, lams)
            pts = [(lam, fr) for lam, fr in prof if 0.0 < fr < 1.0]
            # Chebyshev consequence of the oscillation bound, exact
            for lam, fr in prof:
                if lam > 0:
                    _require(fr <= min(1.0, norm / lam) * (1 + 1e-9),
                             "jn-chebyshev", f"{name}: {fr} at {lam}")
            if len(pts) >= 2:
                slope = _fit_slope([p[0] for p in pts], [np.log(p[1]) for p in pts])
                worst_slope = max(worst_slope, slope * norm)
            thr = z_thresholds(mu, f, best, fam)
            mass_q = float(np.sum(mu.weights[mask]))
            zfr = [(float(lam),
                    float(np.sum(mu.weights[mask & (thr > lam)])) / mass_q)
                   for lam in lams]
            zpts = [(lam, fr) for lam, fr in zfr if 0.0 < fr < 1.0]
            if len(zpts) >= 2:
                slope = _fit_slope([p[0] for p in zpts], [np.log(p[1]) for p in zpts])
                worst_zslope = max(worst_zslope, slope * norm)
            fr_seq = [fr for _, fr in zfr]
            _require(all(a >= b - 1e-12 for a, b in zip(fr_seq, fr_seq[1:])),
                     "z-monotone", name)
    _require(worst_slope <= -0.1, "jn-slope", f"worst slope {worst_slope}")
    _require(worst_zslope <= -0.1, "jn-z-slope", f"worst z slope {worst_zslope}")
    return {"jn_slope": worst_slope, "jn_z_slope": worst_zslope}


# -- criterion 9 -------------------------------------------------------------------

def suite_mainlemma(frozen: dict | None = None) -> dict:
    achieved = {"C_budget": 0.0, "C_pack": 0.0, "C8": 0.0, "C9": 0.0}
    claim_keys = None
    for name, mu in corpus.mainlemma_measures().items():
        R0 = corpus.bounding_cube(mu)
        params = MainParams.derive(mu, R0)
        # the BMO-type delta profile is the function class the engine exists
        # for; a rough bounded function exercises the trivial regime
        f = corpus.delta_profile_function(mu) if name.startswith("cascade") \
            else corpus.seeded_function(mu, 17)
        dec = decompose_main(mu, f, R0, params)
        l1 = float(np.sum(np.abs(f) * mu.weights))
        resid = dec.reconstruction_residual()
        _require(resid <= 1e-8 * l1, "main-reconstruction",
                 f"{name}: residual {resid} vs {1e-8 * l1}")
        thresholds = None
        if frozen is not None:
            thresholds = {k: float(frozen[k]) for k in ("C8", "C9", "C_pack", "C_budget")
                          if k in frozen}
        report = verify_claims(dec, thresholds)
        if claim_keys is None:
            claim_keys = sorted(report)
        for tag, entry in report.items():
            _require(entry["passed"], f"claim-{tag}", f"{name}: {entry['detail']}")
        achieved["C_budget"] = max(achieved["C_budget"],
                                   dec.ledger.get("C_budget_achieved", 0.0))
        achieved["C_pack"] = max(achieved["C_pack"], report["h"]["achieved"] or 0.0)
        achieved["C8"] = max(achieved["C8"], report["a"]["achieved"] or 0.0)
        achieved["C9"] = max(achieved["C9"], report["cl4.5"]["achieved"] or 0.0)
        _against(frozen, "C_budget", dec.ledger.get("C_budget_achieved", 0.0),
                 tag="main-budget")
    _against(frozen, "C_pack", achieved["C_pack"], tag="main-packing")
    _against(frozen, "C8", achieved["C8"], tag="main-C8")
    _against(frozen, "C9", achieved["C9"], tag="main-C9")
    return achieved


# -- criterion 10 ------------------------------------------------------------------

def suite_kernels(frozen: dict | None = None) -> dict:
    achieved = {"C12": 0.0, "eps2": 0.0, "eps3": 0.0, "phi_feasibility": 0.0,
                "phi_b_const": 0.0, "phi_c_upper": 1.0, "phi_c_lower": 1.0}
    for name, mu in corpus.mainlemma_measures().items():
        R0 = corpus.bounding_cube(mu)
        params = MainParams.derive(mu, R0)
        searcher = ConcentricSearcher(mu, R0, params.doubling)
        ref = searcher.ref
        m = 1
        gen = build_generation(mu, R0, m, params.A, searcher=searcher)
        comps = {}
        psi_table = {}
        insupp = [i for i in range(mu.size) if ref.contains_point(mu.points[i])]
        for i in insupp:
            base = None
            pos = np.nonzero(gen.volume_indices == i)[0] if gen.n_volume else []
            if len(pos):
                base = gen.volume_cubes[int(pos[0])]
            comps[i] = companions(mu, i, m, R0, params, base=base, searcher=searcher)
            psi, diag = psi_kernel(mu, comps[i])
            psi_table[i] = psi
            achieved["C12"] = max(achieved["C12"], diag["C12_achieved"])
            if not diag["degenerate"] and comps[i].cubes["q1"].side > 0:
                achieved["eps2"] = max(achieved["eps2"],
                                       abs(diag["l1_norm"] - params.alpha2))
        phi = np.zeros((mu.size, mu.size))           # phi[yi, xi]
        for yi in insupp:
            phi[yi] = phi_kernel(mu, gen, comps, yi, params.alpha2, psi_table,
                                 R0=R0, p=params, searcher=searcher)
        # kernel mass normalization in both directions at the configured eps3
        # (the configuration is the calibrated achieved value: the deviation
        # is measured, never assumed)
        eps3_cfg = float(frozen["eps3"]) * (1 + 1e-9) if frozen and "eps3" in frozen \
            else np.inf
        covered = gen.covers()
        for xi in insupp:
            mass_y = float(np.sum(mu.weights[insupp] * phi[insupp, xi]))
            achieved["eps3"] = max(achieved["eps3"], mass_y - 1.0)
            if covered[xi]:
                achieved["eps3"] = max(achieved["eps3"], 1.0 - mass_y)
                _require(mass_y >= 1.0 - eps3_cfg - 1e-9, "convo-lower",
                         f"{name}: mass {mass_y} at x={xi}")
            _require(mass_y <= 1.0 + eps3_cfg + 1e-9, "convo-upper",
                     f"{name}: mass {mass_y} at x={xi}")
        for yi in insupp:
            if not covered[yi]:
                continue
            mass_x = float(np.sum(mu.weights * phi[yi]))
            achieved["eps3"] = max(achieved["eps3"], abs(mass_x - 1.0))
            _require(abs(mass_x - 1.0) <= eps3_cfg + 1e-9, "propor-mass",
                     f"{name}: |psi|-normalized mass {mass_x} at y={yi}")
        # pointwise kernel envelope bounds: the (1 +- eps3/2)-style factors are
        # measured as achieved constants and asserted against the frozen ones
        n = mu.growth_exponent
        up_factor, lo_factor = 1.0, 1.0
        for xi in insupp:
            cx = comps[xi]
            for yi in insupp:
                if yi == xi:
                    continue
                r = float(np.linalg.norm(mu.points[yi] - mu.points[xi]))
                val = phi[yi, xi]
                in_q1check = cx.cubes["q1check"].contains_point(mu.points[yi])
                if in_q1check and cx.cubes["q1check"].side > 0:
                    bound = 1.0 / (params.alpha2 * cx.cubes["q1check"].side ** n)
                    if bound > 0 and val > 0:
                        achieved["phi_b_const"] = max(achieved["phi_b_const"], val / bound)
                if not in_q1check and val > 0:
                    up_factor = max(up_factor, val * params.alpha2 * r ** n)
                in_ring = cx.cubes["q2"].contains_point(mu.points[yi]) and \
                    not cx.cubes["q1hat"].contains_point(mu.points[yi])
                if in_ring and covered[yi]:
                    lo_factor = min(lo_factor, val * params.alpha2 * r ** n)
                # vanishing outside the dilated third shell
                pos = np.nonzero(gen.membership[:, xi])[0] if gen.n_volume else []
                for pp in pos:
                    x0 = int(gen.volume_indices[pp])
                    hat3 = comps[x0].cubes["q3hathat"]
                    if not hat3.is_point and not hat3.contains_point(mu.points[yi]):
                        _require(val == 0.0, "phi-a-vanishing",
                                 f"{name}: x={xi} y={yi}")
        achieved["phi_c_upper"] = max(achieved.get("phi_c_upper", 1.0), up_factor)
        achieved["phi_c_lower"] = min(achieved.get("phi_c_lower", 1.0), lo_factor)
        if frozen is not None and "phi_c_upper" in frozen:
            _require(up_factor <= float(frozen["phi_c_upper"]) * (1 + 1e-9),
                     "phi-c-upper", f"{name}: factor {up_factor}")
            _require(lo_factor >= float(frozen["phi_c_lower"]) * (1 - 1e-9),
                     "phi-c-lower", f"{name}: factor {lo_factor}")
        # admissibility bridge: C phi ~ y feasibility in the LP
        for yi in insupp[:: max(1, len(insupp) // 6)]:
            if np.any(phi[yi] != 0):
                feas = phi_lp_feasibility(mu, phi[yi], yi)
                achieved["phi_feasibility"] = max(achieved["phi_feasibility"], feas)
    for key in ("C12", "eps2", "phi_feasibility", "phi_b_const"):
        _against(frozen, key, achieved[key], tag=f"kernel-{key}")
    _require(achieved["eps3"] <= (frozen or {}).get("eps3", np.inf) * (1 + 1e-9)
             if frozen else True, "kernel-eps3", f"eps3 {achieved['eps3']}")
    return achieved


ALL_SUITES = {
    "cubes": suite_cubes,
    "maximal": suite_maximal,
    "easy": suite_easy_implication,
    "sandwich": suite_sandwich,
    "czdecomp": suite_czdecomp,
    "covering": suite_covering,
    "jn": suite_jn,
    "mainlemma": suite_mainlemma,
    "kernels": suite_kernels,
}
