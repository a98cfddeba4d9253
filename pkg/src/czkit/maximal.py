"""The grand maximal operator as a certified two-sided sandwich, plus the
Hardy-Littlewood variants on the canonical cube family.

For a test-function class anchored at x (L1 mass at most 1, pointwise cap
|y-x|^(-n), gradient cap |y-x|^(-n-1)):

  * ``grand_maximal_upper`` relaxes the supremum to a finite LP over the
    values phi_i at the atoms: the L1 budget, the pointwise caps, and for
    every atom pair the segment-distance Lipschitz cap
    |phi_i - phi_j| <= |y_i - y_j| / dist(x, [y_i, y_j])^(n+1).
    Every admissible C1 function induces a feasible vector, so the LP value
    dominates the true supremum.
  * ``grand_maximal_lower`` evaluates one explicit admissible radial family
    (a capped kernel with a cubic blend at the cap junction), so its best
    value is a true lower bound, and the family is feasible for the LP:
    lower <= upper holds by construction.

The gap between the two is a reported diagnostic, not a guarantee.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cubes import Cube
from .errors import AdmissibilityViolation, InvalidParams
from .measure import DiscreteMeasure
from .simplex import solve_lp


# -- LP upper bound ------------------------------------------------------------

def _segment_distances(x: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """dist(x, [y_i, y_j]) for all atom pairs, vectorized."""
    n = len(pts)
    a = pts[:, None, :]
    b = pts[None, :, :]
    ab = b - a
    denom = np.sum(ab * ab, axis=2)
    ax = x[None, None, :] - a
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(denom > 0, np.sum(ax * ab, axis=2) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    proj = a + t[:, :, None] * ab
    return np.sqrt(np.sum((x[None, None, :] - proj) ** 2, axis=2))


def _upper_lp_rows(mu: DiscreteMeasure, x: np.ndarray):
    """Static parts of the relaxation at anchor x: caps and pair caps."""
    n_exp = mu.growth_exponent
    diffs = mu.points - x[None, :]
    r = np.sqrt(np.sum(diffs * diffs, axis=1))
    with np.errstate(divide="ignore"):
        caps = np.where(r > 0, r ** -n_exp, np.inf)
    seg = _segment_distances(x, mu.points)
    gaps = np.sqrt(np.sum((mu.points[:, None, :] - mu.points[None, :, :]) ** 2, axis=2))
    with np.errstate(divide="ignore", invalid="ignore"):
        pair_cap = np.where(seg > 0, gaps / np.where(seg > 0, seg, 1.0) ** (n_exp + 1.0),
                            np.inf)
    return caps, pair_cap


def grand_maximal_upper(mu: DiscreteMeasure, f: np.ndarray, x) -> tuple[float, np.ndarray]:
    """LP upper bound for M_Phi f(x); returns (value, witness phi vector).

    Solved as two LPs (max +/- objective) with lazy pair-constraint
    generation: start from the budget and pointwise caps, add violated pair
    rows until the relaxation optimum satisfies all of them.
    """
    x = np.asarray(x, dtype=float).ravel()
    f = np.asarray(f, dtype=float).ravel()
    if len(f) != mu.size:
        raise InvalidParams("function not aligned to the measure")
    N = mu.size
    caps, pair_cap = _upper_lp_rows(mu, x)
    w = mu.weights
    ecap = np.minimum(caps, 1.0 / w)           # implied by the budget; pruning only
    ii, jj = np.triu_indices(N, k=1)
    keep = pair_cap[ii, jj] < np.maximum(ecap[ii], ecap[jj])
    pairs = np.stack([ii[keep], jj[keep]], axis=1)
    pcap = pair_cap[ii[keep], jj[keep]]

    base_rows = [w.copy()]
    base_rhs = [1.0]
    for i in range(N):
        if np.isfinite(caps[i]):
            row = np.zeros(N)
            row[i] = 1.0
            base_rows.append(row)
            base_rhs.append(caps[i])

    def solve_direction(cvec):
        rows = list(base_rows)
        rhs = list(base_rhs)
        active: set[int] = set()
        for _ in range(60):
            val, phi = solve_lp(cvec, np.array(rows), np.array(rhs))
            if len(pairs) == 0:
                return val, phi
            viol = np.abs(phi[pairs[:, 0]] - phi[pairs[:, 1]]) - pcap
            bad = np.nonzero(viol > 1e-9 * np.maximum(1.0, pcap))[0]
            bad = [k for k in bad if k not in active]
            if not bad:
                return val, phi
            bad.sort(key=lambda k: -viol[k])
            for k in bad[:max(4 * N, 64)]:
                i, j = pairs[k]
                row = np.zeros(N)
                sgn = 1.0 if phi[i] >= phi[j] else -1.0
                row[i], row[j] = sgn, -sgn
                rows.append(row)
                rhs.append(pcap[k])
                rowb = -row
                rows.append(rowb)
                rhs.append(pcap[k])
                active.add(k)
        raise AdmissibilityViolation("pair-constraint generation did not settle")

    cvec = w * f
    v_plus, phi_plus = solve_direction(cvec)
    v_minus, phi_minus = solve_direction(-cvec)
    if v_plus >= v_minus:
        return float(v_plus), phi_plus
    return float(v_minus), phi_minus


# -- explicit lower-bound family -------------------------------------------------

_BLEND_LO, _BLEND_HI = 0.9, 1.1


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _kappa(t: np.ndarray, r: float, n: float) -> np.ndarray:
    """Radial profile: (1/(n+1)) min(r^-n, t^-n) with a cubic blend near t = r."""
    t = np.asarray(t, dtype=float)
    a = r ** -n
    with np.errstate(divide="ignore"):
        tail = np.where(t > 0, t ** -n, np.inf)
    u = (t - _BLEND_LO * r) / ((_BLEND_HI - _BLEND_LO) * r)
    s = _smoothstep(u)
    mid = (1.0 - s) * a + s * np.where(t > 0, np.minimum(tail, np.inf), a)
    out = np.where(t <= _BLEND_LO * r, a, np.where(t >= _BLEND_HI * r, tail, mid))
    return out / (n + 1.0)


@lru_cache(maxsize=32)
def _gradient_safety(n: float) -> float:
    """Scale making the blended profile obey |kappa'(t)| <= t^-(n+1) everywhere.

    The ratio |kappa'| * t^(n+1) is scale free, so one dense scan in the blend
    window decides the constant for each n.
    """
    tau = np.linspace(_BLEND_LO, _BLEND_HI, 4001)
    a = 1.0
    s = _smoothstep((tau - _BLEND_LO) / (_BLEND_HI - _BLEND_LO))
    sp = 6.0 * ((tau - _BLEND_LO) / (_BLEND_HI - _BLEND_LO)) * \
        (1.0 - (tau - _BLEND_LO) / (_BLEND_HI - _BLEND_LO)) / (_BLEND_HI - _BLEND_LO)
    dk = (sp * (tau ** -n - a) - s * n * tau ** (-n - 1.0)) / (n + 1.0)
    ratio = np.abs(dk) * tau ** (n + 1.0)
    worst = max(float(np.max(ratio)), n / (n + 1.0))
    return min(1.0, 1.0 / worst) if worst > 1.0 else 1.0


def lower_family_profile(mu: DiscreteMeasure, x: np.ndarray, r: float) -> np.ndarray:
    """The admissible radial test function of radius r, evaluated at the atoms."""
    x = np.asarray(x, dtype=float).ravel()
    n = mu.growth_exponent
    t = np.sqrt(np.sum((mu.points - x[None, :]) ** 2, axis=1))
    phi = _gradient_safety(float(n)) * _kappa(t, r, n)
    mass = float(np.sum(mu.weights * phi))
    s = min(1.0, 1.0 / mass) if mass > 0 else 1.0
    return s * phi


def default_radii(mu: DiscreteMeasure, x) -> np.ndarray:
    """Deterministic radius grid: atom distances, their blend-edge shifts, gaps."""
    x = np.asarray(x, dtype=float).ravel()
    t = np.sqrt(np.sum((mu.points - x[None, :]) ** 2, axis=1))
    t = np.unique(t[t > 0])
    if len(t) == 0:
        return np.array([1.0])
    grid = np.concatenate([t, t / _BLEND_LO, t / _BLEND_HI,
                           np.sqrt(t[:-1] * t[1:]) if len(t) > 1 else t[:1]])
    return np.unique(grid[grid > 0])


def grand_maximal_lower(mu: DiscreteMeasure, f: np.ndarray, x,
                        radii=None) -> tuple[float, float]:
    """Best value of the explicit admissible family; returns (value, witness r)."""
    x = np.asarray(x, dtype=float).ravel()
    f = np.asarray(f, dtype=float).ravel()
    if len(f) != mu.size:
        raise InvalidParams("function not aligned to the measure")
    radii = default_radii(mu, x) if radii is None else np.asarray(radii, dtype=float)
    if len(radii) == 0:
        raise InvalidParams("need a nonempty radius grid")
    n = mu.growth_exponent
    t = np.sqrt(np.sum((mu.points - x[None, :]) ** 2, axis=1))
    with np.errstate(divide="ignore"):
        caps = np.where(t > 0, t ** -n, np.inf)
    best_val, best_r = 0.0, float(radii[0])
    for r in radii:
        phi = lower_family_profile(mu, x, float(r))
        mass = float(np.sum(mu.weights * phi))
        if mass > 1.0 + 1e-9 or np.any(phi < -1e-15) or np.any(phi > caps * (1 + 1e-12)):
            raise AdmissibilityViolation(f"family member r={r} fails its caps")
        val = abs(float(np.sum(mu.weights * f * phi)))
        if val > best_val:
            best_val, best_r = val, float(r)
    return best_val, best_r


# -- Hardy-Littlewood variants ----------------------------------------------------

def hl_maximal(mu: DiscreteMeasure, f: np.ndarray, x, rho: float = 2.0,
               centered_variant: bool = True) -> float:
    """M_(rho) (cubes containing x, normalized by mu(rho Q)) or M^(rho)
    (x in rho^-1 Q, normalized by mu(Q)), over the canonical family.

    The family holds, per support center, the threshold sides and their
    rho-dilates, so the pointwise domination M_(rho) <= M^(rho) is inherited
    by the finite enumeration.
    """
    if rho <= 1:
        raise InvalidParams("rho must exceed 1")
    x = np.asarray(x, dtype=float).ravel()
    f = np.asarray(f, dtype=float).ravel()
    best = 0.0
    absf = np.abs(f) * mu.weights
    for ci in range(mu.size):
        c = mu.points[ci]
        dinf = mu.chebyshev_dist(c)
        order = np.argsort(dinf, kind="stable")
        dsort = dinf[order]
        wcum = np.cumsum(mu.weights[order])
        fcum = np.cumsum(absf[order])
        base = np.unique(np.concatenate([2.0 * dsort, [0.0]]))
        sides = np.unique(np.concatenate([base, rho * base]))
        hi = np.searchsorted(dsort, sides / 2.0, side="right") - 1
        hi_rho = np.searchsorted(dsort, rho * sides / 2.0, side="right") - 1
        mass_q = np.where(hi >= 0, wcum[np.maximum(hi, 0)], 0.0)
        int_q = np.where(hi >= 0, fcum[np.maximum(hi, 0)], 0.0)
        mass_rq = np.where(hi_rho >= 0, wcum[np.maximum(hi_rho, 0)], 0.0)
        xoff = float(np.max(np.abs(x - c)))
        if centered_variant:
            ok = (sides / 2.0 >= xoff) & (mass_rq > 0)
            vals = np.where(ok, int_q / np.where(mass_rq > 0, mass_rq, 1.0), 0.0)
        else:
            ok = (sides / (2.0 * rho) >= xoff) & (mass_q > 0)
            vals = np.where(ok, int_q / np.where(mass_q > 0, mass_q, 1.0), 0.0)
        if len(vals):
            best = max(best, float(np.max(vals)))
    return best


def hl_field(mu: DiscreteMeasure, f: np.ndarray, rho: float = 2.0,
             centered_variant: bool = True,
             with_witness: bool = False):
    """M_(rho) f (or M^(rho) f) at every support point, with optional witness cubes.

    For each center the candidate values are suffix-maximized over sides, so a
    query point only needs its first admissible threshold.
    """
    if rho <= 1:
        raise InvalidParams("rho must exceed 1")
    f = np.asarray(f, dtype=float).ravel()
    N = mu.size
    out = np.zeros(N)
    witness = [None] * N
    absf = np.abs(f) * mu.weights
    for ci in range(N):
        c = mu.points[ci]
        dinf = mu.chebyshev_dist(c)
        order = np.argsort(dinf, kind="stable")
        dsort = dinf[order]
        wcum = np.cumsum(mu.weights[order])
        fcum = np.cumsum(absf[order])
        base = np.unique(np.concatenate([2.0 * dsort, [0.0]]))
        sides = np.unique(np.concatenate([base, rho * base]))
        hi = np.searchsorted(dsort, sides / 2.0, side="right") - 1
        hi_rho = np.searchsorted(dsort, rho * sides / 2.0, side="right") - 1
        mass_q = np.where(hi >= 0, wcum[np.maximum(hi, 0)], 0.0)
        int_q = np.where(hi >= 0, fcum[np.maximum(hi, 0)], 0.0)
        mass_rq = np.where(hi_rho >= 0, wcum[np.maximum(hi_rho, 0)], 0.0)
        if centered_variant:
            with np.errstate(invalid="ignore", divide="ignore"):
                vals = np.where(mass_rq > 0, int_q / np.where(mass_rq > 0, mass_rq, 1.0), 0.0)
            reach = sides / 2.0
        else:
            with np.errstate(invalid="ignore", divide="ignore"):
                vals = np.where(mass_q > 0, int_q / np.where(mass_q > 0, mass_q, 1.0), 0.0)
            reach = sides / (2.0 * rho)
        # suffix max over sides: admissible sides for a query form a suffix
        suff = np.maximum.accumulate(vals[::-1])[::-1]
        arg = np.zeros(len(vals), dtype=int)
        besti = len(vals) - 1
        for k in range(len(vals) - 1, -1, -1):
            if vals[k] >= suff[k]:
                besti = k
            arg[k] = besti
        k0 = np.searchsorted(reach, dinf, side="left")
        valid = k0 < len(sides)
        cand = np.where(valid, suff[np.minimum(k0, len(sides) - 1)], 0.0)
        better = cand > out
        out[better] = cand[better]
        if with_witness:
            for qi in np.nonzero(better)[0]:
                witness[qi] = Cube(c, float(sides[arg[min(k0[qi], len(sides) - 1)]]))
    if with_witness:
        return out, witness
    return out


def superlevel_boxes(mu: DiscreteMeasure, f: np.ndarray, rho: float, lam: float,
                     fatten: float = 1.5) -> list:
    """Fattened canonical cubes witnessing {M_(rho) f > lam}.

    Per center only the largest qualifying side matters (its dilate swallows
    the smaller concentric ones), so the union of the returned boxes contains
    every canonical cube with mass ratio above lam; outside the union the
    canonical M_(rho) is at most lam.
    """
    f = np.asarray(f, dtype=float).ravel()
    absf = np.abs(f) * mu.weights
    boxes = []
    for ci in range(mu.size):
        c = mu.points[ci]
        dinf = mu.chebyshev_dist(c)
        order = np.argsort(dinf, kind="stable")
        dsort = dinf[order]
        wcum = np.cumsum(mu.weights[order])
        fcum = np.cumsum(absf[order])
        base = np.unique(np.concatenate([2.0 * dsort, [0.0]]))
        hi = np.searchsorted(dsort, base / 2.0, side="right") - 1
        hi_rho = np.searchsorted(dsort, rho * base / 2.0, side="right") - 1
        int_q = np.where(hi >= 0, fcum[np.maximum(hi, 0)], 0.0)
        mass_rq = np.where(hi_rho >= 0, wcum[np.maximum(hi_rho, 0)], 0.0)
        ok = (mass_rq > 0) & (int_q > lam * mass_rq)
        if not np.any(ok):
            continue
        side = float(np.max(base[ok]))
        if side == 0.0:
            gaps = dsort[dsort > 0]
            side = float(np.min(gaps)) / 2.0 if len(gaps) else 1.0
        boxes.append(Cube(c, fatten * side))
    return boxes


def maximal_field(mu: DiscreteMeasure, f: np.ndarray, kind: str,
                  query_points, **kwargs) -> np.ndarray:
    """Batch wrapper: elementwise maximal values at the query points, in order.

    kind in {'grand_upper', 'grand_lower', 'hl'}; CZKIT_THREADS > 1 evaluates
    queries in a thread pool (results still in input order).
    """
    pts = np.atleast_2d(np.asarray(query_points, dtype=float))
    if kind == "grand_upper":
        fn = lambda x: grand_maximal_upper(mu, f, x)[0]
    elif kind == "grand_lower":
        fn = lambda x: grand_maximal_lower(mu, f, x, kwargs.get("radii"))[0]
    elif kind == "hl":
        fn = lambda x: hl_maximal(mu, f, x, kwargs.get("rho", 2.0),
                                  kwargs.get("centered_variant", True))
    else:
        raise InvalidParams(f"unknown maximal kind {kind!r}")
    threads = int(os.environ.get("CZKIT_THREADS", "1") or "1")
    if threads > 1 and len(pts) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return np.array(list(ex.map(fn, pts)))
    return np.array([fn(x) for x in pts])


@dataclass(frozen=True)
class MaximalResult:
    """Two-sided sandwich at one query point."""

    upper: float
    lower: float
    witness_upper: np.ndarray
    witness_lower: float

    def __post_init__(self):
        if self.lower > self.upper + 1e-9 * max(1.0, abs(self.upper)):
            raise AdmissibilityViolation("lower bound exceeds the LP upper bound")


def grand_maximal(mu: DiscreteMeasure, f: np.ndarray, x, radii=None) -> MaximalResult:
    up, wit_u = grand_maximal_upper(mu, f, x)
    lo, wit_l = grand_maximal_lower(mu, f, x, radii)
    return MaximalResult(upper=up, lower=lo, witness_upper=wit_u, witness_lower=wit_l)
