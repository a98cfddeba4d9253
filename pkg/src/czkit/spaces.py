"""RBMO norms, atomic blocks, H^1 upper bounds, and John-Nirenberg machinery.

Functions are plain float arrays aligned to the measure's support order
("sampled functions").  All suprema over "all doubling cubes" are reduced to
the canonical family: cubes centered at support points whose sides are the
l-infinity pairwise thresholds 2t and their halves t.  Masses of centered
cubes are step functions of the side, so the reduction realizes every
distinct mass; this is the package-wide finite surrogate for the continuum
supremum.

The two RBMO functionals over the (2, 2^(d+1))-doubling members:

    def-1:  sup_Q  (1/mu(Q)) int_Q |f - m_Q f| dmu
    def-2:  sup_{Q subset R} |m_Q f - m_R f| / K_{Q,R},   K = 1 + delta(Q, R)

The def-2 pair family always holds every concentric same-center pair and the
center point-cube pairs ({c}, Q) (whose K values the later mean-vs-point
estimates rely on); for measures up to ``FULL_PAIR_LIMIT`` atoms the full set
of nested cross-center pairs is enumerated as well.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .cubes import Cube, DoublingParams, k_coeff, scale
from .errors import (EmptyFamily, InvalidParams, NotMeanZero, SchemaError,
                     ZeroMassCube)
from .measure import DiscreteMeasure, mass_cube

FULL_PAIR_LIMIT = 96


def as_sampled(mu: DiscreteMeasure, values) -> np.ndarray:
    v = np.asarray(values, dtype=float).ravel()
    if len(v) != mu.size:
        raise InvalidParams(f"function has {len(v)} values for {mu.size} atoms")
    if not np.all(np.isfinite(v)):
        raise InvalidParams("sampled function must be finite")
    return v


def function_to_json(values: np.ndarray) -> dict:
    return {"values": [float(v) for v in np.asarray(values).ravel()]}


def function_from_json(obj: dict) -> np.ndarray:
    try:
        v = np.asarray(obj["values"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed function payload: {exc}") from exc
    if not np.all(np.isfinite(v)):
        raise SchemaError("function file contains NaN or Inf")
    return v.ravel()


def load_function(path) -> np.ndarray:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return function_from_json(obj)


def save_function(values: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        json.dump(function_to_json(values), fh, indent=1)
        fh.write("\n")


def mean(mu: DiscreteMeasure, f: np.ndarray, Q: Cube) -> float:
    """m_Q f: the mu-average of f over the closed cube Q (point-cube at an
    atom averages to the value there)."""
    f = as_sampled(mu, f)
    mask = Q.contains_points(mu.points)
    mass = float(np.sum(mu.weights[mask]))
    if mass <= 0:
        raise ZeroMassCube("cube carries no mass")
    return float(np.sum(mu.weights[mask] * f[mask]) / mass)


# -- canonical family with per-center prefix tables ----------------------------

class CanonicalFamily:
    """Doubling members of the canonical centered-cube family, with prefix
    tables that make masses, means, oscillations and concentric deltas O(1)
    per cube after an O(N^2 log N) setup."""

    def __init__(self, mu: DiscreteMeasure, p: DoublingParams | None = None,
                 include_halves: bool = True):
        self.mu = mu
        self.params = p or DoublingParams.default(mu.dim)
        self.params.check_against(mu.growth_exponent)
        n = mu.growth_exponent
        self.order = []          # per center: atom indices sorted by l-inf distance
        self.dsort = []
        self.wcum = []
        self.kernel_cum = []     # cumulative w / |y-c|_2^n, center atom contributes 0
        self.sides = []          # per center: doubling sides (ascending)
        self.hi = []             # per center: prefix count per side
        for ci in range(mu.size):
            c = mu.points[ci]
            dinf = mu.chebyshev_dist(c)
            order = np.argsort(dinf, kind="stable")
            ds = dinf[order]
            w = mu.weights[order]
            de = np.sqrt(np.sum((mu.points[order] - c[None, :]) ** 2, axis=1))
            kern = np.where(ds > 0, np.where(de > 0, w / np.where(de > 0, de, 1.0) ** n, 0.0), 0.0)
            self.order.append(order)
            self.dsort.append(ds)
            wcum = np.cumsum(w)
            self.wcum.append(wcum)
            self.kernel_cum.append(np.cumsum(kern))
            t = np.unique(ds[ds > 0])
            cand = np.unique(np.concatenate([2.0 * t, t]))
            his = np.searchsorted(ds, cand / 2.0, side="right") - 1
            his_a = np.searchsorted(ds, self.params.alpha * cand / 2.0, side="right") - 1
            mass = np.where(his >= 0, wcum[np.maximum(his, 0)], 0.0)
            mass_a = np.where(his_a >= 0, wcum[np.maximum(his_a, 0)], 0.0)
            doubling = mass_a <= self.params.beta * mass
            self.sides.append(cand[doubling])
            self.hi.append(his[doubling].astype(int))
        self.family_size = int(sum(len(s) for s in self.sides))
        if self.family_size == 0:
            raise EmptyFamily("no doubling canonical cubes (degenerate measure?)")

    def cube(self, ci: int, si: int) -> Cube:
        return Cube(self.mu.points[ci], float(self.sides[ci][si]))

    def mass(self, ci: int, si: int) -> float:
        return float(self.wcum[ci][self.hi[ci][si]])

    def concentric_delta(self, ci: int, si_small: int, si_big: int) -> float:
        """delta between two concentric family cubes (annulus kernel mass)."""
        lo, hi = self.hi[ci][si_small], self.hi[ci][si_big]
        return float(self.kernel_cum[ci][hi] - self.kernel_cum[ci][lo])

    def point_delta(self, ci: int, si: int) -> float:
        """delta({center}, cube): kernel mass of the punctured cube."""
        return float(self.kernel_cum[ci][self.hi[ci][si]])

    def means(self, f: np.ndarray) -> list:
        """m_Q f for every family cube, per center."""
        out = []
        for ci in range(self.mu.size):
            fw = np.cumsum(self.mu.weights[self.order[ci]] * f[self.order[ci]])
            m = fw[self.hi[ci]] / self.wcum[ci][self.hi[ci]]
            out.append(m)
        return out

    def oscillations(self, f: np.ndarray) -> list:
        """(1/mu(Q)) int_Q |f - m_Q f| dmu for every family cube, per center."""
        out = []
        for ci in range(self.mu.size):
            order = self.order[ci]
            fv = f[order]
            wv = self.mu.weights[order]
            his = self.hi[ci]
            fw = np.cumsum(wv * fv)
            mass = self.wcum[ci]
            vals = np.empty(len(his))
            for k, hi in enumerate(his):
                mq = fw[hi] / mass[hi]
                vals[k] = np.sum(np.abs(fv[:hi + 1] - mq) * wv[:hi + 1]) / mass[hi]
            out.append(vals)
        return out


@dataclass(frozen=True)
class RbmoEstimate:
    value: float
    witness_osc: tuple | None       # (center index, side)
    witness_pair: tuple | None      # ((ci, side_small), (cj, side_big))
    cube_family_size: int


def rbmo_norm(mu: DiscreteMeasure, f: np.ndarray,
              p: DoublingParams | None = None) -> RbmoEstimate:
    """RBMO seminorm over the canonical doubling family (see module docstring)."""
    f = as_sampled(mu, f)
    fam = CanonicalFamily(mu, p)
    best, wit_osc, wit_pair = 0.0, None, None

    osc = fam.oscillations(f)
    for ci in range(mu.size):
        if len(osc[ci]) == 0:
            continue
        k = int(np.argmax(osc[ci]))
        if osc[ci][k] > best:
            best, wit_osc = float(osc[ci][k]), (ci, float(fam.sides[ci][k]))

    means = fam.means(f)
    # concentric same-center pairs: delta from the annulus prefix
    for ci in range(mu.size):
        s = fam.sides[ci]
        if len(s) < 2:
            continue
        m = means[ci]
        kp = fam.kernel_cum[ci][fam.hi[ci]]
        dm = np.abs(m[:, None] - m[None, :])
        kk = 1.0 + (kp[None, :] - kp[:, None])           # K for small i inside big j
        iu = np.triu_indices(len(s), k=1)
        vals = dm[iu] / kk[iu]
        if len(vals):
            k = int(np.argmax(vals))
            if vals[k] > best:
                i, j = iu[0][k], iu[1][k]
                best = float(vals[k])
                wit_pair = ((ci, float(s[i])), (ci, float(s[j])))
    # center point-cube pairs ({c}, Q): K = 1 + punctured kernel mass
    for ci in range(mu.size):
        if len(fam.sides[ci]) == 0:
            continue
        m = means[ci]
        kk = 1.0 + fam.kernel_cum[ci][fam.hi[ci]]
        vals = np.abs(f[ci] - m) / kk
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            wit_pair = ((ci, 0.0), (ci, float(fam.sides[ci][k])))

    if mu.size <= FULL_PAIR_LIMIT:
        # cross-center nested pairs: for nested cubes the second delta
        # orientation vanishes, so delta is a prefix difference on the inner
        # cube's kernel table and every pair costs O(log N)
        all_cubes = [(ci, si) for ci in range(mu.size)
                     for si in range(len(fam.sides[ci]))]
        if all_cubes:
            centers = np.array([mu.points[ci] for ci, _ in all_cubes])
            sds = np.array([fam.sides[ci][si] for ci, si in all_cubes])
            ms = np.array([means[ci][si] for ci, si in all_cubes])
            cidx = np.array([ci for ci, _ in all_cubes], dtype=int)
            sidx = np.array([si for _, si in all_cubes], dtype=int)
            by_center = {}
            for k, ci in enumerate(cidx):
                by_center.setdefault(int(ci), []).append(k)
            for ci, rows in by_center.items():
                rows = np.array(rows, dtype=int)
                off = np.max(np.abs(centers - mu.points[ci][None, :]), axis=1)
                for k in rows:
                    s_q = sds[k]
                    outer = (off + s_q / 2.0 <= sds / 2.0) & (cidx != ci)
                    if not np.any(outer):
                        continue
                    hull = np.maximum(s_q, 2.0 * (off[outer] + sds[outer] / 2.0))
                    hidx = np.searchsorted(fam.dsort[ci], hull / 2.0, side="right") - 1
                    kq = fam.kernel_cum[ci][fam.hi[ci][sidx[k]]]
                    dvals = np.where(hidx >= 0,
                                     fam.kernel_cum[ci][np.maximum(hidx, 0)], 0.0) - kq
                    vals = np.abs(ms[k] - ms[outer]) / (1.0 + dvals)
                    j = int(np.argmax(vals))
                    if vals[j] > best:
                        best = float(vals[j])
                        oidx = np.nonzero(outer)[0][j]
                        wit_pair = ((ci, float(s_q)),
                                    (int(cidx[oidx]), float(sds[oidx])))
    return RbmoEstimate(best, wit_osc, wit_pair, fam.family_size)


# -- atomic blocks --------------------------------------------------------------

@dataclass
class AtomicBlock:
    """b = sum_j lambda_j a_j on the host cube R, with each |a_j| capped by
    1 / (mu(2 Q_j) K_{Q_j, R})."""

    host: Cube
    atoms: list                    # (Q_j: Cube, a_j: values array, lambda_j: float)
    rho: float = 2.0

    def values(self, mu: DiscreteMeasure) -> np.ndarray:
        out = np.zeros(mu.size)
        for _, a, lam in self.atoms:
            out += lam * np.asarray(a, dtype=float)
        return out


@dataclass
class BlockValidation:
    ok: bool
    value: float                   # sum |lambda_j| when ok
    violations: list               # (kind, magnitude)


def validate_atomic_block(mu: DiscreteMeasure, block: AtomicBlock,
                          rtol: float = 1e-9) -> BlockValidation:
    """Check every atomic-block invariant; return sum |lambda_j| or the report."""
    violations = []
    bvals = block.values(mu)
    scale_hint = max(1.0, float(np.max(np.abs(bvals))) if len(bvals) else 1.0)

    in_host = block.host.contains_points(mu.points)
    outside = ~in_host & (bvals != 0)
    if np.any(outside):
        violations.append(("support", float(np.max(np.abs(bvals[outside])))))

    cancel = float(np.sum(bvals * mu.weights))
    if abs(cancel) > rtol * scale_hint * max(1.0, mu.total_mass):
        violations.append(("cancellation", abs(cancel)))

    for j, (Qj, a, lam) in enumerate(block.atoms):
        a = np.asarray(a, dtype=float)
        in_q = Qj.contains_points(mu.points)
        if np.any(~in_q & (a != 0)):
            violations.append((f"atom {j} support", float(np.max(np.abs(a[~in_q])))))
        if not block.host.contains_cube(Qj):
            violations.append((f"atom {j} nesting", float(Qj.side)))
            continue
        cap = mass_cube(mu, scale(Qj, block.rho)) if Qj.side > 0 else mass_cube(mu, Qj)
        if cap <= 0:
            if np.any(a != 0):
                violations.append((f"atom {j} size condition", float(np.max(np.abs(a)))))
            continue
        kqr = k_coeff(mu, Qj, block.host)
        bound = 1.0 / (cap * kqr)
        amax = float(np.max(np.abs(a))) if len(a) else 0.0
        if amax > bound * (1.0 + rtol):
            violations.append((f"atom {j} size condition", amax - bound))

    if violations:
        return BlockValidation(False, 0.0, violations)
    return BlockValidation(True, float(sum(abs(lam) for _, _, lam in block.atoms)), [])


def _bounding_canonical_cube(mu: DiscreteMeasure) -> Cube:
    """A canonical cube (support center, threshold side) holding all atoms."""
    spans = [float(np.max(mu.chebyshev_dist(mu.points[i]))) for i in range(mu.size)]
    ci = int(np.argmin(spans))
    return Cube(mu.points[ci], 2.0 * max(spans[ci], np.finfo(float).tiny))


def _single_block(mu: DiscreteMeasure, f: np.ndarray, host: Cube) -> AtomicBlock:
    """Package a bounded mean-zero f as one atomic block on its host."""
    amax = float(np.max(np.abs(f)))
    lam = amax * mass_cube(mu, scale(host, 2.0))       # K_{R,R} = 1
    a = f / lam if lam > 0 else f
    return AtomicBlock(host=host, atoms=[(host, a, lam)])


def h1_upper_bound(mu: DiscreteMeasure, f: np.ndarray):
    """Constructive H^1 upper bound: (bound, list of validated AtomicBlocks).

    Candidates: the trivial single-block packaging, and one Calderon-Zygmund
    split f = g + sum_i (f w_i - alpha_i) per dyadic level lambda = 2^k from
    the lowest informative level up to the first empty superlevel set; each
    candidate is exact (the blocks sum to f) and the cheapest one is kept.
    """
    from .czdecomp import cz_decompose           # deferred: czdecomp imports spaces

    f = as_sampled(mu, f)
    total = float(np.sum(f * mu.weights))
    l1 = float(np.sum(np.abs(f) * mu.weights))
    if abs(total) > 1e-9 * max(1.0, l1):
        raise NotMeanZero(f"int f dmu = {total:.3e}")
    if l1 == 0.0:
        return 0.0, []

    host = _bounding_canonical_cube(mu)
    candidates = []
    trivial = _single_block(mu, f, host)
    val = validate_atomic_block(mu, trivial)
    assert val.ok, f"trivial block failed validation: {val.violations}"
    candidates.append((val.value, [trivial]))

    from .maximal import hl_field
    m2 = hl_field(mu, f, rho=2.0, centered_variant=True)
    mpos = m2[m2 > 0]
    if len(mpos):
        k0 = int(np.floor(np.log2(float(np.min(mpos)))))
        k1 = int(np.ceil(np.log2(float(np.max(mpos)))))
        for k in range(k0, k1 + 1):
            lam = 2.0 ** k
            if not np.any(m2 > lam):
                break
            try:
                dec = cz_decompose(mu, f, lam)
            except Exception:
                continue
            blocks = []
            ok = True
            for i in range(len(dec.whitney.cubes)):
                piece = f * dec.partition_weights[i] - dec.alphas[i]
                if not np.any(piece != 0):
                    continue
                atoms = []
                fw = f * dec.partition_weights[i]
                if np.any(fw != 0):
                    qa = scale(dec.whitney.cubes[i], 1.5)
                    amax = float(np.max(np.abs(fw)))
                    capm = mass_cube(mu, scale(qa, 2.0))
                    lam_a = amax * capm * k_coeff(mu, qa, dec.hosts[i])
                    atoms.append((qa, fw / lam_a, lam_a))
                al = dec.alphas[i]
                if np.any(al != 0):
                    amax = float(np.max(np.abs(al)))
                    capm = mass_cube(mu, scale(dec.hosts[i], 2.0))
                    lam_a = amax * capm
                    atoms.append((dec.hosts[i], al / lam_a, lam_a))
                blk = AtomicBlock(host=dec.hosts[i], atoms=atoms)
                res = validate_atomic_block(mu, blk)
                if not res.ok:
                    ok = False
                    break
                blocks.append((res.value, blk))
            if not ok:
                continue
            g = dec.g
            if np.any(g != 0):
                gblk = _single_block(mu, g, host)
                res = validate_atomic_block(mu, gblk)
                if not res.ok:
                    continue
                blocks.append((res.value, gblk))
            candidates.append((sum(v for v, _ in blocks), [b for _, b in blocks]))

    bound, blocks = min(candidates, key=lambda t: t[0])
    return float(bound), blocks


# -- John-Nirenberg -------------------------------------------------------------

def jn_profile(mu: DiscreteMeasure, f: np.ndarray, Q: Cube, lambdas) -> list:
    """Exact superlevel fractions (lambda, mu{x in Q: |f - m_Q f| > lambda}/mu(Q))."""
    f = as_sampled(mu, f)
    mask = Q.contains_points(mu.points)
    mass = float(np.sum(mu.weights[mask]))
    if mass <= 0:
        raise ZeroMassCube("cube carries no mass")
    mq = float(np.sum(mu.weights[mask] * f[mask]) / mass)
    dev = np.abs(f[mask] - mq)
    w = mu.weights[mask]
    out = []
    for lam in np.asarray(lambdas, dtype=float).ravel():
        out.append((float(lam), float(np.sum(w[dev > lam]) / mass)))
    return out


def z_thresholds(mu: DiscreteMeasure, f: np.ndarray, Q: Cube,
                 fam: CanonicalFamily | None = None) -> np.ndarray:
    """Per support point, the largest |m_P f - m_Q f| over canonical doubling
    cubes P containing the point with l(P) <= l(Q)/4 (the point-cube {c} at a
    support point counts, contributing |f(c) - m_Q f|).

    Z(Q, lam) is then the sublevel set of this field inside Q, so one pass
    prices the whole John-Nirenberg Z profile.
    """
    f = as_sampled(mu, f)
    fam = fam or CanonicalFamily(mu)
    mq = mean(mu, f, Q)
    thr = np.abs(f - mq)                      # the point-cube contribution
    means = fam.means(f)
    cap = Q.side / 4.0
    for ci in range(mu.size):
        sides = fam.sides[ci]
        if len(sides) == 0:
            continue
        small = np.nonzero(sides <= cap)[0]
        if len(small) == 0:
            continue
        gaps = np.abs(means[ci][small] - mq)
        his = fam.hi[ci][small]
        # members are distance prefixes: a point at prefix rank r lies in all
        # cubes with hi >= r, so its contribution is a suffix maximum
        order_h = np.argsort(his, kind="stable")
        his_sorted = his[order_h]
        suff = np.maximum.accumulate(gaps[order_h][::-1])[::-1]
        ranks = np.arange(int(his_sorted[-1]) + 1)
        pos = np.searchsorted(his_sorted, ranks, side="left")
        contrib = suff[np.minimum(pos, len(suff) - 1)]
        members = fam.order[ci][: int(his_sorted[-1]) + 1]
        np.maximum.at(thr, members, contrib[: len(members)])
    return thr


def z_set(mu: DiscreteMeasure, f: np.ndarray, Q: Cube, lam: float,
          fam: CanonicalFamily | None = None) -> np.ndarray:
    """Support indices x in Q whose small doubling cubes all have means within
    lam of m_Q f.

    Small means: every canonical doubling cube P (including the point-cubes
    {c} at support points, whose mean is f(c)) with x in P and
    l(P) <= l(Q)/4.  Returns a sorted integer index array.
    """
    if lam < 0:
        raise InvalidParams("lambda must be nonnegative")
    thr = z_thresholds(mu, f, Q, fam)
    mask = Q.contains_points(mu.points)
    return np.nonzero(mask & (thr <= lam))[0]
