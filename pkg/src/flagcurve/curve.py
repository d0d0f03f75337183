"""Limit-curve sampling and incidence analysis.

The invariant curve is sampled at the attracting fixed flags of the
cyclically reduced ball elements; each sample is indexed by the attracting
fixed direction of its 2x2 seed image on the circle of directions (an
angle mod pi), which parametrizes the curve equivariantly and injectively.

Crossing counts use sign changes of the pairing along the param-ordered
point samples.  Representatives are sign-canonicalized, so consecutive
samples may differ by an antipodal flip; the running sign of consecutive
dot products tracks the coherent lift and the leftover global monodromy
twists the wrap-around comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ball import (
    BallTable,
    batch_attractive_directions,
    batch_translation_lengths,
)
from .errors import InsufficientSamples
from .projective import CONSTRUCTED_TOL, Flag, ProjLine, ProjPoint
from .reps import RepSpec
from .spectral import (
    GAP_TOL,
    batch_eigvals3,
    batch_eigvec,
    batch_modulus_gaps,
    canonicalize_rows,
)
from .surface import Word

E2 = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class CurveSample:
    param: float
    flag: Flag
    source_word: str
    translation_length: float


@dataclass
class CurveModel:
    """Param-sorted samples of the limit curve and its two projections.

    ``exact_point_line`` (a covector) is set when the point curve is known
    to be exactly a projective line; ``exact_line_point`` (a point) when
    the line curve is exactly the pencil through that point.  Membership
    tests then use the exact formula instead of nearest-sample distance.
    """

    params: np.ndarray
    points: np.ndarray
    lines: np.ndarray
    words: tuple
    tlens: np.ndarray
    variant: str
    dedup_res: float
    exact_point_line: np.ndarray | None = None
    exact_line_point: np.ndarray | None = None

    def __len__(self):
        return len(self.params)

    def sample(self, i: int) -> CurveSample:
        return CurveSample(
            float(self.params[i]),
            Flag(ProjPoint(self.points[i]), ProjLine(self.lines[i])),
            self.words[i],
            float(self.tlens[i]),
        )

    def point_margin(self, rep: np.ndarray) -> float:
        """Angular distance of a projective point to the sampled point curve."""
        if self.exact_point_line is not None:
            return math.asin(min(1.0, abs(float(rep @ self.exact_point_line))))
        return float(np.arccos(np.minimum(1.0, np.abs(self.points @ rep)).max()))

    def line_margin(self, rep: np.ndarray) -> float:
        """Angular distance of a projective line to the sampled line curve."""
        if self.exact_line_point is not None:
            return math.asin(min(1.0, abs(float(rep @ self.exact_line_point))))
        return float(np.arccos(np.minimum(1.0, np.abs(self.lines @ rep)).max()))

    def segment_signs(self) -> np.ndarray:
        """Sign of consecutive representative dot products (cyclic)."""
        nxt = np.roll(self.points, -1, axis=0)
        return np.sign(np.einsum("ij,ij->i", self.points, nxt))

    def csv_rows(self):
        for i in range(len(self)):
            p, l = self.points[i], self.lines[i]
            yield (
                float(self.params[i]),
                float(p[0]), float(p[1]), float(p[2]),
                float(l[0]), float(l[1]), float(l[2]),
                self.words[i],
                float(self.tlens[i]),
            )


def sample_limit_curve(
    spec: RepSpec,
    radius: int,
    min_length: float = 0.5,
    dedup_res: float = 1e-7,
    workers: int = 1,
    table: BallTable | None = None,
) -> CurveModel:
    """One sample per cyclically reduced loxodromic ball word with
    translation length >= min_length, deduplicated by param and sorted."""
    if radius < 2:
        raise ValueError("radius must be >= 2")
    if table is None:
        table = BallTable.build(spec.seed, radius, workers)
    img_levels = table.images3(spec.letter_images())
    params, points, lines, tlens, words, ranks = [], [], [], [], [], []
    rank_base = 0
    for level in range(1, radius + 1):
        mats2 = table.mats2(level)
        n = len(mats2)
        hyp, t = batch_translation_lengths(mats2)
        sel = table.cyclically_reduced(level) & hyp & (t >= min_length)
        idx = np.nonzero(sel)[0]
        if len(idx):
            imgs = img_levels[level - 1][idx]
            vals, real = batch_eigvals3(imgs)
            g12, g23 = batch_modulus_gaps(vals)
            with np.errstate(invalid="ignore"):
                lox = real & (g12 > GAP_TOL) & (g23 > GAP_TOL)
            idx = idx[lox]
            if len(idx):
                imgs, vals = imgs[lox], vals[lox]
                v1 = batch_eigvec(imgs, vals[:, 0])
                v2 = batch_eigvec(imgs, vals[:, 1])
                ln = np.cross(v1, v2)
                points.append(canonicalize_rows(v1))
                lines.append(canonicalize_rows(ln))
                params.append(batch_attractive_directions(mats2[idx]))
                tlens.append(t[idx])
                strs = table.word_strings(level)
                words.extend(strs[i] for i in idx)
                ranks.append(rank_base + idx)
        rank_base += n
    if not params:
        raise InsufficientSamples("no loxodromic samples in the ball")
    params = np.concatenate(params)
    points = np.concatenate(points)
    lines = np.concatenate(lines)
    tlens = np.concatenate(tlens)
    ranks = np.concatenate(ranks)
    words = np.array(words, dtype=object)

    order = np.lexsort((ranks, params))
    params, points, lines = params[order], points[order], lines[order]
    tlens, words = tlens[order], words[order]
    keep = np.ones(len(params), dtype=bool)
    last = -math.inf
    for i in range(len(params)):
        if params[i] - last < dedup_res:
            keep[i] = False
        else:
            last = params[i]
    params, points, lines = params[keep], points[keep], lines[keep]
    tlens, words = tlens[keep], words[keep]
    if len(params) < 16:
        raise InsufficientSamples(f"only {len(params)} samples after dedup")

    exact_pl = E2.copy() if spec.variant == "canonical" else None
    exact_lp = E2.copy() if spec.variant in ("canonical", "radial") else None
    return CurveModel(
        params=params,
        points=points,
        lines=lines,
        words=tuple(words),
        tlens=tlens,
        variant=spec.variant,
        dedup_res=dedup_res,
        exact_point_line=exact_pl,
        exact_line_point=exact_lp,
    )


# ---------------------------------------------------------------------------
# Transversal crossing counts
# ---------------------------------------------------------------------------

def count_crossings(pairings: np.ndarray, sigma: np.ndarray, ztol: float):
    """Transversal crossings of one projective line with the sampled curve.

    ``pairings`` are the line's values on the param-ordered point
    representatives, ``sigma`` the consecutive-representative signs.
    Values within ztol of zero are snapped to exact incidence; crossings
    are sign alternations of the coherent lift across the cyclic sequence
    (wrap comparison twisted by the total monodromy).

    Returns (crossings, tangencies, all_zero).
    """
    n = len(pairings)
    nz_idx = np.nonzero(np.abs(pairings) > ztol)[0]
    if len(nz_idx) == 0:
        return 0, 0, True
    lift = np.ones(n)
    lift[1:] = np.cumprod(sigma[:-1])
    monodromy = lift[-1] * sigma[-1]
    s = np.sign(pairings[nz_idx]) * lift[nz_idx]
    seq = np.append(s, s[0] * monodromy)
    flips = seq[1:] != seq[:-1]
    crossings = int(np.count_nonzero(flips))
    # Between cyclically consecutive nonzero entries there may be snapped
    # zeros; no sign alternation across such a gap means a tangency.
    gap_has_zero = np.append(
        np.diff(nz_idx) > 1, (nz_idx[0] + n - nz_idx[-1]) > 1
    )
    tangencies = int(np.count_nonzero(gap_has_zero & ~flips))
    return crossings, tangencies, False


@dataclass(frozen=True)
class IncidenceReport:
    histogram: dict
    worst_word: str
    worst_count: int
    nontransversal: int
    passed: bool


def crossings_from_pairings(pair: np.ndarray, sigma: np.ndarray, ztol: float):
    """Crossing counts from a precomputed (n_points, n_lines) pairing matrix.

    The bulk count XORs adjacent lifted sign bits; entries snapped to zero
    (|pairing| <= ztol) void their two adjacent pairs, and each zero run
    is bridged scalar-wise: flanking lifted signs alternating across the
    run is a crossing, agreeing is a tangency.  Zeros are rare (every
    sampled line vanishes at its own sample), so the correction loop is
    cheap.

    Returns (crossings, tangencies, all_zero), one entry per column.
    """
    n = pair.shape[0]
    lift_neg = np.zeros(n, dtype=bool)
    lift_neg[1:] = np.cumsum(sigma[:-1] < 0) % 2 == 1
    monodromy_neg = bool(lift_neg[-1]) ^ bool(sigma[-1] < 0)
    neg = pair < 0
    neg ^= lift_neg[:, None]
    nz = pair > ztol
    nz |= pair < -ztol
    flips = (neg[:-1] ^ neg[1:]) & nz[:-1] & nz[1:]
    crossings = flips.sum(axis=0, dtype=np.int64)
    crossings += (neg[-1] ^ neg[0] ^ monodromy_neg) & nz[-1] & nz[0]
    tangencies = np.zeros(pair.shape[1], dtype=np.int64)
    all_zero = ~nz.any(axis=0)
    zrows_all, zcols_all = np.nonzero(~nz)
    order = np.argsort(zcols_all, kind="stable")  # group zeros by column
    zc, zr = zcols_all[order], zrows_all[order]
    starts = np.searchsorted(zc, np.arange(pair.shape[1]))
    ends = np.searchsorted(zc, np.arange(pair.shape[1]), side="right")
    for j in np.unique(zc):
        if all_zero[j]:
            continue
        zrows = zr[starts[j]:ends[j]]
        runs = np.split(zrows, np.nonzero(np.diff(zrows) > 1)[0] + 1)
        if len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == n - 1:
            runs[0] = np.concatenate([runs[-1], runs[0]])
            runs.pop()
        negj = neg[:, j]
        for run in runs:
            a = (int(run[0]) - 1) % n
            b = (int(run[-1]) + 1) % n
            # bridging forward from a to b crosses the seam iff b <= a
            flip = bool(negj[a] ^ negj[b]) ^ (monodromy_neg if b <= a else False)
            if flip:
                crossings[j] += 1
            else:
                tangencies[j] += 1
    crossings[all_zero] = 0
    return crossings, tangencies, all_zero


def batch_crossings(points: np.ndarray, sigma: np.ndarray,
                    lines: np.ndarray, ztol: float):
    """Vectorized transversal crossing counts of many lines with the curve."""
    return crossings_from_pairings(points @ lines.T, sigma, ztol)


def check_incidence(model: CurveModel, ztol: float = 1e-9, chunk: int = 1024,
                    max_lines: int | None = None) -> IncidenceReport:
    """Count, for each sampled line, its transversal crossings with the
    sampled point curve.  Passes when every count is exactly one.

    ``max_lines`` checks an evenly strided subset (report carries the
    count); None checks every sampled line.
    """
    if len(model) < 64:
        raise InsufficientSamples(f"{len(model)} samples < 64")
    sigma = model.segment_signs()
    if max_lines is not None and len(model) > max_lines:
        sel = np.arange(0, len(model), len(model) // max_lines)[:max_lines]
    else:
        sel = np.arange(len(model))
    histogram: dict = {}
    worst = (1, "")
    nontrans = 0
    for start in range(0, len(sel), chunk):
        idx = sel[start:start + chunk]
        cross, tang, allzero = batch_crossings(
            model.points, sigma, model.lines[idx], ztol
        )
        bad = allzero | (tang > 0)
        nontrans += int(bad.sum())
        good = cross[~bad]
        for c in np.unique(good):
            histogram[int(c)] = histogram.get(int(c), 0) + int(
                np.count_nonzero(good == c)
            )
        if (~bad).any():
            j = int(np.argmax(np.where(bad, -1, np.abs(cross - 1))))
            if abs(int(cross[j]) - 1) > abs(worst[0] - 1):
                worst = (int(cross[j]), model.words[idx[j]])
    passed = set(histogram) == {1} and nontrans == 0
    return IncidenceReport(
        histogram=dict(sorted(histogram.items())),
        worst_word=worst[1],
        worst_count=worst[0],
        nontransversal=nontrans,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# Model property reports (used by the validation suite)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InjectivityReport:
    min_point_separation: float
    min_line_separation: float
    violations: int


def injectivity_report(model: CurveModel, floor: float = 1e-9) -> InjectivityReport:
    """Angular separation of samples with distinct params.

    Checks param-adjacent pairs plus lexicographically adjacent point
    representatives (collisions between far params land adjacent in lex
    order for curve data).
    """
    def chordal(a, b):
        return np.minimum(
            np.linalg.norm(a - b, axis=1), np.linalg.norm(a + b, axis=1)
        )

    def min_sep(arr):
        d = chordal(arr, np.roll(arr, -1, axis=0))
        best = float(d.min())
        order = np.lexsort(arr.T)
        srt = arr[order]
        d2 = chordal(srt[:-1], srt[1:])
        pgap = np.abs(model.params[order][:-1] - model.params[order][1:])
        mask = pgap > model.dedup_res
        viol = int(np.count_nonzero(d2[mask] <= floor))
        if mask.any():
            best = min(best, float(d2[mask].min()))
        return best, viol

    p_sep, p_viol = min_sep(model.points)
    l_sep, l_viol = min_sep(model.lines)
    return InjectivityReport(p_sep, l_sep, p_viol + l_viol)


@dataclass(frozen=True)
class ProductStructureReport:
    checked_pairs: int
    near_misses: int
    worst_pairing: float
    same_param_incidence: float


def product_structure_report(
    model: CurveModel,
    far_gap: float = 1e-3,
    pair_tol: float = 1e-10,
    chunk: int = 256,
) -> ProductStructureReport:
    """Cross-pairings of points and lines at distinct params must not vanish;
    same-param pairs must be incident.  Near misses are pairs farther than
    far_gap in param whose pairing is below pair_tol."""
    worst = math.inf
    misses = 0
    checked = 0
    n = len(model)
    for start in range(0, n, chunk):
        block = model.lines[start:start + chunk]
        pair = np.abs(model.points @ block.T)
        pgap = np.abs(model.params[:, None] - model.params[None, start:start + chunk])
        pgap = np.minimum(pgap, math.pi - pgap)
        far = pgap > far_gap
        checked += int(far.sum())
        vals = pair[far]
        if len(vals):
            worst = min(worst, float(vals.min()))
            misses += int(np.count_nonzero(vals <= pair_tol))
    same = float(
        np.abs(np.einsum("ij,ij->i", model.points, model.lines)).max()
    )
    return ProductStructureReport(checked, misses, worst, same)


def equivariance_report(model: CurveModel, spec: RepSpec) -> dict:
    """Residuals of curve invariance under the generators.

    When the curve (or its dual) is exactly known, reports the max exact
    residual of the mapped samples.  Otherwise reports the max angular
    deviation of each mapped point from the sample nearest to its mapped
    param, divided by the local param gap (a scale-free heuristic: the
    curve map is at least Lipschitz on the families handled here).
    """
    gen_imgs = spec.generator_images()
    n = len(model)
    exact_p, exact_l, rel = 0.0, 0.0, 0.0
    for k in range(2 * spec.genus):
        g = gen_imgs[k]
        gd = np.linalg.inv(g).T
        mp = canonicalize_rows((g @ model.points.T).T)
        ml = canonicalize_rows((gd @ model.lines.T).T)
        if model.exact_point_line is not None:
            exact_p = max(exact_p, float(np.abs(mp @ model.exact_point_line).max()))
        else:
            m2 = spec.seed.generators[k]
            dirs = np.stack([np.cos(model.params), np.sin(model.params)], axis=1)
            mdir = (m2 @ dirs.T).T
            mpar = np.arctan2(mdir[:, 1], mdir[:, 0]) % math.pi
            pos = np.searchsorted(model.params, mpar)
            left, right = (pos - 1) % n, pos % n
            dl = np.abs(model.params[left] - mpar)
            dl = np.minimum(dl, math.pi - dl)
            dr = np.abs(model.params[right] - mpar)
            dr = np.minimum(dr, math.pi - dr)
            use = np.where(dr <= dl, right, left)
            gaps = np.maximum(np.minimum(dl, dr), model.dedup_res)
            ref = model.points[use]
            dev = np.arccos(np.minimum(1.0, np.abs(np.einsum("ij,ij->i", mp, ref))))
            rel = max(rel, float((dev / gaps).max()))
        if model.exact_line_point is not None:
            exact_l = max(exact_l, float(np.abs(ml @ model.exact_line_point).max()))
    return {
        "exact_point_residual": exact_p if model.exact_point_line is not None else None,
        "exact_line_residual": exact_l if model.exact_line_point is not None else None,
        "relative_point_deviation": rel if model.exact_point_line is None else None,
    }


# ---------------------------------------------------------------------------
# Regularity diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularityReport:
    holder_exponent_estimate: float
    secant_slope_max: float
    pairs_used: int
    verdict_hint: str


def regularity_diagnostics(model: CurveModel) -> RegularityReport:
    """Log-log regression of chordal distance against param gap over
    consecutive samples.  Estimates only; finite sampling cannot certify
    regularity or its failure."""
    if len(model) < 256:
        raise InsufficientSamples(f"{len(model)} samples < 256")
    gaps = np.diff(model.params)
    dots = np.abs(np.einsum("ij,ij->i", model.points[:-1], model.points[1:]))
    dists = np.arccos(np.minimum(1.0, dots))
    mask = (gaps >= model.dedup_res) & (dists > 1e-14)
    gaps, dists = gaps[mask], dists[mask]
    if len(gaps) < 16:
        raise InsufficientSamples("too few usable consecutive pairs")
    lx, ly = np.log(gaps), np.log(dists)
    slope = float(np.polyfit(lx, ly, 1)[0])
    secant = float((dists / gaps).max())
    if slope >= 0.9:
        hint = "consistent-with-lipschitz-at-this-scale"
    elif slope >= 0.6:
        hint = "intermediate-exponent-at-this-scale"
    else:
        hint = "sub-lipschitz-signature-at-this-scale"
    return RegularityReport(slope, secant, int(len(gaps)), hint)


def word_of(model: CurveModel, i: int, genus: int) -> Word:
    return Word.parse(model.words[i], genus)
