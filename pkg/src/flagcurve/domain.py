"""The invariant domain of flags, membership tests, recurrence experiments,
tautological-fiber crossing counts, and the affine chart at [e2].

A flag is inside the domain when its point avoids the sampled point curve
and its line avoids the sampled line curve.  Where a curve is exactly
known (canonical point/line curves, radial line curve), the exact
linear-algebra margin replaces the nearest-sample margin.  Boundary
classification against sampled curves is honest about resolution: flags
within the tolerance band of a sampled curve are "on-boundary", not
"outside", unless an exact test puts them on the bad set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ball import BallTable
from .curve import CurveModel, count_crossings
from .errors import BaseNotInterior, OnL0
from .projective import Flag, ProjLine, ProjPoint
from .reps import RepSpec

HARD_EPS = 1e-9


@dataclass(frozen=True)
class OmegaQuery:
    """Membership verdict with the margins that produced it."""

    verdict: str  # "inside" | "on-boundary" | "outside"
    margin_point: float
    margin_line: float


def in_omega(
    flag: Flag,
    model_l: CurveModel,
    model_lstar: CurveModel,
    tol: float | None = None,
) -> OmegaQuery:
    """Classify a flag against the invariant domain.

    ``model_l`` supplies the point curve, ``model_lstar`` the line curve
    (the two arguments may be the same model).  Default tolerance band is
    twice the dedup resolution.
    """
    if tol is None:
        tol = 2.0 * max(model_l.dedup_res, model_lstar.dedup_res)
    mp = model_l.point_margin(flag.point.rep)
    ml = model_lstar.line_margin(flag.line.rep)
    m = min(mp, ml)
    point_exact = model_l.exact_point_line is not None
    line_exact = model_lstar.exact_line_point is not None
    if m <= HARD_EPS:
        verdict = "outside"
    elif m <= tol:
        # Inside the sampling band; an exact test can still settle it.
        on_exact = (point_exact and mp <= HARD_EPS) or (line_exact and ml <= HARD_EPS)
        verdict = "outside" if on_exact else "on-boundary"
    else:
        verdict = "inside"
    return OmegaQuery(verdict, mp, ml)


@dataclass(frozen=True)
class RecurrenceReport:
    ball_radius: int
    neighborhood: float
    returning_words: tuple  # includes the empty word ""
    count_history: tuple  # (radius, cumulative count) pairs
    stabilized: bool
    min_nonempty_displacement: float
    free_at_scale: bool  # no nonempty word fixes the base within 1e-8


def flag_displacement(points: np.ndarray, lines: np.ndarray,
                      base_point: np.ndarray, base_line: np.ndarray) -> np.ndarray:
    """Chordal displacement of mapped flags from the base: max of the two
    angular distances."""
    dp = np.arccos(np.minimum(1.0, np.abs(points @ base_point)))
    dl = np.arccos(np.minimum(1.0, np.abs(lines @ base_line)))
    return np.maximum(dp, dl)


def recurrence_experiment(
    spec: RepSpec,
    base: Flag,
    nbhd: float,
    radius: int,
    model_l: CurveModel | None = None,
    model_lstar: CurveModel | None = None,
    workers: int = 1,
    table: BallTable | None = None,
) -> RecurrenceReport:
    """List the ball words that move the base flag by at most 2*nbhd.

    Properness proxy: the returning set stabilizes as the radius grows.
    Freeness proxy: no nonempty word fixes the base within 1e-8.
    """
    if model_l is None or model_lstar is None:
        from .curve import sample_limit_curve

        m = sample_limit_curve(spec, min(radius, 5), workers=workers)
        model_l = model_l or m
        model_lstar = model_lstar or m
    q = in_omega(base, model_l, model_lstar)
    if q.verdict != "inside" or min(q.margin_point, q.margin_line) <= 2.0 * nbhd:
        raise BaseNotInterior(
            f"verdict {q.verdict}, margins ({q.margin_point:.4f}, {q.margin_line:.4f})"
            f" need > {2.0 * nbhd:.4f}"
        )
    if table is None:
        table = BallTable.build(spec.seed, radius, workers)
    img_levels = table.images3(spec.letter_images())
    bp, bl = base.point.rep, base.line.rep
    returning = [""]
    history = [(0, 1)]
    min_disp = math.inf
    for level in range(1, radius + 1):
        imgs = img_levels[level - 1]
        pts = np.einsum("nij,j->ni", imgs, bp)
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        duals = np.linalg.inv(imgs).transpose(0, 2, 1)
        lns = np.einsum("nij,j->ni", duals, bl)
        lns /= np.linalg.norm(lns, axis=1)[:, None]
        disp = flag_displacement(pts, lns, bp, bl)
        min_disp = min(min_disp, float(disp.min()))
        hits = np.nonzero(disp <= 2.0 * nbhd)[0]
        strs = table.word_strings(level)
        returning.extend(strs[i] for i in hits)
        history.append((level, len(returning)))
    stabilized = len(history) >= 3 and history[-1][1] == history[-2][1] == history[-3][1]
    return RecurrenceReport(
        ball_radius=radius,
        neighborhood=nbhd,
        returning_words=tuple(returning),
        count_history=tuple(history),
        stabilized=stabilized,
        min_nonempty_displacement=min_disp,
        free_at_scale=min_disp > 1e-8,
    )


@dataclass(frozen=True)
class FiberProfile:
    crossings: int
    in_m_set: bool
    nontransversal: bool


def fiber_profile(target, model_l: CurveModel, model_lstar: CurveModel,
                  ztol: float = 1e-9) -> FiberProfile:
    """Transversal crossings of one projective line with the sampled point
    curve, or dually of one point's line pencil with the sampled line curve.

    ``in_m_set`` marks targets crossing exactly once.
    """
    if isinstance(target, ProjLine):
        arr, sigma_src = model_l.points, model_l
        rep = target.rep
    elif isinstance(target, ProjPoint):
        arr, sigma_src = model_lstar.lines, model_lstar
        rep = target.rep
    else:
        raise TypeError("target must be a ProjPoint or a ProjLine")
    if isinstance(target, ProjLine):
        sigma = sigma_src.segment_signs()
    else:
        nxt = np.roll(arr, -1, axis=0)
        sigma = np.sign(np.einsum("ij,ij->i", arr, nxt))
    c, tang, allzero = count_crossings(arr @ rep, sigma, ztol)
    nontrans = allzero or tang > 0
    return FiberProfile(
        crossings=0 if allzero else c,
        in_m_set=(not nontrans) and c == 1,
        nontransversal=nontrans,
    )


def omega0_chart(flag: Flag) -> tuple:
    """Affine coordinates (u, v) of the flag's point normalized to unit
    second coordinate; the diagonal flow acts by scalar multiplication."""
    p = flag.point.rep
    if abs(float(p[1])) < 1e-10:
        raise OnL0("point has no second-coordinate chart representative")
    return float(p[0] / p[1]), float(p[2] / p[1])
