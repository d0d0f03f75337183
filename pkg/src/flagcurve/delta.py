"""Height-profile fit of the invariant point curve of a radial spec.

For a radial representation the invariant point curve is a graph
z = h(x, y) over the plane directions, with h homogeneous of degree one
and odd.  The fitted profile delta is the NEGATED graph, so that the
shear (x, y, z) -> (x, y, z + delta(x, y)) carries the sampled curve onto
the canonical line z = 0.

Coordinates: a point representative (p0, p1, p2) is read as x = p0,
z = p1 (the fixed-point coordinate), y = p2.

The profile is stored on a dense angular grid over [0, 2*pi) and
evaluated with linear interpolation; grid nodes are filled from the
samples by 4-point Lagrange interpolation after thinning clusters, which
keeps the fill error far below the grid-interpolation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import CurveModel
from .errors import NotRadial, PolarDegenerate
from .reps import RepSpec

GRID_SIZE = 4096
_THIN_SPACING = 1e-3


@dataclass(frozen=True)
class DeltaModel:
    """Degree-one homogeneous odd profile on the plane of (x, y) directions."""

    grid: np.ndarray  # node values at angles 2*pi*k/len(grid)

    def profile(self, angles) -> np.ndarray:
        """Linear interpolation of the stored profile at given angles."""
        g = len(self.grid)
        pos = np.asarray(angles, dtype=float) % (2.0 * math.pi) / (2.0 * math.pi) * g
        i0 = np.floor(pos).astype(int) % g
        frac = pos - np.floor(pos)
        i1 = (i0 + 1) % g
        return (1.0 - frac) * self.grid[i0] + frac * self.grid[i1]

    def __call__(self, x, y) -> np.ndarray:
        """Homogeneous evaluation: delta(r * d) = r * delta(d)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.hypot(x, y)
        return r * self.profile(np.arctan2(y, x))


@dataclass(frozen=True)
class DeltaFit:
    model: DeltaModel
    cocycle_residual: float
    taus: tuple  # per generator (tau1, tau2)


def _lagrange_fill(support_angles: np.ndarray, support_values: np.ndarray,
                   grid_size: int) -> np.ndarray:
    """Fill grid nodes by cubic Lagrange through the 4 nearest support nodes.

    Support is cyclic over [0, 2*pi); clusters are thinned first so node
    spacing is bounded below and the Lagrange weights stay well
    conditioned.  Thinning keeps exact values, it does not average.
    """
    order = np.argsort(support_angles)
    ang, val = support_angles[order], support_values[order]
    keep = [0]
    for i in range(1, len(ang)):
        if ang[i] - ang[keep[-1]] >= _THIN_SPACING:
            keep.append(i)
    if (2.0 * math.pi - ang[keep[-1]]) + ang[keep[0]] < _THIN_SPACING and len(keep) > 4:
        keep.pop()
    ang, val = ang[keep], val[keep]
    m = len(ang)
    if m < 8:
        raise PolarDegenerate("too few distinct directions to fit a profile")
    nodes = np.arange(grid_size) * (2.0 * math.pi / grid_size)
    pos = np.searchsorted(ang, nodes)
    # indices of the 4 cyclic neighbors: two below, two above
    idx = (pos[:, None] + np.array([-2, -1, 0, 1])) % m
    theta = ang[idx]
    # unwrap the neighborhood around each node
    theta += 2.0 * math.pi * np.round((nodes[:, None] - theta) / (2.0 * math.pi))
    fv = val[idx]
    out = np.zeros(grid_size)
    for j in range(4):
        w = np.ones(grid_size)
        for k in range(4):
            if k == j:
                continue
            w *= (nodes - theta[:, k]) / (theta[:, j] - theta[:, k])
        out += w * fv[:, j]
    return out


def fit_delta(spec: RepSpec, model: CurveModel,
              grid_size: int = GRID_SIZE) -> DeltaFit:
    """Fit the profile from curve samples and verify the shear cocycle.

    A linear_u spec is accepted as the zero-shear radial case.  The
    cocycle identity checked is, per generator g with data (u, mu, nu):

        delta(lambda_g (x, y)) = delta(x, y) + tau1 x + tau2 y,
        lambda_g = e^u * (seed block),  tau_i = -e^{2u/3} * (mu, nu),

    evaluated on unit (x, y) with the mapped delta value read off the
    exactly mapped sample (the mapped point lies on the invariant curve),
    so the residual is free of interpolation error.
    """
    if spec.variant not in ("radial", "linear_u"):
        raise NotRadial(f"variant {spec.variant!r} has no shear profile")
    if len(model) < 64:
        from .errors import InsufficientSamples

        raise InsufficientSamples(f"{len(model)} samples < 64")
    pts = model.points
    x, z, y = pts[:, 0], pts[:, 1], pts[:, 2]
    plane = np.hypot(x, y)
    if plane.min() < 1e-8:
        raise PolarDegenerate("sample too close to the fixed point [e2]")
    xs, ys, zs = x / plane, y / plane, z / plane
    vals = -zs
    ang = np.arctan2(ys, xs) % (2.0 * math.pi)
    support_ang = np.concatenate([ang, (ang + math.pi) % (2.0 * math.pi)])
    support_val = np.concatenate([vals, -vals])
    grid = _lagrange_fill(support_ang, support_val, grid_size)
    dm = DeltaModel(grid)

    genus = spec.genus
    if spec.variant == "linear_u":
        mu = nu = (0.0,) * (2 * genus)
    else:
        mu, nu = spec.mu, spec.nu
    uvals = spec.u.values if spec.u is not None else (0.0,) * (2 * genus)
    gen_imgs = spec.generator_images()
    unit = np.stack([xs, zs, ys], axis=1)
    residual = 0.0
    taus = []
    for k in range(2 * genus):
        e23 = math.exp(2.0 * uvals[k] / 3.0)
        tau1, tau2 = -e23 * mu[k], -e23 * nu[k]
        taus.append((tau1, tau2))
        mapped = unit @ gen_imgs[k].T
        lhs = -e23 * mapped[:, 1]  # delta at the mapped direction, homogeneous
        rhs = vals + tau1 * xs + tau2 * ys
        residual = max(residual, float(np.abs(lhs - rhs).max()))
    return DeltaFit(dm, residual, tuple(taus))


def pushforward_deviation(model: CurveModel, fit: DeltaFit) -> float:
    """Max angular distance to the canonical line z = 0 after applying the
    shear (x, y, z) -> (x, y, z + delta(x, y)) to the samples."""
    pts = model.points
    z_new = pts[:, 1] + fit.model(pts[:, 0], pts[:, 2])
    sheared = np.stack([pts[:, 0], z_new, pts[:, 2]], axis=1)
    norms = np.linalg.norm(sheared, axis=1)
    return float(np.arcsin(np.abs(z_new) / norms).max())
