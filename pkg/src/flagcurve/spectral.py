"""Eigenstructure of 3x3 unimodular matrices.

Eigenvalues come from the characteristic cubic solved in trigonometric
form with a Newton polish; eigenvectors from cross products of rows of
g - lambda*I (the rank-2 null-space formula), with an SVD null-vector
fallback for (near-)repeated eigenvalues.  The Cartan/singular-value
decomposition uses one-sided Jacobi rotations.  Everything is
3x3-specialized, deterministic, and free of iteration-order ambiguity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ComplexSpectrum, NotFixed, NotLoxodromic
from .projective import Flag, GroupElement, ProjPoint, canonicalize, join

# Relative modulus gap below which eigenvalue ordering is unreliable.
GAP_TOL = 1e-8


def char_coeffs(m: np.ndarray):
    """Coefficients (c2, c1, c0) of det(x*I - m) = x^3 - c2 x^2 + c1 x - c0."""
    c2 = float(np.trace(m))
    c1 = 0.5 * (c2 * c2 - float(np.trace(m @ m)))
    c0 = float(np.linalg.det(m))
    return c2, c1, c0


def _cubic_roots_real(c2: float, c1: float, c0: float):
    """All-real roots of x^3 - c2 x^2 + c1 x - c0, or None on a complex pair."""
    p = c1 - c2 * c2 / 3.0
    q = -2.0 * c2 ** 3 / 27.0 + c2 * c1 / 3.0 - c0
    scale = max(1.0, abs(c2), math.sqrt(abs(c1)), abs(c0) ** (1.0 / 3.0))
    if p > 1e-12 * scale * scale:
        return None  # strictly increasing cubic: one real root only
    u = math.sqrt(max(0.0, -p) / 3.0)
    if u ** 3 < 1e-300:
        roots = [c2 / 3.0] * 3  # triple root
    else:
        r = -q / (2.0 * u ** 3)
        if abs(r) > 1.0 + 1e-9:
            return None
        phi = math.acos(min(1.0, max(-1.0, r))) / 3.0
        roots = [
            2.0 * u * math.cos(phi - 2.0 * math.pi * k / 3.0) + c2 / 3.0
            for k in range(3)
        ]
    # Newton polish on the original cubic.
    out = []
    for x in roots:
        for _ in range(2):
            f = ((x - c2) * x + c1) * x - c0
            fp = (3.0 * x - 2.0 * c2) * x + c1
            if fp != 0.0:
                x -= f / fp
        out.append(x)
    return sorted(out, key=abs, reverse=True)


def _null_vector(m: np.ndarray) -> np.ndarray:
    """Unit kernel vector of a (near-)rank-2 matrix."""
    crosses = np.stack(
        [
            np.cross(m[0], m[1]),
            np.cross(m[0], m[2]),
            np.cross(m[1], m[2]),
        ]
    )
    norms = np.linalg.norm(crosses, axis=1)
    best = int(np.argmax(norms))
    if norms[best] > 1e-12 * max(1.0, float(np.abs(m).max()) ** 2):
        return crosses[best] / norms[best]
    # Repeated eigenvalue: fall back to the smallest right singular vector.
    _, _, vt = np.linalg.svd(m)
    return vt[-1]


@dataclass(frozen=True)
class EigenTriple:
    """Real eigenvalues sorted by decreasing modulus, with unit eigenvectors."""

    values: tuple
    vectors: tuple  # ProjPoint triple
    near_degenerate: bool

    def modulus_gaps(self):
        a1, a2, a3 = (abs(v) for v in self.values)
        return a1 / a2 - 1.0, a2 / a3 - 1.0


def eigen3(g: GroupElement) -> EigenTriple:
    """Full real eigendecomposition; raises ComplexSpectrum otherwise."""
    m = g.mat
    c2, c1, c0 = char_coeffs(m)
    roots = _cubic_roots_real(c2, c1, c0)
    if roots is None:
        raise ComplexSpectrum("matrix has a complex eigenvalue pair")
    vecs = []
    for lam in roots:
        v = _null_vector(m - lam * np.eye(3))
        res = np.linalg.norm(m @ v - lam * v)
        if res > 1e-10:
            # One inverse-iteration step with a slightly shifted solve.
            shift = lam * (1.0 + 1e-13) + math.copysign(1e-300, lam)
            try:
                w = np.linalg.solve(m - shift * np.eye(3), v)
                w /= np.linalg.norm(w)
                if np.linalg.norm(m @ w - lam * w) < res:
                    v = w
            except np.linalg.LinAlgError:
                pass
        vecs.append(ProjPoint.of(v))
    a = [abs(r) for r in roots]
    near = a[0] / a[1] < 1.0 + GAP_TOL or a[1] / a[2] < 1.0 + GAP_TOL
    return EigenTriple(tuple(roots), tuple(vecs), near)


def is_loxodromic(g: GroupElement) -> bool:
    """Three real eigenvalues of pairwise distinct modulus."""
    try:
        t = eigen3(g)
    except ComplexSpectrum:
        return False
    return not t.near_degenerate


def attractive_flag(g: GroupElement) -> Flag:
    """Attracting fixed flag of a loxodromic matrix: top eigenline together
    with the plane spanned by the top two eigenlines."""
    try:
        t = eigen3(g)
    except ComplexSpectrum as e:
        raise NotLoxodromic(str(e)) from e
    if t.near_degenerate:
        raise NotLoxodromic("eigenvalue moduli not separated")
    return Flag(t.vectors[0], join(t.vectors[0], t.vectors[1]))


def repulsive_flag(g: GroupElement) -> Flag:
    try:
        t = eigen3(g)
    except ComplexSpectrum as e:
        raise NotLoxodromic(str(e)) from e
    if t.near_degenerate:
        raise NotLoxodromic("eigenvalue moduli not separated")
    return Flag(t.vectors[2], join(t.vectors[2], t.vectors[1]))


@dataclass(frozen=True)
class CartanTriple:
    """g = k diag(a1, a2, a3) l^-1 with k, l orthogonal, a1 >= a2 >= a3 > 0."""

    k: np.ndarray
    diag: tuple
    l: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.k @ np.diag(self.diag) @ self.l.T


def cartan(g: GroupElement) -> CartanTriple:
    """Singular value decomposition by one-sided Jacobi rotations."""
    m = np.array(g.mat, dtype=float)
    v = np.eye(3)
    for _ in range(60):
        off = 0.0
        for i, j in ((0, 1), (0, 2), (1, 2)):
            alpha = float(m[:, i] @ m[:, i])
            beta = float(m[:, j] @ m[:, j])
            gamma = float(m[:, i] @ m[:, j])
            off = max(off, abs(gamma) / math.sqrt(alpha * beta))
            if gamma == 0.0:
                continue
            theta = 0.5 * math.atan2(2.0 * gamma, alpha - beta)
            c, s = math.cos(theta), math.sin(theta)
            mi, mj = m[:, i].copy(), m[:, j].copy()
            m[:, i], m[:, j] = c * mi + s * mj, -s * mi + c * mj
            vi, vj = v[:, i].copy(), v[:, j].copy()
            v[:, i], v[:, j] = c * vi + s * vj, -s * vi + c * vj
        if off < 1e-15:
            break
    sigma = np.linalg.norm(m, axis=0)
    k = m / sigma
    order = np.argsort(-sigma, kind="stable")
    sigma, k, v = sigma[order], k[:, order], v[:, order]
    k.flags.writeable = False
    v.flags.writeable = False
    return CartanTriple(k, tuple(float(s) for s in sigma), v)


def saddle_at_e2(g: GroupElement, fix_tol: float = 1e-8) -> bool:
    """Whether the eigenvalue at [e2] is strictly the middle one in modulus."""
    col = g.mat[:, 1]
    n = float(np.linalg.norm(col))
    if math.acos(min(1.0, abs(float(col[1])) / n)) > fix_tol:
        raise NotFixed("[e2] is not fixed")
    mid = float(col[1])
    try:
        t = eigen3(g)
    except ComplexSpectrum:
        return False  # complex pair has equal moduli; no strict middle
    a = [abs(x) for x in t.values]
    i = int(np.argmin([abs(x - mid) for x in t.values]))
    if i != 1:
        return False
    return a[0] / a[1] > 1.0 + GAP_TOL and a[1] / a[2] > 1.0 + GAP_TOL


# ---------------------------------------------------------------------------
# Batched versions for ball pipelines
# ---------------------------------------------------------------------------

def batch_eigvals3(mats: np.ndarray):
    """Eigenvalues of a (n,3,3) stack, sorted by decreasing modulus.

    Returns (vals (n,3), real_mask (n,)); rows with a complex pair hold NaN.
    """
    n = len(mats)
    c2 = np.trace(mats, axis1=1, axis2=2)
    m2 = np.einsum("nij,njk->nik", mats, mats)
    c1 = 0.5 * (c2 * c2 - np.trace(m2, axis1=1, axis2=2))
    c0 = np.linalg.det(mats)
    p = c1 - c2 * c2 / 3.0
    q = -2.0 * c2 ** 3 / 27.0 + c2 * c1 / 3.0 - c0
    scale = np.maximum.reduce(
        [np.ones(n), np.abs(c2), np.sqrt(np.abs(c1)), np.abs(c0) ** (1.0 / 3.0)]
    )
    real = p <= 1e-12 * scale * scale
    u = np.sqrt(np.maximum(0.0, -p) / 3.0)
    tiny = u ** 3 < 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(tiny, 0.0, -q / np.where(tiny, 1.0, 2.0 * u ** 3))
    real &= np.abs(r) <= 1.0 + 1e-9
    phi = np.arccos(np.clip(r, -1.0, 1.0)) / 3.0
    ks = np.arange(3.0)
    vals = 2.0 * u[:, None] * np.cos(phi[:, None] - 2.0 * np.pi * ks / 3.0)
    vals += (c2 / 3.0)[:, None]
    vals[tiny] = (c2[tiny] / 3.0)[:, None]
    for _ in range(2):  # Newton polish, vectorized
        f = ((vals - c2[:, None]) * vals + c1[:, None]) * vals - c0[:, None]
        fp = (3.0 * vals - 2.0 * c2[:, None]) * vals + c1[:, None]
        step = np.where(fp != 0.0, f / np.where(fp != 0.0, fp, 1.0), 0.0)
        vals -= step
    order = np.argsort(-np.abs(vals), axis=1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=1)
    vals[~real] = np.nan
    return vals, real


def batch_eigvec(mats: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """Unit eigenvectors for one eigenvalue per matrix, via row cross products."""
    shifted = mats - lams[:, None, None] * np.eye(3)
    c01 = np.cross(shifted[:, 0], shifted[:, 1])
    c02 = np.cross(shifted[:, 0], shifted[:, 2])
    c12 = np.cross(shifted[:, 1], shifted[:, 2])
    stack = np.stack([c01, c02, c12], axis=1)
    norms = np.linalg.norm(stack, axis=2)
    best = np.argmax(norms, axis=1)
    v = stack[np.arange(len(mats)), best]
    nv = np.linalg.norm(v, axis=1)
    bad = nv < 1e-300
    if np.any(bad):
        v[bad] = np.array([1.0, 0.0, 0.0])
        nv[bad] = 1.0
    return v / nv[:, None]


def batch_modulus_gaps(vals: np.ndarray):
    """Relative modulus gaps (top/mid - 1, mid/bot - 1) per row."""
    a = np.abs(vals)
    with np.errstate(divide="ignore", invalid="ignore"):
        return a[:, 0] / a[:, 1] - 1.0, a[:, 1] / a[:, 2] - 1.0


def canonicalize_rows(arr: np.ndarray) -> np.ndarray:
    """Row-wise canonicalization: unit norm, first nonzero coordinate positive."""
    out = arr / np.linalg.norm(arr, axis=1)[:, None]
    sign = np.zeros(len(out))
    for col in range(out.shape[1]):
        undecided = sign == 0.0
        if not np.any(undecided):
            break
        sign[undecided] = np.sign(out[undecided, col])
    out *= np.where(sign == 0.0, 1.0, sign)[:, None]
    return out
