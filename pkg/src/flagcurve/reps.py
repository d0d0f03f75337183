"""Representation constructors and the SL(2,R) flow algebra.

Four families, all sharing a Fuchsian seed:

- canonical: the block embedding of SL(2,R) fixing [e2] and the plane
  {second coordinate = 0};
- linear_u: the canonical images composed with the commuting diagonal
  flow, with exponent u(word);
- radial: generator images with an extra middle-row shear (mu, nu) per
  generator, validated against the surface relator;
- explicit: arbitrary per-generator SL(3,R) images, relator = +-identity.

Determinant-1 representatives are unique in odd dimension (no PGL sign
ambiguity), so evaluation is sign-deterministic by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotUnimodular, UnsupportedSpec
from .projective import GroupElement
from .surface import CohomologyClass, FuchsianSeed, Word, eval_u, standard_relator

VARIANTS = ("canonical", "linear_u", "radial", "explicit")


def rho0(m: np.ndarray) -> GroupElement:
    """Block embedding [[a,b],[c,d]] -> [[a,0,b],[0,1,0],[c,0,d]]."""
    m = np.asarray(m, dtype=float)
    d = float(np.linalg.det(m))
    if abs(d - 1.0) > 1e-10:
        raise NotUnimodular(f"2x2 determinant {d}")
    out = np.array(
        [
            [m[0, 0], 0.0, m[0, 1]],
            [0.0, 1.0, 0.0],
            [m[1, 0], 0.0, m[1, 1]],
        ]
    )
    out.flags.writeable = False
    return GroupElement(out)


def phi(t: float) -> GroupElement:
    """Diagonal flow diag(e^{t/3}, e^{-2t/3}, e^{t/3}); commutes with rho0."""
    a, b = math.exp(t / 3.0), math.exp(-2.0 * t / 3.0)
    out = np.diag([a, b, a])
    out.flags.writeable = False
    return GroupElement(out)


def sl2_flows(t: float, s: float):
    """The diagonal flow a^t and the two unipotent flows h^s at parameter s.

    Returns (a_t, h_plus, h_minus) as 2x2 arrays, satisfying
    h_plus(s) a(t) = a(t) h_plus(exp(-2t) s) and the mirror identity.
    """
    a_t = np.array([[math.exp(t), 0.0], [0.0, math.exp(-t)]])
    h_plus = np.array([[1.0, s], [0.0, 1.0]])
    h_minus = np.array([[1.0, 0.0], [s, 1.0]])
    return a_t, h_plus, h_minus


def radial_generator(m2: np.ndarray, u_val: float, mu: float, nu: float) -> np.ndarray:
    """One radial generator image from its 2x2 seed block and shear data."""
    a3 = math.exp(u_val / 3.0)
    q = math.exp(-2.0 * u_val / 3.0)
    return np.array(
        [
            [a3 * m2[0, 0], 0.0, a3 * m2[0, 1]],
            [mu, q, nu],
            [a3 * m2[1, 0], 0.0, a3 * m2[1, 1]],
        ]
    )


@dataclass(frozen=True)
class RepSpec:
    """Representation descriptor.  Immutable after validation."""

    variant: str
    seed: FuchsianSeed
    u: CohomologyClass | None = None
    mu: tuple | None = None  # per generator, radial only
    nu: tuple | None = None
    matrices: tuple | None = None  # per generator 3x3, explicit only

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant in ("linear_u", "radial") and self.u is None:
            object.__setattr__(self, "u", CohomologyClass.zero(self.seed.genus))
        if self.variant == "radial":
            if self.mu is None or self.nu is None:
                raise ValueError("radial spec requires mu and nu per generator")
            if len(self.mu) != 2 * self.seed.genus or len(self.nu) != 2 * self.seed.genus:
                raise ValueError("mu/nu length must match generator count")
        if self.variant == "explicit":
            if self.matrices is None or len(self.matrices) != 2 * self.seed.genus:
                raise ValueError("explicit spec requires one 3x3 matrix per generator")
        res = self.relator_residual()
        if res > 1e-8:
            raise ValueError(f"3x3 relator residual {res:.3e} > 1e-8")

    @property
    def genus(self) -> int:
        return self.seed.genus

    def generator_images(self) -> np.ndarray:
        """(2g, 3, 3) stack of generator images."""
        gens2 = self.seed.generators
        g = self.genus
        out = np.empty((2 * g, 3, 3))
        if self.variant == "canonical":
            for k in range(2 * g):
                out[k] = rho0(gens2[k]).mat
        elif self.variant == "linear_u":
            for k in range(2 * g):
                out[k] = phi(self.u.values[k]).mat @ rho0(gens2[k]).mat
        elif self.variant == "radial":
            for k in range(2 * g):
                out[k] = radial_generator(
                    gens2[k], self.u.values[k], self.mu[k], self.nu[k]
                )
        else:
            for k in range(2 * g):
                out[k] = self.matrices[k]
        return out

    def letter_images(self) -> np.ndarray:
        """(4g, 3, 3) stack: generator at 2k, inverse at 2k+1."""
        gens = self.generator_images()
        out = np.empty((4 * self.genus, 3, 3))
        for k in range(2 * self.genus):
            out[2 * k] = gens[k]
            inv = np.linalg.inv(gens[k])
            out[2 * k + 1] = inv / np.cbrt(np.linalg.det(inv))
        return out

    def relator_residual(self) -> float:
        letters = self.letter_images()
        m = np.eye(3)
        for l in standard_relator(self.genus).letters:
            m = m @ letters[l]
        if self.variant == "explicit":
            # identity in PGL: +-I for matrices
            return min(
                float(np.linalg.norm(m - np.eye(3))),
                float(np.linalg.norm(m + np.eye(3))),
            )
        return float(np.linalg.norm(m - np.eye(3)))

    def to_json_dict(self) -> dict:
        names = [None] * (2 * self.genus)
        from .surface import gen_name

        for k in range(2 * self.genus):
            names[k] = gen_name(k)
        d = {"variant": self.variant, "seed": self.seed.to_json_dict()}
        if self.u is not None:
            d["u"] = {names[k]: self.u.values[k] for k in range(2 * self.genus)}
        if self.variant == "radial":
            d["mu"] = {names[k]: self.mu[k] for k in range(2 * self.genus)}
            d["nu"] = {names[k]: self.nu[k] for k in range(2 * self.genus)}
        if self.variant == "explicit":
            d["matrices"] = {
                names[k]: list(np.asarray(self.matrices[k]).ravel())
                for k in range(2 * self.genus)
            }
        return d


def spec_from_json_dict(d: dict) -> RepSpec:
    """Build a RepSpec from its JSON form.

    The seed may be given explicitly ({"genus", "generators"}) or as
    {"genus": g} alone, which selects the standard 4g-gon seed.  A radial
    spec may give {"coboundary": {"m1":..., "m2":...}} instead of mu/nu.
    """
    from .surface import CohomologyClass, standard_fuchsian

    variant = d.get("variant")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    seed_d = d.get("seed")
    if seed_d is None:
        raise ValueError("missing field 'seed'")
    if "generators" in seed_d:
        seed = FuchsianSeed.from_json_dict(seed_d)
    else:
        seed = standard_fuchsian(int(seed_d["genus"]))
    genus = seed.genus
    u = CohomologyClass.from_dict(d.get("u", {}), genus) if d.get("u") or variant in (
        "linear_u",
        "radial",
    ) else None
    if variant == "canonical":
        return RepSpec("canonical", seed)
    if variant == "linear_u":
        return RepSpec("linear_u", seed, u=u)
    if variant == "radial":
        if "coboundary" in d:
            if "mu" in d or "nu" in d:
                raise ValueError("give either 'coboundary' or 'mu'/'nu', not both")
            cb = d["coboundary"]
            base = RepSpec("linear_u", seed, u=u)
            return coboundary_radial(base, float(cb["m1"]), float(cb["m2"]))
        mu_d, nu_d = d.get("mu"), d.get("nu")
        if mu_d is None or nu_d is None:
            raise ValueError("radial spec requires 'mu' and 'nu' (or 'coboundary')")
        mu = CohomologyClass.from_dict(mu_d, genus).values
        nu = CohomologyClass.from_dict(nu_d, genus).values
        return RepSpec("radial", seed, u=u, mu=mu, nu=nu)
    mats_d = d.get("matrices")
    if mats_d is None:
        raise ValueError("explicit spec requires 'matrices'")
    from .surface import gen_name

    mats = []
    for k in range(2 * genus):
        name = gen_name(k)
        if name not in mats_d:
            raise ValueError(f"missing matrix for generator {name}")
        m = np.array(mats_d[name], dtype=float).reshape(3, 3)
        m = m / np.cbrt(np.linalg.det(m))
        m.flags.writeable = False
        mats.append(m)
    return RepSpec("explicit", seed, matrices=tuple(mats))


def evaluate(spec: RepSpec, w: Word) -> GroupElement:
    """Image of a word: product of letter images, determinant renormalized
    every 16 multiplications to bound drift."""
    letters = spec.letter_images()
    m = np.eye(3)
    for i, l in enumerate(w.letters):
        m = m @ letters[l]
        if (i + 1) % 16 == 0:
            m = m / np.cbrt(np.linalg.det(m))
    m = m / np.cbrt(np.linalg.det(m))
    m.flags.writeable = False
    return GroupElement(m)


def coboundary_radial(spec: RepSpec, m1: float, m2: float) -> RepSpec:
    """Radial spec obtained by conjugating a linear_u spec with the unipotent
    whose middle row is (m1, 1, m2).

    The conjugated generators preserve [e2]; their invariant point curve is
    the shear image {z = m1*x + m2*y} of the canonical line z = 0.
    """
    if spec.variant != "linear_u":
        raise UnsupportedSpec("coboundary construction starts from a linear_u spec")
    g = spec.genus
    U = np.eye(3)
    U[1, 0], U[1, 2] = m1, m2
    Uinv = np.eye(3)
    Uinv[1, 0], Uinv[1, 2] = -m1, -m2
    mu, nu = [], []
    for k in range(2 * g):
        img = U @ phi(spec.u.values[k]).mat @ rho0(spec.seed.generators[k]).mat @ Uinv
        mu.append(float(img[1, 0]))
        nu.append(float(img[1, 2]))
    return RepSpec("radial", spec.seed, u=spec.u, mu=tuple(mu), nu=tuple(nu))


def phi_conjugate(spec: RepSpec, t: float) -> RepSpec:
    """Conjugate a radial spec by the diagonal flow at time t.

    Conjugation scales the shear data (mu, nu) by e^{-t} and leaves u and
    the seed unchanged; evaluation of the result equals
    phi(t) . evaluate(spec, .) . phi(-t).
    """
    if spec.variant != "radial":
        raise UnsupportedSpec("phi conjugation is defined for radial specs")
    f = math.exp(-t)
    return RepSpec(
        "radial",
        spec.seed,
        u=spec.u,
        mu=tuple(f * x for x in spec.mu),
        nu=tuple(f * x for x in spec.nu),
    )


def word_u(spec: RepSpec, w: Word) -> float:
    if spec.u is None:
        return 0.0
    return eval_u(spec.u, w)
