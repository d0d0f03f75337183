"""Genus-g surface groups with a concrete Fuchsian embedding into SL(2,R).

Words are freely reduced sequences of letter indices.  Generators are
ordered a1, b1, ..., ag, bg; generator k contributes the two letters
2k (the generator) and 2k+1 (its inverse), so the inverse of a letter is
``letter ^ 1`` and shortlex order is (length, letter tuple) with letter
order a1 < a1^-1 < b1 < b1^-1 < a2 < ...

The standard seed comes from the regular hyperbolic 4g-gon with vertex
angle 2*pi/(4g), all vertices identified to a single point.  Side-pairing
translations are built in the disk model and conjugated to SL(2,R); the
pairing scheme is chosen so the product of commutators [a1,b1]...[ag,bg]
is the identity matrix (verified at build time).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import NotHyperbolic, NotUnimodular, UnsupportedGenus


def gen_name(k: int) -> str:
    return ("a" if k % 2 == 0 else "b") + str(k // 2 + 1)


def letter_name(letter: int) -> str:
    name = gen_name(letter // 2)
    return name.upper() if letter % 2 else name


def parse_letter(token: str, genus: int) -> int:
    inv = token[0].isupper()
    kind, idx = token[0].lower(), token[1:]
    if kind not in "ab" or not idx.isdigit():
        raise ValueError(f"bad letter {token!r}")
    j = int(idx) - 1
    if not 0 <= j < genus:
        raise ValueError(f"letter {token!r} out of range for genus {genus}")
    k = 2 * j + (0 if kind == "a" else 1)
    return 2 * k + (1 if inv else 0)


@dataclass(frozen=True)
class Word:
    """Freely reduced word, stored as a tuple of letter indices."""

    letters: tuple
    genus: int

    def __post_init__(self):
        for i in range(len(self.letters) - 1):
            if self.letters[i + 1] == self.letters[i] ^ 1:
                raise ValueError("word is not freely reduced")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return ".".join(letter_name(l) for l in self.letters)

    @staticmethod
    def parse(text: str, genus: int) -> "Word":
        if not text:
            return Word((), genus)
        return Word(tuple(parse_letter(t, genus) for t in text.split(".")), genus)

    def inverse(self) -> "Word":
        return Word(tuple(l ^ 1 for l in reversed(self.letters)), self.genus)

    def concat(self, other: "Word") -> "Word":
        """Concatenation with free reduction at the junction."""
        left = list(self.letters)
        right = list(other.letters)
        while left and right and right[0] == left[-1] ^ 1:
            left.pop()
            right.pop(0)
        return Word(tuple(left + right), self.genus)

    def is_cyclically_reduced(self) -> bool:
        ls = self.letters
        return len(ls) <= 1 or ls[0] != ls[-1] ^ 1

    def exponent_sums(self) -> np.ndarray:
        out = np.zeros(2 * self.genus, dtype=np.int64)
        for l in self.letters:
            out[l // 2] += -1 if l % 2 else 1
        return out


def standard_relator(genus: int) -> Word:
    letters = []
    for j in range(genus):
        a, b = 2 * (2 * j), 2 * (2 * j + 1)
        letters += [a, b, a ^ 1, b ^ 1]
    return Word(tuple(letters), genus)


@dataclass(frozen=True)
class Presentation:
    genus: int

    def __post_init__(self):
        if self.genus < 2:
            raise UnsupportedGenus(f"genus {self.genus} < 2")

    @property
    def generator_names(self):
        return tuple(gen_name(k) for k in range(2 * self.genus))

    @property
    def relator(self) -> Word:
        return standard_relator(self.genus)


@dataclass(frozen=True)
class CohomologyClass:
    """Morphism to the reals, given by its value on each generator."""

    values: tuple
    genus: int

    @staticmethod
    def zero(genus: int) -> "CohomologyClass":
        return CohomologyClass((0.0,) * (2 * genus), genus)

    @staticmethod
    def from_dict(d: dict, genus: int) -> "CohomologyClass":
        names = {gen_name(k): k for k in range(2 * genus)}
        vals = [0.0] * (2 * genus)
        for key, val in d.items():
            if key not in names:
                raise ValueError(f"unknown generator {key!r} for genus {genus}")
            vals[names[key]] = float(val)
        return CohomologyClass(tuple(vals), genus)

    def as_vector(self) -> np.ndarray:
        return np.array(self.values, dtype=float)


def eval_u(u: CohomologyClass, w: Word) -> float:
    """Signed sum of generator values along the word."""
    return float(w.exponent_sums() @ u.as_vector())


def translation_length(m: np.ndarray) -> float:
    """Hyperbolic translation length 2*log(spectral radius) of a 2x2 matrix."""
    tr = abs(float(np.trace(m)))
    if tr <= 2.0 + 1e-10:
        raise NotHyperbolic(f"|trace| = {tr} <= 2")
    return 2.0 * math.acosh(tr / 2.0)


def attractive_direction(m: np.ndarray) -> float:
    """Angle in [0, pi) of the attracting eigendirection of a hyperbolic 2x2 matrix."""
    tr = float(np.trace(m))
    if abs(tr) <= 2.0 + 1e-10:
        raise NotHyperbolic(f"|trace| = {abs(tr)} <= 2")
    lam = math.copysign(abs(tr) / 2.0 + math.sqrt(tr * tr / 4.0 - 1.0), tr)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    v1 = (b, lam - a)
    v2 = (lam - d, c)
    v = v1 if v1[0] ** 2 + v1[1] ** 2 >= v2[0] ** 2 + v2[1] ** 2 else v2
    return math.atan2(v[1], v[0]) % math.pi


# ---------------------------------------------------------------------------
# Standard Fuchsian seed from the regular 4g-gon
# ---------------------------------------------------------------------------

def _disk_translation(p: complex) -> np.ndarray:
    s = math.sqrt(1.0 - abs(p) ** 2)
    return np.array([[1.0, -p], [-p.conjugate(), 1.0]], dtype=complex) / s


def _disk_rotation(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(0.5j * theta), 0.0], [0.0, np.exp(-0.5j * theta)]], dtype=complex
    )


def _mobius(m: np.ndarray, z: complex) -> complex:
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def _disk_isometry(p, q, pp, qq) -> np.ndarray:
    """Unique orientation-preserving disk isometry with p -> pp, q -> qq."""
    tp, tpp = _disk_translation(p), _disk_translation(pp)
    theta = np.angle(_mobius(tpp, qq)) - np.angle(_mobius(tp, q))
    return np.linalg.inv(tpp) @ _disk_rotation(theta) @ tp


_CAYLEY = np.array([[1.0, -1j], [1.0, 1j]], dtype=complex)
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


def _to_sl2r(m: np.ndarray) -> np.ndarray:
    out = _CAYLEY_INV @ m @ _CAYLEY
    out = out / np.sqrt(np.linalg.det(out))
    if np.max(np.abs(out.imag)) > 1e-9:
        raise ArithmeticError("conjugated matrix is not real")
    out = out.real
    return out / math.sqrt(float(np.linalg.det(out)))


@dataclass(frozen=True)
class FuchsianSeed:
    """Per-generator SL(2,R) matrices satisfying the surface relator."""

    genus: int
    generators: tuple  # 2*genus read-only (2,2) arrays, order a1, b1, ..., ag, bg

    def __post_init__(self):
        if self.genus < 2:
            raise UnsupportedGenus(f"genus {self.genus} < 2")
        if len(self.generators) != 2 * self.genus:
            raise ValueError("wrong number of generator matrices")
        for m in self.generators:
            d = float(np.linalg.det(m))
            if abs(d - 1.0) > 1e-10:
                raise NotUnimodular(f"generator determinant {d}")
        res = self.relator_residual()
        if res > 1e-8:
            raise ValueError(f"relator residual {res:.3e} > 1e-8")
        mintr = self.short_word_min_trace()
        if mintr <= 2.0 + 1e-10:
            raise ValueError(
                f"non-hyperbolic short word: min |trace| = {mintr} over length <= 4"
            )

    def short_word_min_trace(self, max_length: int = 4) -> float:
        """Min |trace| over nonempty freely reduced words up to max_length."""
        letters = self.letter_matrices()
        k = len(letters)
        level_letters = np.arange(k, dtype=np.int8)
        level_mats = letters.copy()
        best = math.inf
        for length in range(1, max_length + 1):
            best = min(best, float(np.abs(
                np.trace(level_mats, axis1=1, axis2=2)).min()))
            if length == max_length:
                break
            n = len(level_letters)
            parent = np.repeat(np.arange(n), k)
            letts = np.tile(np.arange(k, dtype=np.int8), n)
            keep = letts != (level_letters[parent] ^ 1)
            parent, letts = parent[keep], letts[keep]
            level_mats = np.einsum("nij,njk->nik", level_mats[parent], letters[letts])
            level_letters = letts
        return best

    def relator_residual(self) -> float:
        m = np.eye(2)
        for j in range(self.genus):
            a, b = self.generators[2 * j], self.generators[2 * j + 1]
            m = m @ a @ b @ np.linalg.inv(a) @ np.linalg.inv(b)
        return min(
            float(np.linalg.norm(m - np.eye(2))), float(np.linalg.norm(m + np.eye(2)))
        )

    def letter_matrices(self) -> np.ndarray:
        """(4g, 2, 2) stack: generator at index 2k, its inverse at 2k+1."""
        out = np.empty((4 * self.genus, 2, 2))
        for k, m in enumerate(self.generators):
            out[2 * k] = m
            out[2 * k + 1] = np.linalg.inv(m)
        return out

    def image(self, w: Word) -> np.ndarray:
        letters = self.letter_matrices()
        m = np.eye(2)
        for l in w.letters:
            m = m @ letters[l]
        return m

    def to_json_dict(self) -> dict:
        return {
            "genus": self.genus,
            "generators": [list(np.asarray(m).ravel()) for m in self.generators],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "FuchsianSeed":
        genus = int(d["genus"])
        gens = []
        for row in d["generators"]:
            m = np.array(row, dtype=float).reshape(2, 2)
            m.flags.writeable = False
            gens.append(m)
        return FuchsianSeed(genus, tuple(gens))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @staticmethod
    def load(path) -> "FuchsianSeed":
        with open(path, encoding="utf-8") as f:
            return FuchsianSeed.from_json_dict(json.load(f))


def standard_fuchsian(genus: int) -> FuchsianSeed:
    """Side-pairing generators of the regular hyperbolic 4g-gon.

    Vertices sit at hyperbolic distance arccosh(cot^2(pi/4g)) from the
    center, giving vertex angle 2*pi/4g.  Edge 4j carries a_{j+1}, edge
    4j+1 carries b_{j+1}; the a-pairing maps edge 4j+2 reversed onto edge
    4j, and b is the inverse of the analogous map (that inversion is what
    makes the commutator relator hold, rather than [a, b^-1]).
    """
    if genus < 2:
        raise UnsupportedGenus(f"genus {genus} < 2")
    n = 4 * genus
    dist = math.acosh(1.0 / math.tan(math.pi / n) ** 2)
    radius = math.tanh(dist / 2.0)
    verts = [radius * np.exp(2j * math.pi * k / n) for k in range(n)]
    gens = []
    for j in range(genus):
        base = 4 * j
        a = _disk_isometry(
            verts[(base + 3) % n], verts[(base + 2) % n],
            verts[base], verts[(base + 1) % n],
        )
        b_pairing = _disk_isometry(
            verts[(base + 4) % n], verts[(base + 3) % n],
            verts[(base + 1) % n], verts[(base + 2) % n],
        )
        for m in (_to_sl2r(a), _to_sl2r(np.linalg.inv(b_pairing))):
            m.flags.writeable = False
            gens.append(m)
    return FuchsianSeed(genus, tuple(gens))


def enumerate_ball(seed: FuchsianSeed, radius: int) -> Iterator[tuple]:
    """Yield every freely reduced word of length <= radius with its SL(2,R)
    image, in shortlex order."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    genus = seed.genus
    letters = seed.letter_matrices()
    yield Word((), genus), np.eye(2)
    level = [((), np.eye(2))]
    for _ in range(radius):
        nxt = []
        for w, m in level:
            for l in range(4 * genus):
                if w and l == w[-1] ^ 1:
                    continue
                nxt.append((w + (l,), m @ letters[l]))
        for w, m in nxt:
            yield Word(w, genus), m
        level = nxt


def ball_count(genus: int, radius: int) -> int:
    """Closed-form number of freely reduced words of length <= radius."""
    k = 4 * genus
    if radius == 0:
        return 1
    return 1 + k * ((k - 1) ** radius - 1) // (k - 2)


def matrix_fingerprint(m: np.ndarray, resolution: float = 1e-7) -> tuple:
    """Quantized key of a 2x2 matrix up to sign, for optional element dedup."""
    flat = np.asarray(m).ravel()
    for x in flat:
        if x != 0.0:
            if x < 0.0:
                flat = -flat
            break
    return tuple(int(round(x / resolution)) for x in flat)
