"""Exception types shared across the package.

Every error raised by the library derives from FlagCurveError so the CLI
can map failures onto exit codes in one place.
"""


class FlagCurveError(Exception):
    """Base class for all library errors."""


class DegenerateJoin(FlagCurveError):
    """Join/meet of projectively equal elements."""


class SingularMatrix(FlagCurveError):
    """Matrix with |det| below the invertibility floor."""


class NotInY(FlagCurveError):
    """Flag pair violates the transversality condition (cross-pairing zero)."""


class UnsupportedGenus(FlagCurveError):
    """Surface genus below 2."""


class NotHyperbolic(FlagCurveError):
    """2x2 matrix with |trace| <= 2; no translation length."""


class NotUnimodular(FlagCurveError):
    """Input matrix determinant too far from 1."""


class ComplexSpectrum(FlagCurveError):
    """3x3 matrix with a complex-conjugate eigenvalue pair."""


class NotLoxodromic(FlagCurveError):
    """Matrix without three eigenvalues of pairwise distinct modulus."""


class NotFixed(FlagCurveError):
    """Matrix does not fix the required projective point."""


class InsufficientSamples(FlagCurveError):
    """Curve model has too few samples for the requested analysis."""


class NotRadial(FlagCurveError):
    """Operation requires a radial representation spec."""


class PolarDegenerate(FlagCurveError):
    """Curve sample too close to the polar point [e2] for chart coordinates."""


class NonLoxodromicEncountered(FlagCurveError):
    """A ball element failed the loxodromy requirement; carries the witness word."""

    def __init__(self, word: str):
        super().__init__(f"non-loxodromic ball element: {word!r}")
        self.word = word


class UnsupportedSpec(FlagCurveError):
    """Representation variant not supported by this operation."""


class BaseNotInterior(FlagCurveError):
    """Recurrence base flag is not inside the invariant domain with margin."""


class OnL0(FlagCurveError):
    """Point lies on the canonical invariant line; affine chart undefined."""


class ConfigError(FlagCurveError):
    """Malformed or invalid run configuration."""
