"""Exception hierarchy shared by all nilmin modules."""


class NilminError(Exception):
    """Base class for all errors raised by this package."""


class NullDivisor(NilminError):
    """A paracomplex number with zero squared modulus has no inverse."""


class LexError(NilminError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class ParseError(NilminError):
    def __init__(self, message, position, expected=None):
        super().__init__(f"{message} (at offset {position})")
        self.position = position
        self.expected = expected


class EvalError(NilminError):
    """Expression evaluation failed; wraps the offending AST node position."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class VerticalPoint(NilminError):
    """The Gauss map hits |g|^2 = -1, where the construction is undefined."""


class ProjectionPole(NilminError):
    """Stereographic projection from the pole point is undefined."""


class GaussSingular(NilminError):
    """|g|^2 = 1: the Lorentzian unit normal in Nil_3 blows up."""


class FrameDegenerate(NilminError):
    """The Riemannian normal direction degenerates (zero radicand)."""


class NonHarmonicInput(NilminError):
    """Input Gauss map fails the harmonic equation beyond tolerance."""


class SingularNode(NilminError):
    """Curvature requested at a node on the singular set."""


class WrongStratum(NilminError):
    """A stratum-specific test was applied to a point of the wrong stratum."""


class DegenerateOnCurve(NilminError):
    """Non-degeneracy failed in the middle of a singular curve."""


class LostCurve(NilminError):
    """Curve continuation failed to re-acquire the level set."""


class TooCoarse(NilminError):
    """Finite-difference stencils of different orders disagree."""


class BadInitialFrame(NilminError):
    """Initial null frame violates the Frenet frame constraints."""


class PoleInCurve(NilminError):
    """The singular-parameter curve t(s) leaves the chart (B_3 = 0)."""


class NonClosedForm(NilminError):
    """Loop integral of a supposedly closed 1-form exceeds tolerance."""


class ConfigError(NilminError):
    def __init__(self, message, pointer=""):
        super().__init__(f"{message} (at {pointer or '/'})")
        self.pointer = pointer


class IoError(NilminError):
    """File output failed."""
