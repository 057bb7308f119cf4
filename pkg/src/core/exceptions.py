"""Error types raised by the curve services.

Controllers translate these into exit codes; services never catch them.
"""

from typing import Optional


class CurveError(Exception):
    """Base class for every domain error of the package"""


class DegenerateFrame(CurveError):
    """A frame vector collapsed during orthonormalization"""


class DomainMismatch(CurveError):
    """Fields or evaluation points do not share the required domain"""


class WrongApparatusKind(CurveError):
    """A rearrangement was asked for the wrong kind of apparatus"""


class UnliftablePath(CurveError):
    """A Bishop development has no continuous polar form on the grid"""


class VanishingLancret(CurveError):
    """The Lancret curvature vanishes and no polar form was supplied"""


class GridTooSmall(CurveError):
    """Too few nodes for a finite-difference estimate"""


class InvalidSlope(CurveError):
    """Slope angle outside the open interval (0, pi/2)"""


class ZeroSlopeParameter(CurveError):
    """The slant-helix parameter m = cot(theta) is zero"""


class EmptyDomain(CurveError):
    """No admissible interval contains the start of the domain"""


class DegenerateFit(CurveError):
    """The quadric design matrix is rank deficient"""


class NotClosed(CurveError):
    """An operation that needs a closed curve got an open one"""


class Inconclusive(CurveError):
    """Too few informative nodes to decide a classification"""


class GridMismatch(CurveError):
    """A candidate period does not fit the sampled domain"""


class SpecError(CurveError):
    """Malformed input document; carries the offending field path"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
