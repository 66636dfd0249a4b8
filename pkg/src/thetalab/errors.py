"""Exception hierarchy shared by every module of the package."""


class ThetaLabError(Exception):
    """Base class for all errors raised by thetalab."""


# theta engine
class NonPositiveDefinite(ThetaLabError):
    pass


class RadiusExceeded(ThetaLabError):
    pass


class NotInLattice(ThetaLabError):
    pass


# abelian models
class NotDiagonal(ThetaLabError):
    pass


class BlockNotSplit(ThetaLabError):
    pass


class NotDivisorChain(ThetaLabError):
    pass


# canonical map
class NoRootFound(ThetaLabError):
    pass


class AllCoordinatesVanish(ThetaLabError):
    pass


class GradientVanishes(ThetaLabError):
    pass


class CensusUnstable(ThetaLabError):
    pass


class DimensionMismatch(ThetaLabError):
    pass


# legendre / symbolic
class PoleAtZ(ThetaLabError):
    pass


class CalibrationFailed(ThetaLabError):
    pass


class BadColumnList(ThetaLabError):
    pass


class IdentityFailed(ThetaLabError):
    """A claimed polynomial identity does not hold; carries the residual."""

    def __init__(self, name, residual):
        super().__init__(f"identity {name!r} failed, residual = {residual}")
        self.name = name
        self.residual = residual


class AlignmentFailed(ThetaLabError):
    pass


# bidouble model
class ZeroVector(ThetaLabError):
    pass


class CertificateFailed(ThetaLabError):
    def __init__(self, section, element):
        super().__init__(f"section {section} not invariant under {element}")
        self.section = section
        self.element = element


# cli
class ConfigInvalid(ThetaLabError):
    pass
