"""Exception types raised across the package.

Every error carries a stable ``code`` so the command line front-end can
report a one-line machine-readable reason.
"""

from __future__ import annotations


class RankSpectraError(ValueError):
    code = "RankSpectraError"


class NotPositiveDefinite(RankSpectraError):
    code = "NotPositiveDefinite"


class InvalidRho(RankSpectraError):
    code = "InvalidRho"


class NonUnitDiagonal(RankSpectraError):
    code = "NonUnitDiagonal"


class EntryOutOfRange(RankSpectraError):
    code = "EntryOutOfRange"


class TiesDetected(RankSpectraError):
    code = "TiesDetected"


class ZeroDifference(RankSpectraError):
    code = "ZeroDifference"


class ZeroVariance(RankSpectraError):
    code = "ZeroVariance"


class DimensionMismatch(RankSpectraError):
    code = "DimensionMismatch"


class NotSymmetric(RankSpectraError):
    code = "NotSymmetric"


class NoConvergence(RankSpectraError, RuntimeError):
    code = "NoConvergence"


class WrongHalfPlane(RankSpectraError, RuntimeError):
    code = "WrongHalfPlane"


class NotACdf(RankSpectraError):
    code = "NotACdf"


class InvalidAspect(RankSpectraError):
    code = "InvalidAspect"


class NormalizationFailure(RankSpectraError, RuntimeError):
    code = "NormalizationFailure"


class UnsupportedLaw(RankSpectraError):
    code = "UnsupportedLaw"


class ParseError(RankSpectraError):
    code = "ParseError"
