"""Exception types raised across the toolkit."""


class HV3DError(Exception):
    """Base class for every error raised by hv3d."""


class MissingFile(HV3DError, FileNotFoundError):
    pass


class TruncatedFrame(HV3DError, ValueError):
    """File size is not a positive multiple of the frame size."""


class BadGeometry(HV3DError, ValueError):
    pass


class DimensionMismatch(HV3DError, ValueError):
    pass


class PlaneTooSmall(HV3DError, ValueError):
    pass


class DegenerateWeights(HV3DError, ValueError):
    pass


class RankDeficient(HV3DError, ValueError):
    pass


class TooFewRows(HV3DError, ValueError):
    pass


class LengthMismatch(HV3DError, ValueError):
    pass


class ZeroVariance(HV3DError, ValueError):
    pass


class UnknownKind(HV3DError, ValueError):
    pass


class NonConvergence(UserWarning):
    """Issued when an iterative fit stops at its iteration cap."""
