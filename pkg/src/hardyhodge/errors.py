"""Exception hierarchy shared by all modules."""


class HardyHodgeError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(HardyHodgeError, ValueError):
    pass


class KindMismatch(HardyHodgeError, ValueError):
    pass


class DCViolation(HardyHodgeError, ValueError):
    """A field carries a nonzero mean where the active DC policy forbids it."""


class GridError(HardyHodgeError, ValueError):
    pass


class FieldFormatError(HardyHodgeError):
    """Base for HHF1 read failures."""


class MalformedHeader(FieldFormatError):
    pass


class ShapeOverflow(FieldFormatError):
    pass


class TruncatedPayload(FieldFormatError):
    pass


class OracleSizeError(HardyHodgeError, ValueError):
    pass


class ProbeError(HardyHodgeError, ValueError):
    """Evaluation point lies on (or too close to) the boundary hyperplane."""


class SlabError(HardyHodgeError, ValueError):
    pass
