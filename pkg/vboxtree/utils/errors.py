from typing import Optional


class VBoxTreeError(Exception):
    """Base class for every error raised by the package."""


class DimensionMismatchError(VBoxTreeError, ValueError):
    pass


class CapacityError(VBoxTreeError, ValueError):
    """Dimension too large for the 2^d fan-out we are willing to build."""


class EmptySiteSetError(VBoxTreeError, ValueError):
    pass


class DuplicateSiteError(VBoxTreeError, ValueError):
    pass


class UnsupportedDimensionError(VBoxTreeError, ValueError):
    pass


class IndexFormatError(VBoxTreeError, ValueError):
    pass


class PointsFileError(VBoxTreeError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
