"""Exception hierarchy shared by every layer of the package."""


class TldaError(Exception):
    """Base class for all errors raised by ``tlda``."""


class ModeIndexError(TldaError, IndexError):
    pass


class DimensionError(TldaError, ValueError):
    pass


class PaddingRequiredError(TldaError, ValueError):
    pass


class NonRealResultError(TldaError, ArithmeticError):
    """Inverse transform left an imaginary residual above tolerance."""


class SliceError(TldaError, ArithmeticError):
    """Failure tied to one transform-domain frontal slice.

    ``index`` is the zero-based multi-index ``(i3, ..., in)`` of the slice;
    the message shows it 1-based and colon-joined, as in the condition report.
    """

    def __init__(self, message, index=()):
        self.index = tuple(int(i) for i in index)
        if self.index:
            message = f"{message} (slice {':'.join(str(i + 1) for i in self.index)})"
        super().__init__(message)


class SingularSliceError(SliceError):
    pass


class NonDiagonalizableError(SliceError):
    pass


class ParameterError(TldaError, ValueError):
    pass


class EmptyClassError(TldaError, ValueError):
    pass


class ZeroSpectrumError(TldaError, ArithmeticError):
    pass


class StratificationError(TldaError, ValueError):
    pass


class FormatError(TldaError, ValueError):
    """Malformed TNSR file. ``offset`` is the byte position of the problem."""

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} at byte offset {offset}"
        super().__init__(message)


class ManifestError(TldaError, ValueError):
    pass
