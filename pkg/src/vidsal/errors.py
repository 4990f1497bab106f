"""Exception hierarchy shared by every stage of the toolkit."""


class SaliencyError(Exception):
    """Base class for all toolkit errors."""


class AllZeroMap(SaliencyError, ValueError):
    """A map with no positive mass was given where a distribution is needed."""


class ZeroEntropyDenominator(SaliencyError, ValueError):
    pass


class DegenerateScores(SaliencyError, ValueError):
    pass


class ZeroVariance(SaliencyError, ValueError):
    pass


class DimensionMismatch(SaliencyError, ValueError):
    pass


class FrameTooSmall(SaliencyError, ValueError):
    pass


class TooManyPaths(SaliencyError, ValueError):
    pass


class NoFixations(SaliencyError, ValueError):
    pass


class EmptyPool(SaliencyError, ValueError):
    pass


class EmptyList(SaliencyError, ValueError):
    pass


class ParseError(SaliencyError, ValueError):
    """Malformed input record; ``line`` is 1-based."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingHeader(ParseError):
    pass


class ManifestInvalid(SaliencyError, ValueError):
    pass


class FrameDecodeError(SaliencyError, IOError):
    def __init__(self, path, reason=""):
        self.path = str(path)
        msg = f"cannot use frame {self.path}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class StageError(SaliencyError, RuntimeError):
    """Wraps a failure inside a pipeline stage so the stage name is reported."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
