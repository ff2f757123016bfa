"""Exception types raised by subtok."""


class SubtokError(Exception):
    """Base class for all subtok errors."""


class NotHangulSyllable(SubtokError, ValueError):
    pass


class MarkerCollision(SubtokError, ValueError):
    """Input already contains a character or suffix reserved as a marker."""


class SegmenterFailure(SubtokError, RuntimeError):
    """An external segmenter died, timed out or broke the line protocol."""


class FormatError(SubtokError, ValueError):
    """A merge-table (or other) file is malformed.

    ``lineno`` is 1-based and ``None`` when the problem is not tied to a line.
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class LengthMismatch(SubtokError, ValueError):
    pass


class EmptyCorpus(SubtokError, ValueError):
    pass


class BadSpec(SubtokError, ValueError):
    """A corpus split specification cannot be satisfied."""


class PipelineError(SubtokError):
    """Failure inside a pipeline stage; ``stage`` names the stage."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")
