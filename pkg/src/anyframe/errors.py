"""Exception hierarchy for the frame synthesis engine."""


class FrameSynthError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(FrameSynthError):
    """An array or scalar argument violates a documented precondition."""


class InvalidConfigurationError(FrameSynthError):
    """A request or estimator configuration is inconsistent."""


class EstimatorError(FrameSynthError):
    """Flow estimation failed; carries pyramid level context in the message."""


class DegenerateFusionError(FrameSynthError):
    """Fusion denominator vanished at pixels not flagged unfillable."""

    def __init__(self, pixels):
        self.pixels = [tuple(int(v) for v in p) for p in pixels]
        shown = ", ".join(f"(y={y}, x={x})" for y, x in self.pixels[:8])
        more = "" if len(self.pixels) <= 8 else f" and {len(self.pixels) - 8} more"
        super().__init__(f"fusion denominator below threshold at {shown}{more}")


class DegenerateInputError(FrameSynthError):
    """An operation received input it cannot make progress on."""


class DatasetIoError(FrameSynthError):
    """Base class for file reading and writing failures."""


class MissingFileError(DatasetIoError):
    """A referenced file does not exist."""


class MalformedHeaderError(DatasetIoError):
    """A file is too short or its header bytes are not the expected layout."""


class UnsupportedImageError(DatasetIoError):
    """The image is a variant the codec deliberately rejects."""


class WrongMagicError(DatasetIoError):
    """A flow file does not start with the expected magic constant."""


class TruncatedFileError(DatasetIoError):
    """A file payload is shorter than its header promises."""
