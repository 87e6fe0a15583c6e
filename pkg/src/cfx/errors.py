"""Exception types shared across the toolkit."""


class CfxError(Exception):
    """Base class for data and contract violations raised by this package."""


class DataFormatError(CfxError):
    """A file being ingested does not satisfy its documented format."""


class AlignmentError(CfxError):
    """A parse token could not be aligned to the raw sentence text."""


class TrainingError(CfxError):
    """Training diverged or was handed inconsistent inputs."""
