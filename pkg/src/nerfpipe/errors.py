"""Exception types shared across the toolkit.

Every error raised by the library derives from :class:`NerfPipeError` so the
command-line layer can map failures onto exit codes by class.
"""

from __future__ import annotations


class NerfPipeError(Exception):
    """Base class for all toolkit errors."""


class SingularMatrixError(NerfPipeError):
    """The upper-left 3x3 block is not invertible (|det| <= 1e-12).

    ``frame`` and ``obj`` identify the offending sample when the matrix came
    from a scene document; both are ``None`` for bare matrix operations.
    """

    def __init__(self, message: str, frame: int | None = None, obj: str | None = None):
        super().__init__(message)
        self.frame = frame
        self.obj = obj


class NonPositiveError(NerfPipeError):
    """A quantity that must be strictly positive is zero or negative."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.path = path


class MalformedDocumentError(NerfPipeError):
    """Input is not valid UTF-8 JSON text."""


class SchemaViolationError(NerfPipeError):
    """A field is missing, mistyped, or structurally invalid.

    ``path`` is the dotted location of the offending field, e.g.
    ``"camera.frames[2].world"``.
    """

    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnsupportedVersionError(NerfPipeError):
    """The document declares a schema version this toolkit does not read."""

    def __init__(self, version: int):
        super().__init__(f"unsupported schema version {version} (expected 1)")
        self.version = version


class FrameCoverageGapError(NerfPipeError):
    """A per-frame track is missing a sample inside the declared range."""

    def __init__(self, track: str, frame: int):
        super().__init__(f"{track}: missing sample for frame {frame}")
        self.track = track
        self.frame = frame


class DimensionMismatchError(NerfPipeError):
    """Images that must share width/height (or channel layout) do not."""

    def __init__(self, message: str, frame: int | None = None):
        super().__init__(message)
        self.frame = frame


class MissingFrameError(NerfPipeError):
    """A numbered-sequence input file does not exist."""

    def __init__(self, pattern: str, frame: int):
        super().__init__(f"missing frame {frame} of sequence {pattern}")
        self.pattern = pattern
        self.frame = frame


class DecodeError(NerfPipeError):
    """A file exists but cannot be decoded as a supported image."""

    def __init__(self, path: str, detail: str = ""):
        message = f"cannot decode {path}"
        if detail:
            message += f": {detail}"
        super().__init__(message)
        self.path = path
