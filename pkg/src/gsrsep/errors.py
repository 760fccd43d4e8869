"""Exception types shared across the toolkit.

Invalid arguments raise plain ``ValueError``.  The classes below exist so
callers (and the command-line front end) can tell data problems apart from
numerical failures.
"""


class DataFormatError(ValueError):
    """A file or stream does not conform to its declared format."""


class UnsupportedFormatError(DataFormatError):
    """The format is recognized but the codec/layout is not supported."""


class CorruptFileError(DataFormatError):
    """A file's contents contradict its own header or invariants."""


class DegenerateInputError(ValueError):
    """Input is structurally valid but degenerate (e.g. all-zero frames)."""


class NumericalError(RuntimeError):
    """A numerical routine diverged or failed to converge."""
