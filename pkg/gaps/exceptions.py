"""Errors raised by the gap vector pipeline.

Each class carries the process exit code the management commands use for it.
"""


class GapVectorError(Exception):
    """Base class for all pipeline errors."""
    exit_code = 1


class SpecError(GapVectorError):
    """Invalid variety spec, builder parameters or sweep range."""
    exit_code = 1


class VarietyFileError(SpecError):
    """A variety file could not be accepted."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class GenericityFailure(GapVectorError):
    """Sampled data was not generic enough to give a stable answer."""
    exit_code = 2


class InternalInconsistency(GapVectorError):
    """Two computations that must agree did not."""
    exit_code = 3
