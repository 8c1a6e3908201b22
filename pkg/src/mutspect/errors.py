"""Exception types raised across the package."""


class MutspectError(Exception):
    """Base class for all package errors."""


class ShapeError(MutspectError):
    """Dimension mismatch between a model and its input."""


class NumericError(MutspectError):
    """Non-finite value produced during inference."""


class FormatError(MutspectError):
    """A file could not be parsed; message includes the byte offset."""


class ValidationError(MutspectError):
    """Structurally inconsistent data (layer chains, label ranges, ...)."""


class TargetError(MutspectError):
    """Mutation target indices out of range or no applicable operator."""


class UnsupportedTargetError(TargetError):
    """Operator applied to a layer it cannot mutate (e.g. the output layer)."""


class MissingMutantError(MutspectError):
    """Mutant id not present in a spectra set or graph."""


class SpectraFailureError(MutspectError):
    """Distance requested for a quarantined (non-finite output) mutant."""


class DegenerateGraphError(MutspectError):
    """Fewer than two usable mutants; no similarity graph can be built."""


class ParameterError(MutspectError):
    """Out-of-range algorithm parameter (linkage threshold, constraint, ...)."""


class UndefinedScoreError(MutspectError):
    """Mutation score requested for an empty mutant set."""


class ReportMismatchError(MutspectError):
    """Reports refer to different inputs and must not be compared."""
