"""Exception types shared across the package."""


class WfcodecError(Exception):
    """Base class for all package errors."""


class ParameterError(WfcodecError, ValueError):
    """An argument is outside its documented domain."""


class ShapeError(WfcodecError, ValueError):
    """Array lengths or shapes do not match the operation's contract."""


class RangeOverflowError(WfcodecError, ValueError):
    """A value does not fit the fixed-point range it must be stored in."""


class CorruptStreamError(WfcodecError, ValueError):
    """A compressed stream violates its structural invariants."""


class CapacityError(WfcodecError, ValueError):
    """A bank plan needs more memories than the target provides."""


class ValidationError(WfcodecError, ValueError):
    """Cross-file consistency check failed (labels, formats, versions)."""
