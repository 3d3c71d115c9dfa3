"""Exception hierarchy shared across the package."""


class PromptSegError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PromptSegError):
    """A caller-supplied value is outside the documented domain."""


class SizingError(InputError):
    """Image dimensions are incompatible with the patch grid."""


class DegenerateMaskError(InputError):
    """A mask is empty (or otherwise unusable) where content is required."""


class ConfigurationError(PromptSegError):
    """Inconsistent or unresolvable configuration."""


class TrainingDivergedError(PromptSegError):
    """Training produced a non-finite loss."""

    def __init__(self, step, batch_index, message):
        super().__init__(message)
        self.step = step
        self.batch_index = batch_index
