"""Exception hierarchy shared by every module.

Two families matter to callers (and to the CLI exit-status mapping):
input problems (:class:`InputError`, exit status 2) and model-level
domain or feasibility failures (:class:`ModelDomainError`, exit status 3).
"""


class KiriError(Exception):
    """Base class for all toolkit errors."""


class InputError(KiriError, ValueError):
    """Malformed or inconsistent input (configuration, CSV, metadata)."""


class ConfigError(InputError):
    pass


class CSVFormatError(InputError):
    """Malformed measurement CSV. ``line`` is the 1-based offending line."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlignmentError(InputError):
    """Trials cannot be averaged because grids or metadata differ."""


class MetadataError(InputError):
    """A series lacks metadata required by the requested fit."""


class ModelDomainError(KiriError, ValueError):
    """A quantity falls outside the region where the model is defined."""


class DegenerateGeometryError(ModelDomainError):
    pass


class OutOfRangeError(ModelDomainError):
    """Target force cannot be reached inside the monotonic window.

    ``limit_force`` carries the bound that was violated: the peak force for
    targets above the window, the rest force for targets below it.
    """

    def __init__(self, message, limit_force, above=True):
        super().__init__(message)
        self.limit_force = limit_force
        self.above = above

    @property
    def peak_force(self):
        return self.limit_force if self.above else None


class SingularFitError(ModelDomainError):
    pass


class GroupingError(ModelDomainError):
    pass


class InfeasibleDesignError(ModelDomainError):
    pass


class SingularDesignError(ModelDomainError):
    pass


class ConvergenceError(ModelDomainError):
    pass
