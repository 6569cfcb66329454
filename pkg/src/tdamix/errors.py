"""Exception hierarchy shared by all tdamix modules."""


class TdamixError(ValueError):
    """Base class for all library errors."""


class InvalidGeometryError(TdamixError):
    pass


class DegenerateCurveError(TdamixError):
    pass


class OutOfDomainError(TdamixError):
    pass


class GridMismatchError(TdamixError):
    pass


class InvalidDomainError(TdamixError):
    pass


class DegenerateWeightsError(TdamixError):
    pass


class EmptyInputError(TdamixError):
    pass


class InvalidFiltrationError(TdamixError):
    pass


class InvalidIntervalError(TdamixError):
    pass


class InvalidBandwidthError(TdamixError):
    pass


class InsufficientDataError(TdamixError):
    pass


class DegenerateDataError(TdamixError):
    pass


class InvalidRangeError(TdamixError):
    pass


class ComponentFactoryError(TdamixError):
    """Raised when a mixture component could not be built; message carries (g, run)."""


class ConfigError(TdamixError):
    """Validation failure for an experiment config.

    ``problems`` holds one human readable line per offending key.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config:\n  " + "\n  ".join(self.problems))


class PipelineError(RuntimeError):
    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
