"""Exception hierarchy shared by the sizing, PV and simulation modules."""


class ComposterError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(ComposterError, ValueError):
    """An argument or record field is outside its documented domain.

    ``field`` names the offending attribute when known, so that the config
    loader can report a dotted path such as ``drum.diameter``.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ReductionInfeasibleError(ComposterError):
    """The requested output speed is faster than the input speed."""


class InfeasibleSplitError(ComposterError):
    """A stage asks for more reduction than the whole chain provides."""


class GeometryInfeasibleError(ComposterError):
    """Pulley diameters and centre distance admit no open-belt layout."""


class ExtractionError(ComposterError):
    """Single-diode parameter extraction did not produce a valid model."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class NumericFailureError(ComposterError):
    """A root finder failed to converge where convergence is guaranteed."""


class ConfigError(ComposterError):
    """Base for configuration problems; the CLI maps these to exit status 2."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


class ConfigFileError(ConfigError):
    """The configuration file is missing or unreadable."""


class ConfigSyntaxError(ConfigError):
    """The configuration file is not valid JSON."""


class ConfigSchemaError(ConfigError):
    """Unknown key, missing section or a value of the wrong type."""


class ConfigInvariantError(ConfigError):
    """A value has the right type but violates a record invariant."""
