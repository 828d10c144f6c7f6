"""Exception hierarchy shared across the package."""


class TrwnocError(Exception):
    """Base class for all errors raised by trwnoc."""


class DomainError(TrwnocError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateGeometryError(TrwnocError, ValueError):
    """Transmitter and receiver positions make the geometry ill-defined."""


class ZeroEnergyError(TrwnocError, ValueError):
    """A channel or waveform carries no energy where some is required."""


class SampleRateMismatchError(TrwnocError, ValueError):
    """Two sampled signals were combined at different sample rates."""


class DegenerateClusterError(TrwnocError, ValueError):
    """Decision statistics cannot be split into two clusters."""


class TraceParseError(TrwnocError, ValueError):
    """A CIR trace file could not be parsed.

    Parameters
    ----------
    message : str
        Human readable description.
    line : int, optional
        1-based line number of the offending row.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyTraceError(TraceParseError):
    pass


class MalformedRowError(TraceParseError):
    pass


class NonUniformGridError(TraceParseError):
    pass


class ConfigError(TrwnocError, ValueError):
    """Invalid experiment configuration.

    Carries the offending key and line when known so the CLI can point at it.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
