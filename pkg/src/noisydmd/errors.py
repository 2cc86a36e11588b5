"""Exception types shared across the package."""


class NoisyDmdError(Exception):
    """Base class for package-specific errors."""


class ShapeError(NoisyDmdError):
    """Matrix dimensions violate an operation's requirements."""


class FormatError(NoisyDmdError):
    """A snapshot file is malformed: bad magic, truncated payload, or an inconsistent header."""


class ConfigError(NoisyDmdError):
    """A solver or experiment configuration is invalid."""


class BlowupError(NoisyDmdError):
    """A simulated field exceeded the stability guard."""


class CflError(NoisyDmdError):
    """The sub-step count required for stability exceeds the allowed budget."""


class RankError(NoisyDmdError):
    """Requested truncation rank is out of range."""


class NumericalError(NoisyDmdError):
    """A dense linear-algebra routine failed to converge."""


class SingularError(NumericalError):
    """A retained singular value is too small to invert safely."""


class ZeroNormError(NoisyDmdError):
    """A reference column has zero norm, so a relative error is undefined."""


class DegenerateError(NoisyDmdError):
    """Input is constant where variation is required."""


class SchemaError(NoisyDmdError):
    """A CSV file does not carry the columns an operation requires."""


# File-system failures are reported with the interpreter's native hierarchy.
IoError = OSError
