"""Exception hierarchy shared across the package."""


class TrcoptError(Exception):
    """Base class for all package errors."""


class EncodingError(TrcoptError):
    """Bit vector or layer stack violates the encoding contract."""


class DimensionError(TrcoptError):
    """Operands have incompatible sizes."""


class TrainingError(TrcoptError):
    """Surrogate training cannot proceed (e.g. empty dataset)."""


class DataError(TrcoptError):
    """Input data contains non-finite or otherwise invalid values."""


class SizeError(TrcoptError):
    """Problem size exceeds an operation's hard limit."""


class ConfigError(TrcoptError):
    """Invalid configuration value or file."""


class IngestionError(TrcoptError):
    """Malformed or out-of-contract external data file."""


class OpticsError(TrcoptError):
    """Optical computation cannot be carried out (missing coverage etc.)."""


class AnalysisError(TrcoptError):
    """Regression/convergence analysis is underdetermined or ill-posed."""


class RunError(TrcoptError):
    """Active-learning run aborted; message carries the failing cycle."""
