"""Exception types shared across the toolkit."""


class ChronicPredError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(ChronicPredError):
    """A schema is malformed or a table does not conform to one."""


class UnknownColumnError(SchemaError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown column: {self.name!r}"


class ParseError(ChronicPredError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConfigError(ChronicPredError):
    """Invalid configuration; ``field`` is the dotted path of the offending key."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class PreprocessError(ChronicPredError):
    pass


class UnfittableColumnError(PreprocessError):
    pass


class EncodeBeforeImputeError(PreprocessError):
    pass


class AssemblyError(PreprocessError):
    pass


class SplitError(PreprocessError):
    pass


class TrainingError(ChronicPredError):
    pass


class DivergenceError(TrainingError):
    pass


class DimensionError(ChronicPredError, ValueError):
    pass


class EvaluationError(ChronicPredError, ValueError):
    pass


class DegenerateLabelsError(EvaluationError):
    pass


class ArtifactError(ChronicPredError):
    """A saved model or bundle could not be loaded."""


class ArtifactVersionError(ArtifactError):
    pass


class ArtifactTruncatedError(ArtifactError):
    pass


class ArtifactChecksumError(ArtifactError):
    pass


class ArtifactFormatError(ArtifactError):
    pass
