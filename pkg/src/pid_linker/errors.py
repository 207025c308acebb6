"""Exception hierarchy shared by every stage of the pipeline."""


class PidLinkerError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(PidLinkerError, ValueError):
    pass


class DegenerateSegment(GeometryError):
    pass


class NotAxisAligned(GeometryError):
    pass


class OrientationMismatch(GeometryError):
    pass


class SceneError(PidLinkerError, ValueError):
    """Problem with a scene document; ``path`` names the offending location."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class MalformedDocument(SceneError):
    pass


class MissingField(SceneError):
    def __init__(self, path: str):
        super().__init__("missing required field", path)


class TypeMismatch(SceneError):
    pass


class NonPositiveDpi(SceneError):
    pass


class SceneValidationError(SceneError):
    """Raised when a validation report holds fatal issues."""

    def __init__(self, issues):
        self.issues = list(issues)
        lines = "; ".join(str(i) for i in self.issues)
        super().__init__(f"{len(self.issues)} validation error(s): {lines}")


class UnknownSegmentId(PidLinkerError, KeyError):
    pass


class DanglingReference(PidLinkerError, KeyError):
    pass


class UnknownSymbol(PidLinkerError, KeyError):
    pass


class UniverseMismatch(PidLinkerError, ValueError):
    pass


class EmptyBatch(PidLinkerError, ValueError):
    pass


class CanvasTooSmall(PidLinkerError, RuntimeError):
    pass


class UnknownParameter(PidLinkerError, KeyError):
    pass


class ConfigError(PidLinkerError, ValueError):
    pass
