"""Exception hierarchy shared by every stage of the pipeline."""


class CurveMACError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 1


class GeometryError(CurveMACError):
    exit_code = 3


class ZeroChordError(GeometryError):
    pass


class TopologyError(GeometryError):
    pass


class MeshQualityError(GeometryError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConfigError(CurveMACError):
    exit_code = 2

    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.key = key
        self.line = line


class NonConvergenceError(CurveMACError):
    exit_code = 4

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class DivergenceError(CurveMACError):
    exit_code = 4

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NoVortexError(CurveMACError):
    pass
