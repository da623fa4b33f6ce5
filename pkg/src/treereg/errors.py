"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TreeRegError(Exception):
    """Base class for all treereg errors."""


class InvalidRotationError(TreeRegError):
    """Rotation matrix is not orthonormal with determinant +1."""


class EmptyCloudError(TreeRegError):
    """A point cloud with zero points where at least one is required."""


class CloudParseError(TreeRegError):
    """Malformed point-cloud file."""

    def __init__(self, path: str, line_no: int | None, message: str):
        self.path = path
        self.line_no = line_no
        where = f"{path}:{line_no}" if line_no is not None else path
        super().__init__(f"{where}: {message}")


class DegenerateGeometryError(TreeRegError):
    """Point configuration too degenerate for the requested fit (e.g. collinear)."""


class InsufficientKeypointsError(TreeRegError):
    """Fewer than four key points; tetrahedron search impossible."""


class DegenerateConfigurationError(TreeRegError):
    """No non-degenerate tetrahedron exists in a key point set."""


class NoMatchError(TreeRegError):
    """No tetrahedron pair passed all coarse matching gates."""


class NoOverlapError(TreeRegError):
    """No correspondence survived the distance cutoff."""


class SingularSystemError(TreeRegError):
    """Damped normal equations are singular; caller should raise lambda and retry."""


class StageError(TreeRegError):
    """Wraps a pipeline failure with the stage that produced it."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}': {cause}")
