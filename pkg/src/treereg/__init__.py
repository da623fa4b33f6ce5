"""Marker-free rigid registration of single-tree terrestrial laser scans."""

from .core import (
    Label,
    Point,
    PointCloud,
    RigidTransform,
    SpatialIndex,
    apply_transform,
    compose,
    estimate_rigid_transform,
    invert,
    repair_rotation,
    rotation_angle,
    rotation_from_axis_angle,
    skew,
)
from .errors import (
    CloudParseError,
    DegenerateConfigurationError,
    DegenerateGeometryError,
    EmptyCloudError,
    InsufficientKeypointsError,
    InvalidRotationError,
    NoMatchError,
    NoOverlapError,
    SingularSystemError,
    StageError,
    TreeRegError,
)

__version__ = "0.1.0"

__all__ = [
    "Label",
    "Point",
    "PointCloud",
    "RigidTransform",
    "SpatialIndex",
    "apply_transform",
    "compose",
    "estimate_rigid_transform",
    "invert",
    "repair_rotation",
    "rotation_angle",
    "rotation_from_axis_angle",
    "skew",
    "CloudParseError",
    "DegenerateConfigurationError",
    "DegenerateGeometryError",
    "EmptyCloudError",
    "InsufficientKeypointsError",
    "InvalidRotationError",
    "NoMatchError",
    "NoOverlapError",
    "SingularSystemError",
    "StageError",
    "TreeRegError",
    "__version__",
]
