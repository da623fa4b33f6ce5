"""Geometric primitives: labeled point clouds, rigid transforms, nearest-neighbor search.

Everything downstream (skeletonization, tetrahedron matching, ICP) builds on
the types here.  All types are immutable after construction and all operations
are pure functions of their inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    DegenerateGeometryError,
    EmptyCloudError,
    InvalidRotationError,
)

# Construction-time tolerance for R^T R = I and det(R) = +1.
ROTATION_TOL = 1e-9


class Label(enum.IntEnum):
    """Per-point wood/leaf class; UNKNOWN means not yet separated."""

    WOOD = 0
    LEAF = 1
    UNKNOWN = -1


@dataclass(frozen=True)
class Point:
    """A single 3D point in meters with optional intensity and label."""

    x: float
    y: float
    z: float
    intensity: Optional[float] = None
    label: Label = Label.UNKNOWN

    @property
    def xyz(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class PointCloud:
    """An ordered, immutable set of 3D points with optional per-point channels.

    Positions are stored as an (N, 3) float64 array; intensity and labels are
    whole-cloud channels (present for every point or absent entirely).
    """

    def __init__(
        self,
        positions: np.ndarray,
        intensity: Optional[np.ndarray] = None,
        labels: Optional[np.ndarray] = None,
        frame_id: str = "",
    ):
        pos = np.asarray(positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError(f"positions must have shape (N, 3), got {pos.shape}")
        if pos.shape[0] == 0:
            raise EmptyCloudError("point cloud must contain at least one point")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions contain NaN or Inf")
        self.positions = _freeze(pos.copy())
        if intensity is not None:
            inten = np.asarray(intensity, dtype=np.float64)
            if inten.shape != (len(pos),):
                raise ValueError("intensity must be one value per point")
            intensity = _freeze(inten.copy())
        self.intensity = intensity
        if labels is not None:
            lab = np.asarray(labels, dtype=np.int8)
            if lab.shape != (len(pos),):
                raise ValueError("labels must be one value per point")
            valid = {Label.WOOD, Label.LEAF, Label.UNKNOWN}
            if not set(np.unique(lab)).issubset(valid):
                raise ValueError(f"labels must be in {sorted(valid)}")
            labels = _freeze(lab.copy())
        self.labels = labels
        self.frame_id = frame_id

    def __len__(self) -> int:
        return self.positions.shape[0]

    def point(self, i: int) -> Point:
        x, y, z = self.positions[i]
        inten = None if self.intensity is None else float(self.intensity[i])
        lab = Label.UNKNOWN if self.labels is None else Label(int(self.labels[i]))
        return Point(float(x), float(y), float(z), inten, lab)

    def __iter__(self) -> Iterator[Point]:
        return (self.point(i) for i in range(len(self)))

    def label_array(self) -> np.ndarray:
        """Labels as an int8 array, UNKNOWN-filled when the channel is absent."""
        if self.labels is None:
            return np.full(len(self), int(Label.UNKNOWN), dtype=np.int8)
        return self.labels

    def count_label(self, label: Label) -> int:
        return int(np.count_nonzero(self.label_array() == int(label)))

    def select_label(self, label: Label) -> "PointCloud":
        """Subcloud of points carrying `label`; raises EmptyCloudError if none."""
        mask = self.label_array() == int(label)
        if not mask.any():
            raise EmptyCloudError(f"no points labeled {label.name}")
        return self.select_mask(mask)

    def select_mask(self, mask: np.ndarray) -> "PointCloud":
        return PointCloud(
            self.positions[mask],
            None if self.intensity is None else self.intensity[mask],
            None if self.labels is None else self.labels[mask],
            self.frame_id,
        )

    def with_labels(self, labels: np.ndarray) -> "PointCloud":
        return PointCloud(self.positions, self.intensity, labels, self.frame_id)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned bounding box as (min_xyz, max_xyz)."""
        return self.positions.min(axis=0), self.positions.max(axis=0)


def _validate_rotation(r: np.ndarray) -> None:
    if r.shape != (3, 3):
        raise InvalidRotationError(f"rotation must be 3x3, got {r.shape}")
    if not np.all(np.isfinite(r)):
        raise InvalidRotationError("rotation contains NaN or Inf")
    err = np.max(np.abs(r.T @ r - np.eye(3)))
    if err > ROTATION_TOL:
        raise InvalidRotationError(f"rotation not orthonormal: |R^T R - I| = {err:.3e}")
    det = np.linalg.det(r)
    if abs(det - 1.0) > ROTATION_TOL:
        raise InvalidRotationError(f"det(rotation) = {det:.12f}, expected +1")


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Proper rigid motion p -> R p + t.

    Construction validates orthonormality and det(R) = +1 to within 1e-9;
    out-of-tolerance matrices are rejected, never silently repaired
    (see :func:`repair_rotation` for the explicit fix).
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=np.float64).copy()
        t = np.asarray(self.translation, dtype=np.float64).reshape(3).copy()
        _validate_rotation(r)
        if not np.all(np.isfinite(t)):
            raise ValueError("translation contains NaN or Inf")
        object.__setattr__(self, "rotation", _freeze(r))
        object.__setattr__(self, "translation", _freeze(t))

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_axis_angle(
        cls,
        axis: np.ndarray,
        angle_rad: float,
        translation: np.ndarray | None = None,
    ) -> "RigidTransform":
        """Rodrigues rotation about `axis` through the origin, then translation."""
        t = np.zeros(3) if translation is None else np.asarray(translation, dtype=np.float64)
        return cls(rotation_from_axis_angle(axis, angle_rad), t)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Apply to a (3,) point or (N, 3) array of points."""
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.rotation.T + self.translation

    def is_identity(self, tol: float = 1e-12) -> bool:
        return (
            np.max(np.abs(self.rotation - np.eye(3))) <= tol
            and np.max(np.abs(self.translation)) <= tol
        )


def rotation_from_axis_angle(axis: np.ndarray, angle_rad: float) -> np.ndarray:
    """Rodrigues formula; `axis` need not be unit length."""
    axis = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(axis)
    if norm == 0.0:
        if angle_rad != 0.0:
            raise ValueError("zero axis with nonzero angle")
        return np.eye(3)
    k = axis / norm
    kx = skew(k)
    return np.eye(3) + np.sin(angle_rad) * kx + (1.0 - np.cos(angle_rad)) * (kx @ kx)


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(v) @ w == np.cross(v, w)."""
    x, y, z = np.asarray(v, dtype=np.float64).reshape(3)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rotation_angle(rotation: np.ndarray) -> float:
    """Rotation angle in radians, from the trace."""
    c = (np.trace(rotation) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def apply_transform(cloud: PointCloud, transform: RigidTransform) -> PointCloud:
    """Rigidly move a cloud; intensity, labels and point order are preserved."""
    return PointCloud(
        transform.apply(cloud.positions),
        cloud.intensity,
        cloud.labels,
        cloud.frame_id,
    )


def compose(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    """Transform equivalent to applying `b` first, then `a`."""
    return RigidTransform(a.rotation @ b.rotation, a.rotation @ b.translation + a.translation)


def invert(t: RigidTransform) -> RigidTransform:
    return RigidTransform(t.rotation.T, -(t.rotation.T @ t.translation))


def repair_rotation(matrix: np.ndarray) -> np.ndarray:
    """Closest proper rotation to `matrix` (polar decomposition via SVD).

    The explicit repair path for inputs outside the construction tolerance;
    RigidTransform never applies it implicitly.
    """
    m = np.asarray(matrix, dtype=np.float64)
    u, _, vt = np.linalg.svd(m)
    d = np.sign(np.linalg.det(u @ vt))
    return u @ np.diag([1.0, 1.0, d]) @ vt


class SpatialIndex:
    """Immutable nearest-neighbor index (kd-tree) over a point cloud."""

    def __init__(self, cloud: PointCloud):
        if len(cloud) == 0:  # unreachable: PointCloud enforces nonempty
            raise EmptyCloudError("cannot index an empty cloud")
        self.cloud = cloud
        self._tree = cKDTree(cloud.positions)

    def nearest(self, query: np.ndarray) -> tuple[int, float]:
        """Index and Euclidean distance of the nearest indexed point."""
        d, i = self._tree.query(np.asarray(query, dtype=np.float64).reshape(3))
        return int(i), float(d)

    def query(self, points: np.ndarray, workers: int = -1) -> tuple[np.ndarray, np.ndarray]:
        """Batch nearest-neighbor query; returns (ids, distances)."""
        d, i = self._tree.query(np.asarray(points, dtype=np.float64), workers=workers)
        return np.asarray(i, dtype=np.int64), np.asarray(d, dtype=np.float64)


def estimate_rigid_transform(
    source_pts: np.ndarray, target_pts: np.ndarray
) -> tuple[RigidTransform, float]:
    """Least-squares proper rigid transform mapping source onto target.

    Kabsch/Umeyama with reflection correction so det(R) = +1.  Returns the
    transform and the RMS residual of the mapped source against the target.

    Raises DegenerateGeometryError when the source points are collinear (the
    rotation is then not determined by the correspondences).
    """
    src = np.asarray(source_pts, dtype=np.float64)
    dst = np.asarray(target_pts, dtype=np.float64)
    if src.ndim != 2 or src.shape[1] != 3:
        raise ValueError(f"source must have shape (N, 3), got {src.shape}")
    if src.shape != dst.shape:
        raise ValueError(f"shape mismatch: {src.shape} vs {dst.shape}")
    if src.shape[0] < 3:
        raise ValueError("need at least 3 correspondences")

    c_src = src.mean(axis=0)
    c_dst = dst.mean(axis=0)
    a = src - c_src
    b = dst - c_dst

    sv = np.linalg.svd(a, compute_uv=False)
    if sv[1] <= 1e-10 * max(sv[0], 1e-30):
        raise DegenerateGeometryError("source points are collinear or coincident")

    h = a.T @ b
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    rot = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    trans = c_dst - rot @ c_src
    transform = RigidTransform(rot, trans)

    residuals = transform.apply(src) - dst
    rms = float(np.sqrt(np.mean(np.sum(residuals**2, axis=1))))
    return transform, rms
