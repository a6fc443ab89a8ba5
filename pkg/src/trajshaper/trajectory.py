"""4-D trajectory representation: positions plus a scalar speed per waypoint.

A Trajectory keeps two snapshots: the current waypoints being reshaped and the
immutable reference captured at construction, which the optimizer's restoring
forces are measured against. Normalization maps the joint bounding box of the
waypoints and object centers into [-1, 1]^3 with a single isotropic scale so
primitive shapes stay primitives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError
from .geometry import SceneObject, closest_to_object

_MIN_SEGMENT = 1e-9


@dataclass(frozen=True)
class NormalizationTransform:
    spatial_center: np.ndarray  # (3,)
    spatial_scale: float  # > 0, isotropic
    speed_scale: float  # > 0

    def __post_init__(self):
        if self.spatial_scale <= 0 or self.speed_scale <= 0:
            raise ValueError("scales must be positive")


class Trajectory:
    """Ordered waypoints (N >= 4), each a position and a speed >= 0."""

    def __init__(self, positions, speeds, _original=None):
        positions = np.array(positions, dtype=float).reshape(-1, 3)
        speeds = np.array(speeds, dtype=float).reshape(-1)
        if positions.shape[0] != speeds.shape[0]:
            raise ValueError("positions and speeds length mismatch")
        if positions.shape[0] < 4:
            raise ValueError("a trajectory needs at least 4 waypoints")
        if not (np.all(np.isfinite(positions)) and np.all(np.isfinite(speeds))):
            raise ValueError("non-finite waypoint data")
        if np.any(speeds < 0):
            raise ValueError("speeds must be >= 0")
        seg = np.linalg.norm(np.diff(positions, axis=0), axis=1)
        if np.any(seg <= _MIN_SEGMENT):
            raise ValueError("consecutive waypoints are coincident")
        for a in (positions, speeds):
            a.setflags(write=False)
        self.positions = positions
        self.speeds = speeds
        if _original is None:
            self.original_positions = positions.copy()
            self.original_speeds = speeds.copy()
        else:
            self.original_positions, self.original_speeds = _original
        self.original_positions.setflags(write=False)
        self.original_speeds.setflags(write=False)

    @classmethod
    def from_waypoints(cls, waypoints) -> "Trajectory":
        """Build from an (N, 4) array of x, y, z, v rows."""
        wp = np.asarray(waypoints, dtype=float).reshape(-1, 4)
        return cls(wp[:, :3], wp[:, 3])

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def waypoints(self) -> np.ndarray:
        """(N, 4) view of the current waypoints."""
        return np.column_stack([self.positions, self.speeds])

    def evolved(self, positions=None, speeds=None) -> "Trajectory":
        """New trajectory with updated arrays but the same original reference."""
        return Trajectory(
            self.positions if positions is None else positions,
            self.speeds if speeds is None else speeds,
            _original=(self.original_positions, self.original_speeds),
        )

    def rebased(self) -> "Trajectory":
        """New trajectory whose reference is reset to its current waypoints."""
        return Trajectory(self.positions, self.speeds)

    def arc_length(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.positions, axis=0), axis=1)))


def _transform_objects(objects: list[SceneObject], center: np.ndarray, scale: float) -> list[SceneObject]:
    from .geometry import Cone, Cuboid, Cylinder, Pose, RectPlane, Sphere

    out = []
    for obj in objects:
        p = obj.primitive
        if isinstance(p, Sphere):
            prim = Sphere(p.radius / scale)
        elif isinstance(p, RectPlane):
            prim = RectPlane(p.half_width / scale, p.half_height / scale)
        elif isinstance(p, Cylinder):
            prim = Cylinder(p.radius / scale, p.half_length / scale)
        elif isinstance(p, Cone):
            prim = Cone(p.base_radius / scale, p.height / scale)
        elif isinstance(p, Cuboid):
            prim = Cuboid(p.half_extents / scale)
        else:
            raise TypeError(f"unknown primitive: {p!r}")
        pose = Pose((obj.pose.position - center) / scale, obj.pose.orientation)
        radius = None if obj.influence_radius is None else obj.influence_radius / scale
        out.append(
            SceneObject(
                id=obj.id,
                name=obj.name,
                primitive=prim,
                pose=pose,
                influence_radius=radius,
                fragility=obj.fragility,
            )
        )
    return out


def normalize_scene(
    trajectory: Trajectory, objects: list[SceneObject]
) -> tuple[Trajectory, list[SceneObject], NormalizationTransform]:
    """Map waypoints and object geometry into [-1, 1]^3 and speeds into [0, 1].

    The scale is isotropic over the joint bounding box of the waypoints and the
    object centers; object dimensions shrink by the same factor.
    """
    points = trajectory.positions
    if objects:
        centers = np.stack([obj.pose.position for obj in objects])
        points = np.vstack([points, centers])
    lo, hi = points.min(axis=0), points.max(axis=0)
    scale = float(np.max(hi - lo)) / 2.0
    if scale <= 0.0:
        raise NormalizationError("scene bounding box has zero extent")
    center = (lo + hi) / 2.0

    max_speed = float(np.max(trajectory.speeds)) if trajectory.n else 0.0
    speed_scale = max_speed if max_speed > 0.0 else 1.0

    transform = NormalizationTransform(center, scale, speed_scale)
    norm_traj = Trajectory(
        (trajectory.positions - center) / scale,
        trajectory.speeds / speed_scale,
        _original=(
            (trajectory.original_positions - center) / scale,
            trajectory.original_speeds / speed_scale,
        ),
    )
    return norm_traj, _transform_objects(objects, center, scale), transform


def denormalize(trajectory: Trajectory, transform: NormalizationTransform) -> Trajectory:
    """Exact inverse of the normalization mapping, applied to both snapshots."""
    c, s, v = transform.spatial_center, transform.spatial_scale, transform.speed_scale
    return Trajectory(
        trajectory.positions * s + c,
        trajectory.speeds * v,
        _original=(
            trajectory.original_positions * s + c,
            trajectory.original_speeds * v,
        ),
    )


def denormalize_objects(objects: list[SceneObject], transform: NormalizationTransform) -> list[SceneObject]:
    inv_center = -transform.spatial_center / transform.spatial_scale
    return _transform_objects(objects, inv_center, 1.0 / transform.spatial_scale)


def _catmull_rom_dense(knots: np.ndarray, samples_per_segment: int) -> np.ndarray:
    """Centripetal Catmull-Rom curve through the knots, densely sampled.

    Endpoint segments use reflected phantom points. Knots appear exactly in
    the output (each segment contributes its start point; the final knot is
    appended).
    """
    n = knots.shape[0]
    ext = np.vstack([2 * knots[0] - knots[1], knots, 2 * knots[-1] - knots[-2]])

    dense = []
    for i in range(n - 1):
        p0, p1, p2, p3 = ext[i], ext[i + 1], ext[i + 2], ext[i + 3]
        # centripetal parameterization: dt ~ |dP|^0.5
        t0 = 0.0
        t1 = t0 + max(np.linalg.norm(p1 - p0) ** 0.5, 1e-12)
        t2 = t1 + max(np.linalg.norm(p2 - p1) ** 0.5, 1e-12)
        t3 = t2 + max(np.linalg.norm(p3 - p2) ** 0.5, 1e-12)
        t = np.linspace(t1, t2, samples_per_segment, endpoint=False)[:, None]

        a1 = (t1 - t) / (t1 - t0) * p0 + (t - t0) / (t1 - t0) * p1
        a2 = (t2 - t) / (t2 - t1) * p1 + (t - t1) / (t2 - t1) * p2
        a3 = (t3 - t) / (t3 - t2) * p2 + (t - t2) / (t3 - t2) * p3
        b1 = (t2 - t) / (t2 - t0) * a1 + (t - t0) / (t2 - t0) * a2
        b2 = (t3 - t) / (t3 - t1) * a2 + (t - t1) / (t3 - t1) * a3
        seg = (t2 - t) / (t2 - t1) * b1 + (t - t1) / (t2 - t1) * b2
        seg[0] = p1  # exact at the knot
        dense.append(seg)
    dense.append(knots[-1][None, :])
    return np.vstack(dense)


def resample(trajectory: Trajectory, target_n: int, samples_per_segment: int = 50) -> Trajectory:
    """Spline-resample to target_n waypoints at uniform arc-length spacing.

    Positions follow a centripetal Catmull-Rom spline through the current
    waypoints; speed is interpolated linearly in arc length. Endpoints are
    preserved exactly. The result is a fresh trajectory (reference reset).
    """
    if target_n < 4:
        raise ValueError("target_n must be >= 4")
    knots = trajectory.positions
    dense = _catmull_rom_dense(knots, samples_per_segment)

    seg_len = np.linalg.norm(np.diff(dense, axis=0), axis=1)
    s_dense = np.concatenate([[0.0], np.cumsum(seg_len)])
    total = s_dense[-1]

    s_target = np.linspace(0.0, total, target_n)
    positions = np.column_stack(
        [np.interp(s_target, s_dense, dense[:, k]) for k in range(3)]
    )
    positions[0] = knots[0]
    positions[-1] = knots[-1]

    # Knot arc-length stations sit at the segment starts of the dense curve.
    knot_idx = np.arange(knots.shape[0] - 1) * samples_per_segment
    knot_s = np.concatenate([s_dense[knot_idx], [total]])
    speeds = np.interp(s_target, knot_s, trajectory.speeds)
    return Trajectory(positions, speeds)


def closest_waypoint_indices(trajectory: Trajectory, obj: SceneObject, k: int = 5) -> list[int]:
    """Indices of the k waypoints nearest the object surface, ascending by distance.

    Ties break toward the lower index (stable sort).
    """
    if k > trajectory.n:
        raise ValueError(f"k={k} exceeds waypoint count {trajectory.n}")
    d = closest_to_object(trajectory.positions, obj).signed_distances
    order = np.argsort(d, kind="stable")
    return [int(i) for i in order[:k]]
