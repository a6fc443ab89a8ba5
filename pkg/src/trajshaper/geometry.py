"""Exact closest-point, signed-distance, and outward-normal queries on posed primitives.

All shape math is done in the primitive's local frame and transformed back to
world coordinates. Every local routine is vectorized over an (M, 3) block of
query points; scalar wrappers are provided for the single-point API.

Sign convention: signed distance is negative strictly inside a solid, zero on
the surface. A rectangle patch has no interior, so its distance is always >= 0.
Degenerate query directions (sphere center, cylinder/cone axis) tie-break to
the local +X axis so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

Vec3 = np.ndarray  # shape (3,), float64

_EPS = 1e-12


def as_vec3(value) -> Vec3:
    """Coerce to a finite float64 array of shape (3,)."""
    v = np.asarray(value, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector: {value!r}")
    return v


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform: rotation (unit quaternion, xyzw) plus translation.

    The quaternion is renormalized on construction; a norm further than 1e-6
    from 1 is rejected as malformed input.
    """

    position: np.ndarray
    orientation: np.ndarray  # quaternion (x, y, z, w), unit norm
    matrix: np.ndarray = field(init=False, repr=False)  # local -> world rotation

    def __post_init__(self):
        pos = as_vec3(self.position)
        quat = np.asarray(self.orientation, dtype=float).reshape(4)
        norm = float(np.linalg.norm(quat))
        if not np.isfinite(norm) or abs(norm - 1.0) > 1e-6:
            raise ValueError(f"orientation is not a unit quaternion (norm={norm})")
        quat = quat / norm
        pos.setflags(write=False)
        quat.setflags(write=False)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", quat)
        mat = Rotation.from_quat(quat).as_matrix()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]))

    @classmethod
    def from_translation(cls, position) -> "Pose":
        return cls(as_vec3(position), np.array([0.0, 0.0, 0.0, 1.0]))

    @classmethod
    def from_rotation_matrix(cls, matrix, position=(0.0, 0.0, 0.0)) -> "Pose":
        quat = Rotation.from_matrix(np.asarray(matrix, dtype=float)).as_quat()
        return cls(as_vec3(position), quat)

    def to_local(self, points: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(points) - self.position) @ self.matrix

    def to_world(self, points: np.ndarray) -> np.ndarray:
        return np.atleast_2d(points) @ self.matrix.T + self.position

    def rotate_to_world(self, vectors: np.ndarray) -> np.ndarray:
        return np.atleast_2d(vectors) @ self.matrix.T

    def compose(self, other: "Pose") -> "Pose":
        """self applied after other: (self @ other)(p) = self(other(p))."""
        rot = Rotation.from_matrix(self.matrix @ other.matrix)
        return Pose(self.matrix @ other.position + self.position, rot.as_quat())

    def inverse(self) -> "Pose":
        rot = Rotation.from_matrix(self.matrix.T)
        return Pose(-(self.matrix.T @ self.position), rot.as_quat())


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be strictly positive, got {value}")
    return value


@dataclass(frozen=True)
class Sphere:
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "radius", _positive("radius", self.radius))


@dataclass(frozen=True)
class RectPlane:
    """Finite rectangle in the local XY plane, two-sided, zero thickness."""

    half_width: float
    half_height: float

    def __post_init__(self):
        object.__setattr__(self, "half_width", _positive("half_width", self.half_width))
        object.__setattr__(self, "half_height", _positive("half_height", self.half_height))


@dataclass(frozen=True)
class Cylinder:
    """Closed cylinder, axis along local Z, spanning z in [-half_length, half_length]."""

    radius: float
    half_length: float

    def __post_init__(self):
        object.__setattr__(self, "radius", _positive("radius", self.radius))
        object.__setattr__(self, "half_length", _positive("half_length", self.half_length))


@dataclass(frozen=True)
class Cone:
    """Closed cone: base disc of base_radius at local z=0, apex at (0, 0, height)."""

    base_radius: float
    height: float

    def __post_init__(self):
        object.__setattr__(self, "base_radius", _positive("base_radius", self.base_radius))
        object.__setattr__(self, "height", _positive("height", self.height))


@dataclass(frozen=True, eq=False)
class Cuboid:
    half_extents: np.ndarray  # (3,), componentwise > 0

    def __post_init__(self):
        he = as_vec3(self.half_extents)
        if np.any(he <= 0.0):
            raise ValueError(f"half_extents must be componentwise positive, got {he}")
        he.setflags(write=False)
        object.__setattr__(self, "half_extents", he)

    def __eq__(self, other):
        return isinstance(other, Cuboid) and np.array_equal(self.half_extents, other.half_extents)

    __hash__ = None


Primitive = Sphere | RectPlane | Cylinder | Cone | Cuboid


def largest_dimension(primitive: Primitive) -> float:
    """Largest dimension field of the primitive, used for scale-relative tolerances."""
    if isinstance(primitive, Sphere):
        return primitive.radius
    if isinstance(primitive, RectPlane):
        return max(primitive.half_width, primitive.half_height)
    if isinstance(primitive, Cylinder):
        return max(primitive.radius, primitive.half_length)
    if isinstance(primitive, Cone):
        return max(primitive.base_radius, primitive.height)
    if isinstance(primitive, Cuboid):
        return float(np.max(primitive.half_extents))
    raise TypeError(f"unknown primitive: {primitive!r}")


def bounding_radius(primitive: Primitive) -> float:
    """Radius of a sphere centered at the local origin that encloses the primitive."""
    if isinstance(primitive, Sphere):
        return primitive.radius
    if isinstance(primitive, RectPlane):
        return float(np.hypot(primitive.half_width, primitive.half_height))
    if isinstance(primitive, Cylinder):
        return float(np.hypot(primitive.radius, primitive.half_length))
    if isinstance(primitive, Cone):
        return max(primitive.base_radius, primitive.height)
    if isinstance(primitive, Cuboid):
        return float(np.linalg.norm(primitive.half_extents))
    raise TypeError(f"unknown primitive: {primitive!r}")


@dataclass(eq=False)
class SceneObject:
    """A posed primitive in the scene.

    influence_radius is the range of the object's potential field in normalized
    units. It may be left None on raw (pre-normalization) objects and is then
    filled by the optimizer's default rule; see optimizer.resolve_influence_radii.
    """

    id: str
    name: str
    primitive: Primitive
    pose: Pose
    influence_radius: float | None = None
    fragility: float = 0.5

    def __post_init__(self):
        if self.influence_radius is not None:
            self.influence_radius = _positive("influence_radius", self.influence_radius)
        if not 0.0 <= self.fragility <= 1.0:
            raise ValueError(f"fragility must be in [0, 1], got {self.fragility}")


@dataclass(frozen=True, eq=False)
class ProximityResult:
    closest_point: Vec3
    signed_distance: float
    outward_normal: Vec3


@dataclass(frozen=True, eq=False)
class BatchProximity:
    """Vectorized proximity results for a block of query points."""

    closest_points: np.ndarray  # (M, 3)
    signed_distances: np.ndarray  # (M,)
    outward_normals: np.ndarray  # (M, 3)

    def __getitem__(self, i: int) -> ProximityResult:
        return ProximityResult(
            self.closest_points[i].copy(),
            float(self.signed_distances[i]),
            self.outward_normals[i].copy(),
        )


def _radial_unit(xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors of the XY components, tie-breaking on-axis points to +X."""
    rho = np.linalg.norm(xy, axis=1)
    safe = np.maximum(rho, _EPS)
    u = xy / safe[:, None]
    on_axis = rho < _EPS
    u[on_axis] = (1.0, 0.0)
    return u, rho


def _sphere_local(q: np.ndarray, radius: float):
    dist_c = np.linalg.norm(q, axis=1)
    u = q / np.maximum(dist_c, _EPS)[:, None]
    u[dist_c < _EPS] = (1.0, 0.0, 0.0)
    closest = u * radius
    sd = dist_c - radius
    return closest, sd, u


def _rect_plane_local(q: np.ndarray, half_width: float, half_height: float):
    closest = np.zeros_like(q)
    closest[:, 0] = np.clip(q[:, 0], -half_width, half_width)
    closest[:, 1] = np.clip(q[:, 1], -half_height, half_height)
    delta = q - closest
    sd = np.linalg.norm(delta, axis=1)
    normal = delta / np.maximum(sd, _EPS)[:, None]
    normal[sd < _EPS] = (0.0, 0.0, 1.0)  # on the patch: two-sided, pick +Z
    return closest, sd, normal


def _cylinder_local(q: np.ndarray, radius: float, half_length: float):
    u, rho = _radial_unit(q[:, :2])
    z = q[:, 2]
    inside = (rho <= radius) & (np.abs(z) <= half_length)

    # Exterior: clamp to the closed lateral/cap surface.
    closest = np.empty_like(q)
    closest[:, :2] = u * np.minimum(rho, radius)[:, None]
    closest[:, 2] = np.clip(z, -half_length, half_length)
    delta = q - closest
    sd = np.linalg.norm(delta, axis=1)
    normal = delta / np.maximum(sd, _EPS)[:, None]

    # Interior (boundary included): nearest of wall vs caps.
    if np.any(inside):
        d_wall = radius - rho[inside]
        d_cap = half_length - np.abs(z[inside])
        z_sign = np.where(z[inside] >= 0.0, 1.0, -1.0)
        use_wall = d_wall <= d_cap

        c_in = np.empty((int(inside.sum()), 3))
        n_in = np.empty_like(c_in)
        c_in[:, :2] = np.where(use_wall[:, None], u[inside] * radius, q[inside, :2])
        c_in[:, 2] = np.where(use_wall, z[inside], z_sign * half_length)
        n_in[:, :2] = np.where(use_wall[:, None], u[inside], 0.0)
        n_in[:, 2] = np.where(use_wall, 0.0, z_sign)

        closest[inside] = c_in
        normal[inside] = n_in
        sd[inside] = -np.minimum(d_wall, d_cap)
    return closest, sd, normal


def _cone_local(q: np.ndarray, base_radius: float, height: float):
    u, rho = _radial_unit(q[:, :2])
    z = q[:, 2]

    # 2-D problem in the (rho, z) half plane: lateral segment apex->rim, base segment.
    apex = np.array([0.0, height])
    rim = np.array([base_radius, 0.0])
    ab = rim - apex
    ab_len2 = float(ab @ ab)
    p2 = np.stack([rho, z], axis=1)

    t = np.clip(((p2 - apex) @ ab) / ab_len2, 0.0, 1.0)
    lat = apex[None, :] + t[:, None] * ab[None, :]
    d_lat = np.linalg.norm(p2 - lat, axis=1)

    base_rho = np.minimum(rho, base_radius)
    d_base = np.hypot(rho - base_rho, z)

    inside = (z >= 0.0) & (z <= height) & (rho <= base_radius * (1.0 - z / height))

    use_lat = d_lat <= d_base
    c2 = np.where(use_lat[:, None], lat, np.stack([base_rho, np.zeros_like(z)], axis=1))
    closest = np.empty_like(q)
    closest[:, :2] = u * c2[:, 0:1]
    closest[:, 2] = c2[:, 1]

    delta = q - closest
    dist = np.linalg.norm(delta, axis=1)
    sd = dist
    normal = delta / np.maximum(dist, _EPS)[:, None]

    if np.any(inside):
        # Interior distance: lateral wall vs base plane (radially within the disc).
        d_in_base = z[inside]
        d_in = np.minimum(d_lat[inside], d_in_base)
        sd_in = -d_in
        use_lat_in = d_lat[inside] <= d_in_base

        slant = np.hypot(height, base_radius)
        n_lat_2d = np.array([height / slant, base_radius / slant])
        n_in = np.empty((int(inside.sum()), 3))
        n_in[:, :2] = np.where(use_lat_in[:, None], u[inside] * n_lat_2d[0], 0.0)
        n_in[:, 2] = np.where(use_lat_in, n_lat_2d[1], -1.0)

        c_in = np.empty_like(n_in)
        lat_in = lat[inside]
        c_in[:, :2] = np.where(use_lat_in[:, None], u[inside] * lat_in[:, 0:1], q[inside, :2])
        c_in[:, 2] = np.where(use_lat_in, lat_in[:, 1], 0.0)

        closest[inside] = c_in
        sd[inside] = sd_in
        normal[inside] = n_in
    return closest, sd, normal


def _cuboid_local(q: np.ndarray, half_extents: np.ndarray):
    clamped = np.clip(q, -half_extents, half_extents)
    delta = q - clamped
    dist = np.linalg.norm(delta, axis=1)
    inside = dist < _EPS

    closest = clamped
    sd = dist.copy()
    normal = delta / np.maximum(dist, _EPS)[:, None]

    if np.any(inside):
        qi = q[inside]
        gaps = half_extents[None, :] - np.abs(qi)
        axis = np.argmin(gaps, axis=1)
        rows = np.arange(qi.shape[0])
        sign = np.where(qi[rows, axis] >= 0.0, 1.0, -1.0)

        c_in = qi.copy()
        c_in[rows, axis] = sign * half_extents[axis]
        n_in = np.zeros_like(qi)
        n_in[rows, axis] = sign

        closest = closest.copy()
        closest[inside] = c_in
        sd[inside] = -gaps[rows, axis]
        normal[inside] = n_in
    return closest, sd, normal


def _local_proximity(queries: np.ndarray, primitive: Primitive):
    if isinstance(primitive, Sphere):
        return _sphere_local(queries, primitive.radius)
    if isinstance(primitive, RectPlane):
        return _rect_plane_local(queries, primitive.half_width, primitive.half_height)
    if isinstance(primitive, Cylinder):
        return _cylinder_local(queries, primitive.radius, primitive.half_length)
    if isinstance(primitive, Cone):
        return _cone_local(queries, primitive.base_radius, primitive.height)
    if isinstance(primitive, Cuboid):
        return _cuboid_local(queries, primitive.half_extents)
    raise TypeError(f"unknown primitive: {primitive!r}")


def closest_points(queries: np.ndarray, primitive: Primitive, pose: Pose) -> BatchProximity:
    """Proximity of each world-frame query point to the posed primitive."""
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    local = pose.to_local(queries)
    pts, sd, nrm = _local_proximity(local, primitive)
    return BatchProximity(pose.to_world(pts), sd, pose.rotate_to_world(nrm))


def closest_to_object(queries: np.ndarray, obj: SceneObject) -> BatchProximity:
    return closest_points(queries, obj.primitive, obj.pose)


def closest_point(query: Vec3, obj: SceneObject) -> ProximityResult:
    """Single-point dispatch over the primitive variants, in world frame."""
    return closest_to_object(as_vec3(query)[None, :], obj)[0]


def _single(query, primitive: Primitive, pose: Pose) -> ProximityResult:
    return closest_points(as_vec3(query)[None, :], primitive, pose)[0]


def closest_point_sphere(query, radius: float, pose: Pose) -> ProximityResult:
    return _single(query, Sphere(radius), pose)


def closest_point_rect_plane(query, half_width: float, half_height: float, pose: Pose) -> ProximityResult:
    return _single(query, RectPlane(half_width, half_height), pose)


def closest_point_cylinder(query, radius: float, half_length: float, pose: Pose) -> ProximityResult:
    return _single(query, Cylinder(radius, half_length), pose)


def closest_point_cone(query, base_radius: float, height: float, pose: Pose) -> ProximityResult:
    return _single(query, Cone(base_radius, height), pose)


def closest_point_cuboid(query, half_extents, pose: Pose) -> ProximityResult:
    return _single(query, Cuboid(as_vec3(half_extents)), pose)


def batch_proximity(trajectory_points: np.ndarray, obj: SceneObject) -> list[tuple[int, ProximityResult]]:
    """Proximity results for the points within the object's influence radius.

    Points farther than influence_radius get no result, mirroring the
    finite-range potential field.
    """
    pts = np.atleast_2d(np.asarray(trajectory_points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("empty point list")
    if obj.influence_radius is None:
        raise ValueError(f"object {obj.id!r} has unresolved influence_radius")
    batch = closest_to_object(pts, obj)
    hits = np.flatnonzero(batch.signed_distances <= obj.influence_radius)
    return [(int(i), batch[int(i)]) for i in hits]
