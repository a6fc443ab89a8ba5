"""Point-cloud to primitive registration: outlier removal, density clustering,
oriented-bounding-box fit, and primitive extraction.

This is the camera-free back half of a perception pipeline: the cloud arrives
already segmented and labeled, with a shape hint standing in for an upstream
shape classifier. Defaults (20 neighbors / 1.0 std ratio, eps 0.15 m /
15 points) follow the production preprocessing settings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateCloudError, InsufficientPointsError, NoClusterError
from .geometry import Cone, Cuboid, Cylinder, Pose, SceneObject, Sphere

SHAPE_HINTS = ("sphere", "cylinder", "cone", "cuboid")


@dataclass
class PointCloud:
    points: np.ndarray  # (N, 3)
    label: str
    shape_hint: str

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud contains non-finite points")
        if self.shape_hint not in SHAPE_HINTS:
            raise ValueError(f"shape_hint must be one of {SHAPE_HINTS}, got {self.shape_hint!r}")
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    def replace_points(self, points: np.ndarray) -> "PointCloud":
        return PointCloud(points, self.label, self.shape_hint)


@dataclass(frozen=True, eq=False)
class OrientedBox:
    pose: Pose
    half_extents: np.ndarray  # (3,), componentwise > 0

    def __post_init__(self):
        he = np.asarray(self.half_extents, dtype=float).reshape(3)
        if np.any(he <= 0):
            raise ValueError(f"degenerate box extents: {he}")
        object.__setattr__(self, "half_extents", he)


def remove_statistical_outliers(
    cloud: PointCloud, neighbors: int = 20, std_ratio: float = 1.0
) -> PointCloud:
    """Drop points whose mean k-NN distance exceeds mean + std_ratio * std.

    The statistic is each point's mean distance to its `neighbors` nearest
    neighbors (self excluded); the threshold is global over the cloud.
    """
    if len(cloud) <= neighbors:
        raise InsufficientPointsError(
            f"cloud {cloud.label!r} has {len(cloud)} points, need > {neighbors}"
        )
    tree = cKDTree(cloud.points)
    dists, _ = tree.query(cloud.points, k=neighbors + 1)
    mean_knn = dists[:, 1:].mean(axis=1)
    threshold = mean_knn.mean() + std_ratio * mean_knn.std()
    return cloud.replace_points(cloud.points[mean_knn <= threshold])


def dbscan_cluster(cloud: PointCloud, eps: float = 0.15, min_points: int = 15) -> list[PointCloud]:
    """Density clustering; clusters sorted by size descending, noise dropped.

    A point is a core point when its eps-neighborhood (itself included) holds
    at least min_points. Expansion follows index order, so the labeling is
    deterministic for a given input ordering.
    """
    if eps <= 0 or min_points < 1:
        raise ValueError("eps must be > 0 and min_points >= 1")
    pts = cloud.points
    n = len(pts)
    tree = cKDTree(pts)
    neighborhoods = tree.query_ball_point(pts, eps)
    core = np.array([len(nb) >= min_points for nb in neighborhoods])

    labels = np.full(n, -1, dtype=int)
    cluster_id = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cluster_id
        frontier = list(neighborhoods[i])
        while frontier:
            j = frontier.pop()
            if labels[j] == -1:
                labels[j] = cluster_id
                if core[j]:
                    frontier.extend(k for k in neighborhoods[j] if labels[k] == -1)
        cluster_id += 1

    clusters = [cloud.replace_points(pts[labels == c]) for c in range(cluster_id)]
    if not clusters:
        raise NoClusterError(f"no object cluster found in cloud {cloud.label!r}")
    order = sorted(range(len(clusters)), key=lambda c: (-len(clusters[c]), c))
    return [clusters[c] for c in order]


def _canonical_axes(eigvecs: np.ndarray) -> np.ndarray:
    """Sign-canonicalize two principal axes and complete a right-handed frame."""
    axes = []
    for k in range(2):
        a = eigvecs[:, k]
        for ref in np.eye(3):
            d = float(a @ ref)
            if abs(d) > 1e-9:
                a = a if d > 0 else -a
                break
        axes.append(a)
    axes.append(np.cross(axes[0], axes[1]))
    return np.column_stack(axes)


def fit_obb(cloud: PointCloud) -> OrientedBox:
    """Principal-axes bounding box of the cloud.

    Orientation comes from the covariance eigenvectors (descending eigenvalue,
    right-handed, signs canonicalized against the world axes); extents cover
    the min/max projections. This is a PCA box, not the minimum-volume box.
    """
    pts = cloud.points
    if len(pts) < 4:
        raise DegenerateCloudError(f"cloud {cloud.label!r}: need >= 4 points")
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / len(pts)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    if eigvals[2] < 1e-12 * max(eigvals[0], 1e-300):
        raise DegenerateCloudError(f"degenerate cloud {cloud.label!r} (rank < 3)")

    rot = _canonical_axes(eigvecs)
    proj = pts @ rot
    lo, hi = proj.min(axis=0), proj.max(axis=0)
    half = (hi - lo) / 2.0
    if np.any(half <= 0):
        raise DegenerateCloudError(f"degenerate cloud {cloud.label!r} (flat extent)")
    center = rot @ ((lo + hi) / 2.0)
    return OrientedBox(Pose.from_rotation_matrix(rot, center), half)


def _axis_frame(rot: np.ndarray, z_sign: float) -> np.ndarray:
    """Rotation whose local Z is the box's longest axis (axis 0), right-handed."""
    x, y, z = rot[:, 1], rot[:, 2], z_sign * rot[:, 0]
    if z_sign < 0:
        y = -y
    return np.column_stack([x, y, z])


def fit_primitive(shape_hint: str, obb: OrientedBox, cloud: PointCloud) -> SceneObject:
    """Turn an oriented box plus its cloud into a posed primitive.

    Dimension mapping is a stated convention: sphere radius is the mean half
    extent; cylinder and cone take the longest box axis as their own axis with
    radius from the two shorter half extents; a cone's base goes to the denser
    axis end. The influence radius is left unset for the optimizer's default.
    """
    he = obb.half_extents
    center = obb.pose.position
    rot = obb.pose.matrix
    longest = int(np.argmax(he))
    # reorder so column 0 is the longest axis, keeping a right-handed frame
    perm = [longest, (longest + 1) % 3, (longest + 2) % 3]
    rot = rot[:, perm]
    he_sorted = he[perm]

    if shape_hint == "sphere":
        primitive = Sphere(float(np.mean(he)))
        pose = Pose(center, obb.pose.orientation)
    elif shape_hint == "cuboid":
        primitive = Cuboid(he.copy())
        pose = obb.pose
    elif shape_hint == "cylinder":
        primitive = Cylinder(float(np.mean(he_sorted[1:])), float(he_sorted[0]))
        pose = Pose.from_rotation_matrix(_axis_frame(rot, 1.0), center)
    elif shape_hint == "cone":
        axis = rot[:, 0]
        t = (cloud.points - center) @ axis
        denser_positive = np.sum(t > 0) > np.sum(t <= 0)
        z_sign = -1.0 if denser_positive else 1.0  # apex away from the denser end
        base_center = center - z_sign * axis * he_sorted[0]
        primitive = Cone(float(np.mean(he_sorted[1:])), float(2 * he_sorted[0]))
        pose = Pose.from_rotation_matrix(_axis_frame(rot, z_sign), base_center)
    else:
        raise ValueError(f"unsupported shape hint: {shape_hint!r}")

    return SceneObject(
        id=cloud.label,
        name=cloud.label,
        primitive=primitive,
        pose=pose,
        influence_radius=None,
    )


def register_cloud(
    cloud: PointCloud,
    neighbors: int = 20,
    std_ratio: float = 1.0,
    eps: float = 0.15,
    min_points: int = 15,
) -> SceneObject:
    """Full pipeline: outlier removal -> clustering -> OBB -> primitive."""
    cleaned = remove_statistical_outliers(cloud, neighbors, std_ratio)
    clusters = dbscan_cluster(cleaned, eps, min_points)
    target = clusters[0]
    obb = fit_obb(target)
    return fit_primitive(cloud.shape_hint, obb, target)
