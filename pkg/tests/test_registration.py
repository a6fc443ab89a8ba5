"""Cloud cleaning, clustering, OBB and primitive fits against brute-force references."""

from __future__ import annotations

import numpy as np
import pytest

from trajshaper.errors import DegenerateCloudError, InsufficientPointsError, NoClusterError
from trajshaper.geometry import Cuboid, Cylinder, Sphere, closest_point
from trajshaper.registration import (
    PointCloud,
    dbscan_cluster,
    fit_obb,
    fit_primitive,
    register_cloud,
    remove_statistical_outliers,
)


# ---------------------------------------------------------------- fixtures
def sphere_cloud(rng, r=0.5, center=(0, 0, 0), n=3000, label="ball"):
    """Surface samples with symmetric sensor-like noise plus interior fill."""
    n_surface = int(n * 0.7)
    u = rng.normal(size=(n_surface, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    shell = u * r * (1 + rng.normal(0, 0.01, size=(n_surface, 1)))
    interior = rng.normal(size=(n - n_surface, 3))
    interior /= np.linalg.norm(interior, axis=1, keepdims=True)
    interior *= r * rng.random((n - n_surface, 1)) ** (1 / 3)
    pts = np.vstack([shell, interior]) + np.asarray(center, float)
    return PointCloud(pts, label, "sphere")


def cylinder_cloud(rng, r=0.3, half_length=0.5, n=3000, label="pillar"):
    n_side = int(n * 0.6)
    th = rng.uniform(0, 2 * np.pi, n_side)
    rr = r * (1 + rng.normal(0, 0.01, n_side))
    side = np.column_stack([rr * np.cos(th), rr * np.sin(th), rng.uniform(-half_length, half_length, n_side)])
    n_caps = n - n_side
    th = rng.uniform(0, 2 * np.pi, n_caps)
    rho = r * np.sqrt(rng.random(n_caps))
    z = np.where(rng.random(n_caps) > 0.5, 1.0, -1.0) * half_length * (1 + rng.normal(0, 0.01, n_caps))
    caps = np.column_stack([rho * np.cos(th), rho * np.sin(th), z])
    return PointCloud(np.vstack([side, caps]), label, "cylinder")


def box_cloud(rng, half=(1.0, 0.5, 0.25), n=4000, rotation=None, label="box"):
    half = np.asarray(half, float)
    areas = np.array([half[1] * half[2], half[2] * half[0], half[0] * half[1]])
    alloc = (n * areas / areas.sum() / 2).astype(int)
    pts = []
    for axis in range(3):
        for sign in (1.0, -1.0):
            m = alloc[axis]
            p = rng.uniform(-1, 1, size=(m, 3)) * half
            p[:, axis] = sign * half[axis]
            pts.append(p)
    pts = np.vstack(pts)
    if rotation is not None:
        pts = pts @ np.asarray(rotation).T
    return PointCloud(pts, label, "cuboid")


def cone_cloud(rng, base_r=0.4, height=0.8, n=3000, label="peak"):
    n_lat = int(n * 0.7)
    t = np.sqrt(rng.random(n_lat))
    th = rng.uniform(0, 2 * np.pi, n_lat)
    lat = np.column_stack([base_r * t * np.cos(th), base_r * t * np.sin(th), height * (1 - t)])
    n_base = n - n_lat
    rho = base_r * np.sqrt(rng.random(n_base))
    th = rng.uniform(0, 2 * np.pi, n_base)
    base = np.column_stack([rho * np.cos(th), rho * np.sin(th), np.zeros(n_base)])
    return PointCloud(np.vstack([lat, base]), label, "cone")


# ---------------------------------------------------------------- references
def brute_outlier_mask(points, neighbors, std_ratio):
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    np.fill_diagonal(d, np.inf)
    knn = np.sort(d, axis=1)[:, :neighbors]
    stat = knn.mean(axis=1)
    return stat <= stat.mean() + std_ratio * stat.std()


def brute_dbscan(points, eps, min_points):
    """O(n^2) reference with the same index-order expansion policy."""
    n = len(points)
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    neighborhoods = [list(np.flatnonzero(d[i] <= eps)) for i in range(n)]
    core = [len(nb) >= min_points for nb in neighborhoods]
    labels = np.full(n, -1, dtype=int)
    cid = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cid
        frontier = list(neighborhoods[i])
        while frontier:
            j = frontier.pop()
            if labels[j] == -1:
                labels[j] = cid
                if core[j]:
                    frontier.extend(k for k in neighborhoods[j] if labels[k] == -1)
        cid += 1
    return labels


# ---------------------------------------------------------------- tests
class TestOutlierRemoval:
    def test_far_point_removed(self):
        rng = np.random.default_rng(0)
        cloud = sphere_cloud(rng, r=1.0, n=200)
        spiked = cloud.replace_points(np.vstack([cloud.points, [[10.0, 0, 0]]]))
        cleaned = remove_statistical_outliers(spiked)
        assert len(cleaned) == 200
        assert np.all(np.linalg.norm(cleaned.points, axis=1) < 2.0)
        # matches the brute-force kNN statistic
        mask = brute_outlier_mask(spiked.points, 20, 1.0)
        assert np.array_equal(cleaned.points, spiked.points[mask])

    def test_uniform_cube_mostly_retained(self):
        # evenly spaced cube samples, like a voxel-downsampled depth cloud
        m = 17
        pts = np.mgrid[0:m, 0:m, 0:m].reshape(3, -1).T.astype(float) / (m - 1)
        cleaned = remove_statistical_outliers(PointCloud(pts, "cube", "cuboid"))
        assert len(cleaned) >= 0.9 * m**3

    def test_identical_points_all_retained(self):
        pts = np.zeros((21, 3))
        cleaned = remove_statistical_outliers(PointCloud(pts, "dot", "sphere"), neighbors=20)
        assert len(cleaned) == 21

    def test_too_few_points(self):
        with pytest.raises(InsufficientPointsError):
            remove_statistical_outliers(PointCloud(np.zeros((5, 3)), "tiny", "sphere"))


class TestDbscan:
    def test_two_blobs(self):
        rng = np.random.default_rng(2)
        a = rng.normal(0, 0.03, size=(100, 3))
        b = rng.normal(0, 0.03, size=(100, 3)) + [1.5, 0, 0]  # 10 x eps apart
        clusters = dbscan_cluster(PointCloud(np.vstack([a, b]), "blobs", "sphere"))
        assert len(clusters) == 2
        assert sorted(len(c) for c in clusters) == [100, 100]

    def test_below_min_points(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(0, 0.01, size=(14, 3))
        with pytest.raises(NoClusterError):
            dbscan_cluster(PointCloud(pts, "few", "sphere"), min_points=15)

    def test_noise_excluded(self):
        rng = np.random.default_rng(4)
        blob = rng.normal(0, 0.02, size=(120, 3))
        noise = rng.uniform(2, 4, size=(5, 3)) * rng.choice([-1, 1], size=(5, 3))
        clusters = dbscan_cluster(PointCloud(np.vstack([blob, noise]), "noisy", "sphere"))
        assert len(clusters) == 1
        assert len(clusters[0]) == 120

    @pytest.mark.parametrize("n,seed", [(200, 5), (600, 6), (1000, 7)])
    def test_matches_bruteforce(self, n, seed):
        rng = np.random.default_rng(seed)
        centers = rng.uniform(-1, 1, size=(4, 3))
        pts = np.vstack([c + rng.normal(0, 0.05, size=(n // 4, 3)) for c in centers])
        eps, mp = 0.12, 10
        ref = brute_dbscan(pts, eps, mp)
        got = dbscan_cluster(PointCloud(pts, "mix", "sphere"), eps=eps, min_points=mp)
        ref_clusters = sorted(
            (sorted(np.flatnonzero(ref == c).tolist()) for c in range(ref.max() + 1)),
            key=lambda ids: (-len(ids), ids[0]),
        )
        got_sets = []
        for c in got:
            ids = sorted(
                int(np.flatnonzero((pts == p).all(axis=1))[0]) for p in c.points
            )
            got_sets.append(ids)
        assert got_sets == ref_clusters


class TestObb:
    def test_axis_aligned_box(self):
        rng = np.random.default_rng(8)
        obb = fit_obb(box_cloud(rng))
        assert np.allclose(obb.half_extents, [1.0, 0.5, 0.25], rtol=0.02)
        assert np.allclose(np.abs(obb.pose.matrix), np.eye(3), atol=1e-2)

    def test_rotated_box_recovered(self):
        rng = np.random.default_rng(9)
        c, s = np.cos(np.pi / 6), np.sin(np.pi / 6)
        rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
        obb = fit_obb(box_cloud(rng, rotation=rot))
        # recovered axes match the true axes up to sign/permutation, within 2 deg
        dots = np.abs(obb.pose.matrix.T @ rot)
        assert np.allclose(np.sort(dots.max(axis=0)), 1.0, atol=1 - np.cos(np.radians(2)))
        # a ~1 deg axis error inflates extents by the box aspect ratio
        assert np.allclose(np.sort(obb.half_extents), [0.25, 0.5, 1.0], rtol=0.06)

    def test_collinear_error(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]], float)
        with pytest.raises(DegenerateCloudError):
            fit_obb(PointCloud(pts, "line", "cuboid"))

    def test_containment(self):
        rng = np.random.default_rng(10)
        cloud = sphere_cloud(rng)
        obb = fit_obb(cloud)
        local = obb.pose.to_local(cloud.points)
        assert np.all(np.abs(local) <= obb.half_extents + 1e-9)


class TestFitPrimitive:
    def test_sphere_recovery(self):
        rng = np.random.default_rng(11)
        obj = register_cloud(sphere_cloud(rng, r=0.5, center=(0.3, -0.2, 0.8)))
        assert isinstance(obj.primitive, Sphere)
        assert obj.primitive.radius == pytest.approx(0.5, rel=0.05)
        assert np.allclose(obj.pose.position, [0.3, -0.2, 0.8], atol=0.05)

    def test_cylinder_recovery(self):
        rng = np.random.default_rng(12)
        obj = register_cloud(cylinder_cloud(rng, r=0.3, half_length=0.5))
        assert isinstance(obj.primitive, Cylinder)
        assert obj.primitive.radius == pytest.approx(0.3, rel=0.05)
        assert obj.primitive.half_length == pytest.approx(0.5, rel=0.05)
        # cylinder axis is the box's long axis: local Z maps near world +-Z
        assert abs(obj.pose.matrix[:, 2] @ [0, 0, 1]) > 0.99

    def test_cuboid_passthrough(self):
        rng = np.random.default_rng(13)
        cloud = box_cloud(rng)
        cleaned = remove_statistical_outliers(cloud)
        target = dbscan_cluster(cleaned, eps=0.3)[0]
        obb = fit_obb(target)
        obj = fit_primitive("cuboid", obb, target)
        assert isinstance(obj.primitive, Cuboid)
        assert np.array_equal(obj.primitive.half_extents, obb.half_extents)
        assert np.array_equal(obj.pose.position, obb.pose.position)

    def test_cone_base_at_denser_end(self):
        rng = np.random.default_rng(14)
        obj = register_cloud(cone_cloud(rng, base_r=0.4, height=0.8), eps=0.3)
        # base disc sits at z=0 where the cloud is densest; apex near z=height
        apex_world = obj.pose.to_world(np.array([0, 0, obj.primitive.height]))[0]
        base_world = obj.pose.position
        assert apex_world[2] > base_world[2]
        assert obj.primitive.base_radius == pytest.approx(0.4, rel=0.15)
        assert obj.primitive.height == pytest.approx(0.8, rel=0.15)

    def test_containment_fractions(self):
        rng = np.random.default_rng(15)
        for make, frac in [(sphere_cloud, 0.9), (cylinder_cloud, 0.9), (box_cloud, 0.99)]:
            cloud = make(rng)
            obj = register_cloud(cloud, eps=0.3)
            cleaned = remove_statistical_outliers(cloud)
            target = dbscan_cluster(cleaned, eps=0.3)[0]
            sd = np.array([closest_point(p, obj).signed_distance for p in target.points])
            inside = np.mean(sd <= 1e-9)
            assert inside >= frac, (cloud.label, inside)


def test_pipeline_deterministic():
    rng = np.random.default_rng(16)
    cloud = cylinder_cloud(rng)
    a = register_cloud(cloud)
    b = register_cloud(PointCloud(cloud.points.copy(), cloud.label, cloud.shape_hint))
    assert np.array_equal(a.pose.position, b.pose.position)
    assert np.array_equal(a.pose.orientation, b.pose.orientation)
    assert a.primitive == b.primitive
