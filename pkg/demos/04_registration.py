"""Point cloud to primitive: outliers -> clusters -> box -> shape.

Builds a noisy synthetic mug-like cylinder cloud with stray points, runs the
cleaning pipeline stage by stage, and prints the fitted primitive.
"""

import numpy as np

from trajshaper import dbscan_cluster, fit_obb, fit_primitive, remove_statistical_outliers
from trajshaper.registration import PointCloud

rng = np.random.default_rng(3)

# lateral surface + caps of a cylinder r=0.28, half length 0.4, tilted slightly
n_side, n_caps = 2600, 1000
th = rng.uniform(0, 2 * np.pi, n_side)
rr = 0.28 * (1 + rng.normal(0, 0.006, n_side))
side = np.column_stack([rr * np.cos(th), rr * np.sin(th), rng.uniform(-0.4, 0.4, n_side)])
th = rng.uniform(0, 2 * np.pi, n_caps)
rho = 0.28 * np.sqrt(rng.random(n_caps))
caps = np.column_stack([rho * np.cos(th), rho * np.sin(th), np.sign(rng.normal(size=n_caps)) * 0.4])
body = np.vstack([side, caps])

stray = rng.uniform(-2.5, 2.5, size=(40, 3))
clutter = rng.normal(0, 0.02, size=(60, 3)) + [1.4, 1.4, 0.0]  # a second, smaller blob
cloud = PointCloud(np.vstack([body, stray, clutter]), "mug", "cylinder")
print(f"raw cloud: {len(cloud)} points")

cleaned = remove_statistical_outliers(cloud)
print(f"after outlier removal (k=20, ratio=1.0): {len(cleaned)} points")

clusters = dbscan_cluster(cleaned, eps=0.15, min_points=15)
print(f"clusters: {[len(c) for c in clusters]} (largest taken as the object)")

obb = fit_obb(clusters[0])
print(f"oriented box: half extents {np.round(obb.half_extents, 3)} at {np.round(obb.pose.position, 3)}")

obj = fit_primitive(cloud.shape_hint, obb, clusters[0])
p = obj.primitive
print(f"fitted {type(p).__name__}: radius {p.radius:.3f}, half_length {p.half_length:.3f}")
print(f"(truth: radius 0.280, half_length 0.400)")
