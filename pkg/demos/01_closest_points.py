"""Closest-point queries on the five primitives.

Walks a helix past a small scene and prints, for each object, which waypoints
fall inside its influence range and where their nearest surface points are.
Pass --plot to also write closest_points.png with the segments drawn.
"""

import sys

import numpy as np

from trajshaper import (
    Cone,
    Cuboid,
    Cylinder,
    Pose,
    RectPlane,
    SceneObject,
    Sphere,
    batch_proximity,
    closest_point,
)

scene = [
    SceneObject("ball", "ball", Sphere(0.25), Pose.from_translation([0.0, 0.6, 0.2]), 0.35),
    SceneObject("box", "box", Cuboid(np.array([0.3, 0.2, 0.15])), Pose.from_translation([0.9, -0.4, 0.0]), 0.35),
    SceneObject("pillar", "pillar", Cylinder(0.12, 0.4), Pose.from_translation([-0.9, -0.2, 0.1]), 0.35),
    SceneObject("cone", "cone", Cone(0.2, 0.45), Pose.from_translation([0.0, -0.9, -0.3]), 0.35),
    SceneObject("wall", "wall", RectPlane(0.5, 0.4), Pose.from_translation([1.0, 0.8, 0.0]), 0.35),
]

t = np.linspace(0, 4 * np.pi, 120)
points = np.column_stack([np.cos(t) * (0.4 + 0.1 * t / np.pi), np.sin(t), 0.05 * t - 0.3])

print("single query against the ball:")
result = closest_point([0.0, 1.2, 0.2], scene[0])
print(f"  distance {result.signed_distance:+.3f}, surface point {np.round(result.closest_point, 3)}")

print("\nwaypoints inside each object's influence range:")
for obj in scene:
    hits = batch_proximity(points, obj)
    if not hits:
        print(f"  {obj.name:<7} -> none")
        continue
    nearest = min(hits, key=lambda h: h[1].signed_distance)
    print(
        f"  {obj.name:<7} -> {len(hits):3d} waypoints, nearest d={nearest[1].signed_distance:+.3f} "
        f"at waypoint {nearest[0]}"
    )

if "--plot" in sys.argv:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig = plt.figure(figsize=(8, 6))
    ax = fig.add_subplot(projection="3d")
    ax.plot(*points.T, "k-", lw=1, label="trajectory")
    for obj in scene:
        for idx, res in batch_proximity(points, obj):
            seg = np.stack([points[idx], res.closest_point])
            ax.plot(*seg.T, "r-", lw=0.5)
        ax.scatter(*obj.pose.position, s=40)
        ax.text(*obj.pose.position, obj.name)
    ax.set_title("nearest surface points within influence range")
    fig.savefig("closest_points.png", dpi=120)
    print("\nwrote closest_points.png")
