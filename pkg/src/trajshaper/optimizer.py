"""Potential-field trajectory refinement.

Each iteration evaluates four force terms per waypoint from a snapshot of the
current trajectory (Jacobi style, order-independent) and steps the positions
by eta * F_total with both endpoints pinned:

  - spring: restores every segment toward its reference length
  - curvature: restores each interior waypoint's bend toward its reference
  - external: constraint fields (distance pulls/pushes, Cartesian shifts)
    plus a short-range repulsive shell around every scene object
  - self-adherence: pulls each waypoint back toward its reference position

Speed is handled as a post-pass over the final geometry, not as a force
dimension: the displayed force terms are purely spatial.

The "closer" attraction shuts off once the waypoint is within the repulsion
shell (signed distance <= obstacle_range), so attraction can never drag the
path into a surface. No-penetration therefore holds whenever the initial
trajectory is penetration-free and obstacle_gain is at least the largest
attraction magnitude (intensity x importance, <= 4 with clamped bounds but
<= 1 in practice with default intensities; the default gain 2.0 covers the
defaults with margin).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .constraints import Constraint, ConstraintKind, ConstraintSet
from .errors import OptimizationError
from .geometry import SceneObject, Sphere, closest_to_object, largest_dimension
from .trajectory import Trajectory

DEFAULT_MIN_INFLUENCE = 0.3
DEFAULT_INFLUENCE_FACTOR = 1.5


@dataclass(frozen=True)
class OptimizerParams:
    k: float = 1.0  # spring stiffness
    k_ang: float = 0.5  # curvature stiffness
    w_ext: float = 1.0  # external force weight
    w_self: float = 0.1  # adherence weight
    eta: float = 0.01  # step size
    max_iterations: int = 200
    convergence_epsilon: float = 1e-5  # max waypoint displacement per iteration
    obstacle_range: float = 0.05  # repulsion shell, normalized units
    obstacle_gain: float = 2.0

    def __post_init__(self):
        for name in ("k", "k_ang", "w_ext", "eta", "obstacle_range", "obstacle_gain"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.w_self < 0:
            raise ValueError("w_self must be >= 0")


@dataclass
class PotentialField:
    """One constraint turned into a force field, with its working influence range."""

    constraint: Constraint
    obj: SceneObject | None = None
    influence_radius: float = 0.0

    def __post_init__(self):
        if self.obj is not None and self.influence_radius <= 0:
            raise ValueError("influence_radius must be positive when an object is present")


def default_influence_radius(
    primitive,
    min_radius: float = DEFAULT_MIN_INFLUENCE,
    factor: float = DEFAULT_INFLUENCE_FACTOR,
) -> float:
    return max(min_radius, factor * largest_dimension(primitive))


def resolve_influence_radii(
    objects: list[SceneObject],
    min_radius: float = DEFAULT_MIN_INFLUENCE,
    factor: float = DEFAULT_INFLUENCE_FACTOR,
) -> list[SceneObject]:
    """Fill unset influence radii with the default rule (normalized units)."""
    return [
        obj
        if obj.influence_radius is not None
        else replace(obj, influence_radius=default_influence_radius(obj.primitive, min_radius, factor))
        for obj in objects
    ]


def build_fields(
    constraint_set: ConstraintSet,
    objects: list[SceneObject],
    radius_multipliers: dict[str, float] | None = None,
) -> list[PotentialField]:
    """Initial-planner step: pair each constraint with its target's field."""
    by_id = {o.id: o for o in objects}
    mult = radius_multipliers or {}
    fields = []
    for c in constraint_set:
        if c.target_object_id is None:
            fields.append(PotentialField(c))
            continue
        obj = by_id[c.target_object_id]
        if obj.influence_radius is None:
            raise ValueError(f"object {obj.id!r} has unresolved influence_radius")
        radius = obj.influence_radius * mult.get(obj.id, 1.0)
        fields.append(PotentialField(c, obj, radius))
    return fields


# ------------------------------------------------------------------ force terms
def _segment_lengths(positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = np.diff(positions, axis=0)
    lengths = np.linalg.norm(d, axis=1)
    if np.any(lengths <= 1e-9):
        raise ValueError("coincident consecutive waypoints")
    return d, lengths


def _spring(current: np.ndarray, rest_lengths: np.ndarray, k: float) -> np.ndarray:
    d, lengths = _segment_lengths(current)
    f = (k * (lengths - rest_lengths) / lengths)[:, None] * d
    force = np.zeros_like(current)
    force[:-1] += f
    force[1:] -= f
    return force


def spring_forces(current: np.ndarray, original: np.ndarray, k: float) -> np.ndarray:
    """Per-waypoint spring force restoring segment lengths to the reference.

    Endpoints receive the one-sided contribution of their single segment;
    pinning them is the optimizer's job, not this term's.
    """
    if current.shape != original.shape or current.shape[0] < 3:
        raise ValueError("need matching arrays with at least 3 waypoints")
    _, rest = _segment_lengths(original)
    return _spring(np.asarray(current, float), rest, k)


def _bend(positions: np.ndarray) -> np.ndarray:
    return (positions[2:] - 2.0 * positions[1:-1] + positions[:-2]) / 2.0


def _curvature(current: np.ndarray, rest_bend: np.ndarray, k_ang: float) -> np.ndarray:
    c = _bend(current)
    nc = np.linalg.norm(c, axis=1)
    force = np.zeros_like(current)
    active = nc >= 1e-12
    scale = np.zeros_like(nc)
    scale[active] = k_ang * (nc[active] - rest_bend[active]) / nc[active]
    force[1:-1] = scale[:, None] * c
    return force


def curvature_forces(current: np.ndarray, original: np.ndarray, k_ang: float) -> np.ndarray:
    """Bend-restoring force, applied to the middle waypoint of each triple only."""
    if current.shape != original.shape or current.shape[0] < 3:
        raise ValueError("need matching arrays with at least 3 waypoints")
    rest = np.linalg.norm(_bend(np.asarray(original, float)), axis=1)
    return _curvature(np.asarray(current, float), rest, k_ang)


def self_adherence_forces(current: np.ndarray, original: np.ndarray, w_self: float) -> np.ndarray:
    """Restoring pull toward the reference path: -w_self * (w - w0)."""
    return -w_self * (np.asarray(current, float) - np.asarray(original, float))


def external_forces(
    positions: np.ndarray,
    fields: list[PotentialField],
    objects: list[SceneObject],
    params: OptimizerParams,
) -> np.ndarray:
    """Constraint forces plus the short-range obstacle shell, times w_ext.

    Distance fields fall off linearly: |F| = intensity * importance *
    (1 - d / influence) inside the influence range, directed along the
    outward normal (equivalently, from the closest surface point to the
    waypoint; for interior points the outward normal keeps "farther" pushing
    out of the solid). Attraction (sign -1) is zeroed inside the repulsion
    shell. Cartesian fields apply a constant vector, scoped to the target's
    influence range when a target is named, global otherwise.
    """
    positions = np.atleast_2d(positions)
    total = np.zeros_like(positions)

    for field in fields:
        c = field.constraint
        if c.kind is ConstraintKind.SPEED_CHANGE:
            continue
        if c.kind is ConstraintKind.CARTESIAN_SHIFT:
            vec = c.intensity * c.importance * np.asarray(c.direction)
            if field.obj is None:
                total += vec
            else:
                d = closest_to_object(positions, field.obj).signed_distances
                total[d <= field.influence_radius] += vec
            continue
        prox = closest_to_object(positions, field.obj)
        d = prox.signed_distances
        active = d <= field.influence_radius
        if c.sign < 0:
            active &= d > params.obstacle_range  # never pull into the shell
        mag = c.sign * c.intensity * c.importance * (1.0 - d / field.influence_radius)
        total[active] += mag[active, None] * prox.outward_normals[active]

    for obj in objects:
        prox = closest_to_object(positions, obj)
        d = prox.signed_distances
        active = d < params.obstacle_range
        scale = np.where(d < 0.0, 1.0, 1.0 - d / params.obstacle_range)
        total[active] += params.obstacle_gain * scale[active, None] * prox.outward_normals[active]

    return params.w_ext * total


def external_force(
    waypoint,
    fields: list[PotentialField],
    objects: list[SceneObject],
    params: OptimizerParams = OptimizerParams(),
) -> np.ndarray:
    """Single-waypoint convenience wrapper over external_forces."""
    return external_forces(np.asarray(waypoint, float)[None, :], fields, objects, params)[0]


# ------------------------------------------------------------------ iteration
def optimize(
    trajectory: Trajectory,
    fields: list[PotentialField],
    objects: list[SceneObject],
    params: OptimizerParams = OptimizerParams(),
) -> tuple[Trajectory, int, bool]:
    """Iterate the force update until displacements fall below epsilon.

    Returns (reshaped trajectory, applied update count, converged flag).
    Endpoints never move. Forces are computed from the iteration-start
    snapshot; positions only (see apply_speed_profile for the speed channel).
    """
    current = trajectory.positions.copy()
    original = trajectory.original_positions
    _, rest_lengths = _segment_lengths(original)
    rest_bend = np.linalg.norm(_bend(original), axis=1)

    iterations = 0
    converged = False
    for it in range(params.max_iterations):
        with np.errstate(all="ignore"):  # overflow surfaces via the finite check
            force = _spring(current, rest_lengths, params.k)
            force += _curvature(current, rest_bend, params.k_ang)
            force += external_forces(current, fields, objects, params)
            force += self_adherence_forces(current, original, params.w_self)
        bad = ~np.isfinite(force).all(axis=1)
        if bad.any():
            raise OptimizationError(it, int(np.argmax(bad)))
        force[0] = 0.0
        force[-1] = 0.0
        with np.errstate(all="ignore"):
            step = params.eta * force
        if float(np.max(np.linalg.norm(step, axis=1))) < params.convergence_epsilon:
            converged = True
            break
        current = current + step
        iterations += 1
    return trajectory.evolved(positions=current), iterations, converged


def apply_speed_profile(
    trajectory: Trajectory,
    fields: list[PotentialField],
    params: OptimizerParams = OptimizerParams(),
) -> Trajectory:
    """Scale speeds inside each speed field's influence range.

    Every waypoint at final distance d < influence gets
    v *= 1 + sign * intensity * importance * (1 - d / influence); multiple
    fields compose multiplicatively. The result is clamped per waypoint to
    [0.05, 3] x the reference speed.
    """
    speeds = trajectory.speeds.copy()
    for field in fields:
        c = field.constraint
        if c.kind is not ConstraintKind.SPEED_CHANGE:
            continue
        d = closest_to_object(trajectory.positions, field.obj).signed_distances
        active = d < field.influence_radius
        factor = 1.0 + c.sign * c.intensity * c.importance * (1.0 - d / field.influence_radius)
        speeds[active] *= factor[active]
    ref = trajectory.original_speeds
    speeds = np.clip(speeds, 0.05 * ref, 3.0 * ref)
    return trajectory.evolved(speeds=speeds)


def centroid_proxy(obj: SceneObject) -> SceneObject:
    """Point-like stand-in for geometry-blind comparisons.

    Replaces the primitive with a vanishing sphere at the object's pose
    position, so distances collapse to point distances. Evaluation baseline
    only; penetration is then measured against the true primitive.
    """
    return replace(obj, primitive=Sphere(1e-9))
