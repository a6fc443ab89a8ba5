"""Synthetic benchmark generation: random smooth trajectories, random scenes,
and template-grammar commands with exact ground-truth constraints.

Three sample kinds: single (one clause), multi (two clauses on distinct
objects/axes), complex (three to four clauses, interactions allowed).
Everything derives deterministically from the sample seed; commands are built
from the same grammar the template interpreter parses, so
interpret(command) == ground_truth holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import (
    DIRECTION_WORDS,
    Constraint,
    ConstraintKind,
    ConstraintSet,
    interpret_command_template,
)
from .errors import SceneBuildError
from .geometry import (
    Cone,
    Cuboid,
    Cylinder,
    Pose,
    SceneObject,
    Sphere,
    bounding_radius,
    closest_to_object,
)
from .optimizer import resolve_influence_radii
from .trajectory import Trajectory, resample

SAMPLE_KINDS = ("single", "multi", "complex")

_ADJECTIVES = ("red", "blue", "green", "yellow")
_NOUNS = {"sphere": "ball", "cylinder": "pillar", "cone": "cone", "cuboid": "box"}
_SHAPES = ("sphere", "cylinder", "cone", "cuboid")

_LATERAL_PHRASES = ("go more to the {w}", "move to the {w}", "shift to the {w}")
_VERTICAL_PHRASES = ("go {w}", "move {w}", "go more {w}")
_SLOWER_PHRASES = (
    "slow down near the {n}",
    "slow down when next to the {n}",
    "go slower near the {n}",
)
_FASTER_PHRASES = (
    "speed up near the {n}",
    "go faster near the {n}",
    "go faster when next to the {n}",
)
_CLOSER_PHRASES = (
    "move closer to the {n}",
    "get closer to the {n}",
    "go closer to the {n}",
)
_FARTHER_PHRASES = (
    "move farther from the {n}",
    "stay farther from the {n}",
    "go farther from the {n}",
)


@dataclass
class Sample:
    trajectory: Trajectory
    scene: list[SceneObject]
    command_text: str
    ground_truth: ConstraintSet
    seed: int
    kind: str


def random_trajectory(seed: int, control_points: int = 6, n: int = 64) -> Trajectory:
    """Smooth random path: uniform control points in [-0.8, 0.8]^3, spline
    resampled to n waypoints; speeds uniform in [0.3, 1.0]."""
    if control_points < 4:
        raise ValueError("need at least 4 control points")
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-0.8, 0.8, size=(control_points, 3))
    speeds = rng.uniform(0.3, 1.0, size=control_points)
    return resample(Trajectory(pos, speeds), n)


def _random_primitive(rng: np.random.Generator, shape: str):
    dims = rng.uniform(0.1, 0.4, size=3)
    if shape == "sphere":
        return Sphere(dims[0])
    if shape == "cylinder":
        return Cylinder(dims[0], dims[1])
    if shape == "cone":
        return Cone(dims[0], dims[1])
    return Cuboid(dims)


def random_scene(
    seed: int,
    m: int,
    trajectory: Trajectory,
    clearance: float = 0.02,
    max_tries: int = 1000,
) -> list[SceneObject]:
    """m posed objects that neither overlap each other nor touch the trajectory.

    Overlap rejection uses bounding spheres (conservative); trajectory
    clearance requires min signed distance > `clearance` at every waypoint.
    """
    if not 1 <= m <= 4:
        raise ValueError("m must be in [1, 4]")
    rng = np.random.default_rng(seed)
    adjectives = [str(a) for a in rng.permutation(_ADJECTIVES)]
    objects: list[SceneObject] = []
    for i in range(m):
        shape = _SHAPES[int(rng.integers(len(_SHAPES)))]
        for _ in range(max_tries):
            primitive = _random_primitive(rng, shape)
            quat = rng.normal(size=4)
            quat /= np.linalg.norm(quat)
            pose = Pose(rng.uniform(-0.6, 0.6, size=3), quat)
            candidate = SceneObject(
                id=f"{adjectives[i]}_{_NOUNS[shape]}",
                name=f"{adjectives[i]} {_NOUNS[shape]}",
                primitive=primitive,
                pose=pose,
                influence_radius=None,
                fragility=float(rng.uniform(0.0, 1.0)),
            )
            separated = all(
                np.linalg.norm(candidate.pose.position - o.pose.position)
                > bounding_radius(candidate.primitive) + bounding_radius(o.primitive)
                for o in objects
            )
            if not separated:
                continue
            sd = closest_to_object(trajectory.positions, candidate).signed_distances
            if float(sd.min()) > clearance:
                objects.append(candidate)
                break
        else:
            raise SceneBuildError(
                f"could not place object {i + 1}/{m} within {max_tries} tries (seed {seed})"
            )
    return resolve_influence_radii(objects)


def _clause(rng: np.random.Generator, kind: str, target: SceneObject | None,
            direction_word: str | None, priority: int) -> tuple[str, Constraint]:
    def pick(phrases):
        return phrases[int(rng.integers(len(phrases)))]

    if kind == "cartesian":
        w = direction_word
        text = pick(_VERTICAL_PHRASES if w in ("up", "down") else _LATERAL_PHRASES).format(w=w)
        return text, Constraint(
            ConstraintKind.CARTESIAN_SHIFT, direction=DIRECTION_WORDS[w], priority=priority
        )
    if kind == "speed":
        sign = -1 if rng.random() < 0.5 else 1
        text = pick(_SLOWER_PHRASES if sign < 0 else _FASTER_PHRASES).format(n=target.name)
        return text, Constraint(
            ConstraintKind.SPEED_CHANGE, sign=sign, target_object_id=target.id, priority=priority
        )
    sign = -1 if rng.random() < 0.5 else 1
    text = pick(_CLOSER_PHRASES if sign < 0 else _FARTHER_PHRASES).format(n=target.name)
    return text, Constraint(
        ConstraintKind.OBJECT_DISTANCE, sign=sign, target_object_id=target.id, priority=priority
    )


def generate_sample(seed: int, kind: str) -> Sample:
    """One benchmark sample; single -> 1 clause, multi -> 2 disjoint clauses,
    complex -> 3-4 clauses that may share targets."""
    if kind not in SAMPLE_KINDS:
        raise ValueError(f"kind must be one of {SAMPLE_KINDS}")
    rng = np.random.default_rng(seed)
    traj_seed = int(rng.integers(2**63))
    scene_seed = int(rng.integers(2**63))
    trajectory = random_trajectory(traj_seed)
    m = int(rng.integers(1, 5)) if kind == "single" else int(rng.integers(2, 5))
    scene = random_scene(scene_seed, m, trajectory)

    n_clauses = {"single": 1, "multi": 2}.get(kind) or int(rng.integers(3, 5))
    clause_kinds = [("cartesian", "speed", "distance")[int(rng.integers(3))] for _ in range(n_clauses)]

    if kind == "multi":  # distinct objects / distinct axes
        object_pool = [int(i) for i in rng.permutation(m)]
        axes = [("right", "left"), ("front", "back"), ("up", "down")]
        word_pool = [
            axes[a][int(rng.integers(2))] for a in rng.permutation(3)
        ]
    else:
        object_pool, word_pool = [], []

    parts, constraints = [], []
    for p, ckind in enumerate(clause_kinds):
        if ckind == "cartesian":
            if word_pool:
                word = word_pool.pop(0)
            else:
                word = list(DIRECTION_WORDS)[int(rng.integers(len(DIRECTION_WORDS)))]
            text, constraint = _clause(rng, ckind, None, word, p)
        else:
            if object_pool:
                target = scene[object_pool.pop(0)]
            else:
                target = scene[int(rng.integers(len(scene)))]
            text, constraint = _clause(rng, ckind, target, None, p)
        parts.append(text)
        constraints.append(constraint)

    joiner = " and " if rng.random() < 0.5 else ", "
    command = joiner.join(parts)
    ground_truth = ConstraintSet(tuple(constraints), source_command=command)

    parsed = interpret_command_template(command, scene).constraint_set
    if parsed.constraints != ground_truth.constraints:
        raise AssertionError(
            f"template round-trip broke for seed {seed}: {command!r}"
        )
    return Sample(trajectory, scene, command, ground_truth, seed, kind)
