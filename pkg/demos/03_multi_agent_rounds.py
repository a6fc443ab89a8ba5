"""The refinement loop, on two scenes.

First, a target sitting beyond its field's reach: every agent fails round
one, the planner concludes the constraint cannot be met alone and widens the
object's influence range, and a later round succeeds.

Second, two genuinely contradictory pulls: no parameter tweak can satisfy
both, so all rounds run and the orchestrator returns its best effort.
"""

import numpy as np

from trajshaper import (
    Constraint,
    ConstraintKind,
    ConstraintSet,
    Pose,
    SceneObject,
    Sphere,
    Trajectory,
    orchestrate,
)


def show(title, trajectory, constraints, scene):
    print(f"=== {title} ===")
    best, reports = orchestrate(trajectory, constraints, scene)
    by_round: dict[int, list] = {}
    for r in reports:
        by_round.setdefault(r.round_index, []).append(r)
    for round_index in sorted(by_round):
        print(f"round {round_index}:")
        for report in by_round[round_index]:
            marks = "".join("P" if o.passed else "-" for o in report.outcomes)
            print(f"  {report.agent.value:<20} checks [{marks}]")
    verdict = "all passed" if best.all_passed else "best effort"
    print(f"best: {best.agent.value}, round {best.round_index} ({verdict})\n")


n = 32
x = np.linspace(-1.0, 1.0, n)
line = Trajectory(np.column_stack([x, np.zeros(n), np.zeros(n)]), np.full(n, 0.8))

far_ball = SceneObject("far", "far ball", Sphere(0.2), Pose.from_translation([0.0, 0.65, 0.0]), 0.3)
show(
    "out-of-reach target: influence range grows until the pull connects",
    line,
    ConstraintSet(
        (Constraint(ConstraintKind.OBJECT_DISTANCE, sign=-1, target_object_id="far"),),
        source_command="move closer to the far ball",
    ),
    [far_ball],
)

scene = [
    SceneObject("a", "left ball", Sphere(0.2), Pose.from_translation([0.0, 0.55, 0.0]), 0.6, 0.9),
    SceneObject("b", "right ball", Sphere(0.2), Pose.from_translation([0.0, -0.55, 0.0]), 0.6, 0.2),
]
show(
    "contradictory pulls: stays best-effort after all rounds",
    line,
    ConstraintSet(
        (
            Constraint(ConstraintKind.OBJECT_DISTANCE, sign=-1, target_object_id="a", priority=0),
            Constraint(ConstraintKind.OBJECT_DISTANCE, sign=-1, target_object_id="b", priority=1),
        ),
        source_command="closer to both balls",
    ),
    scene,
)
