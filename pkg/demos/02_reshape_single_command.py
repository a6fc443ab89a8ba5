"""One command, end to end: interpret, optimize, check.

A straight path passes close over a table-like box; "slow down when next to
the table and move farther from the table" should slow the nearby stretch
and push the path away without touching the far ends.
"""

import numpy as np

from trajshaper import (
    Config,
    Cuboid,
    Pose,
    SceneObject,
    Trajectory,
    closest_to_object,
    reshape_command,
)

n = 48
x = np.linspace(-1.5, 1.5, n)
trajectory = Trajectory(np.column_stack([x, np.zeros(n), np.full(n, 0.35)]), np.full(n, 1.0))
table = SceneObject(
    "table", "table",
    Cuboid(np.array([0.5, 0.35, 0.25])),
    Pose.from_translation([0.0, 0.0, 0.0]),
    fragility=0.3,
)

command = "slow down when next to the table and move farther from the table"
result = reshape_command(trajectory, [table], command, Config())

print(f"command: {command!r}")
print(f"winner: {result.best.agent.value} in round {result.best.round_index}")
for outcome in result.best.outcomes:
    print(
        f"  {outcome.kind:<9} measured {outcome.measured:+.3f} "
        f"(threshold {outcome.threshold}) -> {'pass' if outcome.passed else 'fail'}"
    )

before_d = closest_to_object(trajectory.positions, table).signed_distances
after_d = closest_to_object(result.best_trajectory.positions, table).signed_distances
near = before_d < 0.4
print(f"\nnear-table waypoints: {near.sum()} of {n}")
print(f"  mean distance {before_d[near].mean():.3f} -> {after_d[near].mean():.3f}")
print(f"  mean speed    {trajectory.speeds[near].mean():.3f} -> {result.best_trajectory.speeds[near].mean():.3f}")
print(f"  far waypoints moved by {np.abs(result.best_trajectory.positions[~near] - trajectory.positions[~near]).max():.4f} at most")
