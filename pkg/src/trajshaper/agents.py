"""Multi-strategy reshaping with observer checks and iterative refinement.

Four agents attempt every round, each from the original trajectory with the
round's adjusted parameters: all fields at once treating constraints as equal
(parallel), one constraint per pass in priority order (sequential), parallel
with rank-weighted intensities from an ordering (priority), and parallel
honoring the per-constraint importance weights (importance).

An observer measures each candidate against every constraint. When no agent
passes everything, the refinement planner distinguishes constraints that fail
everywhere and also fail alone (the field cannot reach: grow that object's
influence) from constraints that fail only in combination (turn up their
intensity, importance, and priority), then the next round retries from
scratch. Checks always run against the base constraints and scene, so stored
reports re-verify bit-for-bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .constraints import (
    IMPORTANCE_MAX,
    INTENSITY_MAX,
    Constraint,
    ConstraintKind,
    ConstraintSet,
)
from .geometry import SceneObject, closest_to_object
from .optimizer import (
    OptimizerParams,
    apply_speed_profile,
    build_fields,
    optimize,
    resolve_influence_radii,
)
from .trajectory import Trajectory, closest_waypoint_indices


class AgentKind(enum.Enum):
    PARALLEL = "parallel"
    SEQUENTIAL = "sequential"
    PARALLEL_PRIORITY = "parallel_priority"
    PARALLEL_IMPORTANCE = "parallel_importance"


AGENT_ORDER = (
    AgentKind.PARALLEL,
    AgentKind.SEQUENTIAL,
    AgentKind.PARALLEL_PRIORITY,
    AgentKind.PARALLEL_IMPORTANCE,
)


@dataclass(frozen=True)
class ObserverThresholds:
    tau_distance: float = 0.05  # normalized units
    tau_cartesian: float = 0.05  # normalized units
    tau_speed: float = 0.10  # relative change


@dataclass(frozen=True)
class CheckOutcome:
    constraint_index: int
    kind: str  # distance | cartesian | speed
    measured: float
    threshold: float
    passed: bool


@dataclass
class AgentReport:
    agent: AgentKind
    candidate: Trajectory
    outcomes: list[CheckOutcome]
    round_index: int

    @property
    def all_passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    @property
    def passed_count(self) -> int:
        return sum(o.passed for o in self.outcomes)


@dataclass
class RefinementState:
    """Per-round multipliers and overrides, applied on top of the base inputs."""

    intensity_mult: dict[int, float] = field(default_factory=dict)
    importance_mult: dict[int, float] = field(default_factory=dict)
    priority_override: dict[int, int] = field(default_factory=dict)
    influence_mult: dict[str, float] = field(default_factory=dict)
    round_index: int = 0

    def effective_constraints(self, cs: ConstraintSet) -> list[Constraint]:
        out = []
        for i, c in enumerate(cs):
            out.append(
                replace(
                    c,
                    intensity=min(INTENSITY_MAX, c.intensity * self.intensity_mult.get(i, 1.0)),
                    importance=min(IMPORTANCE_MAX, c.importance * self.importance_mult.get(i, 1.0)),
                    priority=self.priority_override.get(i, c.priority),
                )
            )
        return out


def _neutral_importance(constraints: list[Constraint]) -> list[Constraint]:
    return [replace(c, importance=1.0) for c in constraints]


def _clamped_intensity(c: Constraint, factor: float) -> Constraint:
    return replace(c, intensity=min(INTENSITY_MAX, c.intensity * factor))


def _finish(traj: Trajectory, fields, scene, params) -> Trajectory:
    out, _, _ = optimize(traj, fields, scene, params)
    return apply_speed_profile(out, fields, params)


# ------------------------------------------------------------------ agents
def run_parallel(
    trajectory: Trajectory,
    constraint_set: ConstraintSet,
    scene: list[SceneObject],
    params: OptimizerParams = OptimizerParams(),
    radius_multipliers: dict[str, float] | None = None,
) -> Trajectory:
    """All fields at once, every constraint weighted equally."""
    cs = ConstraintSet(tuple(_neutral_importance(list(constraint_set))), constraint_set.source_command)
    fields = build_fields(cs, scene, radius_multipliers)
    return _finish(trajectory, fields, scene, params)


def run_sequential(
    trajectory: Trajectory,
    constraint_set: ConstraintSet,
    scene: list[SceneObject],
    params: OptimizerParams = OptimizerParams(),
    radius_multipliers: dict[str, float] | None = None,
) -> Trajectory:
    """One optimize pass per constraint in priority order; each pass reshapes
    relative to the previous pass's output. Speeds apply once at the end."""
    constraints = _neutral_importance(list(constraint_set))
    order = sorted(range(len(constraints)), key=lambda i: (constraints[i].priority, i))
    work = trajectory
    for i in order:
        single = ConstraintSet((constraints[i],), constraint_set.source_command)
        fields = build_fields(single, scene, radius_multipliers)
        work, _, _ = optimize(work.rebased(), fields, scene, params)
    all_fields = build_fields(
        ConstraintSet(tuple(constraints), constraint_set.source_command), scene, radius_multipliers
    )
    return apply_speed_profile(work, all_fields, params)


def run_parallel_priority(
    trajectory: Trajectory,
    constraint_set: ConstraintSet,
    scene: list[SceneObject],
    params: OptimizerParams = OptimizerParams(),
    ordering: list[int] | None = None,
    radius_multipliers: dict[str, float] | None = None,
) -> Trajectory:
    """Parallel execution with rank-weighted intensities.

    Rank 0 (most important) gets intensity x (1 + 0.25 * (max_rank - rank)),
    decaying to x1 for the last rank. The default ordering sorts by target
    fragility, most fragile first (stable, so uniform fragility keeps the
    input order).
    """
    constraints = _neutral_importance(list(constraint_set))
    n = len(constraints)
    if ordering is None:
        ordering = fragility_ordering(constraint_set, scene)
    if sorted(ordering) != list(range(n)):
        raise ValueError(f"ordering {ordering} is not a permutation of 0..{n - 1}")
    weighted = list(constraints)
    for rank, idx in enumerate(ordering):
        weighted[idx] = _clamped_intensity(constraints[idx], 1.0 + 0.25 * (n - 1 - rank))
    cs = ConstraintSet(tuple(weighted), constraint_set.source_command)
    fields = build_fields(cs, scene, radius_multipliers)
    return _finish(trajectory, fields, scene, params)


def run_parallel_importance(
    trajectory: Trajectory,
    constraint_set: ConstraintSet,
    scene: list[SceneObject],
    params: OptimizerParams = OptimizerParams(),
    radius_multipliers: dict[str, float] | None = None,
) -> Trajectory:
    """Parallel execution honoring each constraint's importance weight."""
    fields = build_fields(constraint_set, scene, radius_multipliers)
    return _finish(trajectory, fields, scene, params)


def fragility_ordering(constraint_set: ConstraintSet, scene: list[SceneObject]) -> list[int]:
    by_id = {o.id: o for o in scene}
    def frag(i: int) -> float:
        target = constraint_set.constraints[i].target_object_id
        return by_id[target].fragility if target else 0.5
    return sorted(range(len(constraint_set)), key=lambda i: -frag(i))


# ------------------------------------------------------------------ observer
def check_distance(
    before: Trajectory,
    after: Trajectory,
    constraint: Constraint,
    scene: list[SceneObject],
    constraint_index: int = 0,
    tau_d: float = 0.05,
) -> CheckOutcome:
    """Mean signed distance over the five waypoints closest to the target
    (chosen on the pre-modification path) must move by tau_d in the
    constraint's direction."""
    obj = next(o for o in scene if o.id == constraint.target_object_id)
    idx = closest_waypoint_indices(before, obj, k=min(5, before.n))
    d_before = closest_to_object(before.positions[idx], obj).signed_distances.mean()
    d_after = closest_to_object(after.positions[idx], obj).signed_distances.mean()
    measured = float(d_after - d_before)
    passed = measured * constraint.sign > 0 and abs(measured) >= tau_d
    return CheckOutcome(constraint_index, "distance", measured, tau_d, passed)


def check_cartesian(
    before: Trajectory,
    after: Trajectory,
    constraint: Constraint,
    scene: list[SceneObject] | None = None,
    constraint_index: int = 0,
    tau_c: float = 0.05,
) -> CheckOutcome:
    """Mean displacement of the affected waypoints along the commanded
    direction must reach tau_c."""
    delta = (after.positions - before.positions) @ np.asarray(constraint.direction)
    if constraint.target_object_id is not None:
        obj = next(o for o in (scene or []) if o.id == constraint.target_object_id)
        d = closest_to_object(before.positions, obj).signed_distances
        delta = delta[d <= obj.influence_radius]
    measured = float(delta.mean()) if delta.size else 0.0
    passed = measured >= tau_c
    return CheckOutcome(constraint_index, "cartesian", measured, tau_c, passed)


def check_speed(
    before: Trajectory,
    after: Trajectory,
    constraint: Constraint,
    scene: list[SceneObject],
    constraint_index: int = 0,
    tau_v: float = 0.10,
) -> CheckOutcome:
    """Relative mean speed change over the five closest waypoints must reach
    tau_v with the commanded sign."""
    obj = next(o for o in scene if o.id == constraint.target_object_id)
    idx = closest_waypoint_indices(before, obj, k=min(5, before.n))
    v_before = float(before.speeds[idx].mean())
    v_after = float(after.speeds[idx].mean())
    measured = (v_after - v_before) / v_before if v_before > 1e-12 else 0.0
    passed = measured * constraint.sign > 0 and abs(measured) >= tau_v
    return CheckOutcome(constraint_index, "speed", measured, tau_v, passed)


def observe(
    before: Trajectory,
    after: Trajectory,
    constraint_set: ConstraintSet,
    scene: list[SceneObject],
    thresholds: ObserverThresholds = ObserverThresholds(),
) -> list[CheckOutcome]:
    outcomes = []
    for i, c in enumerate(constraint_set):
        if c.kind is ConstraintKind.OBJECT_DISTANCE:
            outcomes.append(check_distance(before, after, c, scene, i, thresholds.tau_distance))
        elif c.kind is ConstraintKind.CARTESIAN_SHIFT:
            outcomes.append(check_cartesian(before, after, c, scene, i, thresholds.tau_cartesian))
        else:
            outcomes.append(check_speed(before, after, c, scene, i, thresholds.tau_speed))
    return outcomes


# ------------------------------------------------------------------ refinement
def refine(
    reports: list[AgentReport],
    state: RefinementState,
    constraint_set: ConstraintSet,
    scene: list[SceneObject],
    trajectory: Trajectory,
    params: OptimizerParams = OptimizerParams(),
    thresholds: ObserverThresholds = ObserverThresholds(),
) -> RefinementState:
    """Plan the next round's parameters from this round's failures.

    A constraint failing in every report is probed alone; if even the solo
    run fails, the target is out of reach and its influence range grows by
    1.5x. Everything else that failed somewhere is treated as a joint
    conflict: intensity and importance scale by 1.5x and the constraint is
    promoted one priority rank.
    """
    if not any(not r.all_passed for r in reports):
        raise ValueError("refine called with no failing report")

    n = len(constraint_set)
    fails_everywhere = [
        all(not r.outcomes[i].passed for r in reports) for i in range(n)
    ]
    fails_somewhere = [
        any(not r.outcomes[i].passed for r in reports) for i in range(n)
    ]

    new = RefinementState(
        dict(state.intensity_mult),
        dict(state.importance_mult),
        dict(state.priority_override),
        dict(state.influence_mult),
        state.round_index + 1,
    )
    effective = state.effective_constraints(constraint_set)
    for i in range(n):
        if not fails_somewhere[i]:
            continue
        target = constraint_set.constraints[i].target_object_id
        if fails_everywhere[i] and target is not None:
            solo = ConstraintSet((effective[i],), constraint_set.source_command)
            candidate = run_parallel(trajectory, solo, scene, params, state.influence_mult)
            outcome = observe(trajectory, candidate, solo, scene, thresholds)[0]
            if not outcome.passed:
                new.influence_mult[target] = new.influence_mult.get(target, 1.0) * 1.5
                continue
        new.intensity_mult[i] = new.intensity_mult.get(i, 1.0) * 1.5
        new.importance_mult[i] = new.importance_mult.get(i, 1.0) * 1.5
        new.priority_override[i] = max(0, effective[i].priority - 1)
    return new


# ------------------------------------------------------------------ orchestration
def orchestrate(
    trajectory: Trajectory,
    constraint_set: ConstraintSet,
    scene: list[SceneObject],
    params: OptimizerParams = OptimizerParams(),
    thresholds: ObserverThresholds = ObserverThresholds(),
    max_rounds: int = 4,
    priority_ordering: list[int] | None = None,
) -> tuple[AgentReport, list[AgentReport]]:
    """One initial round plus refinement rounds until an agent passes everything.

    Every round restarts all four agents from the original trajectory with the
    round's refinement state. Returns the first fully passing report, or after
    max_rounds the report with the most passed checks (ties: smallest mean
    deviation from the input trajectory). The report list covers every agent
    in every executed round.
    """
    scene = resolve_influence_radii(scene)
    state = RefinementState()
    all_reports: list[AgentReport] = []

    for round_index in range(max_rounds):
        eff = state.effective_constraints(constraint_set)
        eff_cs = ConstraintSet(tuple(eff), constraint_set.source_command)
        if priority_ordering is not None:
            ordering = list(priority_ordering)
        elif state.priority_override:
            ordering = sorted(range(len(eff)), key=lambda i: (eff[i].priority, i))
        else:
            ordering = fragility_ordering(constraint_set, scene)

        candidates = {
            AgentKind.PARALLEL: run_parallel(trajectory, eff_cs, scene, params, state.influence_mult),
            AgentKind.SEQUENTIAL: run_sequential(trajectory, eff_cs, scene, params, state.influence_mult),
            AgentKind.PARALLEL_PRIORITY: run_parallel_priority(
                trajectory, eff_cs, scene, params, ordering, state.influence_mult
            ),
            AgentKind.PARALLEL_IMPORTANCE: run_parallel_importance(
                trajectory, eff_cs, scene, params, state.influence_mult
            ),
        }
        reports = [
            AgentReport(kind, candidates[kind], observe(trajectory, candidates[kind], constraint_set, scene, thresholds), round_index)
            for kind in AGENT_ORDER
        ]
        all_reports.extend(reports)
        for report in reports:
            if report.all_passed:
                return report, all_reports
        if round_index < max_rounds - 1:
            state = refine(reports, state, constraint_set, scene, trajectory, params, thresholds)

    def score(report: AgentReport):
        deviation = float(
            np.linalg.norm(report.candidate.positions - trajectory.positions, axis=1).mean()
        )
        return (-report.passed_count, deviation)

    best = min(all_reports, key=score)
    return best, all_reports
