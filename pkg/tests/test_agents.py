"""Agent strategies, observer checks, refinement planning, and orchestration."""

from __future__ import annotations

import numpy as np
import pytest

from trajshaper.agents import (
    AgentKind,
    ObserverThresholds,
    RefinementState,
    check_cartesian,
    check_distance,
    check_speed,
    fragility_ordering,
    observe,
    orchestrate,
    refine,
    run_parallel,
    run_parallel_importance,
    run_parallel_priority,
    run_sequential,
)
from trajshaper.constraints import Constraint, ConstraintKind, ConstraintSet
from trajshaper.geometry import Pose, SceneObject, Sphere, closest_to_object
from trajshaper.optimizer import OptimizerParams, apply_speed_profile, build_fields, optimize
from trajshaper.trajectory import Trajectory


def straight(n=16, spacing=0.1, y=0.0, speed=1.0):
    x = np.arange(n) * spacing
    return Trajectory(np.column_stack([x, np.full(n, y), np.zeros(n)]), np.full(n, speed))


def ball(center, r=0.3, influence=0.5, oid="ball", fragility=0.5):
    return SceneObject(oid, oid, Sphere(r), Pose.from_translation(center), influence, fragility)


def cs(*constraints, command=""):
    return ConstraintSet(tuple(constraints), command)


def farther(oid, **kw):
    return Constraint(ConstraintKind.OBJECT_DISTANCE, sign=1, target_object_id=oid, **kw)


def closer(oid, **kw):
    return Constraint(ConstraintKind.OBJECT_DISTANCE, sign=-1, target_object_id=oid, **kw)


def shift(direction, **kw):
    return Constraint(ConstraintKind.CARTESIAN_SHIFT, direction=direction, **kw)


def slower(oid, **kw):
    return Constraint(ConstraintKind.SPEED_CHANGE, sign=-1, target_object_id=oid, **kw)


class TestRunParallel:
    def test_single_constraint_equals_plain_optimize(self):
        t = straight(y=0.55)
        o = ball([0.75, 0, 0], influence=0.6)
        got = run_parallel(t, cs(farther(o.id)), [o])
        fields = build_fields(cs(farther(o.id)), [o])
        expected, _, _ = optimize(t, fields, [o])
        expected = apply_speed_profile(expected, fields)
        assert np.array_equal(got.positions, expected.positions)
        assert np.array_equal(got.speeds, expected.speeds)

    def test_non_interacting_constraints_pass_as_in_isolation(self):
        t = straight(n=30, spacing=0.1, y=0.5)
        a = ball([0.4, 0, 0], oid="a", influence=0.4)
        b = ball([2.5, 0, 0], oid="b", influence=0.4)
        scene = [a, b]
        both = run_parallel(t, cs(farther("a"), farther("b")), scene)
        solo_a = run_parallel(t, cs(farther("a")), scene)
        solo_b = run_parallel(t, cs(farther("b")), scene)
        out_both = observe(t, both, cs(farther("a"), farther("b")), scene)
        out_a = observe(t, solo_a, cs(farther("a")), scene)
        out_b = observe(t, solo_b, cs(farther("b")), scene)
        assert [o.passed for o in out_both] == [out_a[0].passed, out_b[0].passed] == [True, True]

    def test_conflicting_pair_cancels(self):
        t = straight(y=0.7)  # clearance above the repulsion shell
        o = ball([0.75, 0, 0], influence=0.8)
        out = run_parallel(t, cs(closer(o.id), farther(o.id)), [o])
        assert np.allclose(out.positions, t.positions, atol=1e-9)


class TestRunSequential:
    def test_single_equals_parallel(self):
        t = straight(y=0.55)
        o = ball([0.75, 0, 0], influence=0.6)
        seq = run_sequential(t, cs(farther(o.id)), [o])
        par = run_parallel(t, cs(farther(o.id)), [o])
        assert np.allclose(seq.positions, par.positions)

    def test_order_sensitivity(self):
        t = straight(n=16, spacing=0.1, y=0.0)
        a = ball([0.75, 0.45, 0], oid="a", influence=0.8)
        b = ball([0.75, -0.45, 0], oid="b", influence=0.8)
        scene = [a, b]
        ab = run_sequential(t, cs(closer("a", priority=0), closer("b", priority=1)), scene)
        ba = run_sequential(t, cs(closer("a", priority=1), closer("b", priority=0)), scene)
        assert not np.allclose(ab.positions, ba.positions)

    def test_out_of_reach_pass_is_identity(self):
        t = straight()
        o = ball([50.0, 0, 0], influence=0.3)
        out = run_sequential(t, cs(closer(o.id)), [o])
        assert np.array_equal(out.positions, t.positions)


class TestRunParallelPriority:
    def test_uniform_fragility_fallback_is_input_order(self):
        scene = [ball([0, 0, 0], oid="a"), ball([1, 0, 0], oid="b")]
        order = fragility_ordering(cs(closer("a"), closer("b")), scene)
        assert order == [0, 1]

    def test_fragile_first(self):
        scene = [ball([0, 0, 0], oid="a", fragility=0.2), ball([1, 0, 0], oid="b", fragility=0.9)]
        order = fragility_ordering(cs(closer("a"), closer("b")), scene)
        assert order == [1, 0]

    def test_rank_weighting_breaks_tie(self):
        t = straight()
        opposing = cs(shift((1.0, 0.0, 0.0)), shift((-1.0, 0.0, 0.0)))
        par = run_parallel(t, opposing, [])
        pri = run_parallel_priority(t, opposing, [], ordering=[0, 1])
        # equal weights cancel; rank weighting leaves a net +X force
        assert np.allclose(par.positions, t.positions, atol=1e-9)
        assert (pri.positions - t.positions)[1:-1, 0].mean() > 0.05

    def test_single_constraint_equals_parallel(self):
        t = straight(y=0.55)
        o = ball([0.75, 0, 0], influence=0.6)
        a = run_parallel_priority(t, cs(farther(o.id)), [o])
        b = run_parallel(t, cs(farther(o.id)), [o])
        assert np.array_equal(a.positions, b.positions)

    def test_bad_ordering_rejected(self):
        t = straight()
        with pytest.raises(ValueError):
            run_parallel_priority(t, cs(shift((0.0, 0.0, 1.0))), [], ordering=[1])


class TestRunParallelImportance:
    def test_neutral_importance_equals_parallel(self):
        t = straight(y=0.55)
        o = ball([0.75, 0, 0], influence=0.6)
        a = run_parallel_importance(t, cs(farther(o.id)), [o])
        b = run_parallel(t, cs(farther(o.id)), [o])
        assert np.array_equal(a.positions, b.positions)

    def test_heavier_importance_wins_conflict(self):
        t = straight()
        opposing = cs(
            shift((1.0, 0.0, 0.0), importance=2.0), shift((-1.0, 0.0, 0.0), importance=1.0)
        )
        out = run_parallel_importance(t, opposing, [])
        assert (out.positions - t.positions)[1:-1, 0].mean() > 0.05
        neutral = run_parallel(t, opposing, [])
        assert np.allclose(neutral.positions, t.positions, atol=1e-9)


class TestChecks:
    def setup_method(self):
        self.obj = ball([0, 0.8, 0], r=0.3, influence=0.5)
        self.t = straight(n=10, spacing=0.1)

    def test_distance_identity_fails(self):
        out = check_distance(self.t, self.t, farther(self.obj.id), [self.obj])
        assert out.measured == 0.0 and not out.passed

    def test_distance_uniform_push_passes(self):
        moved = self.t.evolved(positions=self.t.positions + [0, -0.1, 0])
        out = check_distance(self.t, moved, farther(self.obj.id), [self.obj])
        assert out.measured == pytest.approx(0.1, abs=0.02)
        assert out.passed

    def test_distance_below_threshold_fails(self):
        moved = self.t.evolved(positions=self.t.positions + [0, 0.03, 0])
        out = check_distance(self.t, moved, closer(self.obj.id), [self.obj])
        assert out.measured == pytest.approx(-0.03, abs=0.01)
        assert not out.passed

    def test_cartesian_identity_fails(self):
        out = check_cartesian(self.t, self.t, shift((0.0, 0.0, 1.0)))
        assert not out.passed

    def test_cartesian_shift_passes(self):
        moved = self.t.evolved(positions=self.t.positions + [0, 0, 0.1])
        out = check_cartesian(self.t, moved, shift((0.0, 0.0, 1.0)))
        assert out.measured == pytest.approx(0.1) and out.passed

    def test_cartesian_orthogonal_fails(self):
        moved = self.t.evolved(positions=self.t.positions + [0.1, 0, 0])
        out = check_cartesian(self.t, moved, shift((0.0, 0.0, 1.0)))
        assert out.measured == pytest.approx(0.0) and not out.passed

    def test_speed_unchanged_fails(self):
        out = check_speed(self.t, self.t, slower(self.obj.id), [self.obj])
        assert not out.passed

    def test_speed_halved_passes(self):
        slowed = self.t.evolved(speeds=self.t.speeds * 0.5)
        out = check_speed(self.t, slowed, slower(self.obj.id), [self.obj])
        assert out.measured == pytest.approx(-0.5) and out.passed

    def test_speed_small_change_fails(self):
        slowed = self.t.evolved(speeds=self.t.speeds * 0.95)
        out = check_speed(self.t, slowed, slower(self.obj.id), [self.obj])
        assert not out.passed


class TestRefine:
    def _all_fail_reports(self, t, constraint_set, scene):
        _, reports = orchestrate(t, constraint_set, scene, max_rounds=1)
        assert not any(r.all_passed for r in reports)
        return reports

    def test_far_object_grows_influence(self):
        t = straight()
        o = ball([0.75, 3.0, 0], r=0.3, influence=0.3)  # ~10 radii out of reach
        constraint_set = cs(closer(o.id))
        reports = self._all_fail_reports(t, constraint_set, [o])
        state = refine(reports, RefinementState(), constraint_set, [o], t)
        assert state.influence_mult[o.id] == pytest.approx(1.5)
        assert state.intensity_mult == {}

    def test_joint_conflict_boosts_intensity(self):
        # opposing pulls cancel jointly, but each "closer" is solo-satisfiable
        t = straight(n=16, spacing=0.1)
        a = ball([0.75, 0.5, 0], oid="a", influence=0.6)
        b = ball([0.75, -0.5, 0], oid="b", influence=0.6)
        constraint_set = cs(closer("a"), closer("b"))
        reports = self._all_fail_reports(t, constraint_set, [a, b])
        state = refine(reports, RefinementState(), constraint_set, [a, b], t)
        assert state.influence_mult == {}
        assert state.intensity_mult  # at least one boosted as a joint failure
        for i, mult in state.intensity_mult.items():
            assert mult == pytest.approx(1.5)
            assert state.importance_mult[i] == pytest.approx(1.5)
            assert state.priority_override[i] == 0

    def test_refine_requires_failure(self):
        t = straight(y=0.55)
        o = ball([0.75, 0, 0], influence=0.6)
        constraint_set = cs(farther(o.id))
        best, reports = orchestrate(t, constraint_set, [o], max_rounds=1)
        assert best.all_passed
        with pytest.raises(ValueError):
            refine(reports, RefinementState(), constraint_set, [o], t)


class TestOrchestrate:
    def test_easy_scene_round_one_all_agents(self):
        t = straight(y=0.55)
        o = ball([0.75, 0, 0], influence=0.6)
        best, reports = orchestrate(t, cs(farther(o.id)), [o])
        assert best.all_passed and best.round_index == 0
        assert len(reports) == 4
        assert all(r.all_passed for r in reports)

    def test_far_object_recovered_by_expansion(self):
        t = straight()
        o = ball([0.75, 0.75, 0], r=0.3, influence=0.3)  # surface ~0.45 away
        best, reports = orchestrate(t, cs(closer(o.id)), [o])
        assert best.all_passed
        assert best.round_index >= 1
        rounds = {r.round_index for r in reports}
        assert 0 in rounds and not any(r.all_passed for r in reports if r.round_index == 0)

    def test_contradiction_returns_best_effort(self):
        t = straight(y=0.7)
        o = ball([0.75, 0, 0], influence=0.8)
        thresholds = ObserverThresholds(tau_distance=0.5)
        best, reports = orchestrate(
            t, cs(closer(o.id), farther(o.id)), [o], thresholds=thresholds
        )
        assert not best.all_passed
        assert len(reports) == 16  # 4 agents x 4 rounds, no early exit

    def test_determinism(self):
        t = straight(n=20, spacing=0.08, y=0.3)
        a = ball([0.6, 0.5, 0], oid="a", influence=0.5)
        b = ball([1.0, -0.4, 0], oid="b", influence=0.5, fragility=0.8)
        constraint_set = cs(closer("a"), slower("b"), shift((0.0, 0.0, 1.0), priority=2))
        best1, reports1 = orchestrate(t, constraint_set, [a, b])
        best2, reports2 = orchestrate(t, constraint_set, [a, b])
        assert best1.agent == best2.agent and best1.round_index == best2.round_index
        for r1, r2 in zip(reports1, reports2):
            assert np.array_equal(r1.candidate.positions, r2.candidate.positions)
            assert r1.outcomes == r2.outcomes

    def test_reports_recheck_consistently(self):
        t = straight(y=0.55)
        o = ball([0.75, 0, 0], influence=0.6)
        constraint_set = cs(farther(o.id))
        best, _ = orchestrate(t, constraint_set, [o])
        again = observe(t, best.candidate, constraint_set, [o])
        assert again == best.outcomes

    def test_early_round_success_preserved(self):
        # whatever round solves it, rerunning with a larger cap returns the same round
        t = straight()
        o = ball([0.75, 0.75, 0], r=0.3, influence=0.3)
        best_small, _ = orchestrate(t, cs(closer(o.id)), [o], max_rounds=3)
        best_large, _ = orchestrate(t, cs(closer(o.id)), [o], max_rounds=4)
        if best_small.all_passed:
            assert best_large.round_index == best_small.round_index
