"""End-to-end reshaping: normalize, interpret, orchestrate, map back to world units.

This is the shared path behind both the CLI and the HTTP service. All
optimization happens in the normalized frame at the configured working
resolution; results are denormalized and resampled back to the input
resolution so callers see their own units.
"""

from __future__ import annotations

from dataclasses import dataclass

from .agents import AgentKind, AgentReport, orchestrate
from .config import Config
from .constraints import (
    InterpreterResult,
    interpret_command_template,
    parse_constraint_document,
)
from .geometry import SceneObject
from .llm import interpret_command_external
from .optimizer import resolve_influence_radii
from .trajectory import Trajectory, denormalize, normalize_scene, resample


@dataclass
class ReshapeResult:
    best: AgentReport
    reports: list[AgentReport]
    candidates: dict[AgentKind, Trajectory]  # latest round, world units
    best_trajectory: Trajectory  # world units, input resolution
    round_index: int


def interpret(command: str, objects: list[SceneObject], config: Config) -> InterpreterResult:
    if config.interpreter.mode == "external":
        return interpret_command_external(command, objects, config.interpreter.client_config())
    return interpret_command_template(command, objects)


def constraints_from_document(text: str, objects: list[SceneObject]) -> InterpreterResult:
    return InterpreterResult(parse_constraint_document(text, objects))


def reshape(
    trajectory: Trajectory,
    objects: list[SceneObject],
    interpretation: InterpreterResult,
    config: Config,
) -> ReshapeResult:
    """Run the multi-agent pipeline on one command; everything deterministic."""
    input_n = trajectory.n
    norm_traj, norm_objects, transform = normalize_scene(trajectory, objects)
    norm_objects = resolve_influence_radii(
        norm_objects, config.influence.min_radius, config.influence.dimension_factor
    )
    working = resample(norm_traj, config.resample_n)

    ordering = interpretation.sequences[0] if interpretation.sequences else None
    best, reports = orchestrate(
        working,
        interpretation.constraint_set,
        norm_objects,
        params=config.optimizer,
        thresholds=config.observer,
        max_rounds=config.max_rounds,
        priority_ordering=ordering,
    )

    last_round = max(r.round_index for r in reports)
    candidates = {
        r.agent: resample(denormalize(r.candidate, transform), input_n)
        for r in reports
        if r.round_index == last_round
    }
    best_world = resample(denormalize(best.candidate, transform), input_n)
    return ReshapeResult(best, reports, candidates, best_world, last_round)


def reshape_command(
    trajectory: Trajectory,
    objects: list[SceneObject],
    command: str,
    config: Config,
) -> ReshapeResult:
    return reshape(trajectory, objects, interpret(command, objects, config), config)
