"""Benchmark evaluation: per-agent and per-round success rates over a dataset."""

from __future__ import annotations

from .agents import AGENT_ORDER, orchestrate
from .config import Config
from .dataset import Sample


def evaluate_samples(samples: list[Sample], config: Config | None = None) -> dict:
    """Run the orchestrator over every sample and tabulate success rates.

    Success per agent per round is "all checks passed in that round's run".
    A sample's final round is the last round actually executed (the
    orchestrator stops early once any agent fully passes). Orchestrator
    per-round rates are cumulative: solved in any round up to and including
    that one, so the curve is monotone by construction.
    """
    config = config or Config()
    n = len(samples)
    first = {kind: 0 for kind in AGENT_ORDER}
    final = {kind: 0 for kind in AGENT_ORDER}
    solved_by_round = [0] * config.max_rounds

    for sample in samples:
        _, reports = orchestrate(
            sample.trajectory,
            sample.ground_truth,
            sample.scene,
            params=config.optimizer,
            thresholds=config.observer,
            max_rounds=config.max_rounds,
        )
        last = max(r.round_index for r in reports)
        passing_rounds = [r.round_index for r in reports if r.all_passed]
        solved_round = min(passing_rounds) if passing_rounds else None
        for r in reports:
            if r.round_index == 0 and r.all_passed:
                first[r.agent] += 1
            if r.round_index == last and r.all_passed:
                final[r.agent] += 1
        if solved_round is not None:
            for rr in range(solved_round, config.max_rounds):
                solved_by_round[rr] += 1

    def rate(x: int) -> float:
        return x / n if n else 0.0

    return {
        "samples": n,
        "rounds": config.max_rounds,
        "agents": {
            kind.value: {"first_round": rate(first[kind]), "final_round": rate(final[kind])}
            for kind in AGENT_ORDER
        },
        "orchestrator": {
            "by_round": [rate(s) for s in solved_by_round],
            "final": rate(solved_by_round[-1]) if solved_by_round else 0.0,
        },
    }


def render_table(results: dict) -> str:
    lines = [
        f"samples: {results['samples']}",
        "",
        f"{'agent':<22}{'first round':>12}{'final round':>12}",
    ]
    for name, rates in results["agents"].items():
        lines.append(f"{name:<22}{rates['first_round']:>12.3f}{rates['final_round']:>12.3f}")
    lines.append("")
    by_round = "  ".join(
        f"r{i}={rate:.3f}" for i, rate in enumerate(results["orchestrator"]["by_round"])
    )
    lines.append(f"orchestrator (cumulative): {by_round}")
    lines.append(f"orchestrator final: {results['orchestrator']['final']:.3f}")
    return "\n".join(lines)
