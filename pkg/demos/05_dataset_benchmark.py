"""Generate a small benchmark and score the agents on it.

Each sample couples a random smooth trajectory, a random scene, and a command
built from the template grammar (so ground-truth constraints are exact). The
table shows per-agent first/final-round success and the cumulative
orchestrator rate per round. Expect a spread: single-clause samples are easy,
concatenated ones conflict.
"""

import sys

from trajshaper import Config, generate_sample
from trajshaper.evaluation import evaluate_samples, render_table

count = int(sys.argv[1]) if len(sys.argv) > 1 else 20

for kind in ("single", "multi", "complex"):
    samples = [generate_sample(seed, kind) for seed in range(count)]
    print(f"=== {kind} ({count} samples) ===")
    example = samples[0]
    print(f"example command: {example.command_text!r}")
    print(render_table(evaluate_samples(samples, Config())))
    print()
