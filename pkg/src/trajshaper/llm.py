"""External chat-completion client for command interpretation.

The service is only ever a producer of constraint documents; it never touches
trajectories. Replies must be the JSON document described in SYSTEM_PROMPT;
a malformed reply gets one retry with the parse error appended.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import httpx

from .constraints import InterpreterResult, parse_interpreter_document
from .errors import (
    InterpretationError,
    ObjectResolutionError,
    SchemaError,
    TransportError,
)
from .geometry import SceneObject, largest_dimension

log = logging.getLogger(__name__)

SYSTEM_PROMPT = """\
You translate a user's trajectory-modification request into a JSON document of
geometric and kinematic constraints. Reply with JSON only, no prose.

Schema:
{
  "constraints": [
    {
      "kind": "cartesian" | "speed" | "distance",
      "direction": [x, y, z],      // cartesian only; +X right, -X left,
                                   // +Y front, -Y back, +Z up, -Z down
      "sign": 1 | -1,              // speed: 1 faster, -1 slower
                                   // distance: 1 farther, -1 closer
      "target": "<object name>" | null,   // null only for global cartesian
      "intensity": number in (0, 2],      // 1.0 is neutral
      "importance": number in (0, 2],     // weight from object significance
                                          // and fragility; 1.0 is neutral
      "priority": integer >= 0            // lower runs earlier
    }
  ],
  "sequences": [[...]],   // optional alternative orderings (index lists)
  "rationale": "..."      // optional, for logs
}

Base importance on how significant and fragile each involved object is.
Scene objects:
{scene}
"""


@dataclass
class ClientConfig:
    endpoint: str
    model: str = "deepseek-chat"
    token: str = ""
    timeout: float = 30.0


def describe_scene(objects: list[SceneObject]) -> str:
    lines = []
    for o in objects:
        shape = type(o.primitive).__name__.lower()
        lines.append(
            f"- {o.name} (id {o.id}): {shape}, size {largest_dimension(o.primitive):.3g}, "
            f"fragility {o.fragility:.2f}"
        )
    return "\n".join(lines) if lines else "- (none)"


def _strip_fences(text: str) -> str:
    text = text.strip()
    if text.startswith("```"):
        lines = text.splitlines()
        if lines[-1].strip().startswith("```"):
            lines = lines[1:-1]
        else:
            lines = lines[1:]
        text = "\n".join(lines).strip()
    return text


def _chat(client: httpx.Client, config: ClientConfig, messages: list[dict]) -> str:
    headers = {"Content-Type": "application/json"}
    if config.token:
        headers["Authorization"] = f"Bearer {config.token}"
    try:
        resp = client.post(
            config.endpoint,
            json={"model": config.model, "messages": messages, "temperature": 0},
            headers=headers,
            timeout=config.timeout,
        )
    except httpx.HTTPError as e:
        raise TransportError(f"interpreter endpoint unreachable: {e}") from e
    if resp.status_code in (401, 403):
        raise TransportError(f"interpreter endpoint rejected credentials ({resp.status_code})")
    if resp.status_code != 200:
        raise TransportError(f"interpreter endpoint returned HTTP {resp.status_code}")
    try:
        return resp.json()["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError, json.JSONDecodeError) as e:
        raise TransportError(f"malformed chat-completion envelope: {e}") from e


def interpret_command_external(
    command: str,
    objects: list[SceneObject],
    config: ClientConfig,
    client: httpx.Client | None = None,
) -> InterpreterResult:
    """Ask the configured chat model for a constraint document.

    One retry on parse failure, with the error text appended; two failures
    raise InterpretationError carrying both raw replies.
    """
    own_client = client is None
    client = client or httpx.Client()
    system = SYSTEM_PROMPT.replace("{scene}", describe_scene(objects))
    messages = [
        {"role": "system", "content": system},
        {"role": "user", "content": command},
    ]
    raw_replies: list[str] = []
    try:
        for attempt in range(2):
            reply = _chat(client, config, messages)
            raw_replies.append(reply)
            try:
                result, warnings = parse_interpreter_document(
                    _strip_fences(reply), objects, source_command=command, clamp_bounds=True
                )
            except (SchemaError, ObjectResolutionError, ValueError) as e:
                if attempt == 1:
                    break
                messages.append({"role": "assistant", "content": reply})
                messages.append(
                    {
                        "role": "user",
                        "content": f"Your reply failed validation: {e}. "
                        "Reply again with only the corrected JSON document.",
                    }
                )
                continue
            for w in warnings:
                log.warning("interpreter reply out of bounds: %s", w)
            return result
        raise InterpretationError(
            f"interpreter produced no valid constraint document for {command!r}",
            raw_replies=raw_replies,
        )
    finally:
        if own_client:
            client.close()
