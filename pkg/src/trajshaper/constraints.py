"""Declarative reshaping constraints and the deterministic command interpreter.

A constraint is one instruction: shift the path along an axis, change speed
near an object, or move closer to / farther from an object. The template
interpreter maps a small fixed English grammar onto constraints so datasets
and tests have exact ground truth; the pluggable external interpreter (see
llm.py) produces the same document format.

Direction convention in the normalized frame: +X right, -X left, +Y front,
-Y back, +Z up, -Z down.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field

from .errors import InterpretationError, ObjectResolutionError, SchemaError
from .geometry import SceneObject


class ConstraintKind(enum.Enum):
    CARTESIAN_SHIFT = "cartesian"
    SPEED_CHANGE = "speed"
    OBJECT_DISTANCE = "distance"


DIRECTION_WORDS = {
    "right": (1.0, 0.0, 0.0),
    "left": (-1.0, 0.0, 0.0),
    "front": (0.0, 1.0, 0.0),
    "back": (0.0, -1.0, 0.0),
    "up": (0.0, 0.0, 1.0),
    "down": (0.0, 0.0, -1.0),
}

INTENSITY_MAX = 2.0
IMPORTANCE_MAX = 2.0


@dataclass(frozen=True)
class Constraint:
    kind: ConstraintKind
    direction: tuple[float, float, float] | None = None  # cartesian only, unit
    sign: int | None = None  # speed/distance: +1 faster/farther, -1 slower/closer
    target_object_id: str | None = None
    intensity: float = 1.0
    importance: float = 1.0
    priority: int = 0

    def __post_init__(self):
        if not 0.0 < self.intensity <= INTENSITY_MAX:
            raise ValueError(f"intensity must be in (0, {INTENSITY_MAX}], got {self.intensity}")
        if not 0.0 < self.importance <= IMPORTANCE_MAX:
            raise ValueError(f"importance must be in (0, {IMPORTANCE_MAX}], got {self.importance}")
        if self.priority < 0:
            raise ValueError("priority must be >= 0")
        if self.kind is ConstraintKind.CARTESIAN_SHIFT:
            if self.direction is None or self.sign is not None:
                raise ValueError("cartesian constraints carry a direction, no sign")
            norm = sum(c * c for c in self.direction) ** 0.5
            if abs(norm - 1.0) > 1e-9:
                raise ValueError(f"direction must be unit length, got norm {norm}")
        else:
            if self.sign not in (-1, 1):
                raise ValueError(f"{self.kind.value} constraints need sign +1 or -1")
            if self.direction is not None:
                raise ValueError(f"{self.kind.value} constraints carry no direction")
            if self.target_object_id is None:
                raise ValueError(f"{self.kind.value} constraints need a target object")


@dataclass(frozen=True)
class ConstraintSet:
    constraints: tuple[Constraint, ...]
    source_command: str = ""

    def __post_init__(self):
        if not self.constraints:
            raise ValueError("a constraint set cannot be empty")
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def __len__(self) -> int:
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)


@dataclass
class InterpreterResult:
    constraint_set: ConstraintSet
    sequences: list[list[int]] = field(default_factory=list)
    rationale: str = ""

    def __post_init__(self):
        n = len(self.constraint_set)
        for seq in self.sequences:
            if sorted(seq) != list(range(n)):
                raise ValueError(f"sequence {seq} is not a permutation of 0..{n - 1}")


# ------------------------------------------------------------------ resolution
def resolve_object_id(reference: str, objects: list[SceneObject]) -> str:
    """Exact id match, then unique case-insensitive name match; else error.

    The error lists case-insensitive substring candidates to help the caller.
    """
    for obj in objects:
        if obj.id == reference:
            return obj.id
    low = reference.strip().lower()
    by_name = [o for o in objects if o.name.lower() == low]
    if len(by_name) == 1:
        return by_name[0].id
    if not by_name:
        by_name = [o for o in objects if low in o.name.lower() or low in o.id.lower()]
    raise ObjectResolutionError(reference, [o.id for o in by_name])


# ------------------------------------------------------------------ documents
def constraint_to_dict(c: Constraint) -> dict:
    d: dict = {"kind": c.kind.value}
    if c.kind is ConstraintKind.CARTESIAN_SHIFT:
        d["direction"] = list(c.direction)
    else:
        d["sign"] = c.sign
    d["target"] = c.target_object_id
    d["intensity"] = c.intensity
    d["importance"] = c.importance
    d["priority"] = c.priority
    return d


def constraint_set_to_document(cs: ConstraintSet) -> str:
    return json.dumps(
        {"constraints": [constraint_to_dict(c) for c in cs]},
        indent=2,
        sort_keys=True,
    )


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise SchemaError(path, message)


def _clamped(value: float, upper: float, path: str, clamp: bool, warnings: list[str]) -> float:
    if clamp and value > upper:
        warnings.append(f"{path}: value {value} clamped to {upper}")
        return upper
    return value


def _parse_constraint_entry(
    entry, i: int, objects: list[SceneObject], clamp: bool, warnings: list[str]
) -> Constraint:
    path = f"constraints[{i}]"
    _require(isinstance(entry, dict), path, "must be an object")
    allowed = {"kind", "direction", "sign", "target", "intensity", "importance", "priority"}
    for key in entry:
        _require(key in allowed, f"{path}.{key}", "unknown field")

    kind_raw = entry.get("kind")
    kinds = {k.value: k for k in ConstraintKind}
    _require(kind_raw in kinds, f"{path}.kind", f"must be one of {sorted(kinds)}")
    kind = kinds[kind_raw]

    target = entry.get("target")
    _require(target is None or isinstance(target, str), f"{path}.target", "must be a string or null")
    target_id = None
    if target is not None:
        target_id = resolve_object_id(target, objects)

    intensity = entry.get("intensity", 1.0)
    importance = entry.get("importance", 1.0)
    priority = entry.get("priority", i)
    _require(isinstance(intensity, (int, float)), f"{path}.intensity", "must be a number")
    _require(isinstance(importance, (int, float)), f"{path}.importance", "must be a number")
    _require(isinstance(priority, int) and not isinstance(priority, bool), f"{path}.priority", "must be an integer")
    intensity = _clamped(float(intensity), INTENSITY_MAX, f"{path}.intensity", clamp, warnings)
    importance = _clamped(float(importance), IMPORTANCE_MAX, f"{path}.importance", clamp, warnings)

    if kind is ConstraintKind.CARTESIAN_SHIFT:
        direction = entry.get("direction")
        _require(
            isinstance(direction, (list, tuple)) and len(direction) == 3,
            f"{path}.direction",
            "must be a 3-element array",
        )
        _require(
            all(isinstance(x, (int, float)) for x in direction),
            f"{path}.direction",
            "components must be numbers",
        )
        norm = sum(float(x) ** 2 for x in direction) ** 0.5
        _require(norm > 1e-12, f"{path}.direction", "must be nonzero")
        direction = tuple(float(x) / norm for x in direction)
        _require("sign" not in entry, f"{path}.sign", "not allowed for cartesian constraints")
        try:
            return Constraint(kind, direction=direction, target_object_id=target_id,
                              intensity=intensity, importance=importance, priority=priority)
        except ValueError as e:
            raise SchemaError(path, str(e)) from e

    sign = entry.get("sign")
    _require(sign in (1, -1), f"{path}.sign", "must be 1 or -1")
    _require("direction" not in entry, f"{path}.direction", "only allowed for cartesian constraints")
    _require(target is not None, f"{path}.target", "required for speed/distance constraints")
    try:
        return Constraint(kind, sign=int(sign), target_object_id=target_id,
                          intensity=intensity, importance=importance, priority=priority)
    except ValueError as e:
        raise SchemaError(path, str(e)) from e


def parse_interpreter_document(
    text: str,
    objects: list[SceneObject],
    source_command: str = "",
    clamp_bounds: bool = False,
) -> tuple[InterpreterResult, list[str]]:
    """Parse a full interpreter reply: constraints plus optional sequences/rationale.

    Returns the result and a list of clamping warnings (empty when
    clamp_bounds is False; out-of-bound values then raise SchemaError).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"not valid JSON: {e}") from e
    _require(isinstance(doc, dict), "$", "top level must be an object")
    allowed = {"constraints", "sequences", "rationale"}
    for key in doc:
        _require(key in allowed, f"$.{key}", "unknown field")
    raw = doc.get("constraints")
    _require(isinstance(raw, list) and len(raw) > 0, "$.constraints", "must be a non-empty array")

    warnings: list[str] = []
    constraints = [
        _parse_constraint_entry(entry, i, objects, clamp_bounds, warnings)
        for i, entry in enumerate(raw)
    ]
    cs = ConstraintSet(tuple(constraints), source_command)

    sequences = doc.get("sequences", [])
    _require(isinstance(sequences, list), "$.sequences", "must be an array")
    for j, seq in enumerate(sequences):
        _require(
            isinstance(seq, list) and sorted(seq) == list(range(len(constraints))),
            f"$.sequences[{j}]",
            "must be a permutation of the constraint indices",
        )
    rationale = doc.get("rationale", "")
    _require(isinstance(rationale, str), "$.rationale", "must be a string")
    return InterpreterResult(cs, [list(s) for s in sequences], rationale), warnings


def parse_constraint_document(text: str, objects: list[SceneObject]) -> ConstraintSet:
    """Strictly validated constraint document -> ConstraintSet."""
    result, _ = parse_interpreter_document(text, objects)
    return result.constraint_set


# ------------------------------------------------------------------ templates
_SPEED_PATTERNS = [
    (re.compile(r"\b(?:slow down|slower|more slowly)\b"), -1),
    (re.compile(r"\b(?:speed up|faster)\b"), 1),
]
_DISTANCE_PATTERNS = [
    (re.compile(r"\bcloser\b"), -1),
    (re.compile(r"\b(?:farther|further)\b"), 1),
]
_TARGET_RE = re.compile(r"\bthe\s+([\w ,'-]+?)\s*$")
_CLAUSE_SPLIT_RE = re.compile(r"\s*,\s*|\s+and\s+")


def _clause_target(clause: str, objects: list[SceneObject]) -> str:
    m = _TARGET_RE.search(clause)
    if m is None:
        raise InterpretationError(
            f"clause {clause!r} needs an object reference like 'the <object>'"
        )
    return resolve_object_id(m.group(1), objects)


def _parse_clause(clause: str, objects: list[SceneObject], priority: int) -> Constraint:
    low = clause.lower().strip()
    for pattern, sign in _SPEED_PATTERNS:
        if pattern.search(low):
            return Constraint(
                ConstraintKind.SPEED_CHANGE,
                sign=sign,
                target_object_id=_clause_target(low, objects),
                priority=priority,
            )
    for pattern, sign in _DISTANCE_PATTERNS:
        if pattern.search(low):
            return Constraint(
                ConstraintKind.OBJECT_DISTANCE,
                sign=sign,
                target_object_id=_clause_target(low, objects),
                priority=priority,
            )
    words = re.findall(r"[a-z]+", low)
    for word in words:
        if word in DIRECTION_WORDS:
            return Constraint(
                ConstraintKind.CARTESIAN_SHIFT,
                direction=DIRECTION_WORDS[word],
                priority=priority,
            )
    raise InterpretationError(f"cannot interpret clause: {clause!r}")


def interpret_command_template(command: str, objects: list[SceneObject]) -> InterpreterResult:
    """Deterministic grammar: one constraint per clause, priority = clause order.

    Recognized clause heads: the six direction words (global shift),
    faster/slower (or speed up / slow down) near an object, and
    closer/farther with 'to/from the <object>'. Clauses join with 'and' or
    commas. Anything else fails loudly; this interpreter never guesses.
    """
    clauses = [c for c in _CLAUSE_SPLIT_RE.split(command.strip()) if c]
    if not clauses:
        raise InterpretationError("empty command")
    constraints = [_parse_clause(c, objects, i) for i, c in enumerate(clauses)]
    return InterpreterResult(
        ConstraintSet(tuple(constraints), source_command=command),
        rationale="template grammar",
    )
