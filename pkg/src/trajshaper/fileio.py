"""File formats: scenes, trajectories, point clouds, datasets, and run reports.

All JSON writers sort keys and use plain float repr, so identical inputs
produce byte-identical files. Trajectory files keep whichever of the two
formats they arrived in (CSV rows of x,y,z,v or a JSON waypoint array).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .agents import AgentReport
from .constraints import ConstraintSet, constraint_to_dict, parse_constraint_document
from .dataset import Sample
from .errors import SchemaError
from .geometry import Cone, Cuboid, Cylinder, Pose, Primitive, RectPlane, SceneObject, Sphere
from .registration import SHAPE_HINTS, PointCloud
from .trajectory import Trajectory

_SHAPE_NAMES = {
    Sphere: "sphere",
    RectPlane: "rect_plane",
    Cylinder: "cylinder",
    Cone: "cone",
    Cuboid: "cuboid",
}


def dumps_canonical(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------------ primitives
def primitive_to_dict(p: Primitive) -> dict:
    if isinstance(p, Sphere):
        dims = {"radius": p.radius}
    elif isinstance(p, RectPlane):
        dims = {"half_width": p.half_width, "half_height": p.half_height}
    elif isinstance(p, Cylinder):
        dims = {"radius": p.radius, "half_length": p.half_length}
    elif isinstance(p, Cone):
        dims = {"base_radius": p.base_radius, "height": p.height}
    elif isinstance(p, Cuboid):
        dims = {"half_extents": [float(x) for x in p.half_extents]}
    else:
        raise TypeError(f"unknown primitive {p!r}")
    return {"shape": _SHAPE_NAMES[type(p)], "dimensions": dims}


def _num(doc: dict, key: str, path: str) -> float:
    value = doc.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SchemaError(f"{path}.{key}", "must be a number")
    return float(value)


def primitive_from_dict(doc: dict, path: str) -> Primitive:
    shape = doc.get("shape")
    dims = doc.get("dimensions")
    if not isinstance(dims, dict):
        raise SchemaError(f"{path}.dimensions", "must be an object")
    dp = f"{path}.dimensions"
    try:
        if shape == "sphere":
            return Sphere(_num(dims, "radius", dp))
        if shape == "rect_plane":
            return RectPlane(_num(dims, "half_width", dp), _num(dims, "half_height", dp))
        if shape == "cylinder":
            return Cylinder(_num(dims, "radius", dp), _num(dims, "half_length", dp))
        if shape == "cone":
            return Cone(_num(dims, "base_radius", dp), _num(dims, "height", dp))
        if shape == "cuboid":
            he = dims.get("half_extents")
            if not (isinstance(he, list) and len(he) == 3):
                raise SchemaError(f"{dp}.half_extents", "must be a 3-element array")
            return Cuboid(np.asarray(he, dtype=float))
    except ValueError as e:
        raise SchemaError(dp, str(e)) from e
    raise SchemaError(f"{path}.shape", f"unknown shape {shape!r}")


# ------------------------------------------------------------------ scenes
def scene_object_to_dict(obj: SceneObject) -> dict:
    doc = {
        "id": obj.id,
        "name": obj.name,
        **primitive_to_dict(obj.primitive),
        "pose": {
            "position": [float(x) for x in obj.pose.position],
            "orientation": [float(x) for x in obj.pose.orientation],  # x, y, z, w
        },
        "fragility": obj.fragility,
    }
    if obj.influence_radius is not None:
        doc["influence_radius"] = float(obj.influence_radius)
    return doc


def scene_to_document(objects: list[SceneObject]) -> str:
    return dumps_canonical({"objects": [scene_object_to_dict(o) for o in objects]})


def scene_object_from_dict(doc: dict, path: str) -> SceneObject:
    if not isinstance(doc, dict):
        raise SchemaError(path, "must be an object")
    allowed = {"id", "name", "shape", "dimensions", "pose", "fragility", "influence_radius"}
    for key in doc:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}", "unknown field")
    oid = doc.get("id")
    if not isinstance(oid, str) or not oid:
        raise SchemaError(f"{path}.id", "must be a non-empty string")
    name = doc.get("name", oid)
    if not isinstance(name, str):
        raise SchemaError(f"{path}.name", "must be a string")
    pose_doc = doc.get("pose")
    if not isinstance(pose_doc, dict):
        raise SchemaError(f"{path}.pose", "must be an object")
    position = pose_doc.get("position")
    orientation = pose_doc.get("orientation", [0.0, 0.0, 0.0, 1.0])
    if not (isinstance(position, list) and len(position) == 3):
        raise SchemaError(f"{path}.pose.position", "must be a 3-element array")
    if not (isinstance(orientation, list) and len(orientation) == 4):
        raise SchemaError(f"{path}.pose.orientation", "must be a 4-element array (x, y, z, w)")
    try:
        pose = Pose(np.asarray(position, float), np.asarray(orientation, float))
    except ValueError as e:
        raise SchemaError(f"{path}.pose", str(e)) from e
    fragility = doc.get("fragility", 0.5)
    influence = doc.get("influence_radius")
    try:
        return SceneObject(
            id=oid,
            name=name,
            primitive=primitive_from_dict(doc, path),
            pose=pose,
            influence_radius=None if influence is None else float(influence),
            fragility=float(fragility),
        )
    except (TypeError, ValueError) as e:
        raise SchemaError(path, str(e)) from e


def parse_scene_document(text: str) -> list[SceneObject]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"not valid JSON: {e}") from e
    if not isinstance(doc, dict) or "objects" not in doc:
        raise SchemaError("$", "top level must be an object with an 'objects' array")
    objects_doc = doc["objects"]
    if not isinstance(objects_doc, list):
        raise SchemaError("$.objects", "must be an array")
    objects = [
        scene_object_from_dict(o, f"$.objects[{i}]") for i, o in enumerate(objects_doc)
    ]
    ids = [o.id for o in objects]
    if len(set(ids)) != len(ids):
        raise SchemaError("$.objects", "object ids must be unique")
    return objects


def load_scene(path: str | Path) -> list[SceneObject]:
    return parse_scene_document(Path(path).read_text())


def save_scene(objects: list[SceneObject], path: str | Path):
    Path(path).write_text(scene_to_document(objects))


# ------------------------------------------------------------------ trajectories
def trajectory_to_document(traj: Trajectory) -> str:
    return dumps_canonical(
        {"waypoints": [[float(v) for v in row] for row in traj.waypoints]}
    )


def trajectory_to_csv(traj: Trajectory) -> str:
    lines = ["x,y,z,v"]
    lines += [",".join(repr(float(v)) for v in row) for row in traj.waypoints]
    return "\n".join(lines) + "\n"


def parse_trajectory_document(text: str) -> Trajectory:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"not valid JSON: {e}") from e
    rows = doc.get("waypoints") if isinstance(doc, dict) else doc
    if not isinstance(rows, list) or not rows:
        raise SchemaError("$.waypoints", "must be a non-empty array")
    try:
        return Trajectory.from_waypoints(np.asarray(rows, dtype=float))
    except ValueError as e:
        raise SchemaError("$.waypoints", str(e)) from e


def parse_trajectory_csv(text: str) -> Trajectory:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        fields = [f for f in line.replace(",", " ").split() if f]
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            if rows:
                raise SchemaError("$", f"non-numeric row: {line!r}") from None
            continue  # header row
    if not rows:
        raise SchemaError("$", "no waypoint rows found")
    arr = np.asarray(rows, dtype=float)
    if arr.shape[1] != 4:
        raise SchemaError("$", f"expected 4 columns x,y,z,v, got {arr.shape[1]}")
    try:
        return Trajectory.from_waypoints(arr)
    except ValueError as e:
        raise SchemaError("$", str(e)) from e


def load_trajectory(path: str | Path) -> Trajectory:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return parse_trajectory_document(text)
    return parse_trajectory_csv(text)


def save_trajectory(traj: Trajectory, path: str | Path):
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(trajectory_to_document(traj))
    else:
        path.write_text(trajectory_to_csv(traj))


# ------------------------------------------------------------------ point clouds
def load_point_cloud(path: str | Path) -> PointCloud:
    """Cloud file (text xyz rows or binary little-endian float32 triplets)
    plus its sidecar descriptor '<stem>.json' carrying label and shape_hint."""
    path = Path(path)
    descriptor = path.with_suffix(".json")
    if not descriptor.exists():
        raise SchemaError(str(descriptor), "missing sidecar descriptor")
    meta = json.loads(descriptor.read_text())
    label = meta.get("label")
    hint = meta.get("shape_hint")
    if not isinstance(label, str) or hint not in SHAPE_HINTS:
        raise SchemaError(
            str(descriptor), f"descriptor needs 'label' and 'shape_hint' in {SHAPE_HINTS}"
        )
    if path.suffix.lower() in (".bin", ".f32"):
        raw = np.frombuffer(path.read_bytes(), dtype="<f4")
        if raw.size % 3:
            raise SchemaError(str(path), "binary cloud length is not a multiple of 3")
        points = raw.reshape(-1, 3).astype(float)
    else:
        text = path.read_text()
        rows = [
            [float(f) for f in line.replace(",", " ").split()]
            for line in text.splitlines()
            if line.strip()
        ]
        points = np.asarray(rows, dtype=float)
    return PointCloud(points, label, hint)


def save_point_cloud(cloud: PointCloud, path: str | Path):
    path = Path(path)
    if path.suffix.lower() in (".bin", ".f32"):
        path.write_bytes(cloud.points.astype("<f4").tobytes())
    else:
        path.write_text(
            "\n".join(" ".join(repr(float(v)) for v in row) for row in cloud.points) + "\n"
        )
    path.with_suffix(".json").write_text(
        dumps_canonical({"label": cloud.label, "shape_hint": cloud.shape_hint})
    )


# ------------------------------------------------------------------ samples
def sample_to_document(sample: Sample) -> str:
    return dumps_canonical(
        {
            "seed": sample.seed,
            "kind": sample.kind,
            "command": sample.command_text,
            "trajectory": {
                "waypoints": [[float(v) for v in row] for row in sample.trajectory.waypoints]
            },
            "scene": {"objects": [scene_object_to_dict(o) for o in sample.scene]},
            "ground_truth": {
                "constraints": [constraint_to_dict(c) for c in sample.ground_truth]
            },
        }
    )


def sample_from_document(text: str) -> Sample:
    doc = json.loads(text)
    scene = [
        scene_object_from_dict(o, f"$.scene.objects[{i}]")
        for i, o in enumerate(doc["scene"]["objects"])
    ]
    trajectory = Trajectory.from_waypoints(np.asarray(doc["trajectory"]["waypoints"], float))
    ground_truth = parse_constraint_document(
        json.dumps({"constraints": doc["ground_truth"]["constraints"]}), scene
    )
    ground_truth = ConstraintSet(ground_truth.constraints, doc["command"])
    return Sample(trajectory, scene, doc["command"], ground_truth, doc["seed"], doc["kind"])


def write_dataset(samples: list[Sample], directory: str | Path):
    directory = Path(directory)
    (directory / "samples").mkdir(parents=True, exist_ok=True)
    manifest = []
    for i, sample in enumerate(samples):
        rel = f"samples/sample_{i:05d}.json"
        (directory / rel).write_text(sample_to_document(sample))
        manifest.append({"file": rel, "seed": sample.seed, "kind": sample.kind})
    (directory / "manifest.json").write_text(dumps_canonical({"samples": manifest}))


def read_dataset(directory: str | Path) -> list[Sample]:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    return [
        sample_from_document((directory / entry["file"]).read_text())
        for entry in manifest["samples"]
    ]


# ------------------------------------------------------------------ reports
def outcome_to_dict(outcome) -> dict:
    return {
        "constraint_index": outcome.constraint_index,
        "kind": outcome.kind,
        "measured": outcome.measured,
        "threshold": outcome.threshold,
        "passed": outcome.passed,
    }


def report_to_dict(report: AgentReport, include_waypoints: bool = False) -> dict:
    doc = {
        "agent": report.agent.value,
        "round": report.round_index,
        "passed": report.all_passed,
        "outcomes": [outcome_to_dict(o) for o in report.outcomes],
    }
    if include_waypoints:
        doc["waypoints"] = [[float(v) for v in row] for row in report.candidate.waypoints]
    return doc


def run_report_document(best: AgentReport, all_reports: list[AgentReport]) -> str:
    return dumps_canonical(
        {
            "best": report_to_dict(best),
            "rounds": max(r.round_index for r in all_reports) + 1,
            "reports": [report_to_dict(r) for r in all_reports],
        }
    )
