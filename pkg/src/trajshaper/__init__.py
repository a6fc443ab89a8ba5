"""Geometry-aware, language-constrained trajectory reshaping.

The pipeline: register primitives from point clouds (or load a scene file),
translate a command into declarative constraints, then let four agent
strategies reshape the 4-D trajectory through a potential-field iteration
until an observer confirms every constraint.
"""

from .agents import (
    AgentKind,
    AgentReport,
    CheckOutcome,
    ObserverThresholds,
    RefinementState,
    check_cartesian,
    check_distance,
    check_speed,
    observe,
    orchestrate,
    refine,
    run_parallel,
    run_parallel_importance,
    run_parallel_priority,
    run_sequential,
)
from .config import Config, load_config
from .constraints import (
    Constraint,
    ConstraintKind,
    ConstraintSet,
    InterpreterResult,
    interpret_command_template,
    parse_constraint_document,
)
from .dataset import Sample, generate_sample, random_scene, random_trajectory
from .errors import TrajshaperError
from .geometry import (
    BatchProximity,
    Cone,
    Cuboid,
    Cylinder,
    Pose,
    Primitive,
    ProximityResult,
    RectPlane,
    SceneObject,
    Sphere,
    batch_proximity,
    closest_point,
    closest_points,
    closest_to_object,
)
from .llm import ClientConfig, interpret_command_external
from .optimizer import (
    OptimizerParams,
    PotentialField,
    apply_speed_profile,
    build_fields,
    centroid_proxy,
    curvature_forces,
    external_force,
    external_forces,
    optimize,
    resolve_influence_radii,
    self_adherence_forces,
    spring_forces,
)
from .pipeline import ReshapeResult, reshape, reshape_command
from .registration import (
    OrientedBox,
    PointCloud,
    dbscan_cluster,
    fit_obb,
    fit_primitive,
    register_cloud,
    remove_statistical_outliers,
)
from .trajectory import (
    NormalizationTransform,
    Trajectory,
    closest_waypoint_indices,
    denormalize,
    normalize_scene,
    resample,
)

__version__ = "0.1.0"
