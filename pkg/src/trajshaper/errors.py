"""Exception types shared across the package."""

from __future__ import annotations


class TrajshaperError(Exception):
    """Base class for all package-specific errors."""


class InsufficientPointsError(TrajshaperError):
    """A point cloud is too small for the requested operation."""


class DegenerateCloudError(TrajshaperError):
    """Point cloud has rank < 3 covariance; no box can be oriented."""


class NoClusterError(TrajshaperError):
    """Density clustering produced no cluster meeting the minimum size."""


class NormalizationError(TrajshaperError):
    """Scene bounding box is degenerate; the normalization scale is undefined."""


class SchemaError(TrajshaperError):
    """A structured document violates its schema. Carries the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ObjectResolutionError(TrajshaperError):
    """An object reference could not be resolved to exactly one scene object."""

    def __init__(self, reference: str, candidates: list[str]):
        if candidates:
            detail = "candidates: " + ", ".join(candidates)
        else:
            detail = "no scene object matches"
        super().__init__(f"cannot resolve object {reference!r} ({detail})")
        self.reference = reference
        self.candidates = candidates


class InterpretationError(TrajshaperError):
    """A command could not be turned into constraints."""

    def __init__(self, message: str, raw_replies: list[str] | None = None):
        super().__init__(message)
        self.raw_replies = raw_replies or []


class TransportError(TrajshaperError):
    """Network or authentication failure while talking to the external interpreter."""


class OptimizationError(TrajshaperError):
    """The force iteration produced a non-finite value."""

    def __init__(self, iteration: int, waypoint: int):
        super().__init__(
            f"non-finite force at iteration {iteration}, waypoint {waypoint}"
        )
        self.iteration = iteration
        self.waypoint = waypoint


class SceneBuildError(TrajshaperError):
    """Random scene generation exhausted its rejection-sampling budget."""


class ConfigError(TrajshaperError):
    """Configuration file failed validation."""
