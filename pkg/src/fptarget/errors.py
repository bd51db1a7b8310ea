"""Exception hierarchy shared by the toolkit."""

from __future__ import annotations


class FptargetError(Exception):
    """Base class for all toolkit errors."""


class MeshError(FptargetError):
    """Invalid mesh data or a mesh operation that cannot be performed."""


class DegenerateFaceError(MeshError):
    def __init__(self, face_index: int, message: str | None = None):
        self.face_index = face_index
        super().__init__(message or f"face {face_index} is degenerate (zero area)")


class NonManifoldEdgeError(MeshError):
    def __init__(self, edge: tuple[int, int], count: int):
        self.edge = edge
        self.count = count
        super().__init__(f"edge {edge[0]}-{edge[1]} is used by {count} faces (>2)")


class GeometryError(FptargetError):
    """A geometric constraint of the fabrication design is violated."""


class FormatError(FptargetError):
    """A file could not be parsed."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class MeasurementError(FptargetError):
    """Metrology could not produce a measurement."""


class MatcherError(FptargetError):
    """A matcher failed to produce a usable score."""


class StageError(FptargetError):
    """Pipeline failure tagged with the stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")
