"""Parse, validate, and canonically re-emit the scene-export document.

Schema version 1. The document is UTF-8 JSON carrying the fully-sampled
per-frame animation of one camera and one scene-proxy object plus render
settings:

    { "version": 1,
      "fps": 24.0,
      "frame_start": 1, "frame_end": 120,
      "render": {"width": 1920, "height": 1080},
      "camera_type": "perspective" | "equirectangular",
      "real_scale": 0.5,                              // optional
      "camera": {"frames": [
          {"frame": 1, "world": [16 floats, row-major],
           "focal_length_mm": 50.0, "sensor_width_mm": 36.0,
           "sensor_height_mm": 24.0, "sensor_fit": "AUTO"}, ...]},
      "nerf_object": {"name": "poster", "frames": [
          {"frame": 1, "world": [16 floats, row-major]}, ...]} }

Every track must carry exactly one sample per frame of the declared range,
in ascending order. Missing samples are an error, never interpolated: the
exporter controls sampling, and silent extrapolation would hide exporter
bugs. Unknown keys warn instead of failing so older toolkit versions keep
reading newer exporters' files.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

from .errors import (
    FrameCoverageGapError,
    MalformedDocumentError,
    NonPositiveError,
    SchemaViolationError,
    SingularMatrixError,
    UnsupportedVersionError,
)
from .fov import LensSample, SensorFit
from .transform import Mat4, analyze_scale

__all__ = [
    "SCHEMA_VERSION",
    "CameraType",
    "ParseReport",
    "ParseWarning",
    "SceneInterchange",
    "parse_interchange",
    "serialize_interchange",
]

SCHEMA_VERSION = 1

WARN_NONUNIFORM_SCALE = "NONUNIFORM_SCALE"
WARN_UNKNOWN_KEY = "UNKNOWN_KEY"

_CAMERA_FRAME_KEYS = {
    "frame",
    "world",
    "focal_length_mm",
    "sensor_width_mm",
    "sensor_height_mm",
    "sensor_fit",
}
_TOP_KEYS = {
    "version",
    "fps",
    "frame_start",
    "frame_end",
    "render",
    "camera_type",
    "real_scale",
    "camera",
    "nerf_object",
}


class CameraType(enum.Enum):
    PERSPECTIVE = "perspective"
    EQUIRECTANGULAR = "equirectangular"


@dataclass(frozen=True)
class ParseWarning:
    """Non-fatal finding; ``frame`` is None for document-level warnings."""

    frame: int | None
    code: str
    message: str


@dataclass
class ParseReport:
    warnings: list[ParseWarning] = field(default_factory=list)

    def warn(self, frame: int | None, code: str, message: str) -> None:
        self.warnings.append(ParseWarning(frame, code, message))


@dataclass(frozen=True)
class SceneInterchange:
    """Validated scene export: one sample per frame on every track.

    Track lists are indexed 0..n-1 for frames ``frame_start + i``.
    """

    version: int
    fps: float
    frame_start: int
    frame_end: int
    render_width: int
    render_height: int
    camera_type: CameraType
    lens: tuple[LensSample, ...]
    camera_frames: tuple[Mat4, ...]
    nerf_frames: tuple[Mat4, ...]
    nerf_name: str
    real_scale: float | None = None

    @property
    def frame_count(self) -> int:
        return self.frame_end - self.frame_start + 1

    def frames(self) -> range:
        return range(self.frame_start, self.frame_end + 1)


def _expect_object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaViolationError(f"expected an object, got {type(value).__name__}", path)
    return value


def _expect_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaViolationError(f"expected an array, got {type(value).__name__}", path)
    return value


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaViolationError("missing required field", f"{path}.{key}" if path else key)
    return obj[key]


def _expect_int(value, path: str) -> int:
    # bool is an int subclass; reject it explicitly.
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolationError(f"expected an integer, got {value!r}", path)
    return value


def _expect_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolationError(f"expected a number, got {value!r}", path)
    number = float(value)
    # json.loads admits NaN/Infinity literals; none of this schema's fields
    # can meaningfully carry them.
    if not math.isfinite(number):
        raise SchemaViolationError(f"expected a finite number, got {number!r}", path)
    return number


def _expect_positive_number(value, path: str) -> float:
    number = _expect_number(value, path)
    if not number > 0:
        raise NonPositiveError(f"{path} must be > 0, got {number}", path)
    return number


def _expect_positive_int(value, path: str) -> int:
    number = _expect_int(value, path)
    if not number > 0:
        raise NonPositiveError(f"{path} must be > 0, got {number}", path)
    return number


def _expect_string(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaViolationError(f"expected a string, got {value!r}", path)
    return value


def _warn_unknown_keys(obj: dict, known: set[str], path: str, report: ParseReport, frame: int | None = None) -> None:
    for key in obj:
        if key not in known:
            where = f"{path}.{key}" if path else key
            report.warn(frame, WARN_UNKNOWN_KEY, f"ignoring unknown key {where}")


def _parse_world(value, path: str, frame: int, obj_label: str) -> Mat4:
    values = _expect_list(value, path)
    if len(values) != 16:
        raise SchemaViolationError(f"expected 16 numbers, got {len(values)}", path)
    floats = [_expect_number(v, f"{path}[{i}]") for i, v in enumerate(values)]
    if floats[12:16] != [0.0, 0.0, 0.0, 1.0]:
        raise SchemaViolationError(f"bottom row must be exactly [0, 0, 0, 1], got {floats[12:16]}", path)
    try:
        return Mat4(floats)
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            f"singular world matrix for {obj_label} at frame {frame}", frame=frame, obj=obj_label
        ) from exc


def _check_coverage(frames_seen: list[int], start: int, end: int, track: str) -> None:
    """Enforce one sample per frame of start..end, ascending.

    Checked in order: out-of-range sample, duplicate sample, missing frame,
    out-of-order samples (unreachable once the first three pass, kept as a
    guard).
    """
    seen: set[int] = set()
    for frame in frames_seen:
        if frame < start or frame > end:
            raise SchemaViolationError(f"frame {frame} outside declared range {start}..{end}", f"{track}.frames")
        if frame in seen:
            raise SchemaViolationError(f"duplicate sample for frame {frame}", f"{track}.frames")
        seen.add(frame)
    for frame in range(start, end + 1):
        if frame not in seen:
            raise FrameCoverageGapError(track, frame)
    if frames_seen != sorted(frames_seen):
        raise SchemaViolationError("samples must be in ascending frame order", f"{track}.frames")


def parse_interchange(data: bytes) -> tuple[SceneInterchange, ParseReport]:
    """Parse and fully validate a scene-export document.

    Returns the validated scene plus a report of non-fatal warnings
    (unknown keys, non-uniform proxy scale). Warnings never alter parsed
    values.

    Raises
    ------
    MalformedDocumentError
        Not UTF-8, or not syntactically valid JSON.
    SchemaViolationError
        Missing/mistyped/structurally invalid field; message names the path.
    UnsupportedVersionError
        ``version`` is an integer other than 1.
    NonPositiveError
        fps, dimensions, lens lengths, or real_scale not strictly positive.
    FrameCoverageGapError
        A track is missing a frame inside the declared range.
    SingularMatrixError
        A world matrix is not invertible; names frame and object.
    """
    report = ParseReport()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedDocumentError(f"document is not UTF-8: {exc}") from exc
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"document is not valid JSON: {exc}") from exc

    root = _expect_object(root, "document")
    _warn_unknown_keys(root, _TOP_KEYS, "", report)

    version = _expect_int(_require(root, "version", ""), "version")
    if version != SCHEMA_VERSION:
        raise UnsupportedVersionError(version)

    fps = _expect_positive_number(_require(root, "fps", ""), "fps")
    frame_start = _expect_int(_require(root, "frame_start", ""), "frame_start")
    frame_end = _expect_int(_require(root, "frame_end", ""), "frame_end")
    if frame_start > frame_end:
        raise SchemaViolationError(f"frame_start {frame_start} > frame_end {frame_end}", "frame_start")

    render = _expect_object(_require(root, "render", ""), "render")
    _warn_unknown_keys(render, {"width", "height"}, "render", report)
    render_width = _expect_positive_int(_require(render, "width", "render"), "render.width")
    render_height = _expect_positive_int(_require(render, "height", "render"), "render.height")

    camera_type_raw = _expect_string(_require(root, "camera_type", ""), "camera_type")
    try:
        camera_type = CameraType(camera_type_raw)
    except ValueError:
        raise SchemaViolationError(
            f"must be 'perspective' or 'equirectangular', got {camera_type_raw!r}", "camera_type"
        ) from None

    real_scale = None
    if "real_scale" in root:
        real_scale = _expect_positive_number(root["real_scale"], "real_scale")

    camera = _expect_object(_require(root, "camera", ""), "camera")
    _warn_unknown_keys(camera, {"frames"}, "camera", report)
    camera_entries = _expect_list(_require(camera, "frames", "camera"), "camera.frames")

    camera_frames: list[Mat4] = []
    lens_samples: list[LensSample] = []
    camera_frame_numbers: list[int] = []
    for i, raw in enumerate(camera_entries):
        path = f"camera.frames[{i}]"
        entry = _expect_object(raw, path)
        frame = _expect_int(_require(entry, "frame", path), f"{path}.frame")
        _warn_unknown_keys(entry, _CAMERA_FRAME_KEYS, path, report, frame=frame)
        camera_frame_numbers.append(frame)
        camera_frames.append(_parse_world(_require(entry, "world", path), f"{path}.world", frame, "camera"))
        focal = _expect_positive_number(_require(entry, "focal_length_mm", path), f"{path}.focal_length_mm")
        sensor_w = _expect_positive_number(_require(entry, "sensor_width_mm", path), f"{path}.sensor_width_mm")
        sensor_h = _expect_positive_number(_require(entry, "sensor_height_mm", path), f"{path}.sensor_height_mm")
        fit_raw = _expect_string(_require(entry, "sensor_fit", path), f"{path}.sensor_fit")
        try:
            fit = SensorFit(fit_raw)
        except ValueError:
            raise SchemaViolationError(
                f"must be 'AUTO', 'HORIZONTAL', or 'VERTICAL', got {fit_raw!r}", f"{path}.sensor_fit"
            ) from None
        lens_samples.append(LensSample(focal, sensor_w, sensor_h, fit))
    _check_coverage(camera_frame_numbers, frame_start, frame_end, "camera")

    nerf = _expect_object(_require(root, "nerf_object", ""), "nerf_object")
    _warn_unknown_keys(nerf, {"name", "frames"}, "nerf_object", report)
    nerf_name = _expect_string(_require(nerf, "name", "nerf_object"), "nerf_object.name")
    nerf_entries = _expect_list(_require(nerf, "frames", "nerf_object"), "nerf_object.frames")

    nerf_frames: list[Mat4] = []
    nerf_frame_numbers: list[int] = []
    obj_label = f"nerf_object '{nerf_name}'"
    for i, raw in enumerate(nerf_entries):
        path = f"nerf_object.frames[{i}]"
        entry = _expect_object(raw, path)
        frame = _expect_int(_require(entry, "frame", path), f"{path}.frame")
        _warn_unknown_keys(entry, {"frame", "world"}, path, report, frame=frame)
        nerf_frame_numbers.append(frame)
        nerf_frames.append(_parse_world(_require(entry, "world", path), f"{path}.world", frame, obj_label))
    _check_coverage(nerf_frame_numbers, frame_start, frame_end, "nerf_object")

    for frame, world in zip(nerf_frame_numbers, nerf_frames):
        analysis = analyze_scale(world)
        if not analysis.uniform:
            norms = ", ".join(f"{n:.6g}" for n in analysis.column_norms)
            report.warn(
                frame,
                WARN_NONUNIFORM_SCALE,
                f"{obj_label} has non-uniform scale at frame {frame} (column norms {norms}); "
                "renderer behavior under anisotropic scale is undefined",
            )

    scene = SceneInterchange(
        version=version,
        fps=fps,
        frame_start=frame_start,
        frame_end=frame_end,
        render_width=render_width,
        render_height=render_height,
        camera_type=camera_type,
        lens=tuple(lens_samples),
        camera_frames=tuple(camera_frames),
        nerf_frames=tuple(nerf_frames),
        nerf_name=nerf_name,
        real_scale=real_scale,
    )
    return scene, report


def serialize_interchange(scene: SceneInterchange) -> bytes:
    """Canonical byte form of a scene: fixed key order, LF newlines.

    ``parse_interchange(serialize_interchange(s))`` returns a scene equal
    to ``s``, and re-serializing is byte-stable.
    """
    camera_frames = []
    for i, frame in enumerate(scene.frames()):
        sample = scene.lens[i]
        camera_frames.append(
            {
                "frame": frame,
                "world": scene.camera_frames[i].to_flat(),
                "focal_length_mm": sample.focal_length,
                "sensor_width_mm": sample.sensor_width,
                "sensor_height_mm": sample.sensor_height,
                "sensor_fit": sample.fit.value,
            }
        )
    payload: dict = {
        "version": scene.version,
        "fps": scene.fps,
        "frame_start": scene.frame_start,
        "frame_end": scene.frame_end,
        "render": {"width": scene.render_width, "height": scene.render_height},
        "camera_type": scene.camera_type.value,
    }
    if scene.real_scale is not None:
        payload["real_scale"] = scene.real_scale
    payload["camera"] = {"frames": camera_frames}
    payload["nerf_object"] = {
        "name": scene.nerf_name,
        "frames": [
            {"frame": frame, "world": scene.nerf_frames[i].to_flat()} for i, frame in enumerate(scene.frames())
        ],
    }
    return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
