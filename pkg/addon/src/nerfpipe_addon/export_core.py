"""Frame sampling and document writing for the editor add-on.

Everything here is independent of the editor's Python API: the scene and
object arguments are duck-typed, so the logic runs under plain pytest with
scripted stand-ins. The add-on performs no camera math. It records raw
world matrices and lens state; inversion, field-of-view conversion, and
rescaling all happen in the nerfpipe toolkit that consumes the file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

SCHEMA_VERSION = 1

# Panel enum token -> interchange camera_type string.
_CAMERA_TYPES = {
    "PERSPECTIVE": "perspective",
    "EQUIRECTANGULAR": "equirectangular",
}

_SENSOR_FITS = ("AUTO", "HORIZONTAL", "VERTICAL")


class ExportError(Exception):
    """Raised with a user-facing message when an export cannot proceed."""


@dataclass
class AddonState:
    """What to export and where to write it; mirrors the panel controls."""

    camera: object | None = None
    nerf_object: object | None = None
    output_path: str = ""
    camera_type: str = "PERSPECTIVE"
    real_scale: float | None = None


def _check_state(state: AddonState) -> None:
    if state.camera is None:
        raise ExportError("no camera selected")
    if state.nerf_object is None:
        raise ExportError("no NeRF object selected")
    if not state.output_path:
        raise ExportError("no output path set")
    if state.camera_type not in _CAMERA_TYPES:
        raise ExportError(f"unknown camera type {state.camera_type!r}")
    if state.real_scale is not None and not state.real_scale > 0:
        raise ExportError("real scale must be positive")
    data = getattr(state.camera, "data", None)
    if data is None or not hasattr(data, "lens"):
        raise ExportError("selected camera has no lens settings")


def _flatten_world(matrix: object) -> list[float]:
    rows = [list(row) for row in matrix]
    if len(rows) != 4 or any(len(row) != 4 for row in rows):
        raise ExportError("expected a 4x4 world matrix")
    return [float(value) for row in rows for value in row]


def build_document(scene: object, state: AddonState) -> dict:
    """Sample every integer frame of the scene range into a schema-v1 dict.

    The scene's current frame is restored afterwards, even on error. All
    object state is read after ``frame_set`` so parenting, constraints, and
    keyframe evaluation are the host editor's own.
    """
    _check_state(state)
    render = scene.render
    fps = render.fps / render.fps_base
    if not fps > 0:
        raise ExportError("scene frame rate must be positive")
    width = (render.resolution_x * render.resolution_percentage) // 100
    height = (render.resolution_y * render.resolution_percentage) // 100
    frame_start = scene.frame_start
    frame_end = scene.frame_end
    if frame_end < frame_start:
        raise ExportError("scene frame range is empty")

    camera_frames = []
    nerf_frames = []
    previous = scene.frame_current
    try:
        for frame in range(frame_start, frame_end + 1):
            scene.frame_set(frame)
            data = state.camera.data
            fit = str(data.sensor_fit)
            if fit not in _SENSOR_FITS:
                raise ExportError(f"unsupported sensor fit {fit!r}")
            camera_frames.append(
                {
                    "frame": frame,
                    "world": _flatten_world(state.camera.matrix_world),
                    "focal_length_mm": float(data.lens),
                    "sensor_width_mm": float(data.sensor_width),
                    "sensor_height_mm": float(data.sensor_height),
                    "sensor_fit": fit,
                }
            )
            nerf_frames.append(
                {
                    "frame": frame,
                    "world": _flatten_world(state.nerf_object.matrix_world),
                }
            )
    finally:
        scene.frame_set(previous)

    document = {
        "version": SCHEMA_VERSION,
        "fps": float(fps),
        "frame_start": frame_start,
        "frame_end": frame_end,
        "render": {"width": int(width), "height": int(height)},
        "camera_type": _CAMERA_TYPES[state.camera_type],
    }
    if state.real_scale is not None:
        document["real_scale"] = float(state.real_scale)
    document["camera"] = {"frames": camera_frames}
    document["nerf_object"] = {
        "name": str(state.nerf_object.name),
        "frames": nerf_frames,
    }
    return document


def serialize_document(document: dict) -> bytes:
    return (json.dumps(document, indent=2) + "\n").encode("utf-8")


def export_interchange(scene: object, state: AddonState) -> int:
    """Write the interchange document for the scene; return the frame count."""
    document = build_document(scene, state)
    payload = serialize_document(document)
    path = Path(state.output_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return len(document["camera"]["frames"])
