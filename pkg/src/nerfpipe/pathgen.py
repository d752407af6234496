"""Build and serialize the renderer-consumable camera-path document.

For each frame the editor camera's world pose is re-expressed relative to
the scene proxy (``align_camera``), paired with the frame's vertical FOV
and the render aspect ratio. Serialization is deterministic: fixed key
order, shortest round-trip float formatting, LF newlines, so golden-file
diffs stay meaningful and a watching renderer never sees two encodings of
the same path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .errors import NonPositiveError, SingularMatrixError
from .fov import EQUIRECTANGULAR_FOV_DEGREES, vertical_fov
from .interchange import CameraType, SceneInterchange
from .transform import Mat4, align_camera

__all__ = [
    "CameraPathDocument",
    "CameraPathEntry",
    "apply_real_scale",
    "build_path",
    "serialize_path",
]


@dataclass(frozen=True)
class CameraPathEntry:
    """One frame of the output path: pose in scene space, FOV, aspect."""

    camera_to_world: Mat4
    fov: float
    aspect: float


@dataclass(frozen=True)
class CameraPathDocument:
    camera_type: CameraType
    render_width: int
    render_height: int
    fps: float
    seconds: float
    entries: tuple[CameraPathEntry, ...]


def build_path(scene: SceneInterchange) -> CameraPathDocument:
    """Produce the per-frame camera path for a validated scene.

    Entries are emitted in ascending frame order. Perspective cameras get
    the lens-derived vertical FOV for their frame; equirectangular cameras
    get the constant 180 and their lens data is ignored. If the scene
    carries ``real_scale`` it is applied before returning.
    """
    entries = []
    aspect = scene.render_width / scene.render_height
    for i, frame in enumerate(scene.frames()):
        try:
            camera_to_world = align_camera(scene.camera_frames[i], scene.nerf_frames[i])
        except SingularMatrixError as exc:
            label = f"nerf_object '{scene.nerf_name}'"
            raise SingularMatrixError(
                f"cannot align frame {frame} against {label}: {exc}", frame=frame, obj=label
            ) from exc
        if scene.camera_type is CameraType.PERSPECTIVE:
            fov = vertical_fov(scene.lens[i], scene.render_width, scene.render_height)
        else:
            fov = EQUIRECTANGULAR_FOV_DEGREES
        entries.append(CameraPathEntry(camera_to_world=camera_to_world, fov=fov, aspect=aspect))

    doc = CameraPathDocument(
        camera_type=scene.camera_type,
        render_width=scene.render_width,
        render_height=scene.render_height,
        fps=scene.fps,
        seconds=len(entries) / scene.fps,
        entries=tuple(entries),
    )
    if scene.real_scale is not None:
        doc = apply_real_scale(doc, scene.real_scale)
    return doc


def apply_real_scale(doc: CameraPathDocument, scale: float) -> CameraPathDocument:
    """Rescale camera positions by ``scale`` (scene units -> metres).

    Multiplies only the translation column of each pose, equivalent to
    uniformly scaling the scene about its origin; orientation and FOV are
    untouched. Used to bring a scene to real-world size for VR output.
    """
    if not scale > 0:
        raise NonPositiveError(f"scale must be > 0, got {scale}")
    entries = []
    for entry in doc.entries:
        m = entry.camera_to_world.array.copy()
        m[:3, 3] *= scale
        entries.append(replace(entry, camera_to_world=Mat4(m)))
    return replace(doc, entries=tuple(entries))


def serialize_path(doc: CameraPathDocument) -> bytes:
    """Deterministic UTF-8 byte encoding of a camera-path document.

    Re-serializing the same document always yields identical bytes.
    ``is_cycle`` and ``smoothness_value`` are emitted as constants for
    renderer compatibility.
    """
    payload = {
        "camera_type": doc.camera_type.value,
        "render_height": doc.render_height,
        "render_width": doc.render_width,
        "camera_path": [
            {
                "camera_to_world": entry.camera_to_world.to_flat(),
                "fov": entry.fov,
                "aspect": entry.aspect,
            }
            for entry in doc.entries
        ],
        "fps": doc.fps,
        "seconds": doc.seconds,
        "is_cycle": False,
        "smoothness_value": 0.0,
    }
    return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
