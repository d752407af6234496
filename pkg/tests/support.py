"""Shared test helpers: fixture builders and independent reference
implementations (oracles) that deliberately avoid the library's own code
paths.
"""

from __future__ import annotations

import copy
import json
import math
import struct
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from nerfpipe.errors import (
    FrameCoverageGapError,
    MalformedDocumentError,
    NonPositiveError,
    SchemaViolationError,
    SingularMatrixError,
    UnsupportedVersionError,
)
from nerfpipe.transform import Mat4

IDENTITY_FLAT = [
    1.0, 0.0, 0.0, 0.0,
    0.0, 1.0, 0.0, 0.0,
    0.0, 0.0, 1.0, 0.0,
    0.0, 0.0, 0.0, 1.0,
]


# ---------------------------------------------------------------------------
# Random transforms


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly random 3x3 rotation from a normalized random quaternion."""
    q = rng.normal(size=4)
    q = q / np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def random_affine(
    rng: np.random.Generator,
    scale_range: tuple[float, float] = (0.1, 10.0),
    translation_range: tuple[float, float] = (-100.0, 100.0),
) -> Mat4:
    """Rotation * uniform scale * translation, the acceptance-suite family."""
    m = np.eye(4)
    m[:3, :3] = random_rotation(rng) * rng.uniform(*scale_range)
    m[:3, 3] = rng.uniform(*translation_range, size=3)
    return Mat4(m)


# ---------------------------------------------------------------------------
# Scene-document builders


def camera_frame_entry(
    frame: int,
    world: list[float] | None = None,
    focal: float = 50.0,
    sensor_width: float = 36.0,
    sensor_height: float = 24.0,
    fit: str = "AUTO",
) -> dict:
    return {
        "frame": frame,
        "world": list(world if world is not None else IDENTITY_FLAT),
        "focal_length_mm": focal,
        "sensor_width_mm": sensor_width,
        "sensor_height_mm": sensor_height,
        "sensor_fit": fit,
    }


def nerf_frame_entry(frame: int, world: list[float] | None = None) -> dict:
    return {"frame": frame, "world": list(world if world is not None else IDENTITY_FLAT)}


def make_scene_doc(
    frame_start: int = 1,
    frame_end: int = 1,
    camera_worlds: list[list[float]] | None = None,
    nerf_worlds: list[list[float]] | None = None,
    fps: float = 24.0,
    width: int = 1920,
    height: int = 1080,
    camera_type: str = "perspective",
    real_scale: float | None = None,
    nerf_name: str = "poster",
    lens: list[dict] | None = None,
) -> dict:
    """A valid schema-v1 scene document; every argument overrides one field."""
    count = frame_end - frame_start + 1
    frames = list(range(frame_start, frame_end + 1))
    camera_worlds = camera_worlds or [IDENTITY_FLAT] * count
    nerf_worlds = nerf_worlds or [IDENTITY_FLAT] * count
    lens = lens or [{}] * count
    doc = {
        "version": 1,
        "fps": fps,
        "frame_start": frame_start,
        "frame_end": frame_end,
        "render": {"width": width, "height": height},
        "camera_type": camera_type,
        "camera": {
            "frames": [
                camera_frame_entry(f, world=w, **overrides)
                for f, w, overrides in zip(frames, camera_worlds, lens)
            ]
        },
        "nerf_object": {
            "name": nerf_name,
            "frames": [nerf_frame_entry(f, world=w) for f, w in zip(frames, nerf_worlds)],
        },
    }
    if real_scale is not None:
        doc["real_scale"] = real_scale
    return doc


def scene_bytes(doc: dict) -> bytes:
    return json.dumps(doc).encode("utf-8")


def flatten(m: np.ndarray | list) -> list[float]:
    return [float(v) for v in np.asarray(m, dtype=np.float64).ravel()]


# ---------------------------------------------------------------------------
# FOV reference: projection through a pinhole, written as its own code path


def ref_vertical_fov_radians(
    focal: float, sensor_width: float, sensor_height: float, fit: str, width: int, height: int
) -> float:
    """Vertical FOV oracle.

    Models the sensor as a plane at distance ``focal`` and asks what vertical
    extent the image covers: the fitted sensor side spans its image side, the
    other side follows from square pixels. atan2-based on purpose so it does
    not share the implementation's formula shape.
    """
    if fit == "AUTO":
        fit = "HORIZONTAL" if width >= height else "VERTICAL"
    if fit == "VERTICAL":
        half_vertical_extent = sensor_height / 2.0
    else:
        # sensor_width spans the image width; vertical extent scales by h/w
        half_vertical_extent = (sensor_width * (height / width)) / 2.0
    return 2.0 * math.atan2(half_vertical_extent, focal)


# ---------------------------------------------------------------------------
# Scalar compositing references (pure-Python per-pixel loops)


def _clamp01(v: float) -> float:
    return min(max(v, 0.0), 1.0)


def ref_over_rgb(fg: np.ndarray, alpha: np.ndarray, bg: np.ndarray) -> np.ndarray:
    """out = a * fg + (1 - a) * bg per pixel, clamped to [0, 1]."""
    h, w, ch = bg.shape
    out = np.empty_like(bg)
    for y in range(h):
        for x in range(w):
            a = float(alpha[y, x, 0])
            for c in range(min(ch, 3)):
                out[y, x, c] = _clamp01(a * float(fg[y, x, c]) + (1.0 - a) * float(bg[y, x, c]))
            if ch == 4:
                out[y, x, 3] = _clamp01(a + (1.0 - a) * float(bg[y, x, 3]))
    return out


def ref_over_rgb_alt(fg: np.ndarray, alpha: np.ndarray, bg: np.ndarray) -> np.ndarray:
    """Same blend in a different algebraic arrangement: bg + a * (fg - bg).

    Floating-point results differ from ref_over_rgb by ulps, which is exactly
    what the +-1 LSB post-quantization comparison is meant to absorb.
    """
    h, w, ch = bg.shape
    out = np.empty_like(bg)
    for y in range(h):
        for x in range(w):
            a = float(alpha[y, x, 0])
            for c in range(min(ch, 3)):
                b = float(bg[y, x, c])
                out[y, x, c] = _clamp01(b + a * (float(fg[y, x, c]) - b))
            if ch == 4:
                b = float(bg[y, x, 3])
                out[y, x, 3] = _clamp01(b + a * (1.0 - b))
    return out


def ref_shadow(bg: np.ndarray, mask: np.ndarray, strength: float) -> np.ndarray:
    """out = bg * (1 - strength * mask) per pixel; alpha passes through."""
    h, w, ch = bg.shape
    out = np.empty_like(bg)
    for y in range(h):
        for x in range(w):
            factor = 1.0 - strength * float(mask[y, x, 0])
            for c in range(min(ch, 3)):
                out[y, x, c] = float(bg[y, x, c]) * factor
            if ch == 4:
                out[y, x, 3] = float(bg[y, x, 3])
    return out


def ref_quantize(arr: np.ndarray, bit_depth: int = 8) -> np.ndarray:
    """floor(v * scale + 0.5) per pixel, the round-half-away-from-zero rule."""
    scale = 255.0 if bit_depth == 8 else 65535.0
    h, w, ch = arr.shape
    out = np.empty((h, w, ch), dtype=np.uint8 if bit_depth == 8 else np.uint16)
    for y in range(h):
        for x in range(w):
            for c in range(ch):
                q = math.floor(float(arr[y, x, c]) * scale + 0.5)
                out[y, x, c] = min(max(q, 0), int(scale))
    return out


def grid_image(rng: np.random.Generator, shape: tuple[int, int, int]) -> np.ndarray:
    """Random image whose floats sit exactly on the 8-bit grid (k / 255)."""
    return rng.integers(0, 256, size=shape).astype(np.float64) / 255.0


# ---------------------------------------------------------------------------
# Minimal pure-Python PNG codec (oracle for the OpenCV-backed image I/O)


def png_write_pure(arr: np.ndarray) -> bytes:
    """Encode 8/16-bit gray/RGB/RGBA with filter 0 on every scanline."""
    if arr.ndim == 2:
        arr = arr[:, :, None]
    height, width, channels = arr.shape
    color_type = {1: 0, 3: 2, 4: 6}[channels]
    if arr.dtype == np.uint8:
        bit_depth, big_endian = 8, arr.astype(">u1")
    elif arr.dtype == np.uint16:
        bit_depth, big_endian = 16, arr.astype(">u2")
    else:
        raise ValueError(f"unsupported dtype {arr.dtype}")
    raw = bytearray()
    for row in range(height):
        raw.append(0)
        raw += big_endian[row].tobytes()

    def chunk(tag: bytes, payload: bytes) -> bytes:
        block = tag + payload
        return struct.pack(">I", len(payload)) + block + struct.pack(">I", zlib.crc32(block))

    ihdr = struct.pack(">IIBBBBB", width, height, bit_depth, color_type, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(bytes(raw)))
        + chunk(b"IEND", b"")
    )


def png_read_pure(data: bytes) -> np.ndarray:
    """Decode a non-interlaced 8/16-bit gray/RGB/RGBA PNG, all five filters."""
    assert data[:8] == b"\x89PNG\r\n\x1a\n", "not a PNG"
    pos = 8
    idat = bytearray()
    width = height = bit_depth = color_type = None
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        if tag == b"IHDR":
            width, height, bit_depth, color_type, comp, filt, interlace = struct.unpack(
                ">IIBBBBB", payload
            )
            assert comp == 0 and filt == 0 and interlace == 0
        elif tag == b"IDAT":
            idat += payload
        pos += 12 + length
    assert width is not None
    channels = {0: 1, 2: 3, 4: 2, 6: 4}[color_type]
    bytes_per_pixel = channels * (bit_depth // 8)
    stride = width * bytes_per_pixel
    raw = zlib.decompress(bytes(idat))
    assert len(raw) == height * (stride + 1)
    out = bytearray()
    prev = bytearray(stride)
    pos = 0
    for _ in range(height):
        filter_type = raw[pos]
        pos += 1
        line = bytearray(raw[pos : pos + stride])
        pos += stride
        if filter_type == 1:  # Sub
            for i in range(bytes_per_pixel, stride):
                line[i] = (line[i] + line[i - bytes_per_pixel]) & 0xFF
        elif filter_type == 2:  # Up
            for i in range(stride):
                line[i] = (line[i] + prev[i]) & 0xFF
        elif filter_type == 3:  # Average
            for i in range(stride):
                left = line[i - bytes_per_pixel] if i >= bytes_per_pixel else 0
                line[i] = (line[i] + ((left + prev[i]) >> 1)) & 0xFF
        elif filter_type == 4:  # Paeth
            for i in range(stride):
                left = line[i - bytes_per_pixel] if i >= bytes_per_pixel else 0
                up = prev[i]
                up_left = prev[i - bytes_per_pixel] if i >= bytes_per_pixel else 0
                p = left + up - up_left
                pa, pb, pc = abs(p - left), abs(p - up), abs(p - up_left)
                if pa <= pb and pa <= pc:
                    predictor = left
                elif pb <= pc:
                    predictor = up
                else:
                    predictor = up_left
                line[i] = (line[i] + predictor) & 0xFF
        else:
            assert filter_type == 0, f"unknown filter {filter_type}"
        out += line
        prev = line
    dtype = ">u2" if bit_depth == 16 else np.uint8
    arr = np.frombuffer(bytes(out), dtype=dtype).reshape(height, width, channels)
    return arr.astype(np.uint16) if bit_depth == 16 else arr.copy()


# ---------------------------------------------------------------------------
# Interchange mutation table: every entry corrupts exactly one field of a
# valid two-frame document and names the error that must result.


@dataclass(frozen=True)
class Mutation:
    """One corruption: ``corrupt`` edits the doc in place or returns raw
    bytes to use instead; ``error``/``match`` pin the expected failure."""

    name: str
    corrupt: Callable[[dict], bytes | None]
    error: type[Exception]
    match: str


def base_mutation_doc() -> dict:
    """Two frames with distinct worlds so order/coverage corruptions bite."""
    move = [
        1.0, 0.0, 0.0, 1.0,
        0.0, 1.0, 0.0, 2.0,
        0.0, 0.0, 1.0, 3.0,
        0.0, 0.0, 0.0, 1.0,
    ]
    return make_scene_doc(
        frame_start=1,
        frame_end=2,
        camera_worlds=[IDENTITY_FLAT, move],
        nerf_worlds=[move, IDENTITY_FLAT],
        real_scale=2.0,
    )


def _set(path: list, value) -> Callable[[dict], None]:
    def apply(doc: dict) -> None:
        target = doc
        for key in path[:-1]:
            target = target[key]
        target[path[-1]] = value

    return apply


def _delete(path: list) -> Callable[[dict], None]:
    def apply(doc: dict) -> None:
        target = doc
        for key in path[:-1]:
            target = target[key]
        del target[path[-1]]

    return apply


def _raw(data: bytes) -> Callable[[dict], bytes]:
    return lambda _doc: data


_SINGULAR_WORLD = [
    1.0, 2.0, 3.0, 0.0,
    2.0, 4.0, 6.0, 0.0,
    0.0, 0.0, 1.0, 0.0,
    0.0, 0.0, 0.0, 1.0,
]

_NAN_WORLD = [
    float("nan"), 0.0, 0.0, 0.0,
    0.0, 1.0, 0.0, 0.0,
    0.0, 0.0, 1.0, 0.0,
    0.0, 0.0, 0.0, 1.0,
]


def _reverse_camera_frames(doc: dict) -> None:
    doc["camera"]["frames"].reverse()


MUTATIONS: list[Mutation] = [
    Mutation("missing_version", _delete(["version"]), SchemaViolationError, "version"),
    Mutation("future_version", _set(["version"], 2), UnsupportedVersionError, "unsupported schema version 2"),
    Mutation("version_bool", _set(["version"], True), SchemaViolationError, "version"),
    Mutation("version_string", _set(["version"], "1"), SchemaViolationError, "version"),
    Mutation("missing_fps", _delete(["fps"]), SchemaViolationError, "fps"),
    Mutation("fps_zero", _set(["fps"], 0), NonPositiveError, "fps"),
    Mutation("fps_negative", _set(["fps"], -24.0), NonPositiveError, "fps"),
    Mutation("fps_string", _set(["fps"], "24"), SchemaViolationError, "fps"),
    Mutation("fps_infinite", _set(["fps"], float("inf")), SchemaViolationError, "finite"),
    Mutation("missing_frame_start", _delete(["frame_start"]), SchemaViolationError, "frame_start"),
    Mutation("frame_start_float", _set(["frame_start"], 1.5), SchemaViolationError, "frame_start"),
    Mutation("reversed_frame_range", _set(["frame_start"], 9), SchemaViolationError, "frame_start"),
    Mutation("missing_render", _delete(["render"]), SchemaViolationError, "render"),
    Mutation("render_not_object", _set(["render"], 7), SchemaViolationError, "render"),
    Mutation("render_width_zero", _set(["render", "width"], 0), NonPositiveError, "render.width"),
    Mutation("render_width_float", _set(["render", "width"], 1920.0), SchemaViolationError, "render.width"),
    Mutation("missing_render_height", _delete(["render", "height"]), SchemaViolationError, "render.height"),
    Mutation("render_height_negative", _set(["render", "height"], -1080), NonPositiveError, "render.height"),
    Mutation("missing_camera_type", _delete(["camera_type"]), SchemaViolationError, "camera_type"),
    Mutation("unknown_camera_type", _set(["camera_type"], "orthographic"), SchemaViolationError, "camera_type"),
    Mutation("camera_type_not_string", _set(["camera_type"], 3), SchemaViolationError, "camera_type"),
    Mutation("real_scale_zero", _set(["real_scale"], 0), NonPositiveError, "real_scale"),
    Mutation("real_scale_negative", _set(["real_scale"], -0.5), NonPositiveError, "real_scale"),
    Mutation("real_scale_bool", _set(["real_scale"], True), SchemaViolationError, "real_scale"),
    Mutation("missing_camera", _delete(["camera"]), SchemaViolationError, "camera"),
    Mutation("missing_camera_frames", _delete(["camera", "frames"]), SchemaViolationError, "camera.frames"),
    Mutation("camera_frames_not_list", _set(["camera", "frames"], {}), SchemaViolationError, "camera.frames"),
    Mutation("camera_entry_not_object", _set(["camera", "frames", 0], 5), SchemaViolationError, "camera.frames[0]"),
    Mutation("camera_entry_missing_frame", _delete(["camera", "frames", 0, "frame"]), SchemaViolationError, "frame"),
    Mutation("camera_frame_bool", _set(["camera", "frames", 0, "frame"], True), SchemaViolationError, "frame"),
    Mutation("missing_world", _delete(["camera", "frames", 0, "world"]), SchemaViolationError, "world"),
    Mutation("world_too_short", _set(["camera", "frames", 0, "world"], IDENTITY_FLAT[:15]), SchemaViolationError, "expected 16"),
    Mutation("world_too_long", _set(["camera", "frames", 0, "world"], IDENTITY_FLAT + [0.0]), SchemaViolationError, "expected 16"),
    Mutation("world_element_string", _set(["camera", "frames", 0, "world", 3], "x"), SchemaViolationError, "world[3]"),
    Mutation("world_element_nan", _set(["camera", "frames", 0, "world"], _NAN_WORLD), SchemaViolationError, "finite"),
    Mutation("world_bad_bottom_row", _set(["camera", "frames", 0, "world", 15], 2.0), SchemaViolationError, "bottom row"),
    Mutation("singular_camera_world", _set(["camera", "frames", 1, "world"], _SINGULAR_WORLD), SingularMatrixError, "frame 2"),
    Mutation("singular_nerf_world", _set(["nerf_object", "frames", 0, "world"], _SINGULAR_WORLD), SingularMatrixError, "nerf_object 'poster'"),
    Mutation("focal_zero", _set(["camera", "frames", 0, "focal_length_mm"], 0), NonPositiveError, "focal_length_mm"),
    Mutation("missing_focal", _delete(["camera", "frames", 0, "focal_length_mm"]), SchemaViolationError, "focal_length_mm"),
    Mutation("sensor_width_negative", _set(["camera", "frames", 0, "sensor_width_mm"], -36), NonPositiveError, "sensor_width_mm"),
    Mutation("sensor_height_string", _set(["camera", "frames", 0, "sensor_height_mm"], "24"), SchemaViolationError, "sensor_height_mm"),
    Mutation("unknown_sensor_fit", _set(["camera", "frames", 0, "sensor_fit"], "DIAGONAL"), SchemaViolationError, "sensor_fit"),
    Mutation("lowercase_sensor_fit", _set(["camera", "frames", 0, "sensor_fit"], "auto"), SchemaViolationError, "sensor_fit"),
    Mutation("camera_coverage_gap", _delete(["camera", "frames", 1]), FrameCoverageGapError, "missing sample for frame 2"),
    Mutation("nerf_coverage_gap", _delete(["nerf_object", "frames", 0]), FrameCoverageGapError, "missing sample for frame 1"),
    Mutation("duplicate_camera_frame", _set(["camera", "frames", 1, "frame"], 1), SchemaViolationError, "duplicate"),
    Mutation("out_of_range_frame", _set(["camera", "frames", 1, "frame"], 99), SchemaViolationError, "outside declared range"),
    Mutation("unsorted_camera_frames", _reverse_camera_frames, SchemaViolationError, "ascending"),
    Mutation("missing_nerf_object", _delete(["nerf_object"]), SchemaViolationError, "nerf_object"),
    Mutation("missing_nerf_name", _delete(["nerf_object", "name"]), SchemaViolationError, "nerf_object.name"),
    Mutation("nerf_name_not_string", _set(["nerf_object", "name"], 12), SchemaViolationError, "nerf_object.name"),
    Mutation("missing_nerf_frames", _delete(["nerf_object", "frames"]), SchemaViolationError, "nerf_object.frames"),
    Mutation("not_json", _raw(b"{nope"), MalformedDocumentError, "not valid JSON"),
    Mutation("not_utf8", _raw(b"\xff\xfe\x00{"), MalformedDocumentError, "not UTF-8"),
    Mutation("root_not_object", _raw(b"[]\n"), SchemaViolationError, "document"),
]


def apply_mutation(mutation: Mutation) -> bytes:
    doc = copy.deepcopy(base_mutation_doc())
    raw = mutation.corrupt(doc)
    if raw is not None:
        return raw
    return scene_bytes(doc)
