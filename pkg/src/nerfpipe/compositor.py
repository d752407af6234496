"""Compositing of rendered RGB and accumulation passes over background plates.

Images travel through the pipeline as float64 planes normalized to [0, 1].
The accumulation pass doubles as a straight (unpremultiplied) alpha channel,
so layering a render over a plate is a plain convex blend per pixel, and a
shadow pass darkens the plate proportionally to occlusion.  All work stays
display-referred: values are blended exactly as stored, with no transfer
function applied on either side.
"""

from __future__ import annotations

import enum
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import cv2
import numpy as np

from .errors import DecodeError, DimensionMismatchError, MissingFrameError
from .fsio import atomic_write_bytes

_VALID_CHANNELS = (1, 3, 4)
_VALID_BIT_DEPTHS = (8, 16)


class ImagePlane:
    """A float64 image of shape (height, width, channels) with values in [0, 1].

    ``source_bit_depth`` records the integer precision the samples came from
    (or should be written back to); it does not change the stored values.
    Treat instances as immutable: operations return new planes.
    """

    __slots__ = ("samples", "source_bit_depth")

    def __init__(self, samples: np.ndarray, source_bit_depth: int = 8) -> None:
        arr = np.ascontiguousarray(samples, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] not in _VALID_CHANNELS:
            raise ValueError(
                "samples must have shape (height, width, channels) with 1, 3, or 4 channels"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if source_bit_depth not in _VALID_BIT_DEPTHS:
            raise ValueError(f"source_bit_depth must be 8 or 16, got {source_bit_depth}")
        if float(arr.min()) < 0.0 or float(arr.max()) > 1.0:
            raise ValueError("samples must lie within [0, 1]")
        self.samples = arr
        self.source_bit_depth = source_bit_depth

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    def channel(self, index: int) -> "ImagePlane":
        """Return a single channel as a new 1-channel plane."""
        if not 0 <= index < self.channels:
            raise ValueError(f"channel {index} out of range for {self.channels}-channel image")
        return ImagePlane(self.samples[:, :, index : index + 1], self.source_bit_depth)

    def __repr__(self) -> str:
        return (
            f"ImagePlane({self.width}x{self.height}x{self.channels}, "
            f"{self.source_bit_depth}-bit source)"
        )


def decode_png(path: Path | str) -> ImagePlane:
    """Load a PNG into a normalized float plane.

    8-bit files divide by 255, 16-bit files by 65535.  Grayscale images come
    back as 1-channel planes; color images as RGB or RGBA.
    """
    path = Path(path)
    data = path.read_bytes()
    raw = cv2.imdecode(np.frombuffer(data, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise DecodeError(str(path))
    if raw.dtype == np.uint8:
        depth, scale = 8, 255.0
    elif raw.dtype == np.uint16:
        depth, scale = 16, 65535.0
    else:
        raise DecodeError(str(path), f"unsupported sample type {raw.dtype}")
    if raw.ndim == 2:
        raw = raw[:, :, np.newaxis]
    channels = raw.shape[2]
    if channels == 3:
        raw = raw[:, :, ::-1]  # OpenCV decodes as BGR
    elif channels == 4:
        raw = raw[:, :, [2, 1, 0, 3]]  # BGRA
    elif channels != 1:
        raise DecodeError(str(path), f"unsupported channel count {channels}")
    return ImagePlane(raw.astype(np.float64) / scale, depth)


def encode_png(image: ImagePlane, path: Path | str) -> None:
    """Write a plane as a PNG at its source bit depth.

    Quantization rounds half away from zero (floor(v * scale + 0.5)), the
    write is atomic, and the encode is deterministic for identical samples.
    """
    scale = 255.0 if image.source_bit_depth == 8 else 65535.0
    quantized = np.floor(image.samples * scale + 0.5)
    quantized = np.clip(quantized, 0.0, scale)
    dtype = np.uint8 if image.source_bit_depth == 8 else np.uint16
    arr = quantized.astype(dtype)
    if image.channels == 1:
        arr = arr[:, :, 0]
    elif image.channels == 3:
        arr = np.ascontiguousarray(arr[:, :, ::-1])
    else:
        arr = np.ascontiguousarray(arr[:, :, [2, 1, 0, 3]])
    ok, encoded = cv2.imencode(".png", arr)
    if not ok:
        raise OSError(f"PNG encoding failed for {path}")
    atomic_write_bytes(path, encoded.tobytes())


def _require_same_size(a: ImagePlane, b: ImagePlane, what: str) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatchError(
            f"{what}: {a.width}x{a.height} does not match {b.width}x{b.height}"
        )


def attach_alpha(rgb: ImagePlane, accumulation: ImagePlane) -> ImagePlane:
    """Pair an RGB render with its accumulation pass as straight alpha.

    The accumulation image may be single-channel or a grayscale export
    replicated across 3 channels; channel 0 is used either way.
    """
    if rgb.channels != 3:
        raise DimensionMismatchError(f"expected a 3-channel image, got {rgb.channels} channels")
    if accumulation.channels not in (1, 3):
        raise DimensionMismatchError(
            f"accumulation must be 1- or 3-channel, got {accumulation.channels} channels"
        )
    _require_same_size(rgb, accumulation, "accumulation size")
    alpha = accumulation.samples[:, :, :1]
    return ImagePlane(np.concatenate([rgb.samples, alpha], axis=2), rgb.source_bit_depth)


def over(foreground: ImagePlane, background: ImagePlane) -> ImagePlane:
    """Straight-alpha over: out = a * fg + (1 - a) * bg per channel.

    The background may be RGB or RGBA; an RGBA background gets its alpha
    blended the same way (a_out = a_fg + (1 - a_fg) * a_bg).
    """
    if foreground.channels != 4:
        raise DimensionMismatchError(
            f"foreground must be RGBA, got {foreground.channels} channels"
        )
    if background.channels not in (3, 4):
        raise DimensionMismatchError(
            f"background must be RGB or RGBA, got {background.channels} channels"
        )
    _require_same_size(foreground, background, "background size")
    alpha = foreground.samples[:, :, 3:4]
    # Each output is a convex blend of in-range inputs, but rounding can land
    # 1 ulp outside [0, 1]; clamp to keep the plane invariant.
    blended = np.clip(
        alpha * foreground.samples[:, :, :3] + (1.0 - alpha) * background.samples[:, :, :3],
        0.0,
        1.0,
    )
    if background.channels == 4:
        out_alpha = np.clip(alpha + (1.0 - alpha) * background.samples[:, :, 3:4], 0.0, 1.0)
        blended = np.concatenate([blended, out_alpha], axis=2)
    return ImagePlane(blended, background.source_bit_depth)


def stack(layers: list[ImagePlane], background: ImagePlane) -> ImagePlane:
    """Composite RGBA layers over a background, first layer closest to it."""
    result = background
    for layer in layers:
        result = over(layer, result)
    return result


def apply_shadow(background: ImagePlane, shadow_mask: ImagePlane, strength: float = 1.0) -> ImagePlane:
    """Darken a plate by an occlusion mask: out = bg * (1 - strength * mask).

    ``strength`` in [0, 1] scales the effect; alpha in an RGBA plate is left
    untouched.  Output never exceeds the input plate.
    """
    if shadow_mask.channels != 1:
        raise DimensionMismatchError(
            f"shadow mask must be single-channel, got {shadow_mask.channels} channels"
        )
    if not 0.0 <= strength <= 1.0:
        raise ValueError(f"strength must be within [0, 1], got {strength}")
    _require_same_size(background, shadow_mask, "shadow mask size")
    factor = 1.0 - strength * shadow_mask.samples
    rgb_channels = min(background.channels, 3)
    darkened = background.samples[:, :, :rgb_channels] * factor
    if background.channels == 4:
        darkened = np.concatenate([darkened, background.samples[:, :, 3:4]], axis=2)
    return ImagePlane(darkened, background.source_bit_depth)


_FRAME_PLACEHOLDER = re.compile(r"\{frame(?::0?(\d+))?\}")
_DEFAULT_PAD = 4


@dataclass(frozen=True)
class SequencePattern:
    """A numbered file sequence: a template with one ``{frame:04}`` hole.

    ``{frame}`` alone pads to 4 digits; ``{frame:06}`` pads to 6.  The range
    is inclusive on both ends.
    """

    template: str
    start: int
    end: int

    def __post_init__(self) -> None:
        holes = _FRAME_PLACEHOLDER.findall(self.template)
        if len(holes) != 1:
            raise ValueError(
                f"template must contain exactly one {{frame}} placeholder: {self.template!r}"
            )
        if self.start > self.end:
            raise ValueError(f"frame range {self.start}..{self.end} is empty")

    @property
    def pad_width(self) -> int:
        match = _FRAME_PLACEHOLDER.search(self.template)
        assert match is not None
        return int(match.group(1)) if match.group(1) else _DEFAULT_PAD

    def path_for(self, frame: int) -> Path:
        number = str(frame).zfill(self.pad_width)
        return Path(_FRAME_PLACEHOLDER.sub(number, self.template, count=1))

    def frames(self) -> range:
        return range(self.start, self.end + 1)


class CompositeOp(enum.Enum):
    """Which per-frame blend a sequence run performs."""

    OVER = "over"
    SHADOW = "shadow"


def _load_frame(pattern: SequencePattern, frame: int) -> ImagePlane:
    path = pattern.path_for(frame)
    if not path.exists():
        raise MissingFrameError(pattern.template, frame)
    return decode_png(path)


def composite_sequence(
    foreground: SequencePattern | None,
    mask: SequencePattern,
    background: SequencePattern,
    output: SequencePattern,
    op: CompositeOp,
    strength: float | None = None,
    jobs: int | None = None,
    on_frame: Callable[[int], None] | None = None,
) -> int:
    """Composite every frame of a sequence, returning the count written.

    OVER attaches each mask frame to the foreground as alpha and blends it
    over the background; SHADOW darkens the background by the mask (channel 0
    of a multichannel mask).  Output frames are written at the background's
    bit depth.  Frames run in parallel across ``jobs`` threads (default: the
    machine's CPU count) but complete in order: ``on_frame`` fires in frame
    order and the first failing frame's error is the one raised, with later
    work cancelled.
    """
    patterns = [mask, background, output]
    if op is CompositeOp.OVER:
        if foreground is None:
            raise ValueError("over compositing requires a foreground sequence")
        patterns.append(foreground)
    spans = {(p.start, p.end) for p in patterns}
    if len(spans) != 1:
        raise ValueError("all sequences must cover the same frame range")
    if strength is None:
        strength = 1.0
    if not 0.0 <= strength <= 1.0:
        raise ValueError(f"strength must be within [0, 1], got {strength}")

    def process(frame: int) -> None:
        bg_plane = _load_frame(background, frame)
        mask_plane = _load_frame(mask, frame)
        if (mask_plane.width, mask_plane.height) != (bg_plane.width, bg_plane.height):
            raise DimensionMismatchError(
                f"frame {frame}: mask is {mask_plane.width}x{mask_plane.height} but "
                f"background is {bg_plane.width}x{bg_plane.height}",
                frame=frame,
            )
        if op is CompositeOp.OVER:
            assert foreground is not None
            fg_plane = _load_frame(foreground, frame)
            if (fg_plane.width, fg_plane.height) != (bg_plane.width, bg_plane.height):
                raise DimensionMismatchError(
                    f"frame {frame}: foreground is {fg_plane.width}x{fg_plane.height} but "
                    f"background is {bg_plane.width}x{bg_plane.height}",
                    frame=frame,
                )
            if fg_plane.channels != 3:
                raise DimensionMismatchError(
                    f"frame {frame}: foreground must be RGB, got {fg_plane.channels} channels",
                    frame=frame,
                )
            if mask_plane.channels not in (1, 3):
                raise DimensionMismatchError(
                    f"frame {frame}: accumulation mask must be 1- or 3-channel, "
                    f"got {mask_plane.channels} channels",
                    frame=frame,
                )
            result = over(attach_alpha(fg_plane, mask_plane), bg_plane)
        else:
            result = apply_shadow(bg_plane, mask_plane.channel(0), strength)
        encode_png(ImagePlane(result.samples, bg_plane.source_bit_depth), output.path_for(frame))

    frames = list(background.frames())
    worker_count = os.cpu_count() or 1 if jobs is None else jobs
    worker_count = max(1, min(worker_count, len(frames)))
    if worker_count == 1:
        for frame in frames:
            process(frame)
            if on_frame is not None:
                on_frame(frame)
        return len(frames)

    with ThreadPoolExecutor(max_workers=worker_count) as pool:
        futures = {frame: pool.submit(process, frame) for frame in frames}
        try:
            for frame in frames:
                futures[frame].result()
                if on_frame is not None:
                    on_frame(frame)
        except BaseException:
            for future in futures.values():
                future.cancel()
            raise
    return len(frames)
