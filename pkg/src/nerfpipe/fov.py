"""Vertical field-of-view derivation from lens, sensor, and render aspect.

The camera-path ``fov`` field is the VERTICAL field of view in degrees,
matching the downstream renderer's convention. That choice is isolated in
:func:`vertical_fov` so it can be flipped in one place if a renderer ever
disagrees.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import NonPositiveError

__all__ = [
    "EQUIRECTANGULAR_FOV_DEGREES",
    "LensSample",
    "SensorFit",
    "angle_of_view",
    "effective_fit",
    "vertical_fov",
]

# Emitted for equirectangular cameras, which have no pinhole FOV; a fixed
# sentinel keeps the output schema total.
EQUIRECTANGULAR_FOV_DEGREES = 180.0


class SensorFit(enum.Enum):
    """Which sensor extent the lens angle of view is measured across."""

    HORIZONTAL = "HORIZONTAL"
    VERTICAL = "VERTICAL"
    AUTO = "AUTO"


@dataclass(frozen=True)
class LensSample:
    """Lens and sensor state for one frame; lengths in millimetres."""

    focal_length: float
    sensor_width: float
    sensor_height: float
    fit: SensorFit = SensorFit.AUTO

    def __post_init__(self):
        for name in ("focal_length", "sensor_width", "sensor_height"):
            value = getattr(self, name)
            if not value > 0:
                raise NonPositiveError(f"{name} must be > 0, got {value}")


def angle_of_view(focal_length: float, sensor_extent: float) -> float:
    """Pinhole angle of view in radians: ``2 * atan(extent / (2 * focal))``."""
    if not focal_length > 0:
        raise NonPositiveError(f"focal_length must be > 0, got {focal_length}")
    if not sensor_extent > 0:
        raise NonPositiveError(f"sensor_extent must be > 0, got {sensor_extent}")
    return 2.0 * math.atan(sensor_extent / (2.0 * focal_length))


def effective_fit(fit: SensorFit, render_width: int, render_height: int) -> SensorFit:
    """Resolve AUTO against the render dimensions; explicit fits pass through.

    AUTO means the angle of view spans the image's longer side, with ties
    breaking to HORIZONTAL.
    """
    if fit is SensorFit.AUTO:
        return SensorFit.HORIZONTAL if render_width >= render_height else SensorFit.VERTICAL
    return fit


def vertical_fov(sample: LensSample, render_width: int, render_height: int) -> float:
    """Vertical field of view in degrees for one frame.

    With VERTICAL fit the sensor height maps directly onto the image height.
    With HORIZONTAL fit the sensor width maps onto the image width and the
    vertical extent follows from the aspect ratio (square pixels):
    ``2 * atan(tan(hfov / 2) * height / width)``.
    """
    if not render_width > 0:
        raise NonPositiveError(f"render_width must be > 0, got {render_width}")
    if not render_height > 0:
        raise NonPositiveError(f"render_height must be > 0, got {render_height}")

    fit = effective_fit(sample.fit, render_width, render_height)
    if fit is SensorFit.VERTICAL:
        return math.degrees(angle_of_view(sample.focal_length, sample.sensor_height))
    half_horizontal = angle_of_view(sample.focal_length, sample.sensor_width) / 2.0
    return math.degrees(2.0 * math.atan(math.tan(half_horizontal) * render_height / render_width))
