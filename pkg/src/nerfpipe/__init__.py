"""Pipeline toolkit for rendering animated cameras inside trained
radiance-field scenes and compositing the results over live plates.

The workflow: a host editor exports camera and proxy-object animation as a
versioned JSON document; this package re-expresses the camera relative to
each trained scene, writes a renderer-ready camera path with per-frame
vertical field of view, and blends the rendered RGB + accumulation passes
over background footage.
"""

from .compositor import (
    CompositeOp,
    ImagePlane,
    SequencePattern,
    apply_shadow,
    attach_alpha,
    composite_sequence,
    decode_png,
    encode_png,
    over,
    stack,
)
from .errors import (
    DecodeError,
    DimensionMismatchError,
    FrameCoverageGapError,
    MalformedDocumentError,
    MissingFrameError,
    NerfPipeError,
    NonPositiveError,
    SchemaViolationError,
    SingularMatrixError,
    UnsupportedVersionError,
)
from .fov import (
    EQUIRECTANGULAR_FOV_DEGREES,
    LensSample,
    SensorFit,
    angle_of_view,
    effective_fit,
    vertical_fov,
)
from .interchange import (
    SCHEMA_VERSION,
    CameraType,
    ParseReport,
    ParseWarning,
    SceneInterchange,
    parse_interchange,
    serialize_interchange,
)
from .pathgen import (
    CameraPathDocument,
    CameraPathEntry,
    apply_real_scale,
    build_path,
    serialize_path,
)
from .transform import (
    Mat4,
    ScaleAnalysis,
    align_camera,
    analyze_scale,
    invert,
    max_abs_diff,
    multiply,
)

__version__ = "0.1.0"

__all__ = [
    "CameraPathDocument",
    "CameraPathEntry",
    "CameraType",
    "CompositeOp",
    "DecodeError",
    "DimensionMismatchError",
    "EQUIRECTANGULAR_FOV_DEGREES",
    "FrameCoverageGapError",
    "ImagePlane",
    "LensSample",
    "MalformedDocumentError",
    "Mat4",
    "MissingFrameError",
    "NerfPipeError",
    "NonPositiveError",
    "ParseReport",
    "ParseWarning",
    "SCHEMA_VERSION",
    "ScaleAnalysis",
    "SceneInterchange",
    "SchemaViolationError",
    "SensorFit",
    "SequencePattern",
    "SingularMatrixError",
    "UnsupportedVersionError",
    "align_camera",
    "analyze_scale",
    "angle_of_view",
    "apply_real_scale",
    "apply_shadow",
    "attach_alpha",
    "build_path",
    "composite_sequence",
    "decode_png",
    "effective_fit",
    "encode_png",
    "invert",
    "max_abs_diff",
    "multiply",
    "over",
    "parse_interchange",
    "serialize_interchange",
    "serialize_path",
    "stack",
    "vertical_fov",
]
