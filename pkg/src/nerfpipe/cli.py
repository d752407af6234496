"""Command-line pipeline driver: validate scene exports, emit camera paths,
and composite rendered sequences over background plates.

Exit codes: 0 success, 2 invalid input or flags, 3 math failure (singular
matrix), 4 I/O failure.  All diagnostics go to stderr; output files are
written atomically.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import replace
from pathlib import Path

from .compositor import CompositeOp, SequencePattern, composite_sequence
from .errors import (
    DecodeError,
    DimensionMismatchError,
    FrameCoverageGapError,
    MalformedDocumentError,
    MissingFrameError,
    NonPositiveError,
    SchemaViolationError,
    SingularMatrixError,
    UnsupportedVersionError,
)
from .fsio import atomic_write_bytes
from .interchange import ParseReport, parse_interchange
from .pathgen import build_path, serialize_path

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_MATH = 3
EXIT_IO = 4

_VALIDATION_ERRORS = (
    MalformedDocumentError,
    SchemaViolationError,
    UnsupportedVersionError,
    FrameCoverageGapError,
    NonPositiveError,
)

_FRAME_RANGE = re.compile(r"(-?\d+)\.\.(-?\d+)")


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _error(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _print_warnings(report: ParseReport) -> None:
    for warning in report.warnings:
        where = "" if warning.frame is None else f" frame {warning.frame}:"
        _diag(f"warning: [{warning.code}]{where} {warning.message}")


def _positive_real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _frame_range(text: str) -> tuple[int, int]:
    match = _FRAME_RANGE.fullmatch(text)
    if match is None:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}")
    start, end = int(match.group(1)), int(match.group(2))
    if start > end:
        raise argparse.ArgumentTypeError(f"frame range {text} is empty")
    return start, end


def _read_scene(path: Path) -> bytes:
    return path.read_bytes()


def _cmd_export_path(args: argparse.Namespace) -> int:
    scene_path = Path(args.scene)
    try:
        data = _read_scene(scene_path)
    except OSError as exc:
        _error(f"cannot read {scene_path}: {exc}")
        return EXIT_IO
    try:
        scene, report = parse_interchange(data)
    except SingularMatrixError as exc:
        _error(f"{scene_path}: {exc}")
        return EXIT_MATH
    except _VALIDATION_ERRORS as exc:
        _error(f"{scene_path}: {exc}")
        return EXIT_INVALID
    _print_warnings(report)
    if args.real_scale is not None:
        scene = replace(scene, real_scale=args.real_scale)
    try:
        document = build_path(scene)
    except SingularMatrixError as exc:
        _error(f"{scene_path}: {exc}")
        return EXIT_MATH
    payload = serialize_path(document)
    try:
        atomic_write_bytes(Path(args.out), payload)
    except OSError as exc:
        _error(f"cannot write {args.out}: {exc}")
        return EXIT_IO
    _diag(f"wrote {args.out}: {len(document.entries)} frames")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    scene_path = Path(args.scene)
    try:
        data = _read_scene(scene_path)
    except OSError as exc:
        _error(f"cannot read {scene_path}: {exc}")
        return EXIT_IO
    try:
        scene, report = parse_interchange(data)
    except SingularMatrixError as exc:
        _error(f"{scene_path}: {exc}")
        return EXIT_MATH
    except _VALIDATION_ERRORS as exc:
        _error(f"{scene_path}: {exc}")
        return EXIT_INVALID
    _print_warnings(report)
    _diag(
        f"{scene_path}: {scene.frame_count} frames, "
        f"{len(report.warnings)} warnings, 0 errors"
    )
    return EXIT_OK


def _cmd_composite(args: argparse.Namespace) -> int:
    if args.mode == "over" and args.fg is None:
        _error("over mode requires --fg")
        return EXIT_INVALID
    if args.mode == "shadow" and args.fg is not None:
        _error("--fg is not used in shadow mode")
        return EXIT_INVALID
    if args.strength is not None and not 0.0 <= args.strength <= 1.0:
        _error(f"--strength must be within [0, 1], got {args.strength}")
        return EXIT_INVALID
    if args.jobs is not None and args.jobs < 1:
        _error(f"--jobs must be at least 1, got {args.jobs}")
        return EXIT_INVALID
    start, end = args.frames
    try:
        foreground = None if args.fg is None else SequencePattern(args.fg, start, end)
        mask = SequencePattern(args.mask, start, end)
        background = SequencePattern(args.bg, start, end)
        output = SequencePattern(args.out, start, end)
    except ValueError as exc:
        _error(str(exc))
        return EXIT_INVALID
    op = CompositeOp.OVER if args.mode == "over" else CompositeOp.SHADOW
    try:
        count = composite_sequence(
            foreground,
            mask,
            background,
            output,
            op,
            strength=args.strength,
            jobs=args.jobs,
            on_frame=lambda frame: _diag(f"frame {frame} ok"),
        )
    except (MissingFrameError, DecodeError, DimensionMismatchError) as exc:
        _error(str(exc))
        return EXIT_IO
    except OSError as exc:
        _error(str(exc))
        return EXIT_IO
    except ValueError as exc:
        _error(str(exc))
        return EXIT_INVALID
    _diag(f"{count} frames written")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nerfpipe",
        description="Align animated cameras to radiance-field scenes and composite the renders.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_export = sub.add_parser(
        "export-path",
        help="convert a scene export into a renderer camera-path file",
    )
    p_export.add_argument("--scene", required=True, help="scene export JSON to read")
    p_export.add_argument("--out", required=True, help="camera-path JSON to write")
    p_export.add_argument(
        "--real-scale",
        type=_positive_real,
        default=None,
        help="override the document's real-world scale factor",
    )
    p_export.set_defaults(func=_cmd_export_path)

    p_composite = sub.add_parser(
        "composite",
        help="blend rendered frame sequences over background plates",
    )
    p_composite.add_argument("mode", choices=("over", "shadow"))
    p_composite.add_argument("--fg", default=None, help="foreground RGB sequence (over mode)")
    p_composite.add_argument("--mask", required=True, help="accumulation/shadow mask sequence")
    p_composite.add_argument("--bg", required=True, help="background plate sequence")
    p_composite.add_argument("--out", required=True, help="output sequence to write")
    p_composite.add_argument(
        "--frames",
        required=True,
        type=_frame_range,
        metavar="A..B",
        help="inclusive frame range, e.g. 1..120",
    )
    p_composite.add_argument(
        "--strength",
        type=float,
        default=None,
        help="shadow strength in [0, 1] (default 1.0)",
    )
    p_composite.add_argument(
        "--jobs",
        type=int,
        default=None,
        help="max frames processed in parallel (default: machine parallelism)",
    )
    p_composite.set_defaults(func=_cmd_composite)

    p_validate = sub.add_parser(
        "validate",
        help="check a scene export and report warnings without writing anything",
    )
    p_validate.add_argument("--scene", required=True, help="scene export JSON to check")
    p_validate.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
