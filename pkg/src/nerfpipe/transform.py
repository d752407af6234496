"""Affine 4x4 matrix algebra and the camera-to-scene alignment kernel.

Conventions: matrices are row-major and act on column vectors, so a
camera-to-world matrix maps camera-local coordinates into world space.
All arithmetic is double precision and written out explicitly (no BLAS)
so results are bit-identical across platforms, which keeps serialized
camera paths byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import SingularMatrixError

__all__ = [
    "Mat4",
    "ScaleAnalysis",
    "SINGULARITY_EPS",
    "UNIFORM_SCALE_TOL",
    "align_camera",
    "analyze_scale",
    "invert",
    "max_abs_diff",
    "multiply",
]

# |det| of the 3x3 block at or below this is treated as singular.
SINGULARITY_EPS = 1e-12

# Max pairwise relative difference of basis-column norms still called uniform.
UNIFORM_SCALE_TOL = 1e-4

_BOTTOM_ROW = (0.0, 0.0, 0.0, 1.0)


class Mat4:
    """Affine 4x4 worldspace transform.

    The bottom row is always exactly ``[0, 0, 0, 1]`` and the upper-left
    3x3 block is invertible; the constructor rejects anything else, so a
    ``Mat4`` built from external data is safe to invert and compose.

    Parameters
    ----------
    values : iterable
        Either 16 numbers in row-major order or a 4x4 nested structure.
    """

    __slots__ = ("_m",)

    def __init__(self, values: Iterable):
        m = np.array(values, dtype=np.float64)
        if m.shape == (16,):
            m = m.reshape(4, 4)
        if m.shape != (4, 4):
            raise ValueError(f"expected 16 values or a 4x4 matrix, got shape {m.shape}")
        if not np.isfinite(m).all():
            raise ValueError("matrix values must be finite")
        if tuple(m[3]) != _BOTTOM_ROW:
            raise ValueError(f"bottom row must be exactly [0, 0, 0, 1], got {m[3].tolist()}")
        det = _det3(m)
        if abs(det) <= SINGULARITY_EPS:
            raise SingularMatrixError(f"singular matrix: |det3| = {abs(det):.3e} <= {SINGULARITY_EPS:.0e}")
        m.setflags(write=False)
        self._m = m

    @classmethod
    def _wrap(cls, m: np.ndarray) -> "Mat4":
        # Internal: trusted affine result of multiply/invert; skips validation.
        out = object.__new__(cls)
        m.setflags(write=False)
        out._m = m
        return out

    @classmethod
    def identity(cls) -> "Mat4":
        return cls._wrap(np.eye(4))

    @classmethod
    def translation(cls, tx: float, ty: float, tz: float) -> "Mat4":
        m = np.eye(4)
        m[0, 3] = tx
        m[1, 3] = ty
        m[2, 3] = tz
        return cls._wrap(m)

    @property
    def array(self) -> np.ndarray:
        """Read-only (4, 4) float64 view of the matrix."""
        return self._m

    @property
    def translation_vector(self) -> np.ndarray:
        return self._m[:3, 3].copy()

    def to_flat(self) -> list[float]:
        """Row-major list of 16 floats, the serialization layout."""
        return [float(v) for v in self._m.ravel()]

    def __matmul__(self, other: "Mat4") -> "Mat4":
        return multiply(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mat4):
            return NotImplemented
        return bool(np.array_equal(self._m, other._m))

    def __hash__(self) -> int:
        return hash(self._m.tobytes())

    def __repr__(self) -> str:
        rows = ", ".join(str(list(row)) for row in self._m)
        return f"Mat4([{rows}])"


@dataclass(frozen=True)
class ScaleAnalysis:
    """Euclidean norms of the three basis columns and a uniformity verdict."""

    column_norms: tuple[float, float, float]
    uniform: bool


def _det3(m: np.ndarray) -> float:
    # Cofactor expansion along the first row of the upper-left 3x3 block.
    c00 = m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    c01 = m[1, 2] * m[2, 0] - m[1, 0] * m[2, 2]
    c02 = m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]
    return float(m[0, 0] * c00 + m[0, 1] * c01 + m[0, 2] * c02)


def multiply(a: Mat4, b: Mat4) -> Mat4:
    """Standard matrix product ``a @ b``.

    Written as explicit sums in a fixed order so the result is reproducible
    bit-for-bit. The product of two affine matrices keeps an exact
    ``[0, 0, 0, 1]`` bottom row.
    """
    am = a._m
    bm = b._m
    out = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            out[i, j] = am[i, 0] * bm[0, j] + am[i, 1] * bm[1, j] + am[i, 2] * bm[2, j] + am[i, 3] * bm[3, j]
    return Mat4._wrap(out)


def invert(m: Mat4) -> Mat4:
    """Inverse of an affine matrix.

    Uses the adjugate of the 3x3 block plus translation back-substitution
    rather than general 4x4 elimination: this exploits affinity and keeps
    the bottom row exactly ``[0, 0, 0, 1]``.

    Raises
    ------
    SingularMatrixError
        If the 3x3 determinant magnitude is at or below ``SINGULARITY_EPS``.
    """
    a = m._m
    det = _det3(a)
    if abs(det) <= SINGULARITY_EPS:
        raise SingularMatrixError(f"singular matrix: |det3| = {abs(det):.3e} <= {SINGULARITY_EPS:.0e}")

    r = a[:3, :3]
    # Adjugate: inv[i][j] = cofactor(j, i) / det.
    adj = np.array(
        [
            [
                r[1, 1] * r[2, 2] - r[1, 2] * r[2, 1],
                r[0, 2] * r[2, 1] - r[0, 1] * r[2, 2],
                r[0, 1] * r[1, 2] - r[0, 2] * r[1, 1],
            ],
            [
                r[1, 2] * r[2, 0] - r[1, 0] * r[2, 2],
                r[0, 0] * r[2, 2] - r[0, 2] * r[2, 0],
                r[0, 2] * r[1, 0] - r[0, 0] * r[1, 2],
            ],
            [
                r[1, 0] * r[2, 1] - r[1, 1] * r[2, 0],
                r[0, 1] * r[2, 0] - r[0, 0] * r[2, 1],
                r[0, 0] * r[1, 1] - r[0, 1] * r[1, 0],
            ],
        ]
    )
    rinv = adj / det

    out = np.eye(4)
    out[:3, :3] = rinv
    t = a[:3, 3]
    for i in range(3):
        out[i, 3] = -(rinv[i, 0] * t[0] + rinv[i, 1] * t[1] + rinv[i, 2] * t[2])
    return Mat4._wrap(out)


def align_camera(camera_world: Mat4, nerf_world: Mat4) -> Mat4:
    """Re-express a camera pose relative to the scene proxy's frame.

    Returns ``invert(nerf_world) @ camera_world``: the pose the renderer's
    camera must take inside the trained scene so that, once the proxy is
    placed at ``nerf_world`` in the editor, the render lines up with the
    editor camera at ``camera_world``. Satisfies
    ``nerf_world @ result == camera_world``.
    """
    return multiply(invert(nerf_world), camera_world)


def analyze_scale(m: Mat4) -> ScaleAnalysis:
    """Norms of the 3x3 basis columns, flagged uniform within ``UNIFORM_SCALE_TOL``.

    Non-uniform proxy scale is legal but worth warning about: the alignment
    math stays well-posed while the renderer's behavior under anisotropic
    scaling is undefined.
    """
    r = m._m[:3, :3]
    norms = tuple(float(np.sqrt(r[0, j] ** 2 + r[1, j] ** 2 + r[2, j] ** 2)) for j in range(3))
    worst = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            denom = max(abs(norms[i]), abs(norms[j]))
            if denom > 0.0:
                worst = max(worst, abs(norms[i] - norms[j]) / denom)
    return ScaleAnalysis(column_norms=norms, uniform=worst <= UNIFORM_SCALE_TOL)


def max_abs_diff(a: Mat4, b: Mat4) -> float:
    """Largest elementwise absolute difference, the tolerance metric used throughout."""
    return float(np.max(np.abs(a._m - b._m)))
