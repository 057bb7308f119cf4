"""3-vectors and positively oriented orthonormal frames.

A frame is stored row-wise: row 0 is e1 (the tangent), rows 1 and 2 span the
normal plane. Frame fields along a grid are ``(n, 3, 3)`` arrays with the same
row convention, so ``F' = K(s) F`` is the moving-frame ODE.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import numpy.typing as npt

from ..core.config import settings
from ..core.exceptions import DegenerateFrame

logger = logging.getLogger(__name__)

Vec3 = npt.NDArray[np.float64]

# Gram-Schmidt refuses vectors shorter than this
MIN_INPUT_NORM = 0.5


def vec3(x: float, y: float, z: float) -> Vec3:
    v = np.array([x, y, z], dtype=float)
    v.flags.writeable = False
    return v


def cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cross product over the last axis (faster than np.cross for 3-vectors)."""
    return np.stack(
        [
            u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1],
            u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2],
            u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0],
        ],
        axis=-1,
    )


def is_orthogonal(u: Vec3, v: Vec3, tol: float = 1e-12) -> bool:
    """u ⊥ v iff <u, v> = 0, scaled by the vector lengths."""
    scale = max(float(np.linalg.norm(u) * np.linalg.norm(v)), 1.0)
    return abs(float(np.dot(u, v))) <= tol * scale


def is_parallel(u: Vec3, v: Vec3, tol: float = 1e-12) -> bool:
    """u ∥ v iff u × v = 0, scaled by the vector lengths."""
    scale = max(float(np.linalg.norm(u) * np.linalg.norm(v)), 1.0)
    return float(np.linalg.norm(cross(np.asarray(u), np.asarray(v)))) <= tol * scale


def orthonormality_error(frames: np.ndarray) -> np.ndarray:
    """Max-norm of F Fᵀ − I per frame, for one frame or a stacked field."""
    frames = np.asarray(frames, dtype=float)
    gram = frames @ np.swapaxes(frames, -1, -2)
    return np.abs(gram - np.eye(3)).max(axis=(-1, -2))


def orthonormalize_matrix(m: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on the rows of a 3x3 matrix; row 2 is rebuilt as row0 × row1."""
    e1, e2 = m[0], m[1]
    n1 = np.sqrt(e1 @ e1)
    n2 = np.sqrt(e2 @ e2)
    n3 = np.sqrt(m[2] @ m[2])
    if n1 < MIN_INPUT_NORM or n2 < MIN_INPUT_NORM or n3 < MIN_INPUT_NORM:
        raise DegenerateFrame(f"frame vector norms ({n1:.3g}, {n2:.3g}, {n3:.3g}) below {MIN_INPUT_NORM}")
    e1 = e1 / n1
    e2 = e2 - (e2 @ e1) * e1
    e2 = e2 / np.sqrt(e2 @ e2)
    e3 = np.array(
        [
            e1[1] * e2[2] - e1[2] * e2[1],
            e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0],
        ]
    )
    return np.array([e1, e2, e3])


@dataclass(frozen=True)
class Frame:
    """Positively oriented orthonormal triple (T, N, B) or (T, N₁, N₂)."""

    e1: Vec3
    e2: Vec3
    e3: Vec3

    def __post_init__(self):
        for name in ("e1", "e2", "e3"):
            v = np.array(getattr(self, name), dtype=float).reshape(3)
            v.flags.writeable = False
            object.__setattr__(self, name, v)

    @classmethod
    def identity(cls) -> "Frame":
        return cls(np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]))

    @classmethod
    def from_matrix(cls, m: npt.ArrayLike) -> "Frame":
        m = np.asarray(m, dtype=float).reshape(3, 3)
        return cls(m[0], m[1], m[2])

    @classmethod
    def from_rows(cls, values: Iterable[float]) -> "Frame":
        """Nine numbers, row-major T, N, B."""
        return cls.from_matrix(np.asarray(list(values), dtype=float))

    def as_matrix(self) -> np.ndarray:
        return np.array([self.e1, self.e2, self.e3])

    def orthonormality_error(self) -> float:
        return float(orthonormality_error(self.as_matrix()))

    def is_valid(self, tol: float | None = None) -> bool:
        """Orthonormal and right-handed within ``tol`` (default ``tol_ortho``)."""
        tol = settings.tol_ortho if tol is None else tol
        det = float(np.linalg.det(self.as_matrix()))
        return self.orthonormality_error() <= tol and abs(det - 1.0) <= tol

    def rotated(self, rotation: npt.ArrayLike) -> "Frame":
        """Apply a rigid rotation R to every frame vector."""
        r = np.asarray(rotation, dtype=float)
        return Frame.from_matrix(self.as_matrix() @ r.T)


def orthonormalize(f: Frame) -> Frame:
    """Gram-Schmidt in the order e1, e2; e3 := e1 × e2 (repairs handedness)."""
    return Frame.from_matrix(orthonormalize_matrix(f.as_matrix()))


def normal_plane_rotation(phi: float | np.ndarray) -> np.ndarray:
    """Rotation R₁(φ) fixing e1: ē₂ = cos φ e₂ − sin φ e₃, ē₃ = sin φ e₂ + cos φ e₃."""
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    r = np.zeros(phi.shape + (3, 3))
    r[..., 0, 0] = 1.0
    r[..., 1, 1] = c
    r[..., 1, 2] = -s
    r[..., 2, 1] = s
    r[..., 2, 2] = c
    return r


def rotate_normal_plane(f: Frame, phi: float) -> Frame:
    """Rotate the normal-plane pair of ``f`` by ``phi``; e1 is copied unchanged."""
    m = f.as_matrix()
    rotated = normal_plane_rotation(phi) @ m
    rotated[0] = m[0]
    return Frame.from_matrix(rotated)


def skew_coefficients(k1: np.ndarray, k2: np.ndarray, k3: np.ndarray) -> np.ndarray:
    """Stack the moving-frame coefficient matrices [[0,k1,k2],[-k1,0,k3],[-k2,-k3,0]]."""
    k1, k2, k3 = np.broadcast_arrays(*(np.asarray(k, dtype=float) for k in (k1, k2, k3)))
    k = np.zeros(k1.shape + (3, 3))
    k[..., 0, 1] = k1
    k[..., 0, 2] = k2
    k[..., 1, 0] = -k1
    k[..., 1, 2] = k3
    k[..., 2, 0] = -k2
    k[..., 2, 1] = -k3
    return k
