"""Frame fields, Frenet and Bishop apparatuses, and sampled curves."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np

from ..core.exceptions import DomainMismatch
from .fields import Development, Domain, ScalarField, same_domain
from .geometry import Frame, orthonormality_error

logger = logging.getLogger(__name__)

ApparatusKind = Literal["frenet", "bishop"]


def _readonly(a, shape_tail=()) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if shape_tail and arr.shape[1:] != shape_tail:
        raise ValueError(f"expected trailing shape {shape_tail}, got {arr.shape[1:]}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FrameField:
    """Frames on a uniform arclength grid: ``frames[i]`` has rows (e1, e2, e3) at ``s[i]``."""

    s: np.ndarray
    frames: np.ndarray

    def __post_init__(self):
        s = _readonly(self.s).reshape(-1)
        frames = _readonly(self.frames, (3, 3))
        if s.size < 2 or frames.shape[0] != s.size:
            raise ValueError(f"{frames.shape[0]} frames for {s.size} grid nodes")
        if np.any(np.diff(s) <= 0):
            raise ValueError("frame grid must be strictly increasing")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return self.s.size

    @property
    def domain(self) -> Domain:
        return float(self.s[0]), float(self.s[-1])

    @property
    def step(self) -> float:
        return float((self.s[-1] - self.s[0]) / (self.s.size - 1))

    @property
    def e1(self) -> np.ndarray:
        return self.frames[:, 0, :]

    @property
    def e2(self) -> np.ndarray:
        return self.frames[:, 1, :]

    @property
    def e3(self) -> np.ndarray:
        return self.frames[:, 2, :]

    def frame_at(self, i: int) -> Frame:
        return Frame.from_matrix(self.frames[i])

    def orthonormality_error(self) -> np.ndarray:
        return orthonormality_error(self.frames)

    def rotated(self, rotation) -> "FrameField":
        r = np.asarray(rotation, dtype=float)
        return FrameField(self.s, self.frames @ r.T)


def _difference_quotients(vectors: np.ndarray, h: float) -> np.ndarray:
    """Central differences on interior nodes, shape ``(n - 2, 3)``."""
    return (vectors[2:] - vectors[:-2]) / (2.0 * h)


@dataclass(frozen=True)
class FrenetApparatus:
    """Frenet frames (T, N, B) with curvature and torsion (κ, τ).

    The apparatus, not the curve, is the unit of account: a curve with
    inflections has several apparatuses, and the predecessor of a curve
    depends on which one is passed.
    """

    frames: FrameField
    kappa: ScalarField
    tau: ScalarField

    def __post_init__(self):
        for name in ("kappa", "tau"):
            field = getattr(self, name)
            if not same_domain(field.domain, self.frames.domain):
                raise DomainMismatch(f"{name} on {field.domain} but frames on {self.frames.domain}")

    @property
    def s(self) -> np.ndarray:
        return self.frames.s

    @property
    def domain(self) -> Domain:
        return self.frames.domain

    @property
    def tangent(self) -> np.ndarray:
        return self.frames.e1

    @property
    def normal(self) -> np.ndarray:
        return self.frames.e2

    @property
    def binormal(self) -> np.ndarray:
        return self.frames.e3

    def kappa_values(self) -> np.ndarray:
        return self.kappa(self.s)

    def tau_values(self) -> np.ndarray:
        return self.tau(self.s)

    def development(self) -> Development:
        return Development(self.kappa, self.tau)

    def consistency_error(self) -> Tuple[float, float]:
        """Max deviation of ⟨ΔT/Δs, N⟩ from κ and ⟨ΔN/Δs, B⟩ from τ on interior nodes."""
        if len(self.frames) < 3:
            return 0.0, 0.0
        h = self.frames.step
        dT = _difference_quotients(self.tangent, h)
        dN = _difference_quotients(self.normal, h)
        kappa = np.einsum("ij,ij->i", dT, self.normal[1:-1])
        tau = np.einsum("ij,ij->i", dN, self.binormal[1:-1])
        return (
            float(np.abs(kappa - self.kappa_values()[1:-1]).max()),
            float(np.abs(tau - self.tau_values()[1:-1]).max()),
        )


@dataclass(frozen=True)
class BishopApparatus:
    """Parallel-transport frames (T, N₁, N₂) with coefficients (k₁, k₂)."""

    frames: FrameField
    k1: ScalarField
    k2: ScalarField

    def __post_init__(self):
        for name in ("k1", "k2"):
            field = getattr(self, name)
            if not same_domain(field.domain, self.frames.domain):
                raise DomainMismatch(f"{name} on {field.domain} but frames on {self.frames.domain}")

    @property
    def s(self) -> np.ndarray:
        return self.frames.s

    @property
    def domain(self) -> Domain:
        return self.frames.domain

    def k1_values(self) -> np.ndarray:
        return self.k1(self.s)

    def k2_values(self) -> np.ndarray:
        return self.k2(self.s)

    def parallelism_error(self) -> float:
        """Max |⟨ΔN₁/Δs, N₂⟩| on interior nodes; zero for a true Bishop frame."""
        if len(self.frames) < 3:
            return 0.0
        dN1 = _difference_quotients(self.frames.e2, self.frames.step)
        return float(np.abs(np.einsum("ij,ij->i", dN1, self.frames.e3[1:-1])).max())


@dataclass(frozen=True)
class PolarDevelopment:
    """Polar form (ω, φ) of a Bishop development: (k₁, k₂) = ω (cos φ, sin φ)."""

    omega: ScalarField
    phi: ScalarField

    def __post_init__(self):
        if not same_domain(self.omega.domain, self.phi.domain):
            raise DomainMismatch(f"omega on {self.omega.domain} but phi on {self.phi.domain}")

    @property
    def domain(self) -> Domain:
        return self.omega.domain

    def reconstruct(self, grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        omega, phi = self.omega(grid), self.phi(grid)
        return omega * np.cos(phi), omega * np.sin(phi)


@dataclass(frozen=True)
class CurveSamples:
    """A sampled unit-speed curve: grid, positions, frames and coefficients.

    For ``kind == "bishop"`` the frame rows are (T, N₁, N₂) and the two
    coefficient columns hold (k₁, k₂).
    """

    s: np.ndarray
    positions: np.ndarray
    frames: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    kind: ApparatusKind = "frenet"

    def __post_init__(self):
        s = _readonly(self.s).reshape(-1)
        n = s.size
        positions = _readonly(self.positions, (3,))
        frames = _readonly(self.frames, (3, 3))
        kappa = _readonly(self.kappa).reshape(-1)
        tau = _readonly(self.tau).reshape(-1)
        if not (positions.shape[0] == frames.shape[0] == kappa.size == tau.size == n):
            raise ValueError("CurveSamples columns must all have one entry per grid node")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "tau", tau)

    def __len__(self) -> int:
        return self.s.size

    @property
    def domain(self) -> Domain:
        return float(self.s[0]), float(self.s[-1])

    @property
    def step(self) -> float:
        return float((self.s[-1] - self.s[0]) / (self.s.size - 1))

    @property
    def tangents(self) -> np.ndarray:
        return self.frames[:, 0, :]

    def frame_field(self) -> FrameField:
        return FrameField(self.s, self.frames)

    def frame_at(self, i: int) -> Frame:
        return Frame.from_matrix(self.frames[i])

    def closure_gap(self) -> float:
        return float(np.linalg.norm(self.positions[-1] - self.positions[0]))

    def frenet_apparatus(self) -> FrenetApparatus:
        if self.kind != "frenet":
            raise ValueError("samples carry a Bishop frame, not a Frenet frame")
        domain = self.domain
        return FrenetApparatus(
            self.frame_field(),
            ScalarField.from_table(domain, self.kappa),
            ScalarField.from_table(domain, self.tau),
        )

    def bishop_apparatus(self) -> BishopApparatus:
        if self.kind != "bishop":
            raise ValueError("samples carry a Frenet frame, not a Bishop frame")
        domain = self.domain
        return BishopApparatus(
            self.frame_field(),
            ScalarField.from_table(domain, self.kappa),
            ScalarField.from_table(domain, self.tau),
        )

    @classmethod
    def from_apparatus(cls, app, positions: np.ndarray) -> "CurveSamples":
        if isinstance(app, BishopApparatus):
            return cls(app.s, positions, app.frames.frames, app.k1_values(), app.k2_values(), kind="bishop")
        return cls(app.s, positions, app.frames.frames, app.kappa_values(), app.tau_values(), kind="frenet")
