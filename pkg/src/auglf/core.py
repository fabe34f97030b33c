"""Phase-space grids and container types.

A simulation lives on a shared rectangular grid over position x (meters)
and ray angle theta (radians).  Both axes use the half-open symmetric
convention x[i] = -extent/2 + i*step with step = extent/samples, so an
even sample count puts 0 exactly on a node and step * samples == extent
holds without rounding games.  Angle and spatial frequency are related
exactly by u = theta / wavelength.

Radiance arrays are signed float64: interference terms of the Wigner
representation are negative-valued by nature and must not be clipped.
All containers are frozen and their arrays are marked read-only; ops
return new objects instead of mutating.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PhaseSpaceGrid",
    "ComplexField",
    "AugmentedLightField",
    "IntensityProfile",
    "make_grid",
    "project_intensity",
    "theta_to_u",
    "u_to_theta",
    "InvalidConfigurationError",
    "DegenerateInputError",
    "ScenarioAbortError",
    "RealnessError",
    "ParaxialGuardWarning",
    "BandwidthWarning",
    "ClippedOrderWarning",
    "SamplingWarning",
    "NegativeIntensityWarning",
]

# Half-angle above which small-angle replacements (sin t ~ t, cos t ~ 1)
# start to accumulate percent-level error.
PARAXIAL_HALF_ANGLE = 0.15


class InvalidConfigurationError(ValueError):
    """Grid, element, or option values that cannot describe a simulation."""


class DegenerateInputError(ValueError):
    """Structurally valid input that is numerically meaningless (NaN, empty, zero-size)."""


class ScenarioAbortError(RuntimeError):
    """A train stage destroyed too much of the signal to continue."""

    def __init__(self, stage_index: int, message: str):
        super().__init__(f"stage {stage_index}: {message}")
        self.stage_index = stage_index


class RealnessError(ArithmeticError):
    """A quantity that must be real carried a non-negligible imaginary part."""


class ParaxialGuardWarning(UserWarning):
    """Angle window exceeds the small-angle regime."""


class BandwidthWarning(UserWarning):
    """Field content approaches or exceeds the representable angular band."""


class ClippedOrderWarning(UserWarning):
    """Diffraction orders fell outside the kernel's angle axis and were dropped."""


class SamplingWarning(UserWarning):
    """A numerical kernel is undersampled for the requested propagation."""


class NegativeIntensityWarning(UserWarning):
    """Projected intensity dipped below the configured negativity floor."""


class TruncationWarning(UserWarning):
    """A transport step pushed a significant share of the signal out of the window."""


def theta_to_u(theta, wavelength: float):
    """Exact angle -> spatial-frequency conversion, u = theta / wavelength."""
    return np.asarray(theta, dtype=float) / wavelength


def u_to_theta(u, wavelength: float):
    """Exact spatial-frequency -> angle conversion, theta = u * wavelength."""
    return np.asarray(u, dtype=float) * wavelength


@dataclass(frozen=True, slots=True)
class PhaseSpaceGrid:
    """Shared (x, theta) sampling lattice.

    Attributes
    ----------
    x_samples, theta_samples : int
        Sample counts along each axis (>= 2).
    x_extent : float
        Full spatial window in meters.
    theta_extent : float
        Full angular window in radians.
    wavelength : float
        Vacuum wavelength in meters.
    """

    x_samples: int
    x_extent: float
    theta_samples: int
    theta_extent: float
    wavelength: float

    @property
    def dx(self) -> float:
        return self.x_extent / self.x_samples

    @property
    def dtheta(self) -> float:
        return self.theta_extent / self.theta_samples

    def x_axis(self) -> np.ndarray:
        return -0.5 * self.x_extent + self.dx * np.arange(self.x_samples)

    def theta_axis(self) -> np.ndarray:
        return -0.5 * self.theta_extent + self.dtheta * np.arange(self.theta_samples)

    def u_axis(self) -> np.ndarray:
        return self.theta_axis() / self.wavelength

    def x_index(self, x: float) -> int:
        """Nearest-node index for a position; clipped to the window."""
        i = int(round((x + 0.5 * self.x_extent) / self.dx))
        return min(max(i, 0), self.x_samples - 1)

    def theta_index(self, theta: float) -> int:
        """Nearest-node index for an angle; clipped to the window."""
        j = int(round((theta + 0.5 * self.theta_extent) / self.dtheta))
        return min(max(j, 0), self.theta_samples - 1)


def make_grid(
    x_samples: int,
    x_extent: float,
    theta_samples: int,
    theta_extent: float,
    wavelength: float,
    paraxial_limit: float = PARAXIAL_HALF_ANGLE,
) -> PhaseSpaceGrid:
    """Validate and build a phase-space grid.

    Raises InvalidConfigurationError for non-positive extents, sample
    counts below 2, or a non-positive wavelength.  A half-angle window
    beyond `paraxial_limit` is legal but draws a ParaxialGuardWarning,
    since every operator here is paraxial.
    """
    if int(x_samples) != x_samples or int(theta_samples) != theta_samples:
        raise InvalidConfigurationError("sample counts must be integers")
    x_samples, theta_samples = int(x_samples), int(theta_samples)
    if x_samples < 2 or theta_samples < 2:
        raise InvalidConfigurationError(
            f"need at least 2 samples per axis, got {x_samples} x {theta_samples}"
        )
    if not (x_extent > 0 and theta_extent > 0):
        raise InvalidConfigurationError(
            f"extents must be positive, got x_extent={x_extent!r}, theta_extent={theta_extent!r}"
        )
    if not wavelength > 0:
        raise InvalidConfigurationError(f"wavelength must be positive, got {wavelength!r}")
    if theta_extent / 2 > paraxial_limit:
        warnings.warn(
            f"half-angle window {theta_extent / 2:.3g} rad exceeds the paraxial guard "
            f"{paraxial_limit:.3g} rad; small-angle formulas degrade out here",
            ParaxialGuardWarning,
            stacklevel=2,
        )
    return PhaseSpaceGrid(x_samples, float(x_extent), theta_samples, float(theta_extent), float(wavelength))


def _frozen_array(values, dtype, shape, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    if arr.shape != shape:
        raise InvalidConfigurationError(f"{what}: expected shape {shape}, got {arr.shape}")
    if arr.size == 0:
        raise DegenerateInputError(f"{what}: empty array")
    if not np.all(np.isfinite(arr)):
        raise DegenerateInputError(f"{what}: non-finite samples")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, slots=True)
class ComplexField:
    """Scalar coherent field g(x) sampled on the grid's x axis."""

    grid: PhaseSpaceGrid
    samples: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.samples, np.complex128, (self.grid.x_samples,), "field samples")
        object.__setattr__(self, "samples", arr)

    def total_energy(self) -> float:
        """Sum |g|^2 dx over the window."""
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.dx)


@dataclass(frozen=True, slots=True)
class AugmentedLightField:
    """Signed radiance L(x, theta) on the shared grid.

    Stored with x along axis 0 and theta along axis 1.  Values are a
    phase-space density (per meter per radian) in arbitrary power units;
    only relative comparisons between pipelines are meaningful.  `meta`
    carries bookkeeping attached by operators (truncation losses, scale
    factors); it is never read back by the physics.
    """

    grid: PhaseSpaceGrid
    radiance: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (self.grid.x_samples, self.grid.theta_samples)
        arr = _frozen_array(self.radiance, np.float64, shape, "radiance")
        object.__setattr__(self, "radiance", arr)

    def total_power(self) -> float:
        return float(np.sum(self.radiance) * self.grid.dx * self.grid.dtheta)

    def with_meta(self, **entries) -> "AugmentedLightField":
        merged = dict(self.meta)
        merged.update(entries)
        return AugmentedLightField(self.grid, self.radiance, merged)


@dataclass(frozen=True, slots=True)
class IntensityProfile:
    """Non-negative-up-to-epsilon observable intensity I(x)."""

    grid: PhaseSpaceGrid
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values, np.float64, (self.grid.x_samples,), "intensity")
        object.__setattr__(self, "values", arr)

    def total_power(self) -> float:
        return float(np.sum(self.values) * self.grid.dx)


def project_intensity(alf: AugmentedLightField, eps_proj: float | None = None) -> IntensityProfile:
    """Angular projection I(x) = sum_theta L(x, theta) * dtheta.

    The summation order is fixed (single numpy reduction along the theta
    axis) so repeated projections of the same field are bit-identical.
    Interference terms should cancel in the projection; residuals below
    -eps_proj (default 1e-6 of the peak) draw NegativeIntensityWarning
    rather than an error, because window truncation legitimately leaves
    small signed residue.
    """
    values = alf.radiance.sum(axis=1) * alf.grid.dtheta
    peak = float(np.max(values, initial=0.0))
    floor = (1e-6 * peak) if eps_proj is None else float(eps_proj)
    worst = float(values.min())
    if worst < -floor:
        warnings.warn(
            f"projected intensity reaches {worst:.3e}, below the negativity floor {-floor:.3e}",
            NegativeIntensityWarning,
            stacklevel=2,
        )
    return IntensityProfile(alf.grid, values)
