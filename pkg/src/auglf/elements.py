"""Thin-element catalog shared by the phase-space and wave pipelines.

Each element is a frozen spec carrying physical parameters only.  Its
complex transmittance t(x) feeds the wave pipeline and the numeric
kernel path; slowly-varying phase elements additionally expose a ray
deflection profile d_theta(x) = (lambda / 2 pi) * dphi/dx used by the
canonical kernel builder.

Conventions: a converging lens (focal_length > 0) deflects a ray at
height x by -x/f, i.e. carries phase -pi x^2 / (lambda f); idealized
pinholes become single samples of amplitude 1/dx (the same delta
convention the Wigner module uses).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import ComplexField, DegenerateInputError, InvalidConfigurationError

__all__ = [
    "Pinhole",
    "TwoPinholes",
    "RectAperture",
    "AmplitudeGrating",
    "CodedAperture",
    "Prism",
    "Lens",
    "CubicPhase",
    "PhaseGrating",
    "PhasePlate",
    "Hologram",
    "ElementSpec",
    "element_transmittance",
    "element_deflection",
    "element_label",
]


@dataclass(frozen=True, slots=True)
class Pinhole:
    """Idealized point opening at `position`; passes all angles."""

    position: float = 0.0


@dataclass(frozen=True, slots=True)
class TwoPinholes:
    """Pair of point openings; the classic two-path interferometer."""

    a: float
    b: float

    def __post_init__(self):
        if self.a == self.b:
            raise InvalidConfigurationError("two pinholes at the same position; use Pinhole")


@dataclass(frozen=True, slots=True)
class RectAperture:
    """Hard slit of full width `width` centered on the axis."""

    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise InvalidConfigurationError(f"slit width must be positive, got {self.width!r}")


@dataclass(frozen=True, slots=True)
class AmplitudeGrating:
    """Sinusoidal amplitude mask 0.5 (1 + modulation cos(2 pi x / period))."""

    modulation: float
    period: float

    def __post_init__(self):
        if not 0.0 <= self.modulation <= 1.0:
            raise InvalidConfigurationError(f"modulation must lie in [0, 1], got {self.modulation!r}")
        if not self.period > 0:
            raise InvalidConfigurationError(f"grating period must be positive, got {self.period!r}")


@dataclass(frozen=True, slots=True)
class CodedAperture:
    """Arbitrary sampled complex transmittance on the grid's x axis."""

    transmittance: ComplexField


@dataclass(frozen=True, slots=True)
class Prism:
    """Linear phase ramp phi = phase_slope * x (rad/m); a pure beam tilt."""

    phase_slope: float


@dataclass(frozen=True, slots=True)
class Lens:
    """Thin lens; focal_length > 0 converges. Phase -pi x^2 / (lambda focal_length)."""

    focal_length: float

    def __post_init__(self):
        if self.focal_length == 0:
            raise InvalidConfigurationError("focal length must be nonzero")


@dataclass(frozen=True, slots=True)
class CubicPhase:
    """Cubic mask phi = coefficient * x^3 (rad/m^3); the wavefront-coding element."""

    coefficient: float


@dataclass(frozen=True, slots=True)
class PhaseGrating:
    """Sinusoidal phase mask exp(i depth sin(2 pi x / period))."""

    depth: float
    period: float

    def __post_init__(self):
        if self.depth < 0:
            raise InvalidConfigurationError(f"grating depth must be >= 0, got {self.depth!r}")
        if not self.period > 0:
            raise InvalidConfigurationError(f"grating period must be positive, got {self.period!r}")


@dataclass(frozen=True, slots=True)
class PhasePlate:
    """Free-form phase profile sampled on the grid's x axis (radians)."""

    phase: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.phase, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise InvalidConfigurationError("phase plate needs a 1-D profile of at least 2 samples")
        if not np.all(np.isfinite(arr)):
            raise DegenerateInputError("phase plate profile contains non-finite values")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "phase", arr)


@dataclass(frozen=True, slots=True)
class Hologram:
    """Recorded interference of an axial point source at distance `source_distance`.

    The transmittance keeps both conjugate chirps (DC dropped); on
    reconstruction one converges to a real image at z = source_distance.
    include_oscillatory controls whether the canonical kernel keeps the
    cross term between the two chirps.  width, when set, limits the
    recorded plate to |x| <= width/2: the kernel's deflection ridges then
    broaden into sinc profiles whose width follows the remaining plate
    span at each position.
    """

    source_distance: float
    include_oscillatory: bool = True
    width: Optional[float] = None

    def __post_init__(self):
        if not self.source_distance > 0:
            raise InvalidConfigurationError(
                f"hologram source distance must be positive, got {self.source_distance!r}"
            )
        if self.width is not None and not self.width > 0:
            raise InvalidConfigurationError(
                f"hologram plate width must be positive, got {self.width!r}"
            )


ElementSpec = Union[
    Pinhole,
    TwoPinholes,
    RectAperture,
    AmplitudeGrating,
    CodedAperture,
    Prism,
    Lens,
    CubicPhase,
    PhaseGrating,
    PhasePlate,
    Hologram,
]


def element_label(spec: ElementSpec) -> str:
    """Snake-case tag used in snapshots and manifests."""
    name = type(spec).__name__
    return "".join(("_" + c.lower()) if c.isupper() else c for c in name).lstrip("_")


def _spike(x: np.ndarray, dx: float, position: float, out: np.ndarray) -> None:
    i = int(np.argmin(np.abs(x - position)))
    out[i] += 1.0 / dx


def _rect(x: np.ndarray, width: float) -> np.ndarray:
    """Indicator of |x| <= width/2 with half-value edge samples.

    A sample landing on the jump takes the midpoint value 1/2 (the value
    a step's band-limited interpolant passes through); "on the jump" is
    judged to a few ulp so axes built by accumulation still qualify.
    """
    half = width / 2
    r = np.abs(x)
    edge = np.abs(r - half) <= 16 * np.finfo(float).eps * half
    t = (r < half).astype(complex)
    t[edge] = 0.5
    return t


def element_transmittance(
    spec: ElementSpec,
    wavelength: float,
    x: np.ndarray,
    dx: float,
) -> np.ndarray:
    """Complex transmittance sampled at positions `x` (uniform spacing `dx`).

    `x` may extend beyond the nominal window (padded wave pipeline):
    parametric elements continue analytically, a CodedAperture is opaque
    outside its sampled support, a PhasePlate is transparent there.
    Pinholes use the 1/dx spike convention.
    """
    x = np.asarray(x, dtype=float)
    if isinstance(spec, Pinhole):
        t = np.zeros_like(x, dtype=complex)
        _spike(x, dx, spec.position, t)
        return t
    if isinstance(spec, TwoPinholes):
        t = np.zeros_like(x, dtype=complex)
        _spike(x, dx, spec.a, t)
        _spike(x, dx, spec.b, t)
        return t
    if isinstance(spec, RectAperture):
        return _rect(x, spec.width)
    if isinstance(spec, AmplitudeGrating):
        return (0.5 * (1.0 + spec.modulation * np.cos(2.0 * np.pi * x / spec.period))).astype(complex)
    if isinstance(spec, CodedAperture):
        inner = spec.transmittance
        t = np.zeros_like(x, dtype=complex)
        xi = inner.grid.x_axis()
        # align by nearest node; outside the sampled support the mask is opaque
        lo, hi = xi[0] - inner.grid.dx / 2, xi[-1] + inner.grid.dx / 2
        inside = (x >= lo) & (x <= hi)
        idx = np.clip(np.round((x[inside] - xi[0]) / inner.grid.dx).astype(int), 0, len(xi) - 1)
        t[inside] = inner.samples[idx]
        return t
    if isinstance(spec, Prism):
        return np.exp(1j * spec.phase_slope * x)
    if isinstance(spec, Lens):
        return np.exp(-1j * np.pi * x ** 2 / (wavelength * spec.focal_length))
    if isinstance(spec, CubicPhase):
        return np.exp(1j * spec.coefficient * x ** 3)
    if isinstance(spec, PhaseGrating):
        return np.exp(1j * spec.depth * np.sin(2.0 * np.pi * x / spec.period))
    if isinstance(spec, PhasePlate):
        t = np.ones_like(x, dtype=complex)
        n = len(spec.phase)
        # the profile is pinned to the central n samples of a length-n axis;
        # for a padded axis, locate the window by matching sample counts
        if len(x) == n:
            t[:] = np.exp(1j * spec.phase)
        else:
            start = (len(x) - n) // 2
            t[start : start + n] = np.exp(1j * spec.phase)
        return t
    if isinstance(spec, Hologram):
        d = spec.source_distance
        fringes = (2.0 * np.cos(2.0 * np.pi * d / wavelength + np.pi * x ** 2 / (wavelength * d))).astype(complex)
        if spec.width is not None:
            fringes *= _rect(x, spec.width)
        return fringes
    raise InvalidConfigurationError(f"unknown element spec {spec!r}")


def element_deflection(spec: ElementSpec, wavelength: float, x: np.ndarray) -> np.ndarray:
    """Ray deflection (lambda / 2 pi) dphi/dx for slowly-varying phase elements."""
    x = np.asarray(x, dtype=float)
    if isinstance(spec, Prism):
        return np.full_like(x, wavelength * spec.phase_slope / (2.0 * np.pi))
    if isinstance(spec, Lens):
        return -x / spec.focal_length
    if isinstance(spec, CubicPhase):
        return 3.0 * wavelength * spec.coefficient * x ** 2 / (2.0 * np.pi)
    if isinstance(spec, PhasePlate):
        if len(x) != len(spec.phase):
            raise InvalidConfigurationError("phase plate profile does not match the grid")
        grad = np.gradient(spec.phase, x)
        return wavelength * grad / (2.0 * np.pi)
    raise InvalidConfigurationError(f"{type(spec).__name__} has no single-valued deflection profile")
