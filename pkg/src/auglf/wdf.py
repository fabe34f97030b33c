"""Wigner phase-space representation of coherent fields.

The Wigner transform W(x,u) = int g(x + s/2) conj(g(x - s/2)) e^{-2pi i u s} ds
is real, can go negative, and its frequency marginal recovers |g(x)|^2.
We store it remapped to ray angle, L(x, theta) = W(x, theta/lambda) / lambda,
so the angular projection of the result reproduces |g|^2 in absolute units.

Discretization: the half-sample shifts g(x +/- s/2) are taken on a
band-limited 2x oversampling of the field (plus optional extra
oversampling), which keeps the usable frequency band at the field's
full Nyquist width instead of half of it.  The lag-to-frequency sum is
evaluated with a chirp transform at exactly the grid's angle nodes;
tests pin it against a naive direct-sum oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import resample, zoom_fft
from scipy.signal.windows import tukey

from .core import (
    AugmentedLightField,
    BandwidthWarning,
    ComplexField,
    DegenerateInputError,
    InvalidConfigurationError,
    PhaseSpaceGrid,
    RealnessError,
)

__all__ = ["WdfOptions", "wdf_from_field", "analytic_wdf_two_pinholes", "analytic_wdf_rect_aperture"]

# Fraction of the window tapered on each side by the raised-cosine option.
EDGE_TAPER_FRACTION = 0.1

# Residual imaginary part above this fraction of the real peak is a hard error:
# the correlation product is Hermitian in the lag, so a real result is a
# structural property, not a rounding accident.
REALNESS_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class WdfOptions:
    """Numerical knobs for the discrete Wigner transform.

    oversample_factor : extra band-limited field upsampling (1, 2 or 4)
        on top of the built-in factor 2 for half-sample shifts.  Helps
        hard-edged fields at the cost of memory.
    window : "none" or "raised-cosine" edge apodization of the field
        before the correlation; suppresses lag-window sidelobes when
        extracting diffraction-order weights.
    boundary : treatment of samples pulled from beyond the window in the
        lag products.  "zero" extends the field with zeros (physical
        fields that decay inside the window); "periodic" wraps around,
        which is the faithful choice for transmittance masks that
        continue beyond the simulated patch (gratings, uniform plates).
    interpolation : how half-sample values are obtained.  "sinc" uses
        band-limited resampling, exact for fields that are smooth at the
        sample scale.  "none" leaves them zero, which is exact for masks
        made of isolated single-sample spikes (pinholes); it aliases
        smooth content, so never use it for resolved masks.
    """

    oversample_factor: int = 1
    window: str = "none"
    boundary: str = "zero"
    interpolation: str = "sinc"

    def __post_init__(self):
        if self.oversample_factor not in (1, 2, 4):
            raise InvalidConfigurationError(
                f"oversample_factor must be 1, 2 or 4, got {self.oversample_factor!r}"
            )
        if self.window not in ("none", "raised-cosine"):
            raise InvalidConfigurationError(f"unknown window {self.window!r}")
        if self.boundary not in ("zero", "periodic"):
            raise InvalidConfigurationError(f"unknown boundary {self.boundary!r}")
        if self.interpolation not in ("sinc", "none"):
            raise InvalidConfigurationError(f"unknown interpolation {self.interpolation!r}")
        if self.interpolation == "none" and self.oversample_factor != 1:
            raise InvalidConfigurationError(
                "interpolation 'none' fixes the lag step at the sample step; "
                "oversample_factor must stay 1"
            )


def _apodized(samples: np.ndarray, window: str) -> np.ndarray:
    if window == "none":
        return samples
    return samples * tukey(len(samples), alpha=2 * EDGE_TAPER_FRACTION)


def wigner_table(
    grid: PhaseSpaceGrid,
    samples: np.ndarray,
    u_start: float,
    du: float,
    n_u: int,
    options: WdfOptions,
    chunk_rows: int = 128,
    fine_samples: np.ndarray = None,
) -> np.ndarray:
    """Real Wigner values at every grid x node and n_u frequencies u_start + k*du.

    Shared by the field transform (u from the grid's theta axis) and the
    transmittance-to-kernel path (u from a symmetric relative-angle axis).
    fine_samples, when given, supplies the signal on the lag grid (factor *
    len(samples) values, factor = 2 * oversample_factor) and replaces the
    interpolation step; use it when the signal is known analytically
    between samples, e.g. hard-edged masks whose band-limited interpolant
    would ring.
    Returns (table, imag_residue) where imag_residue is the worst discarded
    imaginary magnitude as a fraction of the real peak; raises RealnessError
    if it exceeds REALNESS_TOL.

    With periodic boundary the two half-window end lags alias onto the same
    circular displacement, so each enters with half weight; that keeps the
    lag window an exact full period and the uniform mask an exact identity
    on matched grids.
    """
    n = grid.x_samples
    factor = 2 * options.oversample_factor
    u_stop = u_start + du * (n_u - 1)
    u_max = max(abs(u_start), abs(u_stop))
    achievable = factor / (4.0 * grid.dx)
    if u_max > achievable * (1 + 1e-12):
        raise InvalidConfigurationError(
            f"requested frequencies reach {u_max:.4g} /m but the lag sampling "
            f"supports only {achievable:.4g} /m; enlarge oversample_factor or "
            f"shrink the angle window"
        )

    g = _apodized(np.asarray(samples, dtype=np.complex128), options.window)
    m_total = factor * n
    if fine_samples is not None:
        gf = np.asarray(fine_samples, dtype=np.complex128)
        if gf.shape != (m_total,):
            raise InvalidConfigurationError(
                f"fine_samples must have shape ({m_total},), got {gf.shape}"
            )
        if options.window != "none":
            gf = gf * tukey(m_total, alpha=2 * EDGE_TAPER_FRACTION)
    elif options.interpolation == "none":
        gf = np.zeros(m_total, dtype=np.complex128)
        gf[::factor] = g
    else:
        gf = resample(g, m_total)
    ds = 2.0 * grid.dx / factor  # lag step: s = 2 * (fine sample step)
    k_half = m_total // 2
    lags = np.arange(-k_half, k_half + 1)

    out = np.empty((n, n_u))
    worst_imag = 0.0
    peak_real = 0.0
    # phase correction: zoom_fft indexes the lag array from 0, the lag
    # values start at -k_half * ds
    u_nodes = u_start + du * np.arange(n_u)
    unshift = np.exp(2j * np.pi * u_nodes * (k_half * ds))
    for lo in range(0, n, chunk_rows):
        hi = min(lo + chunk_rows, n)
        rows = np.arange(lo, hi)
        qi = factor * rows[:, None]
        ia = qi + lags[None, :]
        ib = qi - lags[None, :]
        if options.boundary == "periodic":
            corr = gf[np.mod(ia, m_total)] * np.conj(gf[np.mod(ib, m_total)])
            corr[:, 0] *= 0.5
            corr[:, -1] *= 0.5
        else:
            valid = (ia >= 0) & (ia < m_total) & (ib >= 0) & (ib < m_total)
            corr = np.where(valid, gf[np.clip(ia, 0, m_total - 1)] * np.conj(gf[np.clip(ib, 0, m_total - 1)]), 0.0)
        spec = zoom_fft(corr, [u_nodes[0], u_nodes[-1]], m=n_u, fs=1.0 / ds, endpoint=True, axis=-1)
        spec *= unshift * ds
        worst_imag = max(worst_imag, float(np.abs(spec.imag).max()))
        block = spec.real
        peak_real = max(peak_real, float(np.abs(block).max()))
        out[lo:hi] = block
    residue = worst_imag / peak_real if peak_real > 0 else 0.0
    if residue > REALNESS_TOL:
        raise RealnessError(
            f"Wigner imaginary residue {worst_imag:.3e} exceeds {REALNESS_TOL:.1e} of peak {peak_real:.3e}"
        )
    return out, residue


def _local_frequency_check(field: ComplexField) -> None:
    """Warn when the field's instantaneous frequency leaves the angle window."""
    g = field.samples
    mag = np.abs(g)
    peak = mag.max()
    if peak == 0:
        return
    significant = mag > 1e-3 * peak
    if significant.sum() < 3:
        return
    phase = np.unwrap(np.angle(g[significant]))
    x = field.grid.x_axis()[significant]
    with np.errstate(divide="ignore", invalid="ignore"):
        u_local = np.gradient(phase, x) / (2.0 * np.pi)
    u_limit = field.grid.theta_extent / (2.0 * field.grid.wavelength)
    worst = float(np.nanmax(np.abs(u_local)))
    if worst > u_limit:
        warnings.warn(
            f"field local frequency {worst:.4g} /m exceeds the angle window's "
            f"{u_limit:.4g} /m; content will fold or vanish",
            BandwidthWarning,
            stacklevel=3,
        )


def wdf_from_field(field: ComplexField, options: WdfOptions = WdfOptions()) -> AugmentedLightField:
    """Numeric Wigner transform of a sampled coherent field.

    Returns the signed radiance L(x, theta) = W(x, theta/lambda)/lambda on
    the field's own grid.  The grid's angle axis must lie inside the
    frequency band achievable from the lag sampling; a field whose local
    frequency leaves the window draws BandwidthWarning.
    """
    if not np.any(field.samples):
        raise DegenerateInputError("field is identically zero")
    grid = field.grid
    _local_frequency_check(field)
    u_axis = grid.u_axis()
    w, residue = wigner_table(grid, field.samples, float(u_axis[0]), grid.dtheta / grid.wavelength, grid.theta_samples, options)
    meta = {
        "wdf_options": (options.oversample_factor, options.window, options.boundary, options.interpolation),
        "imag_residue": residue,
    }
    return AugmentedLightField(grid, w / grid.wavelength, meta)


def _deposit_column(radiance: np.ndarray, grid: PhaseSpaceGrid, x0: float, profile) -> None:
    radiance[grid.x_index(x0), :] += profile / (grid.wavelength * grid.dx)


def analytic_wdf_two_pinholes(grid: PhaseSpaceGrid, a: float, b: float) -> AugmentedLightField:
    """Closed-form two-pinhole radiance: two flat columns plus the midpoint oscillation.

    Deposits delta(x-a) + delta(x-b) + 2 delta(x-(a+b)/2) cos(2 pi (a-b) theta / lambda)
    at nearest nodes with the 1/dx delta convention.  The midpoint column
    carries zero net intensity when (a-b) * theta_extent / lambda is an
    integer (whole oscillation periods inside the window); tests and the
    shipped configs choose grids that way.
    """
    if a == b:
        raise DegenerateInputError("pinholes coincide; use a single pinhole instead")
    half = grid.x_extent / 2
    for name, pos in (("a", a), ("b", b)):
        if not (-half <= pos < half):
            raise InvalidConfigurationError(f"pinhole {name}={pos!r} outside the window [{-half}, {half})")
    theta = grid.theta_axis()
    radiance = np.zeros((grid.x_samples, grid.theta_samples))
    _deposit_column(radiance, grid, a, np.ones_like(theta))
    _deposit_column(radiance, grid, b, np.ones_like(theta))
    _deposit_column(radiance, grid, (a + b) / 2, 2.0 * np.cos(2.0 * np.pi * (a - b) * theta / grid.wavelength))
    return AugmentedLightField(grid, radiance)


def analytic_wdf_rect_aperture(grid: PhaseSpaceGrid, aperture: float) -> AugmentedLightField:
    """Closed-form radiance of a hard slit of full width `aperture`.

    Triangular envelope in x; along angle a sinc whose width scales as
    lambda / (2A - 4|x|), evaluated exactly on the grid nodes.
    """
    if aperture <= 0:
        raise InvalidConfigurationError(f"aperture must be positive, got {aperture!r}")
    if aperture > grid.x_extent:
        warnings.warn(
            f"aperture {aperture:.3g} m exceeds the {grid.x_extent:.3g} m window; the wings are cut",
            BandwidthWarning,
            stacklevel=2,
        )
    x = grid.x_axis()[:, None]
    u = grid.u_axis()[None, :]
    width = aperture - 2.0 * np.abs(x)
    w = np.where(width > 0, width, 0.0)
    values = 2.0 * w * np.sinc(2.0 * u * w) / grid.wavelength
    return AugmentedLightField(grid, np.where(width > 0, values, 0.0))
