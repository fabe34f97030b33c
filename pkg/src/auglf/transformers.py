"""Angle-redistribution kernels for thin optical elements.

A transformer describes how an element redistributes radiance over angle at
each position.  For thin elements the redistribution is shift-invariant in
angle, so the kernel is stored per position on a *relative-angle* axis: entry
``kernel[i, m]`` is the density coupling an incoming ray at ``x_i`` to an
outgoing ray deflected by ``(m - (n_theta - 1)) * dtheta``.  Applying such a
kernel is a linear convolution along the angle axis.

Kernels are real but not necessarily positive; negative lobes carry the
interference structure of coherent elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft
from scipy.special import fresnel, jv

from .core import (
    AugmentedLightField,
    ClippedOrderWarning,
    ComplexField,
    InvalidConfigurationError,
    PhaseSpaceGrid,
    RealnessError,
    _frozen_array,
)
from .elements import (
    AmplitudeGrating,
    CodedAperture,
    CubicPhase,
    ElementSpec,
    Hologram,
    Lens,
    PhaseGrating,
    PhasePlate,
    Pinhole,
    Prism,
    RectAperture,
    TwoPinholes,
    element_deflection,
    element_transmittance,
)
from .wdf import WdfOptions, wigner_table

import warnings

# Bessel coefficients below this magnitude contribute nothing at double
# precision and are dropped from the phase-grating order sum.
_BESSEL_FLOOR = 1e-14

# Default cap on dense position-dependent kernels (bytes).
GENERAL_KERNEL_BYTE_BUDGET = 1 << 28


def _relative_axis(grid: PhaseSpaceGrid) -> np.ndarray:
    """Deflection values carried by the kernel columns."""
    n = grid.theta_samples
    return (np.arange(2 * n - 1) - (n - 1)) * grid.dtheta


@dataclass(frozen=True, slots=True)
class LightFieldTransformer:
    """Per-position angle-redistribution kernel on a relative-angle axis.

    kernel has shape ``(x_samples, 2 * theta_samples - 1)``; column ``m``
    corresponds to a deflection of ``(m - (theta_samples - 1)) * dtheta``.
    """

    grid: PhaseSpaceGrid
    kernel: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = (self.grid.x_samples, 2 * self.grid.theta_samples - 1)
        arr = _frozen_array(self.kernel, np.float64, expected, "kernel")
        object.__setattr__(self, "kernel", arr)

    def deflection_axis(self) -> np.ndarray:
        return _relative_axis(self.grid)

    def on_theta_axis(self) -> np.ndarray:
        """Kernel resampled onto the grid's absolute angle axis.

        Picks the relative-axis column nearest each grid angle.  On an even
        angle count the grid angles coincide with kernel columns exactly, so
        this is a plain slice.  This is what a unit plane-wave probe at zero
        angle returns when pushed through the kernel.
        """
        n = self.grid.theta_samples
        offsets = np.rint(self.grid.theta_axis() / self.grid.dtheta).astype(int)
        cols = np.clip(offsets + n - 1, 0, 2 * n - 2)
        return self.kernel[:, cols]


def identity_transformer(grid: PhaseSpaceGrid) -> LightFieldTransformer:
    """Kernel that leaves any light field unchanged under apply_transformer."""
    n = grid.theta_samples
    kernel = np.zeros((grid.x_samples, 2 * n - 1))
    kernel[:, n - 1] = 1.0 / grid.dtheta
    return LightFieldTransformer(grid, kernel, {"element": "identity"})


def _deposit_rows(
    kernel: np.ndarray,
    grid: PhaseSpaceGrid,
    deflections: np.ndarray,
    weights: np.ndarray,
    label: str,
) -> float:
    """Add delta rows ``weights[k] / dtheta`` at the given deflections.

    deflections: (n_rows,) deflection of each order; weights: (n_rows, x_samples)
    or (n_rows,).  Returns the total weight magnitude clipped because an order
    fell outside the representable deflection range.
    """
    n = grid.theta_samples
    cols = np.rint(deflections / grid.dtheta).astype(int) + n - 1
    inside = (cols >= 0) & (cols <= 2 * n - 2)
    weights = np.atleast_2d(weights)
    if weights.shape[0] != deflections.shape[0]:
        weights = np.broadcast_to(weights, (deflections.shape[0], kernel.shape[0]))
    clipped = 0.0
    for k, col in enumerate(cols):
        if inside[k]:
            kernel[:, col] += weights[k] / grid.dtheta
        else:
            clipped += float(np.abs(weights[k]).sum()) * grid.dx
    if clipped > 0.0:
        warnings.warn(
            f"{label}: diffraction orders outside the angular window were "
            f"dropped (clipped weight {clipped:.3g})",
            ClippedOrderWarning,
            stacklevel=3,
        )
    return clipped


def _deflection_kernel(
    grid: PhaseSpaceGrid, spec: ElementSpec, label: str
) -> LightFieldTransformer:
    """Kernel for a pure phase element: one delta per position at its deflection."""
    x = grid.x_axis()
    bend = element_deflection(spec, grid.wavelength, x)
    n = grid.theta_samples
    cols = np.rint(bend / grid.dtheta).astype(int) + n - 1
    inside = (cols >= 0) & (cols <= 2 * n - 2)
    kernel = np.zeros((grid.x_samples, 2 * n - 1))
    rows = np.nonzero(inside)[0]
    np.add.at(kernel, (rows, cols[inside]), 1.0 / grid.dtheta)
    n_out = int((~inside).sum())
    if n_out:
        warnings.warn(
            f"{label}: deflection left the angular window at {n_out} of "
            f"{grid.x_samples} positions; those columns were dropped",
            ClippedOrderWarning,
            stacklevel=3,
        )
    return LightFieldTransformer(grid, kernel, {"element": label, "clipped_columns": n_out})


def _phase_grating_orders(depth: float) -> tuple[np.ndarray, np.ndarray]:
    """Bessel order table for exp(i*depth*sin(2 pi x / p)).

    Returns (orders, coeffs) where the element couples an incoming ray into
    harmonics exp(i 2 pi m x / p); entry [s, n] handling is collapsed so the
    caller only sees, per outgoing order s, the harmonic coefficients.
    """
    m_max = int(np.ceil(abs(depth))) + 25
    ks = np.arange(-m_max, m_max + 1)
    return ks, jv(ks, depth)


def canonical_transformer(
    spec: ElementSpec,
    grid: PhaseSpaceGrid,
    options: Optional[WdfOptions] = None,
) -> LightFieldTransformer:
    """Closed-form kernel for a catalogued element.

    Elements with a known analytic kernel (apertures, gratings, phase
    elements, holograms) are built directly; a coded aperture falls back to
    the numeric path through its sampled transmittance.
    """
    n = grid.theta_samples
    dax = _relative_axis(grid)
    x = grid.x_axis()
    lam = grid.wavelength
    kernel = np.zeros((grid.x_samples, 2 * n - 1))
    meta: dict = {}

    if isinstance(spec, Pinhole):
        i0 = grid.x_index(spec.position)
        kernel[i0, :] = 1.0 / (lam * grid.dx)
        label = "pinhole"

    elif isinstance(spec, TwoPinholes):
        ia = grid.x_index(spec.a)
        ib = grid.x_index(spec.b)
        im = grid.x_index(0.5 * (spec.a + spec.b))
        kernel[ia, :] += 1.0 / (lam * grid.dx)
        kernel[ib, :] += 1.0 / (lam * grid.dx)
        kernel[im, :] += 2.0 * np.cos(2.0 * np.pi * (spec.a - spec.b) * dax / lam) / (
            lam * grid.dx
        )
        label = "two_pinholes"

    elif isinstance(spec, RectAperture):
        half = 0.5 * spec.width
        width_left = np.clip(spec.width - 2.0 * np.abs(x), 0.0, None)
        u = dax[np.newaxis, :] / lam
        kernel = (
            2.0
            * width_left[:, np.newaxis]
            * np.sinc(2.0 * u * width_left[:, np.newaxis])
            / lam
        )
        kernel[np.abs(x) >= half, :] = 0.0
        label = "rect_aperture"

    elif isinstance(spec, AmplitudeGrating):
        m = spec.modulation
        p = spec.period
        phase = 2.0 * np.pi * x / p
        dc = 0.25 * (1.0 + 0.5 * m * m * np.cos(2.0 * phase))
        half_order = 0.25 * m * np.cos(phase)
        full_order = np.full_like(x, m * m / 16.0)
        orders = np.array(
            [0.0, 0.5 * lam / p, -0.5 * lam / p, lam / p, -lam / p]
        )
        weights = np.stack([dc, half_order, half_order, full_order, full_order])
        clipped = _deposit_rows(kernel, grid, orders, weights, "amplitude_grating")
        meta["clipped_weight"] = clipped
        label = "amplitude_grating"

    elif isinstance(spec, PhaseGrating):
        ks, coeffs = _phase_grating_orders(spec.depth)
        # Outgoing deflection orders s sit at lam*s/(2p); the profile of order
        # s sums harmonic terms J_{s-n} J_n exp(i 2 pi (s - 2 n) x / p).
        m_max = ks[-1]
        clipped_total = 0.0
        for s in range(-2 * m_max, 2 * m_max + 1):
            ns = ks[(np.abs(s - ks) <= m_max)]
            c = jv(s - ns, spec.depth) * jv(ns, spec.depth)
            keep = np.abs(c) > _BESSEL_FLOOR
            if not keep.any():
                continue
            ns, c = ns[keep], c[keep]
            harm = np.exp(2j * np.pi * np.outer(x, (s - 2 * ns)) / spec.period)
            profile = harm @ c
            peak = float(np.abs(profile).max())
            if peak > 0 and float(np.abs(profile.imag).max()) > 1e-9 * peak:
                raise RealnessError(
                    "phase grating order profile acquired a non-real part"
                )
            clipped_total += _deposit_rows(
                kernel,
                grid,
                np.array([0.5 * lam * s / spec.period]),
                profile.real[np.newaxis, :],
                "phase_grating",
            )
        meta["clipped_weight"] = clipped_total
        label = "phase_grating"

    elif isinstance(spec, (Prism, Lens, CubicPhase, PhasePlate)):
        return _deflection_kernel(grid, spec, type(spec).__name__.lower())

    elif isinstance(spec, Hologram):
        d = spec.source_distance
        if spec.width is None:
            # unbounded plate: each chirp is a sharp deflection ridge
            for sign in (+1.0, -1.0):
                cols = np.rint((sign * x / d) / grid.dtheta).astype(int) + n - 1
                inside = (cols >= 0) & (cols <= 2 * n - 2)
                rows = np.nonzero(inside)[0]
                np.add.at(kernel, (rows, cols[inside]), 1.0 / grid.dtheta)
            if spec.include_oscillatory:
                kernel += 2.0 * np.cos(
                    (2.0 * np.pi / lam)
                    * (2.0 * d + x[:, np.newaxis] ** 2 / d - d * dax[np.newaxis, :] ** 2)
                )
        else:
            # finite plate: the remaining span 2*ell(x) bounds the lag
            # integral, so each ridge becomes a sinc of that width and the
            # chirp cross term becomes a pair of Fresnel integrals taken
            # between the plate edges
            ell = np.maximum(spec.width / 2 - np.abs(x), 0.0)[:, np.newaxis]
            on_plate = ell > 0
            for sign in (+1.0, -1.0):
                off = dax[np.newaxis, :] - sign * x[:, np.newaxis] / d
                kernel += np.where(on_plate, (4.0 * ell / lam) * np.sinc(4.0 * ell * off / lam), 0.0)
            if spec.include_oscillatory:
                root = np.sqrt(lam * d)
                s_star = d * dax[np.newaxis, :]
                s2, c2 = fresnel(2.0 * (ell - s_star) / root)
                s1, c1 = fresnel(-2.0 * (ell + s_star) / root)
                segment = (c2 - c1) + 1j * (s2 - s1)
                carrier = np.exp(
                    1j * (2.0 * np.pi / lam)
                    * (2.0 * d + x[:, np.newaxis] ** 2 / d - d * dax[np.newaxis, :] ** 2)
                )
                film = (2.0 * root / lam) * (carrier * segment).real
                kernel += np.where(on_plate, film, 0.0)
        meta["include_oscillatory"] = spec.include_oscillatory
        label = "hologram"

    elif isinstance(spec, CodedAperture):
        return transformer_from_transmittance(spec.transmittance, options)

    else:
        raise InvalidConfigurationError(
            f"no canonical kernel for element {type(spec).__name__}"
        )

    meta["element"] = label
    return LightFieldTransformer(grid, kernel, meta)


def transformer_from_transmittance(
    transmittance: ComplexField,
    options: Optional[WdfOptions] = None,
    fine_samples: Optional[np.ndarray] = None,
) -> LightFieldTransformer:
    """Numeric kernel from a sampled complex transmittance.

    The kernel is the phase-space density of the transmittance itself,
    evaluated on the relative-angle axis.  This reproduces every catalogued
    kernel in the limit of fine sampling and covers arbitrary masks.

    Default boundary is periodic: a mask is a multiplicative screen whose
    pattern is taken to continue beyond the simulated patch, so the uniform
    mask maps to the identity kernel and on-grid gratings keep exact order
    weights.  Pass options with boundary "zero" for masks that genuinely
    end inside the window.

    fine_samples optionally supplies the mask on the lag grid (2 *
    oversample_factor values per sample, starting at the first x node);
    exact values there sidestep the ringing that band-limited
    interpolation adds around jumps.
    """
    grid = transmittance.grid
    if options is None:
        options = WdfOptions(boundary="periodic")
    n = grid.theta_samples
    u_step = grid.dtheta / grid.wavelength
    table, residue = wigner_table(
        grid,
        transmittance.samples,
        u_start=-(n - 1) * u_step,
        du=u_step,
        n_u=2 * n - 1,
        options=options,
        fine_samples=fine_samples,
    )
    return LightFieldTransformer(
        grid,
        table / grid.wavelength,
        {"element": "numeric", "wdf_options": options, "imag_residue": residue},
    )


def compose_transformers(
    first: LightFieldTransformer,
    second: LightFieldTransformer,
) -> LightFieldTransformer:
    """Kernel of two stacked screens applied in sequence at one plane.

    Row-wise convolution over the deflection axis: a deflection a from the
    first screen followed by b from the second lands at a + b.  The result
    is cropped back to the shared relative-angle axis; deflections pushed
    beyond it are dropped, mirroring apply_transformer's angle window.
    """
    if first.grid is not second.grid and first.grid != second.grid:
        raise InvalidConfigurationError("composed transformers must share a grid")
    grid = first.grid
    n = grid.theta_samples
    width = 2 * n - 1
    nfft = next_fast_len(2 * width - 1)
    fa = rfft(first.kernel, nfft, axis=1)
    fb = rfft(second.kernel, nfft, axis=1)
    full = irfft(fa * fb, nfft, axis=1)[:, : 2 * width - 1]
    # full convolution length 4n-3; the shared axis sits centred on it
    lo = width - 1 - (n - 1)
    kernel = full[:, lo : lo + width] * grid.dtheta
    return LightFieldTransformer(
        grid,
        np.ascontiguousarray(kernel),
        {"element": "composite"},
    )


def apply_transformer(
    alf: AugmentedLightField, transformer: LightFieldTransformer
) -> AugmentedLightField:
    """Push a light field through a relative-angle kernel.

    Linear convolution along the angle axis, weighted by the angle step.
    Radiance redistributed beyond the angular window is dropped; the dropped
    share is reported in ``meta['theta_leak']`` (absolute signed content) and
    ``meta['theta_leak_fraction']``.
    """
    grid = alf.grid
    if transformer.grid != grid:
        raise InvalidConfigurationError(
            "transformer and light field live on different grids"
        )
    n = grid.theta_samples
    full_len = 3 * n - 2
    m = next_fast_len(full_len)
    spec_k = rfft(transformer.kernel, m, axis=1)
    spec_l = rfft(alf.radiance, m, axis=1)
    full = irfft(spec_k * spec_l, m, axis=1)[:, :full_len] * grid.dtheta
    out = full[:, n - 1 : 2 * n - 1]
    leak_rows = full[:, : n - 1].sum(axis=1) + full[:, 2 * n - 1 :].sum(axis=1)
    total_in = np.abs(full.sum(axis=1))
    denom = float(total_in.sum())
    leak = float(leak_rows.sum()) * grid.dtheta * grid.dx
    frac = float(np.abs(leak_rows).sum()) / denom if denom > 0 else 0.0
    meta = dict(alf.meta)
    meta["theta_leak"] = leak
    meta["theta_leak_fraction"] = frac
    return AugmentedLightField(grid, np.ascontiguousarray(out), meta)


def apply_shield_field(
    alf: AugmentedLightField, shield: np.ndarray
) -> AugmentedLightField:
    """Attenuate radiance ray by ray with occlusion factors in [0, 1]."""
    shield = np.asarray(shield, dtype=np.float64)
    if shield.shape != alf.radiance.shape:
        raise InvalidConfigurationError(
            f"shield shape {shield.shape} does not match radiance "
            f"{alf.radiance.shape}"
        )
    if not np.all(np.isfinite(shield)):
        raise InvalidConfigurationError("shield contains non-finite entries")
    if shield.min() < 0.0 or shield.max() > 1.0:
        raise InvalidConfigurationError("shield factors must lie in [0, 1]")
    return AugmentedLightField(alf.grid, alf.radiance * shield, dict(alf.meta))


def apply_general_transformer(
    alf: AugmentedLightField,
    kernel: np.ndarray,
    max_bytes: int = GENERAL_KERNEL_BYTE_BUDGET,
) -> AugmentedLightField:
    """Push a light field through a dense position-dependent angle kernel.

    kernel has shape (x_samples, theta_samples, theta_samples) with ordering
    ``kernel[i, j_out, j_in]``.  Dense kernels grow cubically, so the size is
    capped; raise the cap explicitly for large grids.
    """
    grid = alf.grid
    kernel = np.asarray(kernel, dtype=np.float64)
    expected = (grid.x_samples, grid.theta_samples, grid.theta_samples)
    if kernel.shape != expected:
        raise InvalidConfigurationError(
            f"general kernel shape {kernel.shape} does not match grid; "
            f"expected {expected}"
        )
    if kernel.nbytes > max_bytes:
        raise InvalidConfigurationError(
            f"general kernel needs {kernel.nbytes} bytes, over budget {max_bytes}; "
            "raise max_bytes to allow it"
        )
    out = np.einsum("xab,xb->xa", kernel, alf.radiance) * grid.dtheta
    return AugmentedLightField(grid, out, dict(alf.meta))


def relative_to_general(transformer: LightFieldTransformer) -> np.ndarray:
    """Expand a relative-angle kernel into the dense (x, out, in) form."""
    n = transformer.grid.theta_samples
    j_out = np.arange(n)[:, np.newaxis]
    j_in = np.arange(n)[np.newaxis, :]
    return np.ascontiguousarray(transformer.kernel[:, j_out - j_in + n - 1])
