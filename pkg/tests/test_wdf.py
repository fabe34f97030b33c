import numpy as np
import pytest

from auglf import (
    BandwidthWarning,
    ComplexField,
    DegenerateInputError,
    InvalidConfigurationError,
    WdfOptions,
    analytic_wdf_rect_aperture,
    analytic_wdf_two_pinholes,
    make_grid,
    project_intensity,
    wdf_from_field,
)
from auglf.wdf import wigner_table

from oracles import (
    gaussian_wigner,
    rect_wigner,
    wigner_from_samples_direct,
    wigner_quadrature,
)

LAM = 633e-9


def full_circle_grid(n=64, extent=1.28e-3):
    # theta window spanning exactly one lag-Nyquist period; the angular
    # Riemann sum then equals the discrete Parseval sum, no leakage terms
    return make_grid(n, extent, n, n * LAM / extent, LAM)


def band_limited(rng, n, k):
    spec = np.zeros(n, complex)
    spec[: k + 1] = rng.normal(size=k + 1) + 1j * rng.normal(size=k + 1)
    spec[-k:] = rng.normal(size=k) + 1j * rng.normal(size=k)
    return np.fft.ifft(spec)


def test_matches_direct_sum_oracle():
    g = full_circle_grid()
    rng = np.random.default_rng(7)
    fld = band_limited(rng, g.x_samples, 6)
    W = wdf_from_field(ComplexField(g, fld))
    Wd = wigner_from_samples_direct(fld, g.dx, g.u_axis()) / LAM
    assert np.linalg.norm(W.radiance - Wd) / np.linalg.norm(Wd) < 1e-12


def test_matches_continuous_quadrature_on_gaussian():
    g = make_grid(128, 2.56e-3, 128, 128 * LAM / (2 * 2.56e-3), LAM)
    sigma = 6 * g.dx
    gauss = lambda x: np.exp(-(x ** 2) / (2 * sigma ** 2))
    W = wdf_from_field(ComplexField(g, gauss(g.x_axis())))
    xs = g.x_axis()[56:72]
    us = g.u_axis()[60:68]
    Wq = wigner_quadrature(gauss, xs, us, s_max=2e-3, ds=2e-6)
    pkg = W.radiance[56:72][:, 60:68] * LAM
    assert np.linalg.norm(pkg - Wq) / np.linalg.norm(Wq) < 1e-6


def test_gaussian_closed_form_and_peak_value():
    g = make_grid(128, 2.56e-3, 128, 128 * LAM / (2 * 2.56e-3), LAM)
    sigma = 6 * g.dx
    gf = np.exp(-g.x_axis() ** 2 / (2 * sigma ** 2))
    W = wdf_from_field(ComplexField(g, gf))
    ana = gaussian_wigner(g.x_axis()[:, None], g.u_axis()[None, :], sigma) / LAM
    assert np.linalg.norm(W.radiance - ana) / np.linalg.norm(ana) < 1e-12
    peak = W.radiance[64, 64] * LAM
    assert peak == pytest.approx(2.0 * sigma * np.sqrt(np.pi), rel=1e-12)


def test_projection_recovers_intensity_exactly():
    g = full_circle_grid()
    rng = np.random.default_rng(3)
    fld = rng.normal(size=g.x_samples) + 1j * rng.normal(size=g.x_samples)
    I = project_intensity(wdf_from_field(ComplexField(g, fld))).values
    target = np.abs(fld) ** 2
    assert np.linalg.norm(I - target) / np.linalg.norm(target) < 1e-13


def test_realness_residue_reported():
    g = full_circle_grid()
    rng = np.random.default_rng(11)
    W = wdf_from_field(ComplexField(g, band_limited(rng, g.x_samples, 8)))
    assert 0.0 <= W.meta["imag_residue"] < 1e-9
    assert W.meta["wdf_options"] == (1, "none", "zero", "sinc")


def test_shift_covariance():
    g = full_circle_grid(128, 2.56e-3)
    sigma = 4 * g.dx
    x = g.x_axis()
    shift = 8
    Wa = wdf_from_field(ComplexField(g, np.exp(-x ** 2 / (2 * sigma ** 2))))
    Wb = wdf_from_field(
        ComplexField(g, np.exp(-((x - shift * g.dx) ** 2) / (2 * sigma ** 2)))
    )
    moved = np.roll(Wa.radiance, shift, axis=0)
    assert np.linalg.norm(Wb.radiance - moved) / np.linalg.norm(moved) < 1e-9


def test_modulation_covariance():
    # an on-node carrier exp(2 pi i k x / E) moves every angle bin by k
    g = full_circle_grid()
    rng = np.random.default_rng(5)
    fld = band_limited(rng, g.x_samples, 6)
    k = 5
    car = np.exp(2j * np.pi * k * g.x_axis() / g.x_extent)
    Wa = wdf_from_field(ComplexField(g, fld))
    Wb = wdf_from_field(ComplexField(g, fld * car))
    np.testing.assert_allclose(
        Wb.radiance[:, 16 + k : 48 + k], Wa.radiance[:, 16:48], atol=1e-9 * np.abs(Wa.radiance).max()
    )


def test_even_field_gives_even_angle_profile():
    g = full_circle_grid()
    ev = np.cos(2 * np.pi * 3 * g.x_axis() / g.x_extent).astype(complex)
    R = wdf_from_field(ComplexField(g, ev)).radiance
    # column j pairs with column n-j; the lowest-index column has no partner
    flipped = R[:, 1:][:, ::-1]
    assert np.linalg.norm(R[:, 1:] - flipped) / np.linalg.norm(R) < 1e-12


def test_rect_field_against_closed_form():
    n = 512
    g = make_grid(n, 2.048e-3, n, n * LAM / (2 * 2.048e-3), LAM)
    x = g.x_axis()
    A = 256 * g.dx
    fld = (np.abs(x) < A / 2).astype(complex)
    fld[np.abs(np.abs(x) - A / 2) < g.dx / 2] = 0.5
    W = wdf_from_field(ComplexField(g, fld), WdfOptions(oversample_factor=2))
    ana = rect_wigner(x[:, None], g.u_axis()[None, :], A) / LAM
    err = np.linalg.norm(W.radiance - ana) / np.linalg.norm(ana)
    assert err < 0.03


def test_analytic_two_pinholes_structure():
    g = make_grid(256, 2.56e-3, 256, 1.899e-2, LAM)
    a, b = 16 * g.dx, -16 * g.dx
    W = analytic_wdf_two_pinholes(g, a, b)
    occupied = np.nonzero(np.abs(W.radiance).sum(axis=1))[0]
    assert set(occupied) == {g.x_index(b), g.x_index(0.0), g.x_index(a)}
    mid = W.radiance[g.x_index(0.0)]
    theta = g.theta_axis()
    target = 2.0 * np.cos(2 * np.pi * (a - b) * theta / LAM) / (LAM * g.dx)
    np.testing.assert_allclose(mid, target, rtol=0, atol=1e-9 * np.abs(target).max())
    with pytest.raises(DegenerateInputError):
        analytic_wdf_two_pinholes(g, a, a)
    with pytest.raises(InvalidConfigurationError):
        analytic_wdf_two_pinholes(g, 2.0, b)


def test_analytic_rect_matches_oracle_formula():
    g = make_grid(128, 1.28e-3, 128, 0.02, LAM)
    A = 40 * g.dx
    W = analytic_wdf_rect_aperture(g, A)
    ana = rect_wigner(g.x_axis()[:, None], g.u_axis()[None, :], A) / LAM
    np.testing.assert_allclose(W.radiance, ana, rtol=0, atol=1e-12 * np.abs(ana).max())
    with pytest.raises(InvalidConfigurationError):
        analytic_wdf_rect_aperture(g, -1.0)


def test_zero_field_is_degenerate():
    g = full_circle_grid()
    with pytest.raises(DegenerateInputError):
        wdf_from_field(ComplexField(g, np.zeros(g.x_samples)))


def test_fast_chirp_draws_bandwidth_warning():
    # local frequency beta*x leaves the angular window well before the edge,
    # while staying below the x-sampling Nyquist so the guard can see it
    g = make_grid(256, 2.56e-3, 64, 2e-3, LAM)
    beta = 2e7
    fld = np.exp(1j * np.pi * beta * g.x_axis() ** 2)
    with pytest.warns(BandwidthWarning):
        wdf_from_field(ComplexField(g, fld))


def test_options_validation():
    with pytest.raises(InvalidConfigurationError):
        WdfOptions(oversample_factor=3)
    with pytest.raises(InvalidConfigurationError):
        WdfOptions(window="hann")
    with pytest.raises(InvalidConfigurationError):
        WdfOptions(boundary="reflect")
    with pytest.raises(InvalidConfigurationError):
        WdfOptions(interpolation="cubic")
    with pytest.raises(InvalidConfigurationError):
        WdfOptions(interpolation="none", oversample_factor=2)


def test_angle_window_beyond_lag_band_rejected():
    # u span achievable from the lag sampling is factor/(4 dx)
    g = make_grid(64, 1.28e-3, 64, 64 * LAM / 1.28e-3, LAM)
    too_far = 1.1 * 2 / (4 * g.dx)
    with pytest.raises(InvalidConfigurationError):
        wigner_table(g, np.ones(64, complex), -too_far, too_far / 4, 9, WdfOptions())


def test_fine_samples_shape_checked():
    g = full_circle_grid()
    with pytest.raises(InvalidConfigurationError):
        wigner_table(
            g,
            np.ones(64, complex),
            0.0,
            100.0,
            4,
            WdfOptions(),
            fine_samples=np.ones(64),
        )
