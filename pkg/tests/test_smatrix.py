"""
Tests del oráculo de matriz de dispersión
"""

import numpy as np
import pytest

from core.errors import ValidationError
from core.physics import PhysicalParams
from core.pulse import default_time_grid, gaussian_pulse
from core.scatter2 import scatter_two
from core.smatrix import (
    FrequencyGrid,
    calibrate_two_photon_oracle,
    frequency_grid,
    oracle_three_photon_mono,
    oracle_two_photon,
    pulse_spectrum,
    s2_connected_kernel,
    s2_frequency_kernel,
    s2_pole_terms,
    s2_time_kernel,
    s3_time_kernel,
)


def test_pole_sum_equals_connected_kernel():
    rng = np.random.default_rng(3)
    w1, w2, w1p = rng.uniform(-2.0, 2.0, size=(3, 50))
    w2p = w1 + w2 - w1p
    for params in (PhysicalParams(), PhysicalParams(gamma0=0.7, omega0=0.3), PhysicalParams(chirality=0.5)):
        connected = s2_connected_kernel(w1 + params.omega0, w2 + params.omega0,
                                        w1p + params.omega0, w2p + params.omega0, params)
        poles = s2_pole_terms(w1 + params.omega0, w2 + params.omega0,
                              w1p + params.omega0, w2p + params.omega0, params)
        np.testing.assert_allclose(poles, connected, rtol=1e-10)


def test_singularities_cancel():
    eps = np.logspace(-2, -8, 7)
    w1, w2 = 0.3, -0.7
    w1p = w1 + eps
    w2p = w1 + w2 - w1p
    connected = s2_connected_kernel(w1, w2, w1p, w2p)
    assert np.isfinite(connected).all()
    assert np.abs(connected).max() < 10.0
    # el último valor ya coincide con el límite ω1' = ω1
    limit = s2_connected_kernel(w1, w2, w1, w2)
    assert connected[-1] == pytest.approx(limit, rel=1e-6)


def test_frequency_kernel_alias():
    assert s2_frequency_kernel is s2_connected_kernel


def test_time_kernel_exchange_symmetry():
    rng = np.random.default_rng(5)
    t1, t2, w1, w2 = rng.uniform(-3.0, 3.0, size=(4, 20))
    forward = s2_time_kernel(t1, t2, w1, w2, channel='XXx')
    swapped = s2_time_kernel(t2, t1, w1, w2, channel='XXx')
    np.testing.assert_allclose(forward, swapped, atol=1e-12)
    np.testing.assert_allclose(forward, s2_time_kernel(t1, t2, w2, w1, channel='XXx'), atol=1e-12)


def test_time_kernel_unknown_channel():
    with pytest.raises(ValidationError):
        s2_time_kernel(0.0, 1.0, 0.0, 0.0, channel='YYx')
    with pytest.raises(ValidationError):
        s3_time_kernel(0.0, 1.0, 2.0, 0.0, 0.0, 0.0, channel='XYXy')


def test_three_photon_kernel_symmetric_in_times():
    args = (0.4, -1.1, 0.9)
    freqs = (0.2, 1.0, -0.5)
    base = s3_time_kernel(*args, *freqs, channel='XXXx')
    assert s3_time_kernel(args[2], args[0], args[1], *freqs, channel='XXXx') == pytest.approx(base, abs=1e-12)
    xy = s3_time_kernel(*args, *freqs, channel='XXYy')
    assert s3_time_kernel(args[1], args[0], args[2], *freqs, channel='XXYy') == pytest.approx(xy, abs=1e-12)


def test_frequency_grid_covers_spectrum(resonant_pulse, resonant_grid, params):
    fgrid = frequency_grid(resonant_pulse, resonant_grid)
    assert fgrid.m >= 16
    assert 2.0 * np.pi / fgrid.spacing > resonant_grid.t_max - resonant_grid.t_min
    spectrum = pulse_spectrum(resonant_pulse, resonant_grid, fgrid, params)
    assert np.abs(spectrum[[0, -1]]).max() < 1e-6 * np.abs(spectrum).max()


def test_frequency_grid_validation():
    with pytest.raises(ValidationError):
        FrequencyGrid(-1.0, 1.0, 8)
    with pytest.raises(ValidationError):
        FrequencyGrid(1.0, 1.0, 32)


def test_mono_oracle_validation(params):
    with pytest.raises(ValidationError):
        oracle_three_photon_mono(gaussian_pulse(1.0, 0.1), params, [(0.0, 1.0, 2.0)])
    with pytest.raises(ValidationError):
        oracle_three_photon_mono(gaussian_pulse(1.0, 0.01), params, [(0.0, 1.0, 500.0)])
    with pytest.raises(ValidationError):
        oracle_three_photon_mono(gaussian_pulse(1.0, 0.01), params, [])
    with pytest.raises(ValidationError):
        oracle_three_photon_mono(gaussian_pulse(1.0, 0.01), params, [(0.0, 1.0, 2.0)], channel='YXXy')


@pytest.mark.slow
def test_two_photon_oracle_whole_grid(params):
    """Una sola constante calibrada reproduce XXx y XYy de dos pulsos distintos"""
    constant = calibrate_two_photon_oracle(params)
    for delta, gamma in ((0.0, 0.5), (1.0, 0.8)):
        shape = gaussian_pulse(delta, gamma)
        grid = default_time_grid(shape, params, photons=2, n=129)
        direct = scatter_two(shape, grid, params)
        oracle = oracle_two_photon(shape, grid, params=params)
        peak = max(np.abs(direct.xxx).max(), np.abs(direct.xyy).max())
        assert np.abs(oracle.xxx - direct.xxx).max() < 1e-3 * peak
        assert np.abs(oracle.xyy - direct.xyy).max() < 1e-3 * peak
    assert calibrate_two_photon_oracle(params) == constant


@pytest.mark.slow
def test_three_photon_mono_oracle(params):
    shape = gaussian_pulse(1.0, 0.01)
    probes = [(-20.0, 5.0, 30.0), (0.0, 10.0, -15.0), (40.0, -30.0, 2.0)]
    for channel in ('XXYy', 'XXXx'):
        result = oracle_three_photon_mono(shape, params, probes, channel)
        assert result.max_relative_error < 0.03
