"""
Tests de la función de onda de tres fotones
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import MemoryBudgetError, ValidationError
from core.physics import make_time_grid, s_coeff, t_coeff
from core.pulse import (
    default_time_grid,
    envelope,
    gaussian_filtered_closed_form,
    gaussian_pulse,
    normalize,
    phi_s_at,
)
from core.scatter2 import psi2_pointwise
from core.scatter3 import CHANNELS_3, psi3_pointwise, scatter_three


@pytest.fixture
def small_grid():
    return make_time_grid(-13.0, 23.0, 65)


@pytest.fixture
def wave(resonant_pulse, small_grid, params):
    return scatter_three(resonant_pulse, small_grid, params, threads=2)


def test_xxxx_fully_symmetric(wave):
    scale = np.abs(wave.xxxx).max()
    for axes in [(1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0)]:
        assert_allclose(wave.xxxx, wave.xxxx.transpose(axes), atol=1e-14 * scale)


def test_xxyy_symmetric_in_x_photons(wave):
    assert_allclose(wave.xxyy, wave.xxyy.transpose(1, 0, 2), atol=1e-15)


def test_channel_permutations(wave):
    i, j, k = 20, 31, 27
    assert wave.channel('XXYy')[i, j, k] == wave.xxyy[i, j, k]
    assert wave.channel('XYXy')[i, j, k] == wave.xxyy[i, k, j]
    assert wave.channel('YXXy')[i, j, k] == wave.xxyy[j, k, i]


def test_unknown_channel(wave):
    with pytest.raises(ValidationError):
        wave.channel('XXX')
    with pytest.raises(ValidationError):
        psi3_pointwise(gaussian_pulse(0.0, 1.0), wave.params, 0.0, 0.0, 0.0, 'YYXx')


def test_pointwise_matches_grid(resonant_pulse, small_grid, wave, params):
    rng = np.random.default_rng(11)
    t = small_grid.times
    triples = [tuple(int(x) for x in p) for p in rng.integers(12, 45, size=(6, 3))]
    triples += [(25, 25, 30), (30, 25, 25), (28, 28, 28)]
    scale = np.abs(wave.xxxx).max()
    for i, j, k in triples:
        for name in CHANNELS_3:
            direct = psi3_pointwise(resonant_pulse, params, t[i], t[j], t[k], name, small_grid)
            assert direct == pytest.approx(complex(wave.channel(name)[i, j, k]), abs=1e-12 * scale)


def test_coincident_probe(params):
    """En t1 = t2 = t3: ψ^XXXx = φτ³ − 2φs²φτ + φs²(φs − φ0)"""
    shape = gaussian_pulse(0.0, 0.2)
    phi0 = complex(envelope(shape, 0.0))
    phis = complex(gaussian_filtered_closed_form(shape, 0.0, params))
    phit = phi0 + phis
    expected = phit ** 3 - 2.0 * phis ** 2 * phit + phis ** 2 * (phis - phi0)
    grid = default_time_grid(shape, params, photons=2)
    value = psi3_pointwise(shape, params, 0.0, 0.0, 0.0, 'XXXx', grid)
    assert value == pytest.approx(expected, rel=1e-5, abs=1e-7)


def test_sequential_bookkeeping(params):
    """Fotón Y primero: |s|·∏|φ|; fotón Y último: |t² s|·∏|φ|"""
    shape = gaussian_pulse(1.0, 0.01)
    s, t = abs(s_coeff(1.0)), abs(t_coeff(1.0))

    times = (-20.0, 0.0, 10.0)
    scale = abs(np.prod(envelope(shape, np.array(times))))
    assert abs(psi3_pointwise(shape, params, *times, 'YXXy')) == pytest.approx(s * scale, rel=0.05)

    times = (20.0, -10.0, 0.0)
    scale = abs(np.prod(envelope(shape, np.array(times))))
    assert abs(psi3_pointwise(shape, params, *times, 'YXXy')) == pytest.approx(t * t * s * scale, rel=0.05)


def test_resonant_xxxx_vanishes(params):
    shape = gaussian_pulse(0.0, 0.01)
    times = np.array([-20.0, 0.0, 20.0])
    scale = abs(np.prod(envelope(shape, times)))
    assert abs(psi3_pointwise(shape, params, *times, 'XXXx')) < 0.02 * scale


def test_late_photon_leaves_two_photon_state(params):
    """Con t3 − max(t1, t2) = 20/Γ0 el tercer fotón se factoriza sobre ψ^XXx(t1, t2)"""
    shape = gaussian_pulse(0.7, 0.05)
    grid = default_time_grid(shape, params)
    t1, t2 = -6.0, -4.0
    t3 = t2 + 20.0 / params.gamma0
    pair = psi2_pointwise(shape, params, t1, t2, 'XXx', grid)
    f0 = envelope(shape, t3)
    fs = complex(phi_s_at(shape, params, [t3], grid)[0])
    assert psi3_pointwise(shape, params, t1, t2, t3, 'XXXx', grid) == pytest.approx(
        pair * (f0 + fs), rel=1e-6, abs=1e-12)
    assert psi3_pointwise(shape, params, t1, t2, t3, 'XXYy', grid) == pytest.approx(
        pair * fs, rel=1e-6, abs=1e-12)


def test_far_separated_photons_factorize(params):
    shape = gaussian_pulse(0.7, 0.05)
    grid = default_time_grid(shape, params)
    times = np.array([-20.0, 0.0, 20.0])
    f0 = envelope(shape, times)
    fs = phi_s_at(shape, params, times, grid)
    ft = f0 + fs
    assert psi3_pointwise(shape, params, *times, 'XXXx', grid) == pytest.approx(
        ft[0] * ft[1] * ft[2], rel=1e-6, abs=1e-12)
    assert psi3_pointwise(shape, params, *times, 'XXYy', grid) == pytest.approx(
        ft[0] * ft[1] * fs[2], rel=1e-6, abs=1e-12)
    # convertido el primero, los otros dos pasan sin interacción
    assert psi3_pointwise(shape, params, *times, 'YXXy', grid) == pytest.approx(
        fs[0] * f0[1] * f0[2], rel=1e-12)


def test_diagonal_slice(wave, small_grid):
    data = wave.diagonal_slice(1.0)
    total = data['t1'] + data['t2'] + data['t3']
    assert np.abs(total - 1.0).max() <= 0.5 * small_grid.h + 1e-12
    assert set(CHANNELS_3) <= set(data)
    assert data['XXXx'].shape == data['t1'].shape


def test_memory_budget(resonant_pulse, params):
    grid = make_time_grid(-13.0, 23.0, 401)
    with pytest.raises(MemoryBudgetError):
        scatter_three(resonant_pulse, grid, params)


@pytest.mark.slow
def test_norm_on_default_grid(params):
    shape = gaussian_pulse(0.0, 0.2)
    wave = scatter_three(shape, params=params)
    assert wave.norm() == pytest.approx(1.0, abs=1e-2)


@pytest.mark.slow
def test_conversion_weight_favors_first_photon(params):
    """En resonancia el fotón convertido es casi siempre el primero: t3 < min(t1, t2)"""
    shape = gaussian_pulse(0.0, 0.2)
    wave = scatter_three(shape, params=params)
    t = wave.grid.times
    t1, t2, t3 = np.meshgrid(t, t, t, indexing='ij', sparse=True)
    weight = np.abs(wave.xxyy) ** 2
    first = np.broadcast_to(t3 < np.minimum(t1, t2), weight.shape)
    assert weight[first].sum() > 0.6 * weight.sum()


@pytest.mark.slow
def test_norm_of_shaped_pulses(random_shapes, params):
    for shape in random_shapes:
        grid = default_time_grid(shape, params, photons=3, n=241)
        wave = scatter_three(normalize(shape, grid), grid, params)
        assert wave.norm() == pytest.approx(1.0, abs=1e-2)
