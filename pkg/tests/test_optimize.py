"""
Tests de barridos y optimización del pulso
"""

import math

import numpy as np
import pytest

from core.errors import NumericalDiagnosticError, ValidationError
from core.optimize import (
    OptimizationEngine,
    OptimumReport,
    SweepResult,
    _pack,
    _unpack,
    mono_column_check,
    pw_objective,
)
from core.pulse import default_time_grid, gaussian_pulse
from core.scatter2 import scatter_two
from core.scatter3 import peak_bytes
from core.settings import ScatterSettings, reset_settings
from core.wstate import pw3_average


@pytest.fixture
def engine():
    calls = []
    engine = OptimizationEngine(on_evaluation=lambda *args: calls.append(args))
    engine.calls = calls
    return engine


@pytest.fixture(scope='module')
def small_sweep():
    return OptimizationEngine().sweep(2, (0.5, 1.5), (0.8, 1.2), (3, 3), n_cell=65, threads=2)


# ─────────────────────────────────────────────────────────────────────────────
# Objetivo
# ─────────────────────────────────────────────────────────────────────────────

def test_objective_matches_direct_average(params):
    shape = gaussian_pulse(1.0, 1.0)
    grid = default_time_grid(shape, params)
    expected = pw3_average(scatter_two(shape, grid, params)).average
    assert pw_objective(2, 1.0, 1.0, grid=grid).value == pytest.approx(expected, abs=1e-14)


def test_zero_coefficients_are_gaussian():
    plain = pw_objective(2, 0.9, 1.1)
    padded = pw_objective(2, 0.9, 1.1, coefficients=(0j, 0j))
    assert padded.shape.is_gaussian
    assert padded.value == pytest.approx(plain.value, abs=1e-14)


def test_anchored_objective_grid():
    result = pw_objective(2, 1.0, 1.0, spacing=0.1)
    assert result.grid.h == pytest.approx(0.1)


def test_hermite_objective_is_normalized():
    result = pw_objective(2, 1.0, 1.0, coefficients=(0.05j, 0.02 + 0.01j))
    assert result.report.norm == pytest.approx(1.0, abs=0.02)


def test_invalid_photons():
    with pytest.raises(ValidationError):
        pw_objective(4, 1.0, 1.0)


def test_pack_layout():
    x = _pack(0.9, 1.1, (0.02j, 0.3 - 0.1j), 3)
    np.testing.assert_allclose(x, [0.9, 1.1, 0.02, 0.3, -0.1])
    delta, gamma, coeffs = _unpack(x, 3)
    assert (delta, gamma) == (0.9, 1.1)
    assert coeffs == (0.02j, 0.3 - 0.1j)


def test_pack_pads_missing_orders():
    x = _pack(1.0, 1.0, (), 4)
    assert x.size == 2 + 1 + 2 * 2
    assert not x[2:].any()


# ─────────────────────────────────────────────────────────────────────────────
# Barrido
# ─────────────────────────────────────────────────────────────────────────────

def test_sweep_values(small_sweep):
    assert small_sweep.values.shape == (3, 3)
    assert small_sweep.valid.all()
    assert ((small_sweep.values > 0.0) & (small_sweep.values < 1.0)).all()
    assert (small_sweep.grid_n % 2 == 1).all()


def test_sweep_best_is_a_cell(small_sweep):
    delta, gamma, value = small_sweep.best()
    assert delta in small_sweep.delta_axis
    assert gamma in small_sweep.gamma_axis
    assert value == small_sweep.values.max()


def test_sweep_frame_and_dict(small_sweep):
    frame = small_sweep.to_frame()
    assert list(frame.columns) == ['delta', 'gamma', 'value', 'valid', 'n', 'h']
    assert len(frame) == 9
    data = small_sweep.to_dict()
    assert 'best' in data
    assert 'execution_time' not in data
    assert data['grid_meta']['n_cell'] == 65


def test_sweep_is_deterministic(small_sweep):
    again = OptimizationEngine().sweep(2, (0.5, 1.5), (0.8, 1.2), (3, 3), n_cell=65, threads=1)
    assert np.array_equal(again.values, small_sweep.values)


def test_sweep_reports_every_cell(engine):
    engine.sweep(2, (1.0, 1.0), (1.0, 1.2), (1, 2), n_cell=65, threads=1)
    assert len(engine.calls) == 2
    assert all(kind == 'sweep' and valid for kind, _, _, valid in engine.calls)
    assert engine.stats.evaluations == 2


def _serial_map(seen):
    def serial(func, items, threads=None):
        seen.append(threads)
        return [func(item) for item in items]
    return serial


def test_three_photon_sweep_limits_parallel_cells(monkeypatch):
    seen = []
    monkeypatch.setattr('core.optimize.map_ordered', _serial_map(seen))
    n = default_time_grid(gaussian_pulse(0.0, 1.3), photons=3, n_min=65).n
    settings = ScatterSettings()
    settings.limits.memory_budget_bytes = 2.5 * peak_bytes(n)
    reset_settings(settings)

    result = OptimizationEngine().sweep(3, (1.0, 1.0), (1.3, 1.3), (1, 1), n_cell=65, threads=8)
    assert seen == [2]
    assert result.values.shape == (1, 1)


def test_two_photon_sweep_keeps_requested_threads(monkeypatch):
    seen = []
    monkeypatch.setattr('core.optimize.map_ordered', _serial_map(seen))
    settings = ScatterSettings()
    settings.limits.memory_budget_bytes = 1e7
    reset_settings(settings)

    OptimizationEngine().sweep(2, (1.0, 1.0), (1.0, 1.0), (1, 1), n_cell=65, threads=8)
    assert seen == [8]


def test_sweep_landscape_mirror_symmetric():
    result = OptimizationEngine().sweep(2, (-1.0, 1.0), (0.8, 1.2), (3, 2), n_cell=65, threads=2)
    assert result.valid.all()
    np.testing.assert_allclose(result.values[0], result.values[2], rtol=0, atol=1e-12)
    assert np.array_equal(result.grid_n[0], result.grid_n[2])


@pytest.mark.parametrize('kwargs', [
    {'gamma_range': (0.0, 1.0)},
    {'gamma_range': (1.0, 0.5)},
    {'delta_range': (0.0, math.nan)},
    {'resolution': (0, 3)},
])
def test_sweep_validation(engine, kwargs):
    with pytest.raises(ValidationError):
        engine.sweep(2, **kwargs)


def test_sweep_without_valid_cells():
    empty = SweepResult(2, np.array([0.0]), np.array([1.0]), np.zeros((1, 1)), np.zeros((1, 1), dtype=bool),
                        np.full((1, 1), 129), np.full((1, 1), 0.1), 129)
    with pytest.raises(NumericalDiagnosticError):
        empty.best()
    assert 'best' not in empty.to_dict()


def test_mono_column_check_structure(small_sweep):
    check = mono_column_check(small_sweep)
    assert check['gamma'] == pytest.approx(0.8)
    assert set(check) == {'gamma', 'max_deviation', 'tolerance', 'passed'}
    # γ = 0.8 está lejos del límite monocromático
    assert not check['passed']


# ─────────────────────────────────────────────────────────────────────────────
# Refinamiento y forma
# ─────────────────────────────────────────────────────────────────────────────

@pytest.mark.parametrize('start', [(1.0, 0.0), (1.0, -0.5), (1.0, 1.0, 0.0)])
def test_refine_rejects_bad_start(engine, start):
    with pytest.raises(ValidationError):
        engine.refine_max(2, start)


def test_report_dict_form():
    report = OptimumReport('hermite', 2, 1.0, 1.0, 0.78, coefficients=(0.02j, 0.1 - 0.2j))
    data = report.to_dict()
    assert data['coefficients'] == [[0.0, 0.02], [0.1, -0.2]]
    assert OptimumReport.from_dict(data) == report
    assert report.pulse_spec()['hermite'] == data['coefficients']


def test_report_from_bad_dict():
    with pytest.raises(ValidationError):
        OptimumReport.from_dict({'kind': 'gaussian', 'unexpected': 1})


def test_frozen_shape_reevaluates_start(engine):
    start = OptimumReport('gaussian', 2, 1.0, 1.0, 0.0)
    report = engine.optimize_pulse_shape(2, 3, start, free_coefficients=False)
    assert report.method == 'frozen'
    assert report.iterations == 0
    assert report.coefficients == ()
    assert report.objective == pytest.approx(pw_objective(2, 1.0, 1.0, n_min=129).value, abs=1e-14)


def test_shape_never_returns_worse_than_start(engine):
    start = OptimumReport('gaussian', 2, 1.0, 1.0, objective=2.0)
    report = engine.optimize_pulse_shape(2, 2, start, method='Nelder-Mead', max_iterations=2)
    assert report.objective == 2.0
    assert report.kind == 'gaussian'
    assert not report.converged


@pytest.mark.parametrize('kwargs', [
    {'n_max': 1},
    {'method': 'Powell'},
])
def test_shape_validation(engine, kwargs):
    start = OptimumReport('gaussian', 2, 1.0, 1.0, 0.7)
    n_max = kwargs.pop('n_max', 3)
    with pytest.raises(ValidationError):
        engine.optimize_pulse_shape(2, n_max, start, **kwargs)


def test_shape_photon_mismatch(engine):
    start = OptimumReport('gaussian', 3, 1.0, 1.0, 0.5)
    with pytest.raises(ValidationError):
        engine.optimize_pulse_shape(2, 3, start)


def test_detailed_report_lists_optima(engine):
    start = OptimumReport('gaussian', 2, 1.0, 1.0, 0.0)
    engine.reports.append(OptimumReport('hermite', 2, 1.0, 1.0, 0.78, coefficients=(0.02j,)))
    engine.optimize_pulse_shape(2, 2, start, free_coefficients=False)
    text = engine.get_detailed_report()
    assert 'REPORTE DE OPTIMIZACIÓN' in text
    assert 'c_2' in text


# ─────────────────────────────────────────────────────────────────────────────
# Aceptación
# ─────────────────────────────────────────────────────────────────────────────

@pytest.mark.slow
def test_two_photon_gaussian_optimum(engine):
    report = engine.refine_max(2, (1.0, 1.0))
    assert report.delta == pytest.approx(0.98, abs=0.05)
    assert report.gamma == pytest.approx(0.97, abs=0.05)
    assert report.objective == pytest.approx(0.77, abs=0.02)


@pytest.mark.slow
def test_refine_is_reproducible():
    first = OptimizationEngine().refine_max(2, (1.0, 1.0))
    second = OptimizationEngine().refine_max(2, (1.0, 1.0))
    assert first.to_dict() == second.to_dict()


@pytest.mark.slow
def test_three_photon_gaussian_optimum(engine):
    report = engine.refine_max(3, (0.9, 1.3))
    assert report.delta == pytest.approx(0.87, abs=0.07)
    assert report.gamma == pytest.approx(1.33, abs=0.10)
    assert report.objective == pytest.approx(0.59, abs=0.02)


@pytest.mark.slow
def test_shape_improves_on_gaussian(engine):
    gaussian = engine.refine_max(2, (1.0, 1.0))
    shaped = engine.optimize_pulse_shape(2, 3, gaussian, max_iterations=10)
    assert shaped.objective >= gaussian.objective


@pytest.mark.slow
def test_two_photon_shape_optimum(engine):
    gaussian = engine.refine_max(2, (1.0, 1.0))
    shaped = engine.optimize_pulse_shape(2, 4, gaussian)
    assert shaped.objective >= 0.80
    assert shaped.coefficients[0].real == 0.0
    assert shaped.coefficients[0].imag == pytest.approx(0.029, abs=0.003)

