"""
Servicio de Comandos

Implementación de los subcomandos del runner. Cada comando recibe una
RunConfig ya validada, escribe sus archivos de datos y el manifiesto, y
devuelve un CommandResult con el resumen y el código de salida.
"""

import json
import logging
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from core.errors import NumericalDiagnosticError, ValidationError
from core.optimize import OptimizationEngine, OptimumReport, get_optimization_engine, mono_column_check
from core.pulse import default_time_grid, gaussian_pulse, pulse_from_spec
from core.scatter2 import scatter_two
from core.scatter3 import scatter_three
from core.settings import get_settings
from core.smatrix import oracle_three_photon_mono, oracle_two_photon, s2_connected_kernel, s2_pole_terms
from core.workers import resolve_threads
from core.wstate import pw3_average, pw4_average

from .config import RunConfig
from .export import (
    coefficient_frame,
    ensure_output_dir,
    three_photon_slice_frames,
    two_photon_frames,
    write_csv,
    write_frames,
    write_json,
    write_manifest,
)

logger = logging.getLogger(__name__)

# Puntos de partida del refinamiento gaussiano cuando no se da --start
DEFAULT_STARTS = {2: (1.0, 1.0), 3: (0.9, 1.3)}

ORACLE_TWO_PHOTON_TOLERANCE = 1e-3
ORACLE_MONO_TOLERANCE = 0.03


@dataclass
class CommandResult:
    """Resultado de un subcomando"""
    command: str
    summary: Dict = field(default_factory=dict)
    files: List[str] = field(default_factory=list)
    grids: Dict = field(default_factory=dict)
    exit_code: int = 0
    table: Optional[pd.DataFrame] = None


def _finish(cfg: RunConfig, result: CommandResult, start_time: float,
            stats: Optional[Dict] = None) -> CommandResult:
    """Escribe el manifiesto de la ejecución"""
    if cfg.output:
        config = {'run': cfg.to_dict(), 'settings': get_settings().to_dict()}
        manifest = write_manifest(cfg.output, cfg.command, config, result.grids, result.files,
                                  time.time() - start_time, stats)
        result.files.append(manifest)
    return result


# ─────────────────────────────────────────────────────────────────────────────
# coeffs
# ─────────────────────────────────────────────────────────────────────────────

def cmd_coeffs(cfg: RunConfig, engine: Optional[OptimizationEngine] = None,
               stats: Optional[Callable[[], Dict]] = None) -> CommandResult:
    """Tabla de s, t, |s|², |t|² por desintonía"""
    start_time = time.time()
    frame = coefficient_frame(cfg.deltas, cfg.physics)
    result = CommandResult('coeffs', {'rows': len(frame)}, table=frame)
    if cfg.output:
        ensure_output_dir(cfg.output)
        result.files.append(write_csv(frame, os.path.join(cfg.output, 'coeffs.csv')))
    return _finish(cfg, result, start_time, stats() if stats else None)


# ─────────────────────────────────────────────────────────────────────────────
# wavefunction
# ─────────────────────────────────────────────────────────────────────────────

def cmd_wavefunction(cfg: RunConfig, engine: Optional[OptimizationEngine] = None,
                     stats: Optional[Callable[[], Dict]] = None) -> CommandResult:
    """
    Funciones de onda en rejilla

    Dos fotones: CSV por canal (XXx, XYy) y mapa P_W3. Tres fotones: corte
    t1 + t2 + t3 = slice_total por canal y P_W4 en el plano. Los datos se
    escriben antes de evaluar el promedio, así un diagnóstico de norma no
    deja la ejecución sin archivos.
    """
    start_time = time.time()
    params = cfg.physics
    threads = resolve_threads(cfg.threads)
    output = ensure_output_dir(cfg.output)
    shape = pulse_from_spec(cfg.pulse, params)
    grid = default_time_grid(shape, params, photons=cfg.photons, n=cfg.grid_n)
    result = CommandResult('wavefunction', grids={'time': grid.to_dict()})
    logger.info(f"💫 Función de onda de {cfg.photons} fotones: n={grid.n}, h={grid.h:.4f}")

    if cfg.photons == 2:
        wave = scatter_two(shape, grid, params, threads)
        result.files += write_frames(two_photon_frames(wave), output, 'wavefunction')
        report = pw3_average(wave)
    else:
        wave = scatter_three(shape, grid, params, threads)
        frames = three_photon_slice_frames(wave, cfg.slice_total)
        result.files += write_frames(frames, output, 'slice')
        report = pw4_average(wave)

    result.summary = {'pulse': shape.to_spec(), 'report': report.to_dict()}
    result.files.append(write_json(result.summary, os.path.join(output, 'report.json')))
    if report.flagged and params.is_chiral:
        logger.warning(f"⚠️ Norma del estado {report.norm:.4f}: rejilla poco resuelta")
        result.exit_code = NumericalDiagnosticError.exit_code
    return _finish(cfg, result, start_time, stats() if stats else None)


# ─────────────────────────────────────────────────────────────────────────────
# sweep / optimize
# ─────────────────────────────────────────────────────────────────────────────

def cmd_sweep(cfg: RunConfig, engine: Optional[OptimizationEngine] = None,
              stats: Optional[Callable[[], Dict]] = None) -> CommandResult:
    """Barrido (δ, γ) con CSV de celdas, JSON con el mapa y, opcionalmente, refinamiento"""
    start_time = time.time()
    engine = engine or get_optimization_engine()
    params = cfg.physics
    output = ensure_output_dir(cfg.output)

    sweep_result = engine.sweep(cfg.photons, cfg.delta_range, cfg.gamma_range, cfg.resolution,
                                cfg.n_cell, params=params, threads=cfg.threads)
    summary = sweep_result.to_dict()
    summary['mono_column'] = mono_column_check(sweep_result, params)
    result = CommandResult('sweep', grids={'sweep': sweep_result.grid_meta})
    result.files.append(write_csv(sweep_result.to_frame(), os.path.join(output, 'sweep.csv')))

    if cfg.refine and np.any(sweep_result.valid):
        delta, gamma, _ = sweep_result.best()
        optimum = engine.refine_max(cfg.photons, (delta, gamma), params=params, threads=cfg.threads)
        summary['optimum'] = optimum.to_dict()
        result.grids['refine'] = {'n': optimum.grid_n, 'spacing': optimum.spacing}

    result.summary = summary
    result.files.append(write_json(summary, os.path.join(output, 'sweep.json')))
    return _finish(cfg, result, start_time, stats() if stats else None)


def load_gaussian_optimum(path: str, photons: int) -> OptimumReport:
    """Lee la entrada 'gaussian' de un optimum.json escrito por optimize"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"no se pudo leer {path}: {e}", 'from_report')
    entry = data.get('gaussian') if isinstance(data, dict) else None
    if not isinstance(entry, dict):
        raise ValidationError(f"{path} no contiene un óptimo gaussiano", 'from_report')
    report = OptimumReport.from_dict(entry)
    if report.kind != 'gaussian' or report.photons != photons:
        raise ValidationError(
            f"{path} es un óptimo {report.kind} de {report.photons} fotones (se pidió gaussiano de {photons})",
            'from_report')
    return report


def cmd_optimize(cfg: RunConfig, engine: Optional[OptimizationEngine] = None,
                 stats: Optional[Callable[[], Dict]] = None) -> CommandResult:
    """Óptimo gaussiano y, si se pide, optimización de forma con Hermite"""
    start_time = time.time()
    engine = engine or get_optimization_engine()
    params = cfg.physics
    output = ensure_output_dir(cfg.output)
    if cfg.from_report:
        gaussian = load_gaussian_optimum(cfg.from_report, cfg.photons)
        logger.info(f"🎯 Óptimo gaussiano tomado de {cfg.from_report}: "
                    f"δ={gaussian.delta:.4f}, γ={gaussian.gamma:.4f}, objetivo {gaussian.objective:.5f}")
    else:
        start = tuple(cfg.start) if cfg.start else DEFAULT_STARTS[cfg.photons]
        gaussian = engine.refine_max(cfg.photons, start, params=params, threads=cfg.threads)
    summary = {'gaussian': gaussian.to_dict()}
    result = CommandResult('optimize', grids={'gaussian': {'n': gaussian.grid_n, 'spacing': gaussian.spacing}})

    if cfg.shape:
        hermite = engine.optimize_pulse_shape(cfg.photons, cfg.n_max, gaussian, method=cfg.method,
                                              params=params, threads=cfg.threads)
        summary['hermite'] = hermite.to_dict()
        result.grids['hermite'] = {'n': hermite.grid_n, 'spacing': hermite.spacing}

    logger.info(engine.get_detailed_report())
    result.summary = summary
    result.files.append(write_json(summary, os.path.join(output, 'optimum.json')))
    return _finish(cfg, result, start_time, stats() if stats else None)


# ─────────────────────────────────────────────────────────────────────────────
# oracle-check
# ─────────────────────────────────────────────────────────────────────────────

def _cancellation_scan(params) -> Dict:
    """Núcleo conexo contra la suma de polos al acercarse a ω1' → ω1 sobre la capa"""
    eps = np.logspace(-2, -8, 7)
    w1, w2, w1p = 0.3, -0.7, 0.3 + eps
    w2p = w1 + w2 - w1p
    connected = s2_connected_kernel(w1, w2, w1p, w2p, params)
    poles = s2_pole_terms(w1, w2, w1p, w2p, params)
    finite = bool(np.all(np.isfinite(connected)))
    away = np.abs(poles[:3] - connected[:3]) / np.abs(connected[:3])
    return {
        'finite': finite,
        'max_kernel': float(np.abs(connected).max()),
        'pole_agreement': float(away.max()),
    }


def cmd_oracle_check(cfg: RunConfig, engine: Optional[OptimizationEngine] = None,
                     stats: Optional[Callable[[], Dict]] = None) -> CommandResult:
    """
    Verificación independiente con la matriz S

    Dos fotones: convolución del núcleo con el espectro en toda la rejilla
    (error relativo al pico). Tres fotones: límite monocromático en puntos
    del cuerpo del pulso. Sale con código 3 si algo queda fuera de tolerancia.
    """
    start_time = time.time()
    params = cfg.physics
    threads = resolve_threads(cfg.threads)
    output = ensure_output_dir(cfg.output)
    grid_n = get_settings().oracle.grid_n
    result = CommandResult('oracle-check')
    passed = True

    two_photon = []
    for i, spec in enumerate(cfg.pulses):
        shape = pulse_from_spec(spec, params)
        grid = default_time_grid(shape, params, photons=2, n=grid_n)
        direct = scatter_two(shape, grid, params, threads)
        oracle = oracle_two_photon(shape, grid, params=params, threads=threads)
        peak = max(np.abs(direct.xxx).max(), np.abs(direct.xyy).max())
        error = max(np.abs(oracle.xxx - direct.xxx).max(), np.abs(oracle.xyy - direct.xyy).max()) / peak
        ok = bool(error <= ORACLE_TWO_PHOTON_TOLERANCE)
        passed &= ok
        two_photon.append({'pulse': spec, 'relative_error': float(error), 'passed': ok})
        result.grids[f'pulse_{i}'] = grid.to_dict()
        logger.info(f"🔬 Oráculo 2 fotones δ={shape.delta}, γ={shape.gamma}: error {error:.2e}")

    summary = {'two_photon': two_photon, 'cancellation': _cancellation_scan(params)}
    passed &= summary['cancellation']['finite']

    if cfg.mono:
        mono = cfg.mono
        shape = gaussian_pulse(float(mono['delta']), float(mono['gamma']))
        probes = [tuple(float(x) for x in p) for p in mono['probes']]
        mono_result = oracle_three_photon_mono(shape, params, probes, mono.get('channel', 'XXYy'))
        ok = bool(mono_result.max_relative_error <= ORACLE_MONO_TOLERANCE)
        passed &= ok
        summary['three_photon_mono'] = {
            'channel': mono_result.channel,
            'constant': mono_result.constant,
            'probes': mono_result.probes,
            'relative_error': mono_result.relative_error,
            'passed': ok,
        }

    summary['passed'] = passed
    result.summary = summary
    result.files.append(write_json(summary, os.path.join(output, 'oracle_check.json')))
    if not passed:
        result.exit_code = NumericalDiagnosticError.exit_code
    return _finish(cfg, result, start_time, stats() if stats else None)


COMMAND_HANDLERS = {
    'coeffs': cmd_coeffs,
    'wavefunction': cmd_wavefunction,
    'sweep': cmd_sweep,
    'optimize': cmd_optimize,
    'oracle-check': cmd_oracle_check,
}
