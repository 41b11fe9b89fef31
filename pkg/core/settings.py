"""
Configuración Global del Motor

Carga los valores numéricos por defecto desde scatter_config.json (raíz del
proyecto o la ruta indicada en LAMBDA_SCATTER_CONFIG). Si el archivo falta o
está mal formado se usan los valores internos y se deja un warning.
"""

import json
import logging
import os
from dataclasses import dataclass, field, fields, asdict
from typing import Dict, Optional, Tuple

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

load_dotenv()

CONFIG_FILENAME = 'scatter_config.json'


@dataclass
class GridSettings:
    window_sigmas: float = 6.5
    tail_decay_times: float = 10.0
    support_tolerance: float = 1e-8
    n_two_photon: int = 257
    n_three_photon: int = 129
    max_spacing_two_photon: float = 0.15
    max_spacing_three_photon: float = 0.35
    n_three_photon_cap: int = 241


@dataclass
class IntegratorSettings:
    rk4_substeps: int = 4
    rk4_max_step: float = 0.05


@dataclass
class QuadratureSettings:
    norm_band: Tuple[float, float] = (0.9, 1.1)
    norm_flag_tolerance: float = 0.02
    degenerate_floor: float = 1e-300


@dataclass
class LimitSettings:
    memory_budget_bytes: float = 1e9


@dataclass
class SweepSettings:
    delta_range: Tuple[float, float] = (0.0, 2.0)
    gamma_range: Tuple[float, float] = (0.05, 2.0)
    resolution: Tuple[int, int] = (41, 41)
    n_cell: int = 97


@dataclass
class RefineSettings:
    n_final: int = 129
    gamma_floor: float = 0.05
    xatol: float = 1e-3
    fatol: float = 1e-6
    max_iterations: int = 200


@dataclass
class ShapeSettings:
    n_max: int = 4
    fd_step: float = 1e-4
    gtol: float = 1e-6
    max_iterations: int = 60
    method: str = 'CG'


@dataclass
class OracleSettings:
    frequency_step: float = 0.1
    spectrum_sigmas: float = 7.0
    leakage_tolerance: float = 1e-6
    grid_n: int = 129


@dataclass
class ScatterSettings:
    """Configuración completa agrupada por sección"""
    grid: GridSettings = field(default_factory=GridSettings)
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    limits: LimitSettings = field(default_factory=LimitSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    refine: RefineSettings = field(default_factory=RefineSettings)
    shape: ShapeSettings = field(default_factory=ShapeSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    source: Optional[str] = None

    def to_dict(self) -> Dict:
        data = asdict(self)
        data.pop('source', None)
        return data


def _merge_section(section, values: Dict):
    """Aplica los valores del archivo sobre una sección (ignora claves desconocidas)"""
    known = {f.name: f for f in fields(section)}
    for key, value in values.items():
        if key not in known:
            if key != 'description':
                logger.warning(f"Clave de configuración desconocida ignorada: {type(section).__name__}.{key}")
            continue
        current = getattr(section, key)
        if isinstance(current, tuple):
            value = tuple(value)
        elif isinstance(current, bool):
            value = bool(value)
        elif isinstance(current, int) and not isinstance(current, bool):
            value = int(value)
        elif isinstance(current, float):
            value = float(value)
        setattr(section, key, value)


def _config_path() -> str:
    env_path = os.getenv('LAMBDA_SCATTER_CONFIG')
    if env_path:
        return env_path
    return os.path.join(os.path.dirname(os.path.dirname(__file__)), CONFIG_FILENAME)


def load_settings(path: Optional[str] = None) -> ScatterSettings:
    """
    Carga la configuración global

    Args:
        path: Ruta explícita al JSON (None = raíz del proyecto o variable de entorno)

    Returns:
        ScatterSettings con los valores del archivo aplicados sobre los defaults
    """
    settings = ScatterSettings()
    config_path = path or _config_path()

    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            raw = json.load(f)

        for name, values in raw.items():
            section = getattr(settings, name, None)
            if section is None or not isinstance(values, dict):
                logger.warning(f"Sección de configuración desconocida ignorada: {name}")
                continue
            _merge_section(section, values)

        settings.source = config_path
        logger.info(f"✓ Configuración cargada desde {os.path.basename(config_path)}")

    except Exception as e:
        logger.warning(f"Error cargando configuración, usando valores por defecto: {e}")

    return settings


# Instancia global de configuración
_settings: Optional[ScatterSettings] = None


def get_settings() -> ScatterSettings:
    """Obtiene la configuración global (se carga una sola vez)"""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings(settings: Optional[ScatterSettings] = None):
    """Sustituye la configuración global (None = recargar en el próximo acceso)"""
    global _settings
    _settings = settings
