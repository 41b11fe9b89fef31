"""
Configuración de Ejecución

RunConfig por subcomando: se construye desde el JSON de --config y las
banderas de la línea de comandos (las banderas tienen prioridad) y se valida
entero antes de empezar a calcular. Las claves desconocidas se rechazan.
"""

import json
import logging
import math
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

from core.errors import ValidationError
from core.optimize import SHAPE_METHODS
from core.physics import PhysicalParams
from core.pulse import pulse_from_spec

logger = logging.getLogger(__name__)

COMMANDS = ('coeffs', 'wavefunction', 'sweep', 'optimize', 'oracle-check')

COMMON_KEYS = {'output', 'threads', 'physics'}

COMMAND_KEYS = {
    'coeffs': {'deltas'},
    'wavefunction': {'pulse', 'photons', 'grid_n', 'slice_total'},
    'sweep': {'photons', 'delta_range', 'gamma_range', 'resolution', 'n_cell', 'refine'},
    'optimize': {'photons', 'start', 'from_report', 'n_max', 'method', 'shape'},
    'oracle-check': {'pulses', 'mono'},
}

PHYSICS_KEYS = {'gamma0', 'omega0', 'chirality'}
MONO_KEYS = {'delta', 'gamma', 'probes', 'channel'}

DEFAULT_ORACLE_PULSES = [
    {'delta': 0.0, 'gamma': 0.5},
    {'delta': 1.0, 'gamma': 0.8},
]
DEFAULT_MONO = {
    'delta': 1.0,
    'gamma': 0.01,
    'probes': [[-20.0, 5.0, 30.0], [0.0, 10.0, -15.0], [40.0, -30.0, 2.0]],
    'channel': 'XXYy',
}


@dataclass
class RunConfig:
    """Parámetros validados de una ejecución"""
    command: str
    output: Optional[str] = None
    threads: Optional[int] = None
    physics: PhysicalParams = field(default_factory=PhysicalParams)
    photons: int = 2

    # coeffs
    deltas: List[float] = field(default_factory=list)

    # wavefunction
    pulse: Optional[Dict] = None
    grid_n: Optional[int] = None
    slice_total: float = 0.0

    # sweep
    delta_range: Optional[List[float]] = None
    gamma_range: Optional[List[float]] = None
    resolution: Optional[List[int]] = None
    n_cell: Optional[int] = None
    refine: bool = False

    # optimize
    start: Optional[List[float]] = None
    from_report: Optional[str] = None
    n_max: Optional[int] = None
    method: Optional[str] = None
    shape: bool = True

    # oracle-check
    pulses: List[Dict] = field(default_factory=list)
    mono: Optional[Dict] = None

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['physics'] = self.physics.to_dict()
        return data


def read_config_file(path: str) -> Dict:
    """Lee el JSON de configuración con diagnóstico de línea y columna"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"no existe el archivo de configuración {path}", 'config')
    except json.JSONDecodeError as e:
        raise ValidationError(f"JSON mal formado en {path}, línea {e.lineno}, columna {e.colno}: {e.msg}",
                              'config')
    except OSError as e:
        raise ValidationError(f"no se pudo leer {path}: {e}", 'config')
    if not isinstance(raw, dict):
        raise ValidationError("la configuración debe ser un objeto JSON", 'config')
    return raw


def _reject_unknown(values: Dict, allowed: set, where: str):
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ValidationError(f"claves desconocidas: {', '.join(unknown)}", where)


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool):
        raise ValidationError(f"se esperaba un número, no {value!r}", name)
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"se esperaba un número, no {value!r}", name)
    if not math.isfinite(number):
        raise ValidationError(f"valor no finito {value!r}", name)
    return number


def _integer(value: Any, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ValidationError(f"se esperaba un entero, no {value!r}", name)
    if value < minimum:
        raise ValidationError(f"debe ser >= {minimum} (recibido {value})", name)
    return int(value)


def _pair(value: Any, name: str, cast=_number) -> List:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValidationError(f"se esperaba un par [a, b], no {value!r}", name)
    return [cast(v, f"{name}[{i}]") for i, v in enumerate(value)]


def _physics(values: Any) -> PhysicalParams:
    if values is None:
        return PhysicalParams()
    if not isinstance(values, dict):
        raise ValidationError("physics debe ser un objeto", 'physics')
    _reject_unknown(values, PHYSICS_KEYS, 'physics')
    kwargs = {k: _number(v, f"physics.{k}") for k, v in values.items()}
    return PhysicalParams(**kwargs)


def _pulse(spec: Any, name: str, params: PhysicalParams) -> Dict:
    if not isinstance(spec, dict):
        raise ValidationError("el pulso debe ser un objeto {delta, gamma, hermite}", name)
    _reject_unknown(spec, {'delta', 'gamma', 'hermite'}, name)
    pulse_from_spec(spec, params)
    return dict(spec)


def build_run_config(command: str, values: Optional[Dict] = None,
                     overrides: Optional[Dict] = None) -> RunConfig:
    """
    Construye y valida la configuración de un subcomando

    Args:
        command: Subcomando (coeffs, wavefunction, sweep, optimize, oracle-check)
        values: Contenido del archivo --config
        overrides: Valores de banderas (None se ignora)

    Returns:
        RunConfig validada
    """
    if command not in COMMANDS:
        raise ValidationError(f"subcomando desconocido {command!r}", 'command')
    merged = dict(values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    _reject_unknown(merged, COMMON_KEYS | COMMAND_KEYS[command], 'config')

    params = _physics(merged.get('physics'))
    cfg = RunConfig(command=command, physics=params)

    if 'output' in merged:
        if not isinstance(merged['output'], str) or not merged['output']:
            raise ValidationError("output debe ser una ruta", 'output')
        cfg.output = merged['output']
    if command != 'coeffs' and not cfg.output:
        raise ValidationError("falta la ruta de salida (--output)", 'output')
    if 'threads' in merged:
        cfg.threads = _integer(merged['threads'], 'threads')
    if 'photons' in merged:
        cfg.photons = _integer(merged['photons'], 'photons')
        if cfg.photons not in (2, 3):
            raise ValidationError(f"photons debe ser 2 o 3 (recibido {cfg.photons})", 'photons')

    if command == 'coeffs':
        deltas = merged.get('deltas', [])
        if not isinstance(deltas, (list, tuple)):
            raise ValidationError("deltas debe ser una lista", 'deltas')
        cfg.deltas = [_number(d, f"deltas[{i}]") for i, d in enumerate(deltas)]

    elif command == 'wavefunction':
        if 'pulse' not in merged:
            raise ValidationError("falta la especificación del pulso", 'pulse')
        cfg.pulse = _pulse(merged['pulse'], 'pulse', params)
        if 'grid_n' in merged:
            cfg.grid_n = _integer(merged['grid_n'], 'grid_n', minimum=3)
            if cfg.grid_n % 2 == 0:
                raise ValidationError(f"grid_n debe ser impar (recibido {cfg.grid_n})", 'grid_n')
        cfg.slice_total = _number(merged.get('slice_total', 0.0), 'slice_total')

    elif command == 'sweep':
        if 'delta_range' in merged:
            cfg.delta_range = _pair(merged['delta_range'], 'delta_range')
        if 'gamma_range' in merged:
            cfg.gamma_range = _pair(merged['gamma_range'], 'gamma_range')
        if 'resolution' in merged:
            cfg.resolution = _pair(merged['resolution'], 'resolution', _integer)
        if 'n_cell' in merged:
            cfg.n_cell = _integer(merged['n_cell'], 'n_cell', minimum=3)
        cfg.refine = bool(merged.get('refine', False))

    elif command == 'optimize':
        if 'start' in merged:
            cfg.start = _pair(merged['start'], 'start')
            if cfg.start[1] <= 0:
                raise ValidationError(f"el punto de partida debe tener γ > 0 (recibido {cfg.start})", 'start')
        if 'from_report' in merged:
            if not isinstance(merged['from_report'], str) or not merged['from_report']:
                raise ValidationError("from_report debe ser la ruta de un optimum.json", 'from_report')
            if cfg.start is not None:
                raise ValidationError("start y from_report son excluyentes", 'from_report')
            cfg.from_report = merged['from_report']
        if 'n_max' in merged:
            cfg.n_max = _integer(merged['n_max'], 'n_max', minimum=2)
        if 'method' in merged:
            if merged['method'] not in SHAPE_METHODS:
                raise ValidationError(f"método desconocido {merged['method']!r}", 'method')
            cfg.method = merged['method']
        cfg.shape = bool(merged.get('shape', True))

    elif command == 'oracle-check':
        pulses = merged.get('pulses', DEFAULT_ORACLE_PULSES)
        if not isinstance(pulses, list) or not pulses:
            raise ValidationError("pulses debe ser una lista no vacía", 'pulses')
        cfg.pulses = [_pulse(p, f"pulses[{i}]", params) for i, p in enumerate(pulses)]
        mono = merged.get('mono', DEFAULT_MONO)
        if mono is not None:
            if not isinstance(mono, dict):
                raise ValidationError("mono debe ser un objeto", 'mono')
            _reject_unknown(mono, MONO_KEYS, 'mono')
            mono = {**DEFAULT_MONO, **mono}
            _number(mono['delta'], 'mono.delta')
            _number(mono['gamma'], 'mono.gamma')
            if not isinstance(mono['probes'], list) or not mono['probes']:
                raise ValidationError("mono.probes debe ser una lista de ternas", 'mono.probes')
        cfg.mono = mono

    logger.debug(f"Configuración de {command} validada: {cfg.to_dict()}")
    return cfg


def load_run_config(command: str, path: Optional[str] = None,
                    overrides: Optional[Dict] = None) -> RunConfig:
    """Lee --config (si se da) y aplica las banderas encima"""
    values = read_config_file(path) if path else {}
    return build_run_config(command, values, overrides)
