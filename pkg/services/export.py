"""
Exportación de Resultados

CSV para campos escalares en rejilla (cabeceras t1,t2[,t3],re,im o value),
JSON para reportes y el manifiesto de cada ejecución. Los números se
escriben con 17 cifras significativas, así dos ejecuciones con el mismo
manifiesto producen archivos de datos idénticos byte a byte.
"""

import json
import logging
import os
import platform
from datetime import datetime
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from core import __version__
from core.errors import OutputError
from core.physics import PhysicalParams, s_coeff, t_coeff
from core.scatter2 import CHANNELS_2, TwoPhotonWave
from core.scatter3 import CHANNELS_3, ThreePhotonWave
from core.wstate import pw3_map, pw4_map

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
MANIFEST_FILENAME = 'manifest.json'


def make_serializable(value):
    """Convierte tipos numpy y complejos a tipos JSON"""
    if isinstance(value, dict):
        return {str(k): make_serializable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [make_serializable(v) for v in value]
    if isinstance(value, np.ndarray):
        return make_serializable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if hasattr(value, 'item'):  # escalares numpy
        return value.item()
    if isinstance(value, (int, float, str, bool, type(None))):
        return value
    return str(value)


def ensure_output_dir(path: Optional[str]) -> str:
    if not path:
        raise OutputError("falta la ruta de salida", 'output')
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise OutputError(f"no se pudo crear {path}: {e}", 'output')
    return path


def write_csv(frame: pd.DataFrame, path: str) -> str:
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    except OSError as e:
        raise OutputError(f"error escribiendo {path}: {e}", 'output')
    logger.debug(f"CSV escrito: {path} ({len(frame)} filas)")
    return path


def write_json(data: Dict, path: str) -> str:
    try:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(make_serializable(data), f, indent=2, ensure_ascii=False)
            f.write('\n')
    except OSError as e:
        raise OutputError(f"error escribiendo {path}: {e}", 'output')
    return path


# ─────────────────────────────────────────────────────────────────────────────
# Tablas
# ─────────────────────────────────────────────────────────────────────────────

def coefficient_frame(deltas: List[float], params: PhysicalParams = PhysicalParams()) -> pd.DataFrame:
    """s, t, |s|², |t|² por desintonía (tabla vacía con cabecera si no hay δ)"""
    deltas = np.asarray(deltas, dtype=float)
    s = np.asarray(s_coeff(deltas, params), dtype=complex)
    t = np.asarray(t_coeff(deltas, params), dtype=complex)
    return pd.DataFrame({
        'delta': deltas,
        's_re': s.real,
        's_im': s.imag,
        't_re': t.real,
        't_im': t.imag,
        'abs_s2': np.abs(s) ** 2,
        'abs_t2': np.abs(t) ** 2,
    })


def _grid_frame(times: np.ndarray, values: np.ndarray) -> pd.DataFrame:
    t1, t2 = np.meshgrid(times, times, indexing='ij')
    return pd.DataFrame({'t1': t1.ravel(), 't2': t2.ravel(), 're': values.real.ravel(), 'im': values.imag.ravel()})


def two_photon_frames(wave: TwoPhotonWave) -> Dict[str, pd.DataFrame]:
    """
    Canales XXx y XYy (t1, t2, re, im) más el mapa P_W3 (t1, t2, value)

    YXy no se escribe: es la traspuesta de XYy.
    """
    times = wave.grid.times
    frames = {name: _grid_frame(times, wave.channel(name)) for name in CHANNELS_2 if name != 'YXy'}
    t1, t2 = np.meshgrid(times, times, indexing='ij')
    frames['pw3'] = pd.DataFrame({'t1': t1.ravel(), 't2': t2.ravel(), 'value': pw3_map(wave).ravel()})
    return frames


def three_photon_slice_frames(wave: ThreePhotonWave, total: float = 0.0) -> Dict[str, pd.DataFrame]:
    """Corte t1 + t2 + t3 = total: un DataFrame por canal más P_W4 en el plano"""
    data = wave.diagonal_slice(total)
    coords = {'t1': data['t1'], 't2': data['t2'], 't3': data['t3']}
    frames = {}
    for name in CHANNELS_3:
        values = data[name]
        frames[name] = pd.DataFrame({**coords, 're': values.real, 'im': values.imag})

    g = wave.grid
    idx = [np.rint((data[k] - g.t_min) / g.h).astype(int) for k in ('t1', 't2', 't3')]
    pw = pw4_map(wave)[idx[0], idx[1], idx[2]]
    frames['pw4'] = pd.DataFrame({**coords, 'value': pw})
    return frames


def write_frames(frames: Dict[str, pd.DataFrame], output_dir: str, prefix: str) -> List[str]:
    """Escribe {prefix}_{nombre}.csv (nombre de canal en minúsculas)"""
    paths = []
    for name, frame in frames.items():
        path = os.path.join(output_dir, f"{prefix}_{name.lower()}.csv")
        paths.append(write_csv(frame, path))
    return paths


# ─────────────────────────────────────────────────────────────────────────────
# Manifiesto
# ─────────────────────────────────────────────────────────────────────────────

def write_manifest(output_dir: str, command: str, config: Dict, grids: Dict,
                   files: List[str], wall_time: float, stats: Optional[Dict] = None) -> str:
    """
    Manifiesto de la ejecución

    Args:
        output_dir: Directorio de salida
        command: Subcomando ejecutado
        config: Configuración completa (run + global)
        grids: Resoluciones usadas
        files: Archivos de datos escritos
        wall_time: Tiempo de pared en segundos
        stats: Estadísticas de la sesión de logging

    Returns:
        Ruta del manifiesto
    """
    manifest = {
        'command': command,
        'version': __version__,
        'created': datetime.now().isoformat(),
        'python': platform.python_version(),
        'numpy': np.__version__,
        'config': config,
        'grids': grids,
        'files': [os.path.basename(f) for f in files],
        'wall_time_seconds': wall_time,
    }
    if stats:
        manifest['session'] = stats
    path = os.path.join(output_dir, MANIFEST_FILENAME)
    write_json(manifest, path)
    logger.info(f"💾 Manifiesto escrito: {path}")
    return path
