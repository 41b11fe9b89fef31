"""
Probabilidades de Conversión a Estado W

Probabilidad SLOCC de convertir el estado de salida en un estado W:
P_W = k·min(pesos)/Σ pesos punto a punto (k = 3 para dos fotones, 4 para
tres) y su promedio sobre el pulso, ⟨P_W⟩ = k∫min / ∫norma, con trapecio
uniforme en numerador y denominador. Incluye las formas cerradas del
límite monocromático.
"""

import logging
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Tuple

import numpy as np
from scipy import optimize

from .errors import NumericalDiagnosticError
from .physics import PhysicalParams, s_coeff, t_coeff
from .scatter2 import TwoPhotonWave, trapezoid_nd
from .scatter3 import CHANNEL_AXES, ThreePhotonWave
from .settings import get_settings

logger = logging.getLogger(__name__)


@dataclass
class EntanglementReport:
    """Resultado del promedio ⟨P_W⟩ sobre el pulso"""
    photons: int
    average: float
    norm: float
    numerator: float
    pointwise_max: float
    pointwise_argmax: Tuple[float, ...]
    flagged: bool = False
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['argmax'] = list(data.pop('pointwise_argmax'))
        return data


def _min_ratio(weights: List[float], k: int) -> float:
    floor = get_settings().quadrature.degenerate_floor
    if max(weights) < floor:
        return 0.0
    return k * min(weights) / sum(weights)


def _ratio_map(minimum: np.ndarray, total: np.ndarray, largest: np.ndarray, k: int) -> np.ndarray:
    floor = get_settings().quadrature.degenerate_floor
    degenerate = largest < floor
    safe_total = np.where(degenerate, 1.0, total)
    return np.where(degenerate, 0.0, k * minimum / safe_total)


# ─────────────────────────────────────────────────────────────────────────────
# Dos fotones
# ─────────────────────────────────────────────────────────────────────────────

def pw3_pointwise(wave: TwoPhotonWave, t1: float, t2: float) -> float:
    """3·min/suma de {|ψ^XXx(t1,t2)|², |ψ^XYy(t1,t2)|², |ψ^XYy(t2,t1)|²}"""
    i = wave.grid.index_of(t1)
    j = wave.grid.index_of(t2)
    weights = [abs(wave.xxx[i, j]) ** 2, abs(wave.xyy[i, j]) ** 2, abs(wave.xyy[j, i]) ** 2]
    return _min_ratio(weights, 3)


def _weights3(wave: TwoPhotonWave) -> List[np.ndarray]:
    yx = np.abs(wave.xyy) ** 2
    return [np.abs(wave.xxx) ** 2, yx, yx.T]


def pw3_map(wave: TwoPhotonWave) -> np.ndarray:
    """P_W3 en toda la rejilla (n×n)"""
    weights = _weights3(wave)
    return _ratio_map(np.minimum.reduce(weights), sum(weights), np.maximum.reduce(weights), 3)


def pw3_average(wave: TwoPhotonWave) -> EntanglementReport:
    """⟨P_W3⟩ = 3∬min / ∬(|ψ^XXx|² + 2|ψ^XYy|²)"""
    weights = _weights3(wave)
    minimum = np.minimum.reduce(weights)
    numerator = 3.0 * float(trapezoid_nd(minimum, wave.grid.h))
    pw = _ratio_map(minimum, sum(weights), np.maximum.reduce(weights), 3)
    return _report(2, numerator, wave.norm(), pw, wave.grid.times, wave.params)


# ─────────────────────────────────────────────────────────────────────────────
# Tres fotones
# ─────────────────────────────────────────────────────────────────────────────

def pw4_pointwise(wave: ThreePhotonWave, t1: float, t2: float, t3: float) -> float:
    """4·min/suma de los cuatro canales en (t1,t2,t3)"""
    g = wave.grid
    idx = (g.index_of(t1), g.index_of(t2), g.index_of(t3))
    weights = [abs(wave.xxxx[idx]) ** 2]
    weights += [abs(wave.xxyy.transpose(axes)[idx]) ** 2 for axes in CHANNEL_AXES.values()]
    return _min_ratio(weights, 4)


def _reduce4(wave: ThreePhotonWave) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    base = np.abs(wave.xxyy) ** 2
    minimum = np.abs(wave.xxxx) ** 2
    total = minimum.copy()
    largest = minimum.copy()
    for axes in CHANNEL_AXES.values():
        w = base.transpose(axes)
        np.minimum(minimum, w, out=minimum)
        np.maximum(largest, w, out=largest)
        total += w
    return minimum, total, largest


def pw4_map(wave: ThreePhotonWave) -> np.ndarray:
    """P_W4 en toda la rejilla (n×n×n)"""
    minimum, total, largest = _reduce4(wave)
    return _ratio_map(minimum, total, largest, 4)


def pw4_average(wave: ThreePhotonWave) -> EntanglementReport:
    """⟨P_W4⟩ = 4∭min / ∭(|ψ^XXXx|² + 3|ψ^XXYy|²)"""
    minimum, total, largest = _reduce4(wave)
    numerator = 4.0 * float(trapezoid_nd(minimum, wave.grid.h))
    pw = _ratio_map(minimum, total, largest, 4)
    return _report(3, numerator, wave.norm(), pw, wave.grid.times, wave.params)


def _report(photons: int, numerator: float, norm: float, pw: np.ndarray,
            times: np.ndarray, params: PhysicalParams) -> EntanglementReport:
    cfg = get_settings().quadrature
    low, high = cfg.norm_band
    warnings = []
    if not (low <= norm <= high):
        if params.is_chiral:
            raise NumericalDiagnosticError(
                f"grid under-resolved or pulse unnormalized: norma = {norm:.4f}", 'norm')
        warnings.append(f"norma {norm:.4f} fuera de banda (acoplamiento simétrico)")
    flagged = abs(norm - 1.0) > cfg.norm_flag_tolerance
    if flagged and not warnings:
        warnings.append(f"norma {norm:.4f} se desvía más de {cfg.norm_flag_tolerance:.0%} de 1")

    average = numerator / norm if norm > 0 else 0.0
    if not (0.0 <= average <= 1.0):
        warnings.append(f"promedio {average:.6f} fuera de [0, 1]; se recorta")
        average = min(max(average, 0.0), 1.0)
    flat = int(np.argmax(pw))
    argmax = tuple(float(times[i]) for i in np.unravel_index(flat, pw.shape))
    for w in warnings:
        logger.warning(f"⚠️ ⟨P_W{photons + 1}⟩: {w}")
    return EntanglementReport(
        photons=photons,
        average=float(average),
        norm=norm,
        numerator=numerator,
        pointwise_max=float(pw.flat[flat]),
        pointwise_argmax=argmax,
        flagged=flagged,
        warnings=warnings,
    )


# ─────────────────────────────────────────────────────────────────────────────
# Límite monocromático
# ─────────────────────────────────────────────────────────────────────────────

def pw3_mono(delta, params: PhysicalParams = PhysicalParams()):
    """3|t|²·min(|t|², |s|²)"""
    t2 = np.abs(t_coeff(delta, params)) ** 2
    s2 = np.abs(s_coeff(delta, params)) ** 2
    return 3.0 * t2 * np.minimum(t2, s2)


def pw4_mono(delta, params: PhysicalParams = PhysicalParams()):
    """4|t|⁴·min(|t|², |s|²)"""
    t2 = np.abs(t_coeff(delta, params)) ** 2
    s2 = np.abs(s_coeff(delta, params)) ** 2
    return 4.0 * t2 * t2 * np.minimum(t2, s2)


def mono_maximum(photons: int, params: PhysicalParams = PhysicalParams(),
                 span: float = 4.0, points: int = 400001) -> Tuple[float, float]:
    """
    Máximo de la forma cerrada sobre δ ≥ 0

    Barrido denso para acotar y Brent acotado para afinar (el máximo de P_W3
    cae en el pliegue |t| = |s|).

    Returns:
        (δ del máximo, valor)
    """
    func = pw3_mono if photons == 2 else pw4_mono
    deltas = np.linspace(0.0, span * params.gamma0, points)
    values = func(deltas, params)
    best = int(np.argmax(values))
    step = deltas[1] - deltas[0]
    lo, hi = deltas[max(best - 2, 0)], deltas[min(best + 2, points - 1)]
    res = optimize.minimize_scalar(lambda d: -float(func(d, params)), bounds=(lo, hi),
                                   method='bounded', options={'xatol': 1e-12})
    if -res.fun < values[best]:
        return float(deltas[best]), float(values[best])
    logger.debug(f"Máximo monocromático afinado en δ={res.x:.8f} (paso de barrido {step:.1e})")
    return float(res.x), float(-res.fun)


def mono_limit(photons: int, delta: float, params: PhysicalParams = PhysicalParams()) -> float:
    return float(pw3_mono(delta, params) if photons == 2 else pw4_mono(delta, params))

