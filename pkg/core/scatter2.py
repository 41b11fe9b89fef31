"""
Dispersión de Dos Fotones

Función de onda de salida en los canales |XXx⟩, |XYy⟩ y |YXy⟩ sobre la
rejilla de tiempos de detección:

    ψ^XXx(t1,t2) = φ^(τ)(t1)φ^(τ)(t2) − [φ^(s)(t_<)]² e^{−κ|t2−t1|}
    ψ^XYy(t1,t2) = φ^(0)(t1)φ^(s)(t2)
                   + θ(t2−t1) φ^(s)(t1)[φ^(s)(t2) − φ^(s)(t1) e^{−κ(t2−t1)}]

con κ = iω0 + Γ0 y θ(0) = 1/2. El canal |YXy⟩ es ψ^XYy traspuesta.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy import integrate

from .errors import MemoryBudgetError, ValidationError
from .physics import PhysicalParams, TimeGrid
from .pulse import PulseShape, default_time_grid, envelope, phi_s_at, pulse_series
from .settings import get_settings
from .workers import fill_slabs

logger = logging.getLogger(__name__)

CHANNELS_2 = ('XXx', 'XYy', 'YXy')


@dataclass(frozen=True)
class TwoPhotonWave:
    """Amplitudes de dos fotones en la rejilla (n×n por canal)"""
    grid: TimeGrid
    xxx: np.ndarray = field(repr=False)
    xyy: np.ndarray = field(repr=False)
    params: PhysicalParams = PhysicalParams()

    def channel(self, name: str) -> np.ndarray:
        if name == 'XXx':
            return self.xxx
        if name == 'XYy':
            return self.xyy
        if name == 'YXy':
            return self.xyy.T
        raise ValidationError(f"canal desconocido {name!r} (válidos: {', '.join(CHANNELS_2)})", 'channel')

    def probability_map(self) -> Dict[str, np.ndarray]:
        """|ψ|² por canal"""
        return {name: np.abs(self.channel(name)) ** 2 for name in CHANNELS_2}

    def norm(self) -> float:
        """∬(|ψ^XXx|² + 2|ψ^XYy|²) por trapecio"""
        density = np.abs(self.xxx) ** 2 + 2.0 * np.abs(self.xyy) ** 2
        return float(trapezoid_nd(density, self.grid.h))


def trapezoid_nd(values: np.ndarray, h: float) -> float:
    """Trapecio uniforme eje por eje (orden fijo de reducción)"""
    result = values
    for _ in range(values.ndim):
        result = integrate.trapezoid(result, dx=h, axis=0)
    return result


def _check_budget(n: int, ndim: int, channels: int = 2):
    budget = get_settings().limits.memory_budget_bytes
    needed = 16.0 * n ** ndim
    if needed > budget:
        raise MemoryBudgetError(
            f"{n}^{ndim} amplitudes complejas por canal ({needed / 1e9:.2f} GB) exceden el presupuesto "
            f"({budget / 1e9:.2f} GB)", 'n')


def scatter_two(shape: PulseShape, grid: Optional[TimeGrid] = None,
                params: PhysicalParams = PhysicalParams(),
                threads: Optional[int] = None) -> TwoPhotonWave:
    """
    Construye la función de onda de dos fotones

    Args:
        shape: Pulso normalizado
        grid: Rejilla de detección (None = rejilla por defecto de dos fotones)
        params: Parámetros del emisor
        threads: Hilos para el relleno por filas

    Returns:
        TwoPhotonWave
    """
    if grid is None:
        grid = default_time_grid(shape, params, photons=2)
    _check_budget(grid.n, 2)

    phi0, phis, phit = (s.values for s in pulse_series(shape, grid, params))
    t = grid.times
    n = grid.n
    kappa = params.kappa
    cols = np.arange(n)

    xxx = np.empty((n, n), dtype=complex)
    xyy = np.empty((n, n), dtype=complex)

    def fill_row(i: int):
        dt = t - t[i]
        lower = np.minimum(cols, i)
        xxx[i] = phit[i] * phit - phis[lower] ** 2 * np.exp(-kappa * np.abs(dt))

        step = np.where(cols > i, 1.0, 0.0)
        step[i] = 0.5
        decay = np.exp(-kappa * np.maximum(dt, 0.0))
        xyy[i] = phi0[i] * phis + step * phis[i] * (phis - phis[i] * decay)

    fill_slabs(n, fill_row, threads)
    xxx.setflags(write=False)
    xyy.setflags(write=False)
    logger.debug(f"ψ2 construida: n={n}, h={grid.h:.4f}")
    return TwoPhotonWave(grid, xxx, xyy, params)


def psi2_pointwise(shape: PulseShape, params: PhysicalParams, t1: float, t2: float,
                   channel: str, grid: Optional[TimeGrid] = None) -> complex:
    """
    Evalúa un canal de dos fotones en (t1, t2) arbitrarios

    φ^(s) se integra bajo demanda sobre la red fina de `grid`
    (por defecto la rejilla de dos fotones del pulso).
    """
    if channel not in CHANNELS_2:
        raise ValidationError(f"canal desconocido {channel!r}", 'channel')
    if channel == 'YXy':
        return psi2_pointwise(shape, params, t2, t1, 'XYy', grid)
    if grid is None:
        grid = default_time_grid(shape, params, photons=2)

    f0 = envelope(shape, np.array([t1, t2]), params.omega0)
    fs = phi_s_at(shape, params, [t1, t2], grid)
    ft = f0 + fs
    kappa = params.kappa

    if channel == 'XXx':
        early = fs[0] if t1 <= t2 else fs[1]
        return complex(ft[0] * ft[1] - early ** 2 * np.exp(-kappa * abs(t2 - t1)))

    value = f0[0] * fs[1]
    if t2 >= t1:
        step = 0.5 if t2 == t1 else 1.0
        value += step * fs[0] * (fs[1] - fs[0] * np.exp(-kappa * (t2 - t1)))
    return complex(value)
