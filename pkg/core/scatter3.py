"""
Dispersión de Tres Fotones

Canales |XXXx⟩ y |XXYy⟩ sobre la rejilla n×n×n. Los canales |XYXy⟩ y
|YXXy⟩ son permutaciones de índices de ψ^XXYy, con el fotón Y en t2 y en
t1 respectivamente:

    XYXy(t1,t2,t3) = XXYy(t1,t3,t2)
    YXXy(t1,t2,t3) = XXYy(t2,t3,t1)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .errors import ValidationError
from .physics import PhysicalParams, TimeGrid
from .pulse import PulseShape, default_time_grid, envelope, phi_s_at, pulse_series
from .scatter2 import _check_budget, trapezoid_nd
from .workers import fill_slabs

logger = logging.getLogger(__name__)

CHANNELS_3 = ('XXXx', 'XXYy', 'XYXy', 'YXXy')

# Ejes de np.transpose que llevan xxyy a cada canal
CHANNEL_AXES = {
    'XXYy': (0, 1, 2),
    'XYXy': (0, 2, 1),
    'YXXy': (2, 0, 1),
}


@dataclass(frozen=True)
class ThreePhotonWave:
    """Amplitudes de tres fotones (n×n×n por canal almacenado)"""
    grid: TimeGrid
    xxxx: np.ndarray = field(repr=False)
    xxyy: np.ndarray = field(repr=False)
    params: PhysicalParams = PhysicalParams()

    def channel(self, name: str) -> np.ndarray:
        if name == 'XXXx':
            return self.xxxx
        if name in CHANNEL_AXES:
            return self.xxyy.transpose(CHANNEL_AXES[name])
        raise ValidationError(f"canal desconocido {name!r} (válidos: {', '.join(CHANNELS_3)})", 'channel')

    def norm(self) -> float:
        """∭(|ψ^XXXx|² + 3|ψ^XXYy|²) por trapecio"""
        density = np.abs(self.xxxx) ** 2 + 3.0 * np.abs(self.xxyy) ** 2
        return float(trapezoid_nd(density, self.grid.h))

    def diagonal_slice(self, total: float = 0.0) -> Dict[str, np.ndarray]:
        """
        Corte por el plano t1 + t2 + t3 = total

        Returns:
            Diccionario con t1, t2, t3 y la amplitud de cada canal en los
            nodos del plano de rejilla más cercano.
        """
        g = self.grid
        offset = int(round((total - 3.0 * g.t_min) / g.h))
        i, j = np.meshgrid(np.arange(g.n), np.arange(g.n), indexing='ij')
        k = offset - i - j
        mask = (k >= 0) & (k < g.n)
        i, j, k = i[mask], j[mask], k[mask]
        t = g.times
        data = {'t1': t[i], 't2': t[j], 't3': t[k]}
        for name in CHANNELS_3:
            data[name] = self.channel(name)[i, j, k]
        return data


def _step(x: np.ndarray) -> np.ndarray:
    """Heaviside con θ(0) = 1/2 sobre diferencias de índices"""
    return np.where(x > 0, 1.0, np.where(x == 0, 0.5, 0.0))


def _xxxx_block(i, J, K, t, phi0, phis, phit, kappa):
    idx = np.sort(np.stack(np.broadcast_arrays(i, J, K)), axis=0)
    a, b, c = idx[0], idx[1], idx[2]
    ta, tb, tc = t[a], t[b], t[c]
    sa2 = phis[a] ** 2
    return (phit[i] * phit[J] * phit[K]
            - sa2 * phit[c] * np.exp(-kappa * (tb - ta))
            - phis[b] ** 2 * phit[a] * np.exp(-kappa * (tc - tb))
            + sa2 * (phis[b] - phi0[b]) * np.exp(-kappa * (tc - ta)))


def _xxyy_block(i, J, K, t, phi0, phis, phit, kappa):
    lo, hi = np.minimum(i, J), np.maximum(i, J)
    lo, hi, y = np.broadcast_arrays(lo, hi, K)
    w_before = _step(lo - y)
    w_after = _step(y - hi)
    w_middle = 1.0 - w_before - w_after

    tl, th, ty = t[lo], t[hi], t[y]
    sl2 = phis[lo] ** 2
    decay_yl = np.exp(-kappa * np.maximum(ty - tl, 0.0))
    decay_yh = np.exp(-kappa * np.maximum(ty - th, 0.0))

    before = phi0[lo] * phi0[hi] * phis[y]
    after = (phit[lo] * phit[hi] * phis[y]
             - sl2 * phis[y] * np.exp(-kappa * (th - tl))
             - phis[hi] ** 2 * phit[lo] * decay_yh
             + sl2 * (phis[hi] - phi0[hi]) * decay_yl)
    middle = phi0[hi] * (phit[lo] * phis[y] - sl2 * decay_yl)
    return w_before * before + w_after * after + w_middle * middle


def peak_bytes(n: int) -> float:
    """Memoria pico de una evaluación de ⟨P_W4⟩: dos canales complejos y los mapas reales de la reducción"""
    return 16.0 * n ** 3 * 2 + 8.0 * n ** 3 * 6


def scatter_three(shape: PulseShape, grid: Optional[TimeGrid] = None,
                  params: PhysicalParams = PhysicalParams(),
                  threads: Optional[int] = None) -> ThreePhotonWave:
    """
    Construye la función de onda de tres fotones

    El relleno se reparte por bloques del primer índice; cada bloque es
    aritmética O(1) por entrada sobre las series φ^(0), φ^(s), φ^(τ).
    """
    if grid is None:
        grid = default_time_grid(shape, params, photons=3)
    _check_budget(grid.n, 3)

    phi0, phis, phit = (s.values for s in pulse_series(shape, grid, params))
    t = grid.times
    n = grid.n
    kappa = params.kappa
    J = np.arange(n)[:, None]
    K = np.arange(n)[None, :]

    xxxx = np.empty((n, n, n), dtype=complex)
    xxyy = np.empty((n, n, n), dtype=complex)

    def fill_slab(i: int):
        xxxx[i] = _xxxx_block(i, J, K, t, phi0, phis, phit, kappa)
        xxyy[i] = _xxyy_block(i, J, K, t, phi0, phis, phit, kappa)

    fill_slabs(n, fill_slab, threads)
    xxxx.setflags(write=False)
    xxyy.setflags(write=False)
    logger.debug(f"ψ3 construida: n={n}, h={grid.h:.4f}")
    return ThreePhotonWave(grid, xxxx, xxyy, params)


def psi3_pointwise(shape: PulseShape, params: PhysicalParams, t1: float, t2: float, t3: float,
                   channel: str, grid: Optional[TimeGrid] = None) -> complex:
    """Evalúa un canal de tres fotones en tiempos arbitrarios"""
    if channel not in CHANNELS_3:
        raise ValidationError(f"canal desconocido {channel!r}", 'channel')
    if channel == 'XYXy':
        return psi3_pointwise(shape, params, t1, t3, t2, 'XXYy', grid)
    if channel == 'YXXy':
        return psi3_pointwise(shape, params, t2, t3, t1, 'XXYy', grid)
    if grid is None:
        grid = default_time_grid(shape, params, photons=3)

    # Los bloques comparan índices, así que los tres tiempos se reindexan por
    # rango temporal (tiempos iguales comparten rango).
    t = np.array([t1, t2, t3], dtype=float)
    phi0 = envelope(shape, t, params.omega0)
    phis = phi_s_at(shape, params, t, grid)
    rank = np.searchsorted(np.unique(t), t)
    ts = np.zeros(3)
    f0 = np.zeros(3, dtype=complex)
    fs = np.zeros(3, dtype=complex)
    ts[rank], f0[rank], fs[rank] = t, phi0, phis
    i, j, k = (np.array([r]) for r in rank)
    block = _xxxx_block if channel == 'XXXx' else _xxyy_block
    value = block(i, j, k, ts, f0, fs, f0 + fs, params.kappa)
    return complex(np.ravel(value)[0])
