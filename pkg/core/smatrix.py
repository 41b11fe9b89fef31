"""
Oráculo de Matriz de Dispersión

Núcleos en frecuencia y en tiempo-frecuencia de la matriz S de dos y tres
fotones, usados para validar de forma independiente las funciones de onda
en el dominio temporal:

- s2_connected_kernel: parte conexa de S^{XXx} (coeficiente de 2πδ(E))
- s2_pole_terms: suma sin simplificar de los términos con polo 1/(ω − ω')
- s2_time_kernel / s3_time_kernel: elementos S_{t←ω} ya simetrizados
- oracle_two_photon: convolución del núcleo con el espectro del pulso
- oracle_three_photon_mono: comparación en el límite monocromático

Las frecuencias de los núcleos temporales son absolutas; con ω0 = 0
coinciden con las desintonías.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NumericalDiagnosticError, ValidationError
from .physics import PhysicalParams, TimeGrid, s_coeff, t_coeff
from .pulse import PulseShape, default_time_grid, envelope
from .scatter2 import TwoPhotonWave, scatter_two
from .scatter3 import psi3_pointwise
from .settings import get_settings
from .workers import fill_slabs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrequencyGrid:
    """Rejilla uniforme de desintonías ω − ω0"""
    omega_min: float
    omega_max: float
    m: int

    def __post_init__(self):
        if self.m < 16:
            raise ValidationError(f"la rejilla de frecuencias necesita m >= 16 (recibido {self.m})", 'm')
        if not self.omega_max > self.omega_min:
            raise ValidationError("rango de frecuencias vacío", 'omega')

    @property
    def spacing(self) -> float:
        return (self.omega_max - self.omega_min) / (self.m - 1)

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_min + self.spacing * np.arange(self.m)


def frequency_grid(shape: PulseShape, grid: TimeGrid) -> FrequencyGrid:
    """
    Rejilla de frecuencias que cubre el espectro del pulso

    El paso cumple 2π/dω > 1.1·(t_max − t_min) para que las réplicas
    periódicas de la suma en frecuencia caigan fuera de la ventana.
    """
    cfg = get_settings().oracle
    half = cfg.spectrum_sigmas * shape.gamma * (1.0 + 0.5 * len(shape.hermite))
    step = min(cfg.frequency_step, 2.0 * math.pi / (1.1 * (grid.t_max - grid.t_min)))
    m = max(16, int(math.ceil(2.0 * half / step)) + 1)
    return FrequencyGrid(shape.delta - half, shape.delta + half, m)


# ─────────────────────────────────────────────────────────────────────────────
# Núcleos de dos fotones
# ─────────────────────────────────────────────────────────────────────────────

def s2_connected_kernel(w1, w2, w1p, w2p, params: PhysicalParams = PhysicalParams()):
    """2iΓ0²(ω1+ω2−2ω0+2iΓ0)/∏(ω−ω0+iΓ0), escalado por c²"""
    g, w0 = params.gamma0, params.omega0
    u = [np.asarray(w) - w0 + 1j * g for w in (w1, w2, w1p, w2p)]
    return params.chirality ** 2 * 2j * g * g * (u[0] + u[1]) / (u[0] * u[1] * u[2] * u[3])


def s2_pole_terms(w1, w2, w1p, w2p, params: PhysicalParams = PhysicalParams()):
    """
    Suma de los cuatro términos con polo de S^{XYy}(1',2') + S^{XYy}(2',1')

    Solo es válida fuera de los polos y sobre la capa de energía; ahí debe
    coincidir con s2_connected_kernel.
    """
    s = [s_coeff(np.asarray(w) - params.omega0, params) for w in (w1, w2, w1p, w2p)]
    w1, w2, w1p, w2p = (np.asarray(w) for w in (w1, w2, w1p, w2p))
    total = (s[0] * s[3] / (w1 - w1p) + s[1] * s[3] / (w2 - w1p)
             + s[0] * s[2] / (w1 - w2p) + s[1] * s[2] / (w2 - w2p))
    return 1j * total


# Nombre en frecuencia del elemento conexo (los dos nombres son el mismo núcleo)
s2_frequency_kernel = s2_connected_kernel


def _theta(x):
    return np.where(x > 0, 1.0, np.where(x == 0, 0.5, 0.0))


def s2_time_kernel(t1, t2, w1, w2, params: PhysicalParams = PhysicalParams(), channel: str = 'XXx'):
    """
    Elemento S_{t1,t2←ω1,ω2} de dos fotones (argumentos con broadcasting)

    XXx: 2[t1t2·cos(ΔωΔt/2) − s1s2·e^{−(κ − iΣ/2)|Δt|}]·e^{−iΣT/2}
    XYy: rama θ(t2−t1) con conversión del segundo fotón más rama θ(t1−t2)
    """
    t1, t2, w1, w2 = (np.asarray(x, dtype=float) for x in (t1, t2, w1, w2))
    d1, d2 = w1 - params.omega0, w2 - params.omega0
    s1, s2 = s_coeff(d1, params), s_coeff(d2, params)
    dw, dt = w2 - w1, t2 - t1
    total_w, total_t = w1 + w2, t1 + t2
    phase = np.exp(-0.5j * total_w * total_t)
    bound = np.exp(-(params.kappa - 0.5j * total_w) * np.abs(dt))
    forward = np.exp(-0.5j * dw * dt)
    backward = np.exp(0.5j * dw * dt)

    if channel == 'XXx':
        tt = t_coeff(d1, params) * t_coeff(d2, params)
        return 2.0 * (tt * np.cos(0.5 * dw * dt) - s1 * s2 * bound) * phase
    if channel == 'XYy':
        later = (t_coeff(d1, params) * s2 * forward + t_coeff(d2, params) * s1 * backward
                 - 2.0 * s1 * s2 * bound)
        earlier = s2 * forward + s1 * backward
        return (_theta(dt) * later + _theta(-dt) * earlier) * phase
    raise ValidationError(f"canal de dos fotones desconocido {channel!r}", 'channel')


# ─────────────────────────────────────────────────────────────────────────────
# Núcleos de tres fotones
# ─────────────────────────────────────────────────────────────────────────────

def _bracket(w, dt, kappa):
    """1 − e^{(iω − κ)Δt}, con Δt ≥ 0 forzado"""
    return 1.0 - np.exp((1j * w - kappa) * np.maximum(dt, 0.0))


def s3_time_kernel(t1, t2, t3, w1, w2, w3, params: PhysicalParams = PhysicalParams(),
                   channel: str = 'XXXx'):
    """
    Elemento S_{t1,t2,t3←ω1,ω2,ω3} de tres fotones, sumado sobre las seis
    asignaciones de frecuencias
    """
    t = [np.asarray(x, dtype=float) for x in (t1, t2, t3)]
    freqs = [np.asarray(w, dtype=float) for w in (w1, w2, w3)]
    kappa = params.kappa

    def s(w):
        return s_coeff(w - params.omega0, params)

    if channel == 'XXXx':
        ordered = np.sort(np.stack(np.broadcast_arrays(*t)), axis=0)
        ta, tb, tc = ordered[0], ordered[1], ordered[2]
        total = 0.0
        for wa, wb, wc in itertools.permutations(freqs):
            sa, sb, sc = s(wa), s(wb), s(wc)
            plane = np.exp(-1j * (wa * ta + wb * tb + wc * tc))
            b_ab = _bracket(wb, tb - ta, kappa)
            b_bc = _bracket(wc, tc - tb, kappa)
            b_ac = _bracket(wc, tc - ta, kappa)
            total = total + plane * (sa * sb * sc * b_ab * b_bc + sa * sb * b_ab + sb * sc * b_bc
                                     + sa * sc * b_ac + 1.0 + sa + sb + sc)
        return total

    if channel == 'XXYy':
        lo, hi, ty = np.minimum(t[0], t[1]), np.maximum(t[0], t[1]), t[2]
        after_hi = _theta(ty - hi)
        after_lo = _theta(ty - lo)
        total = 0.0
        for wa, wb, wc in itertools.permutations(freqs):
            sa, sb, sc = s(wa), s(wb), s(wc)
            plane = np.exp(-1j * (wa * lo + wb * hi + wc * ty))
            b_yh = _bracket(wc, ty - hi, kappa)
            total = total + plane * (after_hi * sa * sb * sc * _bracket(wb, hi - lo, kappa) * b_yh
                                     + after_hi * sb * sc * b_yh
                                     + after_lo * sa * sc * _bracket(wc, ty - lo, kappa)
                                     + sc)
        return total

    raise ValidationError(f"canal de tres fotones desconocido {channel!r} (válidos: XXXx, XXYy)", 'channel')


# ─────────────────────────────────────────────────────────────────────────────
# Oráculo de dos fotones por convolución
# ─────────────────────────────────────────────────────────────────────────────

def pulse_spectrum(shape: PulseShape, grid: TimeGrid, fgrid: FrequencyGrid,
                   params: PhysicalParams = PhysicalParams()) -> np.ndarray:
    """φ̃(ω) = ∫φ^(0)(t)e^{iωt}dt por transformada discreta directa (trapecio)"""
    t = grid.times
    weights = np.full(grid.n, grid.h)
    weights[[0, -1]] *= 0.5
    omegas = fgrid.omegas + params.omega0
    samples = envelope(shape, t, params.omega0) * weights
    return np.exp(1j * np.outer(omegas, t)) @ samples


def _check_leakage(spectrum: np.ndarray):
    peak = np.abs(spectrum).max()
    edge = max(abs(spectrum[0]), abs(spectrum[-1]))
    tol = get_settings().oracle.leakage_tolerance
    if peak == 0.0 or edge > tol * peak:
        raise NumericalDiagnosticError(
            f"fuga espectral en los bordes de la rejilla de frecuencias ({edge / max(peak, 1e-300):.1e})", 'fgrid')


def _raw_two_photon(shape: PulseShape, grid: TimeGrid, fgrid: FrequencyGrid,
                    params: PhysicalParams, channel: str, rows: Sequence[int],
                    cols: Optional[np.ndarray] = None, threads: Optional[int] = 2) -> np.ndarray:
    """Σ_ab S_{t_i,t_j←ω_a,ω_b} φ̃_a φ̃_b dω² sin constante combinatoria"""
    spectrum = pulse_spectrum(shape, grid, fgrid, params)
    _check_leakage(spectrum)
    w = fgrid.omegas + params.omega0
    dw = fgrid.spacing
    weight = np.outer(spectrum, spectrum) * dw * dw
    t = grid.times
    tcols = t if cols is None else t[cols]
    out = np.empty((len(rows), len(tcols)), dtype=complex)
    W1, W2 = w[None, :, None], w[None, None, :]

    def fill(r: int):
        for start in range(0, len(tcols), 16):
            chunk = tcols[start:start + 16, None, None]
            kernel = s2_time_kernel(t[rows[r]], chunk, W1, W2, params, channel)
            out[r, start:start + 16] = np.einsum('jab,ab->j', kernel, weight)

    fill_slabs(len(rows), fill, threads)
    return out


# Constante de calibración congelada tras la primera llamada
_oracle_constant: Optional[complex] = None


def calibrate_two_photon_oracle(params: PhysicalParams = PhysicalParams()) -> complex:
    """
    Ajusta la constante combinatoria en un único punto de referencia

    Referencia: gaussiano δ = 0, γ = 0.5, canal XXx en el máximo de |ψ^XXx|.
    """
    global _oracle_constant
    if _oracle_constant is not None:
        return _oracle_constant

    from .pulse import gaussian_pulse

    reference = gaussian_pulse(0.0, 0.5)
    grid = default_time_grid(reference, params, photons=2, n=get_settings().oracle.grid_n)
    fgrid = frequency_grid(reference, grid)
    wave = scatter_two(reference, grid, params)
    i, j = np.unravel_index(int(np.argmax(np.abs(wave.xxx))), wave.xxx.shape)
    raw = _raw_two_photon(reference, grid, fgrid, params, 'XXx', [int(i)], np.array([int(j)]))[0, 0]
    _oracle_constant = complex(wave.xxx[i, j] / raw)
    logger.info(f"🔬 Constante del oráculo calibrada: {_oracle_constant:.6g} "
                f"(1/(2(2π)²) = {1.0 / (8.0 * math.pi ** 2):.6g})")
    return _oracle_constant


def reset_oracle_calibration():
    global _oracle_constant
    _oracle_constant = None


def oracle_two_photon(shape: PulseShape, grid: TimeGrid, fgrid: Optional[FrequencyGrid] = None,
                      params: PhysicalParams = PhysicalParams(),
                      threads: Optional[int] = 2) -> TwoPhotonWave:
    """
    Función de onda de dos fotones reconstruida desde la matriz S

    Args:
        shape: Pulso incidente
        grid: Rejilla de detección
        fgrid: Rejilla de frecuencias (None = cobertura automática)
        params: Parámetros del emisor
        threads: Hilos por filas de salida

    Returns:
        TwoPhotonWave con la constante congelada aplicada
    """
    constant = calibrate_two_photon_oracle(params)
    if fgrid is None:
        fgrid = frequency_grid(shape, grid)
    rows = list(range(grid.n))
    xxx = constant * _raw_two_photon(shape, grid, fgrid, params, 'XXx', rows, threads=threads)
    xyy = constant * _raw_two_photon(shape, grid, fgrid, params, 'XYy', rows, threads=threads)
    return TwoPhotonWave(grid, xxx, xyy, params)


# ─────────────────────────────────────────────────────────────────────────────
# Oráculo monocromático de tres fotones
# ─────────────────────────────────────────────────────────────────────────────

@dataclass
class MonoOracleResult:
    """Comparación núcleo vs. evaluación directa en los puntos de prueba"""
    channel: str
    constant: complex
    probes: List[Tuple[float, float, float]]
    oracle: List[complex] = field(default_factory=list)
    direct: List[complex] = field(default_factory=list)
    relative_error: List[float] = field(default_factory=list)

    @property
    def max_relative_error(self) -> float:
        return max(self.relative_error) if self.relative_error else 0.0


def oracle_three_photon_mono(shape: PulseShape, params: PhysicalParams,
                             probe_times: Sequence[Tuple[float, float, float]],
                             channel: str = 'XXYy') -> MonoOracleResult:
    """
    Límite monocromático de tres fotones

    El núcleo se evalúa en la portadora degenerada y se multiplica por las
    envolventes lentas A(t) = φ^(0)(t)e^{iωt}. La constante se ajusta en el
    primer punto con el canal XXYy y se reutiliza para el canal pedido.
    """
    if channel not in ('XXXx', 'XXYy'):
        raise ValidationError(f"canal incompatible con el oráculo: {channel!r}", 'channel')
    if shape.gamma > 0.02:
        raise ValidationError(f"el pulso no es cuasi-monocromático (γ = {shape.gamma})", 'gamma')
    if not probe_times:
        raise ValidationError("se necesita al menos un punto de prueba", 'probe_times')
    bulk = 1.0 / shape.gamma
    for probe in probe_times:
        if len(probe) != 3 or max(abs(x) for x in probe) > bulk:
            raise ValidationError(f"punto de prueba fuera del cuerpo del pulso: {probe}", 'probe_times')

    grid = default_time_grid(shape, params, photons=3)
    omega = params.omega0 + shape.delta

    def slow(t):
        return envelope(shape, t, params.omega0) * np.exp(1j * omega * t)

    def raw(probe, name):
        t = np.asarray(probe, dtype=float)
        kernel = s3_time_kernel(t[0], t[1], t[2], omega, omega, omega, params, name)
        return complex(kernel * np.prod(slow(t)))

    first = probe_times[0]
    constant = psi3_pointwise(shape, params, *first, 'XXYy', grid) / raw(first, 'XXYy')
    result = MonoOracleResult(channel, complex(constant), [tuple(p) for p in probe_times])

    for probe in probe_times:
        predicted = constant * raw(probe, channel)
        direct = psi3_pointwise(shape, params, *probe, channel, grid)
        scale = max(abs(direct), 1e-3 * float(np.prod(np.abs(slow(np.asarray(probe))))))
        result.oracle.append(complex(predicted))
        result.direct.append(direct)
        result.relative_error.append(abs(predicted - direct) / scale)

    logger.info(f"🔬 Oráculo monocromático {channel}: error relativo máximo {result.max_relative_error:.2e}")
    return result
