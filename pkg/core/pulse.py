"""
Envolventes de Pulso

Construcción del pulso incidente (gaussiano o gaussiano con correcciones
de Hermite), normalización numérica en la rejilla y cálculo de las
envolventes filtrada φ^(s) y transmitida φ^(τ) = φ^(0) + φ^(s).

φ^(s) se obtiene integrando la ecuación de respuesta lineal
    dφ^(s)/dt = −(iω0 + Γ0) φ^(s) − c·Γ0 φ^(0)(t),   φ^(s)(t_min) = 0
con RK4 clásico. Como la ecuación es lineal con coeficientes constantes, un
paso RK4 es exactamente una recurrencia y_{k+1} = R y_k + b_k, que se
evalúa de una vez con scipy.signal.lfilter.
"""

import logging
import math
from dataclasses import dataclass, replace, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import hermite as herm
from scipy import integrate, signal, special

from .errors import DegeneratePulseError, ValidationError, WindowError
from .physics import PhysicalParams, TimeGrid, make_time_grid
from .settings import get_settings

logger = logging.getLogger(__name__)

GAUSSIAN_NORM = math.pi ** -0.25


@dataclass(frozen=True)
class PulseShape:
    """
    Pulso incidente φ^(0)(t) = N·[1 + Σ_{n≥2} c_n H_n(γt)]·e^{−iωt − γ²t²/2}

    hermite guarda c_n = a_n + i b_n desde n = 2 (a_2 = 0 fijo).
    """
    delta: float
    gamma: float
    hermite: Tuple[complex, ...] = ()
    norm_factor: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValidationError(f"gamma debe ser positivo (recibido {self.gamma})", 'gamma')
        if not math.isfinite(self.delta):
            raise ValidationError(f"delta debe ser finito (recibido {self.delta})", 'delta')
        if not (math.isfinite(self.norm_factor) and self.norm_factor >= 0):
            raise ValidationError(f"norm_factor inválido ({self.norm_factor})", 'norm_factor')
        coeffs = tuple(complex(c) for c in self.hermite)
        if coeffs and coeffs[0].real != 0.0:
            raise ValidationError("el coeficiente de H_2 debe ser imaginario puro (a_2 = 0)", 'hermite')
        object.__setattr__(self, 'hermite', coeffs)

    @property
    def n_max(self) -> int:
        return len(self.hermite) + 1

    @property
    def is_gaussian(self) -> bool:
        return all(c == 0 for c in self.hermite)

    def to_spec(self) -> Dict:
        """Forma de archivo de configuración: hermite como pares [a_n, b_n] desde n = 2"""
        return {
            'delta': self.delta,
            'gamma': self.gamma,
            'hermite': [[c.real, c.imag] for c in self.hermite],
        }


@dataclass(frozen=True)
class EnvelopeSeries:
    """Envolvente muestreada en una rejilla (inmutable)"""
    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise ValidationError(f"la serie tiene {values.shape} puntos, la rejilla {self.grid.n}", 'values')
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)


def gaussian_pulse(delta: float, gamma: float) -> PulseShape:
    """Gaussiano normalizado analíticamente (√γ/π^{1/4})"""
    shape = PulseShape(float(delta), float(gamma))
    return replace(shape, norm_factor=math.sqrt(shape.gamma) * GAUSSIAN_NORM)


def hermite_pulse(delta: float, gamma: float, coefficients: Sequence[complex],
                  grid: Optional[TimeGrid] = None,
                  params: PhysicalParams = PhysicalParams()) -> PulseShape:
    """Pulso con correcciones de Hermite, normalizado en la rejilla dada (o la de dos fotones por defecto)"""
    shape = PulseShape(float(delta), float(gamma), tuple(coefficients))
    shape = replace(shape, norm_factor=math.sqrt(shape.gamma) * GAUSSIAN_NORM)
    if grid is None:
        grid = default_time_grid(shape, params, photons=2)
    return normalize(shape, grid)


def pulse_from_spec(spec: Dict, params: PhysicalParams = PhysicalParams()) -> PulseShape:
    """Construye el pulso normalizado desde {delta, gamma, hermite: [[a_n, b_n], ...]}"""
    try:
        delta = float(spec['delta'])
        gamma = float(spec['gamma'])
        pairs = spec.get('hermite', []) or []
        coefficients = [complex(float(a), float(b)) for a, b in pairs]
    except KeyError as e:
        raise ValidationError(f"falta el campo {e.args[0]}", f"pulse.{e.args[0]}")
    except (TypeError, ValueError) as e:
        raise ValidationError(f"especificación de pulso inválida: {e}", 'pulse')
    if not coefficients or all(c == 0 for c in coefficients):
        return replace(gaussian_pulse(delta, gamma), hermite=tuple(coefficients))
    return hermite_pulse(delta, gamma, coefficients, params=params)


def envelope(shape: PulseShape, t, omega0: float = 0.0):
    """
    Evalúa φ^(0)(t) (escalar o array)

    Args:
        shape: Pulso
        t: Tiempo(s) en unidades de 1/Γ0
        omega0: Frecuencia de la transición; la portadora absoluta es ω0 + δ

    Returns:
        Valor(es) complejos de la envolvente
    """
    t = np.asarray(t, dtype=float)
    x = shape.gamma * t
    carrier = np.exp(-1j * (omega0 + shape.delta) * t - 0.5 * x * x)
    if shape.hermite:
        poly = herm.hermval(x, np.array((1.0, 0.0) + shape.hermite, dtype=complex))
    else:
        poly = 1.0
    value = shape.norm_factor * poly * carrier
    return value[()] if value.ndim == 0 else value


def sample_envelope(shape: PulseShape, grid: TimeGrid,
                    params: PhysicalParams = PhysicalParams()) -> EnvelopeSeries:
    return EnvelopeSeries(grid, envelope(shape, grid.times, params.omega0))


def pulse_norm(series: EnvelopeSeries) -> float:
    """∫|φ|² dt por trapecio en la rejilla de la serie"""
    return float(integrate.trapezoid(np.abs(series.values) ** 2, dx=series.grid.h))


def normalize(shape: PulseShape, grid: TimeGrid) -> PulseShape:
    """Reescala norm_factor para que ∫|φ^(0)|² dt = 1 en la rejilla"""
    values = envelope(shape, grid.times)
    norm = float(integrate.trapezoid(np.abs(values) ** 2, dx=grid.h))
    if not math.isfinite(norm) or norm <= 0.0:
        raise DegeneratePulseError("degenerate pulse: norma nula en la rejilla", 'pulse')
    return replace(shape, norm_factor=shape.norm_factor / math.sqrt(norm))


# ─────────────────────────────────────────────────────────────────────────────
# Ventana y rejilla por defecto
# ─────────────────────────────────────────────────────────────────────────────

def _edge_ratio(shape: PulseShape, half_width: float) -> float:
    probe = np.linspace(-half_width, half_width, 4001)
    mod = np.abs(envelope(shape, probe))
    peak = mod.max()
    if peak == 0.0:
        return 0.0
    return float(max(mod[0], mod[-1]) / peak)


def default_window(shape: PulseShape, params: PhysicalParams = PhysicalParams()) -> Tuple[float, float]:
    """
    Ventana [−w/γ, w/γ + cola/Γ0]

    Para pulsos con Hermite la mitad de ventana crece en pasos de 0.5/γ hasta
    que la envolvente en los extremos queda bajo la tolerancia de soporte.
    """
    cfg = get_settings().grid
    half = cfg.window_sigmas / shape.gamma
    target = 0.1 * cfg.support_tolerance
    for _ in range(60):
        if _edge_ratio(shape, half) <= target:
            break
        half += 0.5 / shape.gamma
    else:
        logger.warning(f"No se alcanzó la tolerancia de soporte para γ={shape.gamma} (ventana ±{half:.2f})")
    return -half, half + cfg.tail_decay_times / params.gamma0


def _odd(n: int) -> int:
    return n if n % 2 == 1 else n + 1


def default_time_grid(shape: PulseShape, params: PhysicalParams = PhysicalParams(),
                      photons: int = 2, n: Optional[int] = None,
                      n_min: Optional[int] = None) -> TimeGrid:
    """
    Rejilla por defecto para 1-2 fotones (photons=2) o tres fotones (photons=3)

    Si n no se da, se parte de n_min (o del mínimo configurado) y se densifica
    hasta el espaciado máximo permitido (con tope de memoria para tres fotones).
    """
    cfg = get_settings().grid
    t_min, t_max = default_window(shape, params)
    if n is None:
        if photons == 3:
            base, spacing = n_min or cfg.n_three_photon, cfg.max_spacing_three_photon / params.gamma0
        else:
            base, spacing = n_min or cfg.n_two_photon, cfg.max_spacing_two_photon / params.gamma0
        needed = int(math.ceil((t_max - t_min) / spacing)) + 1
        n = _odd(max(base, needed))
        cap = cfg.n_three_photon_cap - (1 - cfg.n_three_photon_cap % 2)
        if photons == 3 and n > cap:
            n = cap
    return make_time_grid(t_min, t_max, n)


def anchored_time_grid(shape: PulseShape, spacing: float,
                       params: PhysicalParams = PhysicalParams()) -> TimeGrid:
    """
    Rejilla de paso fijo con nodos en múltiplos enteros de `spacing`

    La ventana por defecto se redondea hacia fuera a la red k·spacing, de modo
    que al variar (δ, γ) los nodos no se mueven y solo entran o salen nodos de
    cola. Es la rejilla de los bucles de optimización.
    """
    if not (math.isfinite(spacing) and spacing > 0):
        raise ValidationError(f"spacing debe ser positivo (recibido {spacing})", 'spacing')
    t_min, t_max = default_window(shape, params)
    k_lo = int(math.floor(t_min / spacing))
    k_hi = int(math.ceil(t_max / spacing))
    if (k_hi - k_lo) % 2 == 1:
        k_hi += 1
    return make_time_grid(k_lo * spacing, k_hi * spacing, k_hi - k_lo + 1)


def check_support(shape: PulseShape, grid: TimeGrid, params: PhysicalParams = PhysicalParams()):
    """Error 'window too small' si la envolvente en t_min supera la tolerancia relativa al pico"""
    mod = np.abs(envelope(shape, grid.times, params.omega0))
    peak = mod.max()
    if peak == 0.0:
        return
    ratio = mod[0] / peak
    if ratio > get_settings().grid.support_tolerance:
        raise WindowError(f"window too small: |φ(t_min)|/pico = {ratio:.2e}", 'window')


# ─────────────────────────────────────────────────────────────────────────────
# Integrador RK4 de la respuesta lineal
# ─────────────────────────────────────────────────────────────────────────────

def _rk4_weights(z: complex) -> Tuple[complex, complex, complex, complex]:
    """
    Coeficientes del paso RK4 para y' = λy + g(t) con z = λ·dt

    y_{k+1} = R·y_k + dt·(w0·g(t_k) + wm·g(t_k + dt/2) + w1·g(t_k + dt))
    """
    R = 1 + z + z * z / 2 + z ** 3 / 6 + z ** 4 / 24
    w0 = (1 + z + z * z / 2 + z ** 3 / 4) / 6
    wm = (4 + 2 * z + z * z / 2) / 6
    w1 = 1.0 / 6.0
    return R, w0, wm, w1


def substep_count(grid: TimeGrid, substeps: Optional[int] = None) -> int:
    """Subpasos RK4 internos por intervalo de rejilla"""
    if substeps is not None:
        if substeps < 1:
            raise ValidationError("substeps debe ser >= 1", 'substeps')
        return int(substeps)
    cfg = get_settings().integrator
    return max(cfg.rk4_substeps, int(math.ceil(grid.h / cfg.rk4_max_step - 1e-12)))


def _integrate_lattice(shape: PulseShape, params: PhysicalParams, t0: float,
                       step: float, count: int) -> np.ndarray:
    """φ^(s) en t0 + k·step, k = 0..count-1, partiendo de φ^(s)(t0) = 0"""
    y = np.zeros(count, dtype=complex)
    if count < 2:
        return y
    lattice = t0 + step * np.arange(count)
    forcing = -params.chirality * params.gamma0 * step
    g = forcing * envelope(shape, lattice, params.omega0)
    gm = forcing * envelope(shape, lattice[:-1] + 0.5 * step, params.omega0)
    R, w0, wm, w1 = _rk4_weights(-params.kappa * step)
    b = w0 * g[:-1] + wm * gm + w1 * g[1:]
    y[1:] = signal.lfilter([1.0], [1.0, -R], b)
    return y


def filtered_envelope(shape: PulseShape, grid: TimeGrid,
                      params: PhysicalParams = PhysicalParams(),
                      substeps: Optional[int] = None) -> EnvelopeSeries:
    """
    φ^(s) muestreada en la rejilla

    Args:
        shape: Pulso incidente
        grid: Rejilla de salida
        params: Parámetros del emisor
        substeps: Subpasos RK4 por intervalo (None = regla automática)

    Returns:
        EnvelopeSeries con φ^(s)
    """
    check_support(shape, grid, params)
    m = substep_count(grid, substeps)
    fine = _integrate_lattice(shape, params, grid.t_min, grid.h / m, (grid.n - 1) * m + 1)
    return EnvelopeSeries(grid, fine[::m])


def transmitted_envelope(phi0: EnvelopeSeries, phis: EnvelopeSeries) -> EnvelopeSeries:
    """φ^(τ) = φ^(0) + φ^(s)"""
    if not phi0.grid.same_as(phis.grid):
        raise ValidationError("grid mismatch entre φ^(0) y φ^(s)", 'grid')
    return EnvelopeSeries(phi0.grid, phi0.values + phis.values)


def pulse_series(shape: PulseShape, grid: TimeGrid,
                 params: PhysicalParams = PhysicalParams()) -> Tuple[EnvelopeSeries, EnvelopeSeries, EnvelopeSeries]:
    """(φ^(0), φ^(s), φ^(τ)) en la rejilla"""
    phi0 = sample_envelope(shape, grid, params)
    phis = filtered_envelope(shape, grid, params)
    return phi0, phis, transmitted_envelope(phi0, phis)


def phi_s_at(shape: PulseShape, params: PhysicalParams, times, grid: TimeGrid) -> np.ndarray:
    """
    φ^(s) en tiempos arbitrarios

    Recorre la misma red fina que filtered_envelope sobre `grid` y completa
    con un paso RK4 parcial, así en los nodos coincide con la serie de rejilla.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    m = substep_count(grid)
    step = grid.h / m
    pos = (times - grid.t_min) / step
    k = np.floor(pos + 1e-9).astype(int)
    k = np.maximum(k, 0)
    lattice = _integrate_lattice(shape, params, grid.t_min, step, int(k.max()) + 1)

    result = np.zeros(times.shape, dtype=complex)
    inside = times > grid.t_min
    if not np.any(inside):
        return result
    tk = grid.t_min + step * k[inside]
    dt = times[inside] - tk
    yk = lattice[k[inside]]
    forcing = -params.chirality * params.gamma0
    z = -params.kappa * dt
    R, w0, wm, w1 = _rk4_weights(z)
    g0 = forcing * envelope(shape, tk, params.omega0)
    gm = forcing * envelope(shape, tk + 0.5 * dt, params.omega0)
    g1 = forcing * envelope(shape, tk + dt, params.omega0)
    result[inside] = R * yk + dt * (w0 * g0 + wm * gm + w1 * g1)
    return result


# ─────────────────────────────────────────────────────────────────────────────
# Formas cerradas para gaussianos (oráculos)
# ─────────────────────────────────────────────────────────────────────────────

def gaussian_filtered_closed_form(shape: PulseShape, t, params: PhysicalParams = PhysicalParams()):
    """
    φ^(s) exacta para un gaussiano puro

    φ^(s)(t) = −cΓ0·√(π/2)/γ · erfcx(z)·φ^(0)(t),  z = (Γ0 − iδ − γ²t)/(γ√2),
    con erfcx(z) = w(iz) (función de Faddeeva).
    """
    if not shape.is_gaussian:
        raise ValidationError("la forma cerrada solo existe para gaussianos puros", 'hermite')
    t = np.asarray(t, dtype=float)
    g = shape.gamma
    z = (params.gamma0 - 1j * shape.delta - g * g * t) / (g * math.sqrt(2.0))
    pref = -params.chirality * params.gamma0 * math.sqrt(math.pi / 2.0) / g
    return pref * special.wofz(1j * z) * envelope(shape, t, params.omega0)


def filtered_by_quadrature(shape: PulseShape, t: float, params: PhysicalParams = PhysicalParams(),
                           epsabs: float = 1e-13) -> complex:
    """φ^(s)(t) por cuadratura adaptativa de la integral de definición"""
    kappa = params.kappa

    def integrand(tp, part):
        value = envelope(shape, tp, params.omega0) * np.exp(-kappa * (t - tp))
        return value.real if part == 0 else value.imag

    lower = t - 60.0 / shape.gamma - 60.0 / params.gamma0
    points = [0.0] if lower < 0.0 < t else None
    re, _ = integrate.quad(integrand, lower, t, args=(0,), epsabs=epsabs, epsrel=1e-12, limit=400, points=points)
    im, _ = integrate.quad(integrand, lower, t, args=(1,), epsabs=epsabs, epsrel=1e-12, limit=400, points=points)
    return -params.chirality * params.gamma0 * complex(re, im)
