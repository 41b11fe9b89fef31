"""
Optimización del Pulso

Barridos de ⟨P_W⟩ sobre (δ, γ) con pulsos gaussianos, refinamiento local del
máximo (Nelder-Mead con símplex inicial fijo) y optimización de la forma del
pulso con correcciones de Hermite (gradiente conjugado con diferencias
finitas centrales).

Los bucles de optimización evalúan sobre una rejilla de paso fijo anclada en
t = 0 (anchored_time_grid): al mover los parámetros los nodos no cambian, y
el objetivo es suave salvo contribuciones de cola por debajo de la
tolerancia de soporte. El valor reportado se re-evalúa al final en la
rejilla por defecto de resolución n_final.
"""

import logging
import math
import threading
import time
from dataclasses import dataclass, asdict, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from .errors import MemoryBudgetError, NumericalDiagnosticError, ValidationError, WindowError
from .physics import PhysicalParams, TimeGrid
from .pulse import GAUSSIAN_NORM, PulseShape, anchored_time_grid, default_time_grid, gaussian_pulse, normalize
from .scatter2 import scatter_two
from .scatter3 import peak_bytes, scatter_three
from .settings import get_settings
from .workers import map_ordered, resolve_threads
from .wstate import EntanglementReport, mono_limit, pw3_average, pw4_average

logger = logging.getLogger(__name__)

PHOTONS = (2, 3)
SHAPE_METHODS = ('CG', 'BFGS', 'Nelder-Mead')

# Pendiente de la penalización bajo el suelo de γ
GAMMA_PENALTY = 10.0

EvaluationCallback = Callable[[str, Tuple[float, ...], float, bool], None]


@dataclass
class ObjectiveValue:
    """Una evaluación de ⟨P_W⟩ con el pulso y la rejilla usados"""
    shape: PulseShape
    grid: TimeGrid
    report: EntanglementReport

    @property
    def value(self) -> float:
        return self.report.average


@dataclass
class SweepResult:
    """Mapa de ⟨P_W⟩ sobre la malla (δ, γ); values[i, j] ↔ (delta_axis[i], gamma_axis[j])"""
    photons: int
    delta_axis: np.ndarray
    gamma_axis: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    grid_n: np.ndarray
    grid_h: np.ndarray
    n_cell: int
    execution_time: float = 0.0

    @property
    def grid_meta(self) -> Dict:
        return {
            'n_cell': self.n_cell,
            'n_min': int(self.grid_n.min()),
            'n_max': int(self.grid_n.max()),
            'h_max': float(self.grid_h.max()),
        }

    def best(self) -> Tuple[float, float, float]:
        """(δ, γ, valor) de la mejor celda válida"""
        if not np.any(self.valid):
            raise NumericalDiagnosticError("ninguna celda válida en el barrido", 'sweep')
        masked = np.where(self.valid, self.values, -np.inf)
        i, j = np.unravel_index(int(np.argmax(masked)), masked.shape)
        return float(self.delta_axis[i]), float(self.gamma_axis[j]), float(self.values[i, j])

    def to_frame(self) -> pd.DataFrame:
        d, g = np.meshgrid(self.delta_axis, self.gamma_axis, indexing='ij')
        return pd.DataFrame({
            'delta': d.ravel(),
            'gamma': g.ravel(),
            'value': self.values.ravel(),
            'valid': self.valid.ravel(),
            'n': self.grid_n.ravel(),
            'h': self.grid_h.ravel(),
        })

    def to_dict(self) -> Dict:
        data = {
            'photons': self.photons,
            'delta_axis': self.delta_axis.tolist(),
            'gamma_axis': self.gamma_axis.tolist(),
            'values': self.values.tolist(),
            'valid': self.valid.tolist(),
            'grid_meta': self.grid_meta,
        }
        if np.any(self.valid):
            delta, gamma, value = self.best()
            data['best'] = {'delta': delta, 'gamma': gamma, 'value': value}
        return data


@dataclass
class OptimumReport:
    """Resultado de refine_max u optimize_pulse_shape"""
    kind: str  # gaussian/hermite
    photons: int
    delta: float
    gamma: float
    objective: float
    coefficients: Tuple[complex, ...] = ()
    iterations: int = 0
    converged: bool = False
    method: str = ''
    evaluations: int = 0
    grid_n: int = 0
    spacing: float = 0.0
    norm: float = 0.0

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['coefficients'] = [[c.real, c.imag] for c in self.coefficients]
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> 'OptimumReport':
        """Reconstruye el reporte desde su forma JSON (coeficientes como pares [a, b])"""
        try:
            values = dict(data)
            values['coefficients'] = tuple(complex(float(a), float(b)) for a, b in values.get('coefficients', []))
            return cls(**values)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"reporte de óptimo inválido: {e}", 'start')

    def pulse_spec(self) -> Dict:
        return {
            'delta': self.delta,
            'gamma': self.gamma,
            'hermite': [[c.real, c.imag] for c in self.coefficients],
        }


@dataclass
class OptimizationStatistics:
    """Estadísticas acumuladas de evaluaciones del objetivo"""
    evaluations: int = 0
    invalid: int = 0
    best_objective: float = 0.0
    execution_time: float = 0.0


def _check_photons(photons: int):
    if photons not in PHOTONS:
        raise ValidationError(f"photons debe ser 2 o 3 (recibido {photons})", 'photons')


# ─────────────────────────────────────────────────────────────────────────────
# Objetivo
# ─────────────────────────────────────────────────────────────────────────────

def pw_objective(photons: int, delta: float, gamma: float,
                 coefficients: Sequence[complex] = (),
                 grid: Optional[TimeGrid] = None,
                 spacing: Optional[float] = None,
                 n_min: Optional[int] = None,
                 params: PhysicalParams = PhysicalParams(),
                 threads: Optional[int] = None) -> ObjectiveValue:
    """
    ⟨P_W3⟩ (photons=2) o ⟨P_W4⟩ (photons=3) de un pulso

    Args:
        photons: Número de fotones incidentes
        delta, gamma: Desintonía central y ancho espectral
        coefficients: c_n desde n = 2 (vacío o todo cero = gaussiano)
        grid: Rejilla explícita (tiene prioridad)
        spacing: Paso de una rejilla anclada (bucles de optimización)
        n_min: Resolución mínima de la rejilla por defecto
        params: Parámetros del emisor
        threads: Hilos para el relleno de la función de onda

    Returns:
        ObjectiveValue con el reporte de entrelazamiento
    """
    _check_photons(photons)
    coefficients = tuple(complex(c) for c in coefficients)
    shape = PulseShape(float(delta), float(gamma), coefficients)
    shape = replace(shape, norm_factor=math.sqrt(shape.gamma) * GAUSSIAN_NORM)
    if shape.is_gaussian:
        shape = replace(shape, hermite=())

    if grid is None:
        if spacing is not None:
            grid = anchored_time_grid(shape, spacing, params)
        else:
            grid = default_time_grid(shape, params, photons=photons, n_min=n_min)
    if not shape.is_gaussian:
        shape = normalize(shape, grid)

    if photons == 2:
        report = pw3_average(scatter_two(shape, grid, params, threads))
    else:
        report = pw4_average(scatter_three(shape, grid, params, threads))
    return ObjectiveValue(shape, grid, report)


class _BestTracker:
    """Mejor punto visto hasta ahora (seguro entre hilos)"""

    def __init__(self):
        self.value = -math.inf
        self.point: Optional[np.ndarray] = None
        self.count = 0
        self._lock = threading.Lock()

    def offer(self, value: float, point: np.ndarray):
        with self._lock:
            self.count += 1
            if value > self.value:
                self.value = value
                self.point = np.array(point, dtype=float)


def _pack(delta: float, gamma: float, coefficients: Sequence[complex], n_max: int) -> np.ndarray:
    """x = [δ, γ, b_2, a_3, b_3, ..., a_nmax, b_nmax]"""
    coeffs = list(coefficients)[:n_max - 1]
    coeffs += [0j] * (n_max - 1 - len(coeffs))
    x = [delta, gamma, coeffs[0].imag]
    for c in coeffs[1:]:
        x += [c.real, c.imag]
    return np.array(x, dtype=float)


def _unpack(x: np.ndarray, n_max: int) -> Tuple[float, float, Tuple[complex, ...]]:
    coeffs = [complex(0.0, x[2])]
    for k in range(n_max - 2):
        coeffs.append(complex(x[3 + 2 * k], x[4 + 2 * k]))
    return float(x[0]), float(x[1]), tuple(coeffs)


# ─────────────────────────────────────────────────────────────────────────────
# Motor
# ─────────────────────────────────────────────────────────────────────────────

class OptimizationEngine:
    """
    Motor de barridos y optimización

    Características:
    - Barrido paralelo por celdas (una tarea por celda)
    - Refinamiento Nelder-Mead determinista
    - Optimización de forma con gradiente por diferencias centrales
    - Estadísticas acumuladas y callback opcional por evaluación
    """

    def __init__(self, on_evaluation: Optional[EvaluationCallback] = None):
        """
        Args:
            on_evaluation: Llamado como on_evaluation(kind, punto, valor, válido)
        """
        self.on_evaluation = on_evaluation
        self.stats = OptimizationStatistics()
        self.reports: List[OptimumReport] = []
        self._lock = threading.Lock()

    def _record(self, kind: str, point: Tuple[float, ...], value: float, valid: bool):
        with self._lock:
            self.stats.evaluations += 1
            if not valid:
                self.stats.invalid += 1
            elif value > self.stats.best_objective:
                self.stats.best_objective = value
            if self.on_evaluation is not None:
                self.on_evaluation(kind, point, value, valid)

    def _evaluate(self, kind: str, photons: int, delta: float, gamma: float,
                  coefficients: Sequence[complex], spacing: float,
                  params: PhysicalParams, threads: Optional[int]) -> float:
        """Objetivo en la rejilla anclada; los fallos numéricos cuentan como 0"""
        point = (delta, gamma) + tuple(x for c in coefficients for x in (c.real, c.imag))
        try:
            value = pw_objective(photons, delta, gamma, coefficients, spacing=spacing,
                                 params=params, threads=threads).value
        except (NumericalDiagnosticError, WindowError, MemoryBudgetError) as e:
            logger.debug(f"Evaluación inválida en δ={delta:.4f}, γ={gamma:.4f}: {e}")
            self._record(kind, point, 0.0, False)
            return 0.0
        self._record(kind, point, value, True)
        return value

    # ── Barrido ──────────────────────────────────────────────────────────────

    def sweep(self, photons: int,
              delta_range: Optional[Sequence[float]] = None,
              gamma_range: Optional[Sequence[float]] = None,
              resolution: Optional[Sequence[int]] = None,
              n_cell: Optional[int] = None,
              params: PhysicalParams = PhysicalParams(),
              threads: Optional[int] = None) -> SweepResult:
        """
        Barrido de ⟨P_W⟩ con pulsos gaussianos normalizados

        Las celdas cuya norma cae fuera de banda se marcan inválidas (valor 0).

        Args:
            photons: 2 o 3
            delta_range: (δ_min, δ_max)
            gamma_range: (γ_min, γ_max), estrictamente positivo
            resolution: (puntos en δ, puntos en γ)
            n_cell: Resolución mínima de la rejilla por celda
            params: Parámetros del emisor
            threads: Celdas en paralelo

        Returns:
            SweepResult
        """
        _check_photons(photons)
        cfg = get_settings().sweep
        delta_range = _check_range(cfg.delta_range if delta_range is None else delta_range, 'delta_range')
        gamma_range = _check_range(cfg.gamma_range if gamma_range is None else gamma_range, 'gamma_range')
        if gamma_range[0] <= 0:
            raise ValidationError(f"gamma_range debe ser estrictamente positivo (recibido {gamma_range})",
                                  'gamma_range')
        resolution = tuple(cfg.resolution if resolution is None else resolution)
        if len(resolution) != 2 or any(int(r) < 1 for r in resolution):
            raise ValidationError(f"resolution debe ser un par de enteros >= 1 (recibido {resolution})",
                                  'resolution')
        n_cell = int(n_cell or cfg.n_cell)

        start_time = time.time()
        deltas = np.linspace(delta_range[0], delta_range[1], int(resolution[0]))
        gammas = np.linspace(gamma_range[0], gamma_range[1], int(resolution[1]))
        cells = [(i, j) for i in range(deltas.size) for j in range(gammas.size)]
        logger.info(f"🔍 Barrido de {len(cells)} celdas (photons={photons}, n_cell={n_cell})")

        def run_cell(cell: Tuple[int, int]) -> Tuple[float, bool, int, float]:
            i, j = cell
            delta, gamma = float(deltas[i]), float(gammas[j])
            grid = default_time_grid(gaussian_pulse(delta, gamma), params, photons=photons, n_min=n_cell)
            try:
                value = pw_objective(photons, delta, gamma, grid=grid, params=params, threads=1).value
            except NumericalDiagnosticError as e:
                logger.warning(f"⚠️ Celda inválida δ={delta:.3f}, γ={gamma:.3f}: {e}")
                self._record('sweep', (delta, gamma), 0.0, False)
                return 0.0, False, grid.n, grid.h
            self._record('sweep', (delta, gamma), value, True)
            return value, True, grid.n, grid.h

        threads = resolve_threads(threads)
        if photons == 3:
            # Cada celda retiene sus dos canales y la reducción hasta terminar
            widest = default_time_grid(gaussian_pulse(0.0, float(gammas.min())), params,
                                       photons=3, n_min=n_cell)
            budget = get_settings().limits.memory_budget_bytes
            limit = max(1, int(budget // peak_bytes(widest.n)))
            if limit < threads:
                logger.info(f"🧮 Celdas en paralelo limitadas a {limit} por memoria (n={widest.n})")
                threads = limit

        outcomes = map_ordered(run_cell, cells, threads)
        shape =(deltas.size, gammas.size)
        values = np.array([o[0] for o in outcomes], dtype=float).reshape(shape)
        valid = np.array([o[1] for o in outcomes], dtype=bool).reshape(shape)
        grid_n = np.array([o[2] for o in outcomes], dtype=int).reshape(shape)
        grid_h = np.array([o[3] for o in outcomes], dtype=float).reshape(shape)

        elapsed = time.time() - start_time
        self.stats.execution_time += elapsed
        result = SweepResult(photons, deltas, gammas, values, valid, grid_n, grid_h, n_cell, elapsed)
        if np.any(valid):
            delta, gamma, value = result.best()
            logger.info(f"✅ Barrido completo en {elapsed:.1f}s: máximo {value:.4f} en δ={delta:.3f}, γ={gamma:.3f}")
        else:
            logger.warning("⚠️ Barrido sin celdas válidas")
        return result

    # ── Refinamiento gaussiano ───────────────────────────────────────────────

    def refine_max(self, photons: int, start: Sequence[float],
                   xatol: Optional[float] = None, fatol: Optional[float] = None,
                   max_iterations: Optional[int] = None,
                   params: PhysicalParams = PhysicalParams(),
                   threads: Optional[int] = None) -> OptimumReport:
        """
        Maximiza ⟨P_W⟩ sobre (δ, γ) con Nelder-Mead

        El símplex inicial es siempre [(δ,γ), (δ+0.1,γ), (δ,γ+0.1)], así que dos
        ejecuciones iguales dan el mismo reporte. Bajo gamma_floor el objetivo
        se evalúa en el suelo y se penaliza linealmente.
        """
        _check_photons(photons)
        cfg = get_settings().refine
        if len(start) != 2:
            raise ValidationError(f"start debe ser (δ, γ) (recibido {start})", 'start')
        delta0, gamma0 = float(start[0]), float(start[1])
        if not (math.isfinite(delta0) and math.isfinite(gamma0) and gamma0 > 0):
            raise ValidationError(f"el punto de partida debe tener γ > 0 (recibido {start})", 'start')
        xatol = cfg.xatol if xatol is None else xatol
        fatol = cfg.fatol if fatol is None else fatol
        max_iterations = cfg.max_iterations if max_iterations is None else max_iterations
        floor = cfg.gamma_floor

        start_time = time.time()
        base = default_time_grid(gaussian_pulse(delta0, max(gamma0, floor)), params,
                                 photons=photons, n_min=cfg.n_final)
        spacing = base.h
        tracker = _BestTracker()

        def objective(x: np.ndarray) -> float:
            delta, gamma = float(x[0]), float(x[1])
            clamped = max(gamma, floor)
            value = self._evaluate('refine', photons, delta, clamped, (), spacing, params, threads)
            tracker.offer(value, (delta, clamped))
            return -value + GAMMA_PENALTY * max(floor - gamma, 0.0)

        simplex = np.array([[delta0, gamma0], [delta0 + 0.1, gamma0], [delta0, gamma0 + 0.1]])
        logger.info(f"🎯 Refinando máximo desde δ={delta0:.3f}, γ={gamma0:.3f} (h={spacing:.4f})")
        res = optimize.minimize(objective, simplex[0], method='Nelder-Mead',
                                options={'initial_simplex': simplex, 'xatol': xatol,
                                         'fatol': fatol, 'maxiter': max_iterations})
        delta, gamma = tracker.point
        final = pw_objective(photons, delta, gamma, n_min=cfg.n_final, params=params, threads=threads)
        report = OptimumReport(
            kind='gaussian',
            photons=photons,
            delta=float(delta),
            gamma=float(gamma),
            objective=final.value,
            iterations=int(res.nit),
            converged=bool(res.success),
            method='Nelder-Mead',
            evaluations=tracker.count + 1,
            grid_n=final.grid.n,
            spacing=spacing,
            norm=final.report.norm,
        )
        if not report.converged:
            logger.warning(f"⚠️ Nelder-Mead sin convergencia tras {report.iterations} iteraciones: {res.message}")
        self.stats.execution_time += time.time() - start_time
        self.reports.append(report)
        logger.info(f"✅ Óptimo gaussiano {report.objective:.4f} en δ={report.delta:.4f}, γ={report.gamma:.4f}")
        return report

    # ── Forma del pulso ──────────────────────────────────────────────────────

    def optimize_pulse_shape(self, photons: int, n_max: Optional[int], start: OptimumReport,
                             fd_step: Optional[float] = None, gtol: Optional[float] = None,
                             max_iterations: Optional[int] = None, method: Optional[str] = None,
                             free_coefficients: bool = True,
                             params: PhysicalParams = PhysicalParams(),
                             threads: Optional[int] = None) -> OptimumReport:
        """
        Optimiza (δ, γ, b_2, a_3, b_3, ..., a_nmax, b_nmax) partiendo del óptimo gaussiano

        El gradiente se estima por diferencias centrales; las 2·d evaluaciones
        de cada gradiente se reparten entre los hilos. Nunca devuelve un
        objetivo peor que el de partida (si ocurre, devuelve el inicio con
        converged=False).

        Args:
            photons: 2 o 3
            n_max: Orden máximo de Hermite (>= 2)
            start: Reporte de partida (típicamente de refine_max)
            fd_step: Paso de diferencias finitas
            gtol: Tolerancia de gradiente
            max_iterations: Iteraciones máximas del optimizador
            method: 'CG', 'BFGS' o 'Nelder-Mead'
            free_coefficients: False congela los coeficientes (se re-evalúa el inicio)

        Returns:
            OptimumReport de tipo 'hermite'
        """
        _check_photons(photons)
        cfg = get_settings().shape
        refine_cfg = get_settings().refine
        n_max = cfg.n_max if n_max is None else int(n_max)
        if n_max < 2:
            raise ValidationError(f"n_max debe ser >= 2 (recibido {n_max})", 'n_max')
        if start.photons != photons:
            raise ValidationError(f"el reporte de partida es de {start.photons} fotones, no {photons}", 'start')
        fd_step = cfg.fd_step if fd_step is None else fd_step
        gtol = cfg.gtol if gtol is None else gtol
        max_iterations = cfg.max_iterations if max_iterations is None else max_iterations
        method = method or cfg.method
        if method not in SHAPE_METHODS:
            raise ValidationError(f"método desconocido {method!r} (válidos: {', '.join(SHAPE_METHODS)})", 'method')

        if not free_coefficients:
            again = pw_objective(photons, start.delta, start.gamma, start.coefficients,
                                 n_min=refine_cfg.n_final, params=params, threads=threads)
            self._record('shape', (start.delta, start.gamma), again.value, True)
            return replace(start, objective=again.value, iterations=0, converged=True,
                           method='frozen', evaluations=1, grid_n=again.grid.n, norm=again.report.norm)

        start_time = time.time()
        floor = refine_cfg.gamma_floor
        base = default_time_grid(gaussian_pulse(start.delta, max(start.gamma, floor)), params,
                                 photons=photons, n_min=refine_cfg.n_final)
        spacing = base.h
        tracker = _BestTracker()

        def objective(x: np.ndarray, workers: Optional[int] = threads) -> float:
            delta, gamma, coeffs = _unpack(x, n_max)
            clamped = max(gamma, floor)
            value = self._evaluate('shape', photons, delta, clamped, coeffs, spacing, params, workers)
            point = x.copy()
            point[1] = clamped
            tracker.offer(value, point)
            return -value + GAMMA_PENALTY * max(floor - gamma, 0.0)

        def gradient(x: np.ndarray) -> np.ndarray:
            probes = []
            for k in range(x.size):
                e = np.zeros_like(x)
                e[k] = fd_step
                probes += [x + e, x - e]
            values = map_ordered(lambda p: objective(p, 1), probes, threads)
            return np.array([(values[2 * k] - values[2 * k + 1]) / (2.0 * fd_step) for k in range(x.size)])

        x0 = _pack(start.delta, start.gamma, start.coefficients, n_max)
        logger.info(f"🧬 Optimizando forma (n_max={n_max}, {x0.size} variables, método {method})")
        if method == 'Nelder-Mead':
            res = optimize.minimize(objective, x0, method=method,
                                    options={'maxiter': max_iterations, 'xatol': fd_step, 'fatol': gtol})
        else:
            res = optimize.minimize(objective, x0, jac=gradient, method=method,
                                    options={'gtol': gtol, 'maxiter': max_iterations})

        delta, gamma, coeffs = _unpack(tracker.point, n_max)
        final = pw_objective(photons, delta, gamma, coeffs, n_min=refine_cfg.n_final,
                             params=params, threads=threads)
        self.stats.execution_time += time.time() - start_time

        if final.value < start.objective:
            logger.warning(f"⚠️ La forma optimizada ({final.value:.4f}) no mejora el inicio "
                           f"({start.objective:.4f}); se conserva el pulso de partida")
            report = replace(start, iterations=int(res.nit), converged=False, method=method,
                             evaluations=tracker.count + 1, spacing=spacing)
        else:
            report = OptimumReport(
                kind='hermite',
                photons=photons,
                delta=delta,
                gamma=gamma,
                objective=final.value,
                coefficients=coeffs,
                iterations=int(res.nit),
                converged=bool(res.success),
                method=method,
                evaluations=tracker.count + 1,
                grid_n=final.grid.n,
                spacing=spacing,
                norm=final.report.norm,
            )
            logger.info(f"✅ Forma optimizada: {report.objective:.4f} (inicio {start.objective:.4f})")
        self.reports.append(report)
        return report

    def get_detailed_report(self) -> str:
        """Reporte de texto de las optimizaciones hechas con este motor"""
        lines = []
        lines.append("=" * 60)
        lines.append("REPORTE DE OPTIMIZACIÓN")
        lines.append("=" * 60)
        lines.append(f"Evaluaciones: {self.stats.evaluations} (inválidas: {self.stats.invalid})")
        lines.append(f"Mejor objetivo visto: {self.stats.best_objective:.6f}")
        lines.append(f"Tiempo total: {self.stats.execution_time:.1f}s")
        lines.append("")
        for i, rep in enumerate(self.reports, 1):
            lines.append(f"Óptimo #{i} ({rep.kind}, {rep.photons} fotones)")
            lines.append(f"  δ = {rep.delta:.6f}, γ = {rep.gamma:.6f}")
            lines.append(f"  Objetivo: {rep.objective:.6f} (norma {rep.norm:.5f})")
            lines.append(f"  Método: {rep.method}, iteraciones {rep.iterations}, convergido {rep.converged}")
            for n, c in enumerate(rep.coefficients, 2):
                lines.append(f"  c_{n} = {c.real:+.6f} {c.imag:+.6f}i")
            lines.append("")
        return "\n".join(lines)


def _check_range(values: Sequence[float], name: str) -> Tuple[float, float]:
    try:
        lo, hi = (float(v) for v in values)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} debe ser un par [min, max] (recibido {values})", name)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ValidationError(f"{name} vacío o no finito: [{lo}, {hi}]", name)
    return lo, hi


def mono_column_check(result: SweepResult, params: PhysicalParams = PhysicalParams(),
                      tolerance: float = 0.02) -> Dict:
    """
    Compara la columna de menor γ del barrido con el límite monocromático

    Returns:
        Diccionario con gamma, max_deviation y passed
    """
    j = int(np.argmin(result.gamma_axis))
    column = result.values[:, j]
    valid = result.valid[:, j]
    expected = np.array([mono_limit(result.photons, d, params) for d in result.delta_axis])
    deviation = np.abs(column - expected)[valid]
    max_deviation = float(deviation.max()) if deviation.size else float('nan')
    return {
        'gamma': float(result.gamma_axis[j]),
        'max_deviation': max_deviation,
        'tolerance': tolerance,
        'passed': bool(deviation.size and max_deviation <= tolerance),
    }


# Instancia global del motor de optimización
_optimization_engine = None


def get_optimization_engine() -> OptimizationEngine:
    """Obtiene instancia del motor de optimización"""
    global _optimization_engine
    if _optimization_engine is None:
        _optimization_engine = OptimizationEngine()
    return _optimization_engine


def sweep(photons: int, *args, **kwargs) -> SweepResult:
    return get_optimization_engine().sweep(photons, *args, **kwargs)


def refine_max(photons: int, start: Sequence[float], **kwargs) -> OptimumReport:
    return get_optimization_engine().refine_max(photons, start, **kwargs)


def optimize_pulse_shape(photons: int, n_max: Optional[int], start: OptimumReport, **kwargs) -> OptimumReport:
    return get_optimization_engine().optimize_pulse_shape(photons, n_max, start, **kwargs)
