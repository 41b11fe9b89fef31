"""
Parámetros Físicos y Rejilla Temporal

Tipos compartidos por todos los módulos: parámetros del emisor Λ
acoplado a la guía (unidades Γ0 = 1, ω0 = 0 por defecto), la rejilla
temporal uniforme y los coeficientes de transmisión de un fotón.
"""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ValidationError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Acoplamientos admitidos: guía quiral (1.0) o simétrica (0.5)
CHIRALITIES = (1.0, 0.5)


@dataclass(frozen=True)
class PhysicalParams:
    """Parámetros del emisor"""
    gamma0: float = 1.0
    omega0: float = 0.0
    chirality: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma0) and self.gamma0 > 0):
            raise ValidationError(f"gamma0 debe ser positivo y finito (recibido {self.gamma0})", 'gamma0')
        if not math.isfinite(self.omega0):
            raise ValidationError(f"omega0 debe ser finito (recibido {self.omega0})", 'omega0')
        if self.chirality not in CHIRALITIES:
            raise ValidationError(f"chirality debe ser 1.0 o 0.5 (recibido {self.chirality})", 'chirality')

    @property
    def kappa(self) -> complex:
        """Tasa compleja iω0 + Γ0 del decaimiento del estado excitado"""
        return complex(self.gamma0, self.omega0)

    @property
    def is_chiral(self) -> bool:
        return self.chirality == 1.0

    def to_dict(self) -> dict:
        return {'gamma0': self.gamma0, 'omega0': self.omega0, 'chirality': self.chirality}


@dataclass(frozen=True)
class TimeGrid:
    """Rejilla temporal uniforme t_i = t_min + i·h, i = 0..n-1 (n impar)"""
    t_min: float
    t_max: float
    n: int

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise ValidationError(f"n debe ser impar y >= 3 (recibido {self.n})", 'n')
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max)) or self.t_max <= self.t_min:
            raise ValidationError(f"ventana vacía [{self.t_min}, {self.t_max}]", 'window')

    @property
    def h(self) -> float:
        return (self.t_max - self.t_min) / (self.n - 1)

    @property
    def times(self) -> np.ndarray:
        return self.t_min + self.h * np.arange(self.n)

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        """Índice del nodo que coincide con t (error si t no es un nodo)"""
        pos = (t - self.t_min) / self.h
        idx = int(round(pos))
        if idx < 0 or idx >= self.n or abs(pos - idx) > tol * max(1.0, abs(pos)):
            raise ValidationError(f"t = {t} no es un nodo de la rejilla", 't')
        return idx

    def same_as(self, other: 'TimeGrid') -> bool:
        return self.n == other.n and self.t_min == other.t_min and self.t_max == other.t_max

    def to_dict(self) -> dict:
        return {'t_min': self.t_min, 't_max': self.t_max, 'n': self.n, 'h': self.h}


def make_time_grid(t_min: float, t_max: float, n: int) -> TimeGrid:
    """Construye la rejilla validando n impar y ventana no vacía"""
    return TimeGrid(float(t_min), float(t_max), int(n))


def s_coeff(delta: ArrayLike, params: PhysicalParams = PhysicalParams()) -> ArrayLike:
    """
    Amplitud de dispersión de un fotón con cambio de estado

    s(δ) = c·(−iΓ0)/(δ + iΓ0), con δ la desintonía respecto a ω0.
    """
    g = params.gamma0
    return params.chirality * (-1j * g) / (np.asarray(delta) + 1j * g)


def t_coeff(delta: ArrayLike, params: PhysicalParams = PhysicalParams()) -> ArrayLike:
    """Amplitud de transmisión sin cambio de estado, t = 1 + s"""
    return 1.0 + s_coeff(delta, params)
