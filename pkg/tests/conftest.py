"""
Fixtures compartidas de la suite

Cada test parte de la configuración por defecto y de un oráculo sin
calibrar; los logs de sesión van a un directorio temporal.
"""

import os
import sys

import numpy as np
import pytest

# Agregar la raíz del proyecto al path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.physics import PhysicalParams
from core.pulse import default_time_grid, gaussian_pulse, hermite_pulse
from core.settings import ScatterSettings, reset_settings
from core.smatrix import reset_oracle_calibration


@pytest.fixture(autouse=True)
def default_settings():
    reset_settings(ScatterSettings())
    yield
    reset_settings(None)
    reset_oracle_calibration()


@pytest.fixture(autouse=True)
def log_dir(tmp_path, monkeypatch):
    path = tmp_path / 'logs'
    monkeypatch.setenv('LAMBDA_SCATTER_LOG_DIR', str(path))
    return path


@pytest.fixture
def params():
    return PhysicalParams()


@pytest.fixture
def resonant_pulse():
    """Gaussiano δ = 0, γ = 0.5"""
    return gaussian_pulse(0.0, 0.5)


@pytest.fixture
def resonant_grid(resonant_pulse, params):
    return default_time_grid(resonant_pulse, params, photons=2)


@pytest.fixture
def random_shapes(params):
    """Cinco pulsos con δ ∈ [0, 2], γ ∈ [0.2, 1.5] y correcciones de Hermite pequeñas"""
    rng = np.random.default_rng(20240611)
    shapes = []
    for _ in range(5):
        delta = rng.uniform(0.0, 2.0)
        gamma = rng.uniform(0.2, 1.5)
        a3, b3 = rng.uniform(-0.03, 0.03, size=2)
        coefficients = (complex(0.0, rng.uniform(-0.05, 0.05)), complex(a3, b3))
        shapes.append(hermite_pulse(delta, gamma, coefficients, params=params))
    return shapes
