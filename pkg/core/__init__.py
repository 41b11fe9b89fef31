"""
Core Scattering Engine

Motor numérico de dispersión de pocos fotones por un átomo Λ en una guía
de ondas:
- Parámetros físicos, rejilla temporal y coeficientes de un fotón
- Envolventes de pulso e integrador de la respuesta lineal
- Funciones de onda de dos y tres fotones
- Probabilidades de conversión a estado W
- Oráculo de matriz S
- Barridos y optimización del pulso

El paquete no importa nada de services/; el runner es quien conecta.
"""

from .errors import (
    ScatterError,
    ValidationError,
    WindowError,
    DegeneratePulseError,
    MemoryBudgetError,
    NumericalDiagnosticError,
    OutputError,
)

from .settings import (
    ScatterSettings,
    get_settings,
    load_settings,
    reset_settings,
)

from .physics import (
    PhysicalParams,
    TimeGrid,
    make_time_grid,
    s_coeff,
    t_coeff,
)

from .pulse import (
    PulseShape,
    EnvelopeSeries,
    gaussian_pulse,
    hermite_pulse,
    pulse_from_spec,
    envelope,
    sample_envelope,
    pulse_norm,
    normalize,
    default_window,
    default_time_grid,
    anchored_time_grid,
    filtered_envelope,
    transmitted_envelope,
    pulse_series,
    phi_s_at,
    gaussian_filtered_closed_form,
)

from .scatter2 import (
    TwoPhotonWave,
    CHANNELS_2,
    scatter_two,
    psi2_pointwise,
)

from .scatter3 import (
    ThreePhotonWave,
    CHANNELS_3,
    scatter_three,
    psi3_pointwise,
)

from .wstate import (
    EntanglementReport,
    pw3_pointwise,
    pw3_average,
    pw3_map,
    pw4_pointwise,
    pw4_average,
    pw4_map,
    pw3_mono,
    pw4_mono,
    mono_maximum,
)

from .smatrix import (
    FrequencyGrid,
    MonoOracleResult,
    frequency_grid,
    s2_connected_kernel,
    s2_frequency_kernel,
    s2_pole_terms,
    s2_time_kernel,
    s3_time_kernel,
    pulse_spectrum,
    calibrate_two_photon_oracle,
    oracle_two_photon,
    oracle_three_photon_mono,
)

from .optimize import (
    OptimizationEngine,
    OptimizationStatistics,
    OptimumReport,
    SweepResult,
    get_optimization_engine,
    pw_objective,
    sweep,
    refine_max,
    optimize_pulse_shape,
    mono_column_check,
)

__version__ = '1.0.0'

__all__ = [
    # Errores
    'ScatterError',
    'ValidationError',
    'WindowError',
    'DegeneratePulseError',
    'MemoryBudgetError',
    'NumericalDiagnosticError',
    'OutputError',

    # Configuración
    'ScatterSettings',
    'get_settings',
    'load_settings',
    'reset_settings',

    # Física
    'PhysicalParams',
    'TimeGrid',
    'make_time_grid',
    's_coeff',
    't_coeff',

    # Pulso
    'PulseShape',
    'EnvelopeSeries',
    'gaussian_pulse',
    'hermite_pulse',
    'pulse_from_spec',
    'envelope',
    'sample_envelope',
    'pulse_norm',
    'normalize',
    'default_window',
    'default_time_grid',
    'anchored_time_grid',
    'filtered_envelope',
    'transmitted_envelope',
    'pulse_series',
    'phi_s_at',
    'gaussian_filtered_closed_form',

    # Dispersión
    'TwoPhotonWave',
    'CHANNELS_2',
    'scatter_two',
    'psi2_pointwise',
    'ThreePhotonWave',
    'CHANNELS_3',
    'scatter_three',
    'psi3_pointwise',

    # Estado W
    'EntanglementReport',
    'pw3_pointwise',
    'pw3_average',
    'pw3_map',
    'pw4_pointwise',
    'pw4_average',
    'pw4_map',
    'pw3_mono',
    'pw4_mono',
    'mono_maximum',

    # Oráculo
    'FrequencyGrid',
    'MonoOracleResult',
    'frequency_grid',
    's2_connected_kernel',
    's2_frequency_kernel',
    's2_pole_terms',
    's2_time_kernel',
    's3_time_kernel',
    'pulse_spectrum',
    'calibrate_two_photon_oracle',
    'oracle_two_photon',
    'oracle_three_photon_mono',

    # Optimización
    'OptimizationEngine',
    'OptimizationStatistics',
    'OptimumReport',
    'SweepResult',
    'get_optimization_engine',
    'pw_objective',
    'sweep',
    'refine_max',
    'optimize_pulse_shape',
    'mono_column_check',

    '__version__',
]
