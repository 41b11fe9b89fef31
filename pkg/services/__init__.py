"""
Services Package

Servicios transversales del runner:
- Logging de sesión
- Configuración de ejecución (RunConfig)
- Exportación CSV/JSON y manifiesto
- Subcomandos
"""

from .logging import (
    RunLogger,
    get_run_logger,
    close_run_logger,
    log_event,
    log_evaluation,
)

from .config import (
    RunConfig,
    COMMANDS,
    build_run_config,
    load_run_config,
)

from .export import (
    coefficient_frame,
    two_photon_frames,
    three_photon_slice_frames,
    write_csv,
    write_json,
    write_manifest,
)

from .commands import (
    CommandResult,
    COMMAND_HANDLERS,
    cmd_coeffs,
    cmd_wavefunction,
    cmd_sweep,
    cmd_optimize,
    cmd_oracle_check,
)

__all__ = [
    # Logging
    'RunLogger',
    'get_run_logger',
    'close_run_logger',
    'log_event',
    'log_evaluation',

    # Configuración
    'RunConfig',
    'COMMANDS',
    'build_run_config',
    'load_run_config',

    # Exportación
    'coefficient_frame',
    'two_photon_frames',
    'three_photon_slice_frames',
    'write_csv',
    'write_json',
    'write_manifest',

    # Comandos
    'CommandResult',
    'COMMAND_HANDLERS',
    'cmd_coeffs',
    'cmd_wavefunction',
    'cmd_sweep',
    'cmd_optimize',
    'cmd_oracle_check',
]
