"""
Lambda Scatter Runner - Dispersión de pocos fotones por un átomo Λ

Reproduce los datos de coeficientes de un fotón, funciones de onda de dos y
tres fotones, barridos de ⟨P_W⟩, optimización del pulso y verificación con
la matriz S. Solo escribe archivos de datos (CSV/JSON), sin gráficos.

Uso:
    python runner.py coeffs --deltas 0 0.5 1 2
    python runner.py wavefunction --delta 0 --gamma 0.5 --output out/wave2
    python runner.py wavefunction --photons 3 --delta 0 --gamma 0.2 --output out/wave3
    python runner.py sweep --photons 2 --output out/sweep2 --refine
    python runner.py optimize --photons 3 --n-max 4 --output out/opt3
    python runner.py oracle-check --output out/oracle
    python runner.py sweep --config sweep.json --threads 8

Códigos de salida:
    0 éxito | 2 validación | 3 diagnóstico numérico | 4 E/S
"""

import sys
import os
import argparse
import time
from datetime import datetime

# Añadir directorio raíz al path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# ─────────────────────────────────────────────────────────────────────────────
# Configuración de logging (antes de cualquier import del proyecto)
# ─────────────────────────────────────────────────────────────────────────────
import logging

logging.basicConfig(
    level=logging.INFO,  # El archivo de sesión recibe INFO
    format='%(levelname)s | %(name)s | %(message)s'
)

# Solo warnings y errores en consola
CONSOLE_HANDLERS = list(logging.getLogger().handlers)
for handler in CONSOLE_HANDLERS:
    handler.setLevel(logging.WARNING)

# Silenciar loggers ruidosos durante barridos largos
for noisy in ['core.pulse', 'core.scatter2', 'core.scatter3', 'core.workers']:
    logging.getLogger(noisy).setLevel(logging.ERROR)

logger = logging.getLogger('runner')
logger.setLevel(logging.INFO)

from core import __version__
from core.errors import OutputError, ScatterError
from core.optimize import OptimizationEngine
from core.settings import get_settings, load_settings, reset_settings
from services.commands import COMMAND_HANDLERS, CommandResult
from services.config import load_run_config
from services.logging import close_run_logger, get_run_logger, log_evaluation, log_event


# ─────────────────────────────────────────────────────────────────────────────
# Helpers de presentación
# ─────────────────────────────────────────────────────────────────────────────

def _sep(char='─', width=65):
    return char * width

def _header(title: str):
    print()
    print(_sep('═'))
    print(f"  {title}")
    print(_sep('═'))

def _section(title: str):
    print()
    print(_sep())
    print(f"  {title}")
    print(_sep())

def _ok(msg):   print(f"  ✅  {msg}")
def _warn(msg): print(f"  ⚠️   {msg}")
def _fail(msg): print(f"  ❌  {msg}")
def _info(msg): print(f"  ℹ️   {msg}")


# ─────────────────────────────────────────────────────────────────────────────
# Argumentos
# ─────────────────────────────────────────────────────────────────────────────

def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        description='Lambda Scatter Runner - Dispersión de pocos fotones y estados W',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Subcomandos:
  coeffs        : s, t, |s|², |t|² por desintonía
  wavefunction  : funciones de onda en rejilla (CSV por canal + mapa P_W)
  sweep         : barrido de ⟨P_W⟩ sobre (δ, γ)
  optimize      : óptimo gaussiano + optimización de forma con Hermite
  oracle-check  : verificación con la matriz S

Ejemplos:
  python runner.py coeffs --deltas 0 1
  python runner.py wavefunction --delta 0 --gamma 0.5 --output out/wave2
  python runner.py sweep --photons 3 --resolution 21 21 --output out/sweep3
  python runner.py optimize --photons 2 --start 1.0 1.0 --n-max 4 --output out/opt2
  python runner.py optimize --photons 2 --from-report out/opt2/optimum.json --n-max 6 --output out/opt2b

Variables de entorno:
  LAMBDA_SCATTER_THREADS  hilos por defecto si no se da --threads
  LAMBDA_SCATTER_LOG_DIR  directorio de logs de sesión (default ./logs)
  LAMBDA_SCATTER_CONFIG   ruta alternativa a scatter_config.json
        """
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config',  type=str, help='JSON con la configuración de la ejecución')
    common.add_argument('--settings', type=str, help='scatter_config.json alternativo')
    common.add_argument('--output',  type=str, help='Directorio de salida')
    common.add_argument('--threads', type=int, help='Hilos (default: LAMBDA_SCATTER_THREADS o núcleos)')
    common.add_argument('--verbose', action='store_true', help='Logging INFO en consola')

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('coeffs', parents=[common], help='Coeficientes de un fotón')
    p.add_argument('--deltas', type=float, nargs='*', help='Desintonías (unidades de Γ0)')

    p = sub.add_parser('wavefunction', parents=[common], help='Funciones de onda')
    p.add_argument('--photons', type=int, choices=[2, 3])
    p.add_argument('--delta',   type=float, help='Desintonía central del pulso')
    p.add_argument('--gamma',   type=float, help='Ancho espectral del pulso')
    p.add_argument('--grid-n',  type=int, dest='grid_n', help='Puntos de la rejilla (impar)')
    p.add_argument('--slice-total', type=float, dest='slice_total', help='Plano t1+t2+t3 (tres fotones)')

    p = sub.add_parser('sweep', parents=[common], help='Barrido (δ, γ)')
    p.add_argument('--photons', type=int, choices=[2, 3])
    p.add_argument('--delta-range', type=float, nargs=2, dest='delta_range')
    p.add_argument('--gamma-range', type=float, nargs=2, dest='gamma_range')
    p.add_argument('--resolution',  type=int, nargs=2)
    p.add_argument('--n-cell', type=int, dest='n_cell')
    p.add_argument('--refine', action='store_true', default=None, help='Refinar el máximo del barrido')

    p = sub.add_parser('optimize', parents=[common], help='Optimización del pulso')
    p.add_argument('--photons', type=int, choices=[2, 3])
    p.add_argument('--start', type=float, nargs=2, help='Punto de partida (δ, γ)')
    p.add_argument('--from-report', type=str, dest='from_report',
                   help='Reutilizar el óptimo gaussiano de un optimum.json previo')
    p.add_argument('--n-max', type=int, dest='n_max', help='Orden máximo de Hermite')
    p.add_argument('--method', type=str, help='CG, BFGS o Nelder-Mead')
    p.add_argument('--gaussian-only', action='store_true', dest='gaussian_only',
                   help='Solo el óptimo gaussiano')

    sub.add_parser('oracle-check', parents=[common], help='Verificación con la matriz S')

    return parser.parse_args(argv)


def _overrides(args) -> dict:
    """Banderas del subcomando como claves de RunConfig"""
    values = {'output': args.output, 'threads': args.threads}
    if args.command == 'coeffs':
        values['deltas'] = args.deltas
    elif args.command == 'wavefunction':
        values.update(photons=args.photons, grid_n=args.grid_n, slice_total=args.slice_total)
        if args.delta is not None or args.gamma is not None:
            values['pulse'] = {'delta': args.delta, 'gamma': args.gamma}
    elif args.command == 'sweep':
        values.update(photons=args.photons, delta_range=args.delta_range, gamma_range=args.gamma_range,
                      resolution=args.resolution, n_cell=args.n_cell, refine=args.refine)
    elif args.command == 'optimize':
        values.update(photons=args.photons, start=args.start, from_report=args.from_report,
                      n_max=args.n_max, method=args.method)
        if args.gaussian_only:
            values['shape'] = False
    return values


def _print_result(result: CommandResult):
    if result.table is not None:
        if result.table.empty:
            print('  '.join(result.table.columns))
        else:
            print(result.table.to_string(index=False, float_format=lambda x: f"{x:.6f}"))
    summary = result.summary
    if result.command == 'wavefunction':
        rep = summary['report']
        _ok(f"⟨P_W⟩ = {rep['average']:.4f} (norma {rep['norm']:.5f})")
    elif result.command == 'sweep':
        if 'best' in summary:
            best = summary['best']
            _ok(f"Máximo del barrido {best['value']:.4f} en δ={best['delta']:.3f}, γ={best['gamma']:.3f}")
        if 'optimum' in summary:
            opt = summary['optimum']
            _ok(f"Refinado {opt['objective']:.4f} en δ={opt['delta']:.4f}, γ={opt['gamma']:.4f}")
    elif result.command == 'optimize':
        for key in ('gaussian', 'hermite'):
            if key in summary:
                opt = summary[key]
                line = f"{key}: {opt['objective']:.4f} en δ={opt['delta']:.4f}, γ={opt['gamma']:.4f}"
                (_ok if opt['converged'] else _warn)(line)
    elif result.command == 'oracle-check':
        (_ok if summary['passed'] else _fail)(f"Oráculo {'superado' if summary['passed'] else 'FALLIDO'}")
    for path in result.files:
        _info(path)


def main(argv=None) -> int:
    args = parse_args(argv)
    if args.verbose:
        for console in CONSOLE_HANDLERS:
            console.setLevel(logging.INFO)

    if args.settings:
        reset_settings(load_settings(args.settings))

    start_time = time.time()
    try:
        cfg = load_run_config(args.command, args.config, _overrides(args))
    except ScatterError as e:
        _fail(f"Configuración inválida: {e}")
        return e.exit_code

    quiet = args.command == 'coeffs' and not cfg.output
    if not quiet:
        _header(f"LAMBDA SCATTER — {args.command}")
        print(f"  Fecha      : {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        print(f"  Salida     : {cfg.output}")
        print(f"  Config     : {get_settings().source or 'valores por defecto'}")
        run_logger = get_run_logger()
        log_event(f"Inicio de {args.command}", "INFO", "SYSTEM")
        engine = OptimizationEngine(on_evaluation=log_evaluation)
        stats = run_logger.get_current_stats
    else:
        engine, stats = None, None

    handler = COMMAND_HANDLERS[args.command]
    try:
        result = handler(cfg, engine=engine, stats=stats)
    except ScatterError as e:
        logger.error(f"{type(e).__name__}: {e}")
        _fail(str(e))
        return e.exit_code
    except OSError as e:
        logger.error(f"Error de E/S: {e}", exc_info=True)
        _fail(f"Error de E/S: {e}")
        return OutputError.exit_code
    finally:
        if not quiet:
            close_run_logger()

    if not quiet:
        _section("Resultado")
    _print_result(result)
    if not quiet:
        elapsed = time.time() - start_time
        (_ok if result.exit_code == 0 else _warn)(f"Terminado en {elapsed:.1f}s (código {result.exit_code})")
    return result.exit_code


if __name__ == '__main__':
    sys.exit(main())
