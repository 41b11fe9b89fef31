"""
Logging de Sesión

Un archivo de log por ejecución del runner (logs/logs_{timestamp}.txt o el
directorio de LAMBDA_SCATTER_LOG_DIR), eventos importantes con emoji por
componente y estadísticas agregadas de las evaluaciones del objetivo, que
se vuelcan periódicamente y al cerrar la sesión.
"""

import json
import logging
import os
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime
from typing import Dict, List, Optional, TextIO, Tuple

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

load_dotenv()

LOG_DIR_ENV = 'LAMBDA_SCATTER_LOG_DIR'


@dataclass
class EvaluationStats:
    """Estadísticas agregadas de evaluaciones del objetivo"""
    evaluations: int = 0
    invalid: int = 0
    best_objective: float = 0.0
    best_point: Optional[Tuple[float, ...]] = None
    by_kind: Dict[str, int] = field(default_factory=lambda: defaultdict(int))


class RunLogger:
    """
    Logger de sesión del runner

    Características:
    - Archivo de log único por sesión con cabecera
    - Handler de archivo sobre el logger raíz (captura todos los módulos)
    - Eventos importantes a consola con emoji por componente
    - Estadísticas de evaluaciones con volcado periódico
    """

    def __init__(self, logs_dir: Optional[str] = None, dump_every: int = 200,
                 stream: Optional[TextIO] = None):
        """
        Args:
            logs_dir: Directorio de logs (None = LAMBDA_SCATTER_LOG_DIR o ./logs)
            dump_every: Evaluaciones entre volcados de estadísticas
            stream: Destino de los eventos en consola (por defecto stderr)
        """
        self.dump_every = max(int(dump_every), 1)
        self.stream = stream or sys.stderr
        self.stats = EvaluationStats()
        self.session_start = datetime.now()

        self.recent_events: List[Dict] = []
        self.max_recent_events = 100

        self.logs_dir = logs_dir or os.getenv(LOG_DIR_ENV) or os.path.join(os.getcwd(), 'logs')
        self.current_log_file: Optional[str] = None
        self._handler: Optional[logging.Handler] = None

        self.emoji_map = {
            'SWEEP': '🔍',
            'OPTIMIZE': '🎯',
            'SHAPE': '🧬',
            'SCATTER': '💫',
            'ORACLE': '🔬',
            'EXPORT': '💾',
            'CONFIG': '🔧',
            'SYSTEM': '🤖',
            'ERROR': '❌',
            'WARNING': '⚠️',
            'SUCCESS': '✅',
            'INFO': '📝'
        }

        self._setup_logging_system()

    def _setup_logging_system(self):
        """Crea el archivo de la sesión y engancha el handler de archivo"""
        try:
            os.makedirs(self.logs_dir, exist_ok=True)

            timestamp = self.session_start.strftime('%Y-%m-%d_%H-%M-%S')
            log_filename = f'logs_{timestamp}.txt'
            self.current_log_file = os.path.join(self.logs_dir, log_filename)

            with open(self.current_log_file, 'a', encoding='utf-8') as f:
                f.write(f"=== RUN STARTED: {self.session_start.strftime('%Y-%m-%d %H:%M:%S')} ===\n")
                f.write(f"=== LOG FILE: {log_filename} ===\n")
                f.write("=" * 60 + "\n\n")

            self._setup_standard_logging()

        except OSError as e:
            # Sin archivo la sesión sigue solo con consola
            self.current_log_file = None
            logger.warning(f"No se pudo crear el archivo de log en {self.logs_dir}: {e}")

    def _setup_standard_logging(self):
        root_logger = logging.getLogger()
        target = os.path.abspath(self.current_log_file)
        existing = [
            h for h in root_logger.handlers
            if isinstance(h, logging.FileHandler) and getattr(h, 'baseFilename', None) == target
        ]
        if existing:
            self._handler = existing[0]
            return
        fh = logging.FileHandler(self.current_log_file, encoding='utf-8')
        fh.setLevel(logging.INFO)
        fh.setFormatter(logging.Formatter(
            '[%(asctime)s] %(levelname)s - %(name)s: %(message)s',
            datefmt='%H:%M:%S'
        ))
        root_logger.addHandler(fh)
        self._handler = fh

    def log_important_event(self, message: str, level: str = "INFO", component: str = "SYSTEM"):
        """
        Evento que aparece inmediatamente en consola y en el archivo

        Args:
            message: Mensaje del evento
            level: INFO, WARNING o ERROR
            component: Componente que lo genera (clave de emoji_map)
        """
        timestamp = datetime.now().strftime('%H:%M:%S')
        emoji = self.emoji_map.get(component, self.emoji_map.get(level, '📝'))
        try:
            print(f"[{timestamp}] {emoji} {component}: {message}", file=self.stream)
        except (OSError, ValueError):
            pass

        log_level = getattr(logging, level.upper(), logging.INFO)
        logger.log(log_level, f"{component}: {message}")

        self._add_recent_event({
            'timestamp': datetime.now().isoformat(),
            'type': 'important_event',
            'level': level,
            'component': component,
            'message': message
        })

    def log_evaluation(self, kind: str, point: Tuple[float, ...], value: float, valid: bool):
        """Registra una evaluación del objetivo (agregada, sin línea propia)"""
        self.stats.evaluations += 1
        self.stats.by_kind[kind] += 1
        if not valid:
            self.stats.invalid += 1
        elif value > self.stats.best_objective:
            self.stats.best_objective = value
            self.stats.best_point = tuple(float(x) for x in point)

        self._add_recent_event({
            'timestamp': datetime.now().isoformat(),
            'type': 'evaluation',
            'kind': kind,
            'point': [float(x) for x in point],
            'value': value,
            'valid': valid
        })

        if self.stats.evaluations % self.dump_every == 0:
            self._dump_periodic_stats()

    def _add_recent_event(self, event: Dict):
        self.recent_events.append(event)
        if len(self.recent_events) > self.max_recent_events:
            self.recent_events = self.recent_events[-self.max_recent_events:]

    def _dump_periodic_stats(self):
        if self.stats.evaluations == 0:
            return
        elapsed = (datetime.now() - self.session_start).total_seconds()
        kinds = ", ".join(f"{k}({n})" for k, n in sorted(self.stats.by_kind.items()))
        self.log_important_event(
            f"📊 RESUMEN {elapsed:.0f}s: {self.stats.evaluations} evaluaciones ({kinds}), "
            f"{self.stats.invalid} inválidas, mejor {self.stats.best_objective:.5f}",
            "INFO", "SYSTEM"
        )

    def get_current_stats(self) -> Dict:
        """Estadísticas actuales (para el manifiesto)"""
        return {
            'session_start': self.session_start.isoformat(),
            'evaluations': self.stats.evaluations,
            'invalid': self.stats.invalid,
            'best_objective': self.stats.best_objective,
            'best_point': list(self.stats.best_point) if self.stats.best_point else None,
            'by_kind': dict(self.stats.by_kind),
            'current_log_file': os.path.basename(self.current_log_file) if self.current_log_file else None
        }

    def get_recent_events(self, count: int = 20) -> List[Dict]:
        return self.recent_events[-count:] if count > 0 else self.recent_events

    def export_session_log(self) -> str:
        """Estado de la sesión en JSON"""
        return json.dumps({
            'current_stats': self.get_current_stats(),
            'recent_events': self.get_recent_events(self.max_recent_events),
            'log_file': self.current_log_file
        }, indent=2, ensure_ascii=False)

    def _write_session_export(self):
        """Guarda export_session_log junto al archivo de log (logs_{timestamp}.json)"""
        if not self.current_log_file:
            return
        path = os.path.splitext(self.current_log_file)[0] + '.json'
        try:
            with open(path, 'w', encoding='utf-8') as f:
                f.write(self.export_session_log())
        except OSError as e:
            logger.warning(f"No se pudo guardar el resumen de sesión en {path}: {e}")

    def close(self):
        """Vuelca las estadísticas finales, guarda el resumen JSON y suelta el handler de archivo"""
        self._dump_periodic_stats()
        self._write_session_export()
        if self._handler is not None:
            logging.getLogger().removeHandler(self._handler)
            self._handler.close()
            self._handler = None


# Instancia global del logger de sesión (se crea en el primer uso)
_run_logger: Optional[RunLogger] = None


def get_run_logger() -> RunLogger:
    """Obtiene la instancia global del logger de sesión"""
    global _run_logger
    if _run_logger is None:
        _run_logger = RunLogger()
    return _run_logger


def close_run_logger():
    global _run_logger
    if _run_logger is not None:
        _run_logger.close()
        _run_logger = None


def log_event(message: str, level: str = "INFO", component: str = "SYSTEM"):
    """Función de conveniencia para eventos importantes"""
    get_run_logger().log_important_event(message, level, component)


def log_evaluation(kind: str, point: Tuple[float, ...], value: float, valid: bool):
    """Función de conveniencia para evaluaciones del objetivo (firma del callback del motor)"""
    get_run_logger().log_evaluation(kind, point, value, valid)
