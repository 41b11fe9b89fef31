"""
Pool de Hilos

Relleno paralelo de tensores por bloques disjuntos y mapeo ordenado de
tareas independientes. Las reducciones se hacen siempre después, sobre el
array completo, de modo que el resultado no depende del número de hilos.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .errors import ValidationError

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

THREADS_ENV = 'LAMBDA_SCATTER_THREADS'


def resolve_threads(threads: Optional[int] = None) -> int:
    """Hilos a usar: argumento → LAMBDA_SCATTER_THREADS → núcleos disponibles"""
    if threads is None:
        raw = os.getenv(THREADS_ENV)
        if raw:
            try:
                threads = int(raw)
            except ValueError:
                raise ValidationError(f"{THREADS_ENV} no es un entero: {raw!r}", 'threads')
    if threads is None:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ValidationError(f"threads debe ser >= 1 (recibido {threads})", 'threads')
    return int(threads)


def fill_slabs(count: int, fill: Callable[[int], None], threads: Optional[int] = None):
    """
    Ejecuta fill(i) para i = 0..count-1

    Cada llamada escribe solo su bloque i del tensor destino.
    """
    workers = min(resolve_threads(threads), max(count, 1))
    if workers == 1:
        for i in range(count):
            fill(i)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # list() propaga la primera excepción
        list(pool.map(fill, range(count)))


def map_ordered(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """map paralelo que conserva el orden de entrada"""
    items = list(items)
    workers = min(resolve_threads(threads), max(len(items), 1))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
