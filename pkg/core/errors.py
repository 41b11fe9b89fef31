"""
Errores del Motor de Dispersión

Taxonomía única de errores del paquete. Cada clase lleva el código de
salida que usa la línea de comandos, así el runner solo tiene que
capturar ScatterError en la frontera.
"""

from typing import Optional


class ScatterError(Exception):
    """Error base del paquete"""
    exit_code = 1

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field

    def __str__(self) -> str:
        base = super().__str__()
        return f"{self.field}: {base}" if self.field else base


class ValidationError(ScatterError):
    """Parámetros físicos, de rejilla o de configuración inválidos"""
    exit_code = 2


class WindowError(ValidationError):
    """La ventana temporal no contiene el soporte del pulso"""


class DegeneratePulseError(ValidationError):
    """Pulso de norma nula (no se puede normalizar)"""


class MemoryBudgetError(ValidationError):
    """El tensor de tres fotones excede el presupuesto de memoria"""


class NumericalDiagnosticError(ScatterError):
    """Diagnóstico numérico fuera de banda (norma, fuga espectral)"""
    exit_code = 3


class OutputError(ScatterError):
    """Fallo de escritura de resultados"""
    exit_code = 4
