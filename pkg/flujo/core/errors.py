"""
Errores del simulador.

El core solo define y lanza excepciones; las capas (CLI/experimentos) se encargan
del formato de salida y del código de salida del proceso.
"""

from typing import Any, Dict, Optional


class FlujoError(Exception):
    """Error base de FLUJO."""
    pass


class ShapeError(FlujoError):
    """Dimensiones incompatibles entre matrices u operadores."""
    pass


class ContractError(FlujoError):
    """Precondición violada (p. ej. matriz no hermítica donde se exige hermiticidad)."""
    pass


class ParameterError(FlujoError):
    """Parámetros físicos inválidos (invariantes de ModelParams, sitios, pares)."""
    pass


class DegenerateAngleError(ParameterError):
    """Ángulo de mezcla indefinido: Δ = 0 y g = 0 a la vez."""
    pass


class IntegrationError(FlujoError):
    """Fallo del integrador (paso demasiado pequeño, rigidez)."""

    def __init__(self, message: str, diagnostic: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class IntegrityError(FlujoError):
    """Una trayectoria rompió traza, hermiticidad o positividad más allá del umbral."""
    pass


class ConfigError(FlujoError):
    """Error de configuración (archivo faltante, formato inválido, esquema)."""
    pass
