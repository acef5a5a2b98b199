"""
FLUJO - simulador de transferencia unidireccional de energía y estados cuánticos
mediante disipación de cavidad.
"""

__version__ = "1.0.0"
