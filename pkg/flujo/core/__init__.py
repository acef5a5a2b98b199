"""
Core de FLUJO: álgebra lineal, espacio de Hilbert, modelo, dinámica, análisis y
observables. Lógica pura, sin E/S.
"""
