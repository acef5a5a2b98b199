"""
Experimentos: una función ``run_*`` por subcomando, más carga de configuración
y escritura de resultados.
"""
