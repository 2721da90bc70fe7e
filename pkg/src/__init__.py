"""
Kit de Análisis de Sinisterness para Pares de Qubits
Quiralidad de las correlaciones de Bloch como indicador de entrelazamiento
"""

__version__ = "1.0.0"
__author__ = "Kit de Sinisterness"
