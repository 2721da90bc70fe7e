"""
=============================================================================
MÓDULO: Jerarquía de Errores del Kit
=============================================================================

Todas las excepciones del kit derivan de ToolkitError y nombran el
invariante violado, de modo que la CLI puede traducirlas a códigos de salida.

ARQUITECTURA:
- Errores de entrada (parseo, validación de estados, parámetros fuera de rango)
- Errores numéricos (caminos de cálculo que discrepan)
- Errores de dominio (quiralidad indefinida, degeneraciones, cardinalidad)
"""

from typing import Optional


class ToolkitError(Exception):
    """Error base del kit. `invariant` identifica la regla violada."""

    invariant: str = "toolkit"

    def __init__(self, message: str, invariant: Optional[str] = None):
        super().__init__(message)
        if invariant is not None:
            self.invariant = invariant


# =============================================================================
# ERRORES DE ENTRADA
# =============================================================================


class StateParseError(ToolkitError):
    """Archivo de estado ilegible o con formato incorrecto."""

    invariant = "format"


class StateValidationError(ToolkitError):
    """Una matriz no cumple hermiticidad, traza unitaria o positividad."""

    invariant = "state"


class NormalizationError(StateValidationError):
    invariant = "normalization"


class RangeError(StateValidationError):
    """Parámetro fuera de su dominio (p.ej. ε de Werner)."""

    invariant = "range"


class PositivityError(RangeError):
    invariant = "positivity"


class WeightError(StateValidationError):
    """Pesos de un ensemble negativos o que no suman 1."""

    invariant = "weights"


# =============================================================================
# ERRORES NUMÉRICOS Y DE DOMINIO
# =============================================================================


class NumericalError(ToolkitError):
    invariant = "numerical"


class PathDisagreement(NumericalError):
    """Los caminos Det{c} y −16·Det{𝒢} no coinciden dentro de tolerancia."""

    invariant = "dual-path"


class ChiralityUndefined(ToolkitError):
    """Algún valor singular de c es nulo: la quiralidad no está definida."""

    invariant = "chirality"


class DegeneracyError(ToolkitError):
    invariant = "degeneracy"


class CardinalityError(ToolkitError):
    invariant = "cardinality"


class ConstraintError(ToolkitError):
    """Una perturbación no es hermítica o no tiene traza nula."""

    invariant = "constraint"
