"""
=============================================================================
MÓDULO: Variaciones de Primer Orden
=============================================================================

Fórmulas analíticas para la respuesta de 𝒞 y 𝒮 a una perturbación ρ → ρ + λδρ,
validadas contra diferencias finitas con extrapolación de Richardson.

FUNDAMENTACIÓN TEÓRICA:
- Det{I + λA} = 1 + λ·t₁ + λ²(t₁² − t₂)/2 + λ³(t₁³ − 3t₁t₂ + 2t₃)/6
  + λ⁴(t₁⁴ − 6t₁²t₂ + 3t₂² + 8t₁t₃ − 6t₄)/24, tₖ = Tr{Aᵏ}; la serie termina
- δ𝒞 = Tr{𝒲·δρ} con el operador testigo del sistema bi-ortogonal
- δ𝒮 = −16·Tr{adj(𝒢(ρ))·𝒢(δρ)}
- Werner: δ𝒞_W = 2(Tr{Πρ′} − (3ε+1)/4), δ𝒮_W = 𝒮_W·(4/ε)(Tr{Πρ′} − (3ε+1)/4)
  sobre el camino (1−λ)ρ_W + λρ′

ARQUITECTURA:
- Funciones analíticas puras
- richardson_derivative: oráculo de diferencias finitas con guardia de
  positividad (se reduce λ a la mitad hasta que el paso sea factible)
- PerturbationReport: comparación serializable a JSON
"""

import logging
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel

from src.concurrence import biorthogonal_system, concurrence
from src.errors import ConstraintError, DegeneracyError, RangeError
from src.numerics import adjugate4
from src.sinisterness import g_array, sinisterness
from src.states import DensityMatrix, as_matrix, bell_projector, werner

logger = logging.getLogger(__name__)

CONSTRAINT_TOL = 1e-12
FEASIBILITY_TOL = 1e-14
MAX_HALVINGS = 30


# =============================================================================
# EXPANSIÓN DEL DETERMINANTE
# =============================================================================


def det_expansion(a: np.ndarray, lam: float, order: int) -> complex:
    """
    Suma parcial hasta λ^order de Det{I + λA} en trazas de potencias de A.

    Con order = 4 el resultado es exacto para cualquier A 4×4.
    """
    if order not in (1, 2, 3, 4):
        raise ValueError(f"order debe estar en 1..4, llegó {order}")
    mat = np.asarray(a, dtype=complex)
    powers = [mat]
    for _ in range(3):
        powers.append(powers[-1] @ mat)
    t1, t2, t3, t4 = (np.trace(p) for p in powers)
    coefficients = [
        1.0,
        t1,
        (t1**2 - t2) / 2,
        (t1**3 - 3 * t1 * t2 + 2 * t3) / 6,
        (t1**4 - 6 * t1**2 * t2 + 3 * t2**2 + 8 * t1 * t3 - 6 * t4) / 24,
    ]
    return complex(sum(c * lam**k for k, c in enumerate(coefficients[: order + 1])))


# =============================================================================
# VARIACIONES ANALÍTICAS
# =============================================================================


def _check_direction(delta: np.ndarray) -> np.ndarray:
    d = np.asarray(delta, dtype=complex)
    if d.shape != (4, 4):
        raise ConstraintError(f"δρ debe ser 4×4, forma {d.shape}")
    if np.max(np.abs(d - d.conj().T)) > CONSTRAINT_TOL:
        raise ConstraintError("δρ no es hermítica")
    if abs(np.trace(d)) > CONSTRAINT_TOL:
        raise ConstraintError(f"Tr{{δρ}} = {np.trace(d).real:.3e} ≠ 0")
    return d


def concurrence_variation(state: DensityMatrix, delta: np.ndarray) -> float:
    """
    δ𝒞 = Tr{𝒲·δρ}.

    Raises:
        ConstraintError: δρ no hermítica o con traza
        DegeneracyError: 𝒞 = 0, r₁ degenerado, o subespacios nulos
    """
    d = _check_direction(delta)
    if not np.any(d):
        return 0.0
    if concurrence(state) <= 1e-12:
        raise DegeneracyError("𝒞 = 0: la concurrencia no es diferenciable aquí")
    spectrum = biorthogonal_system(state)
    if spectrum.r[0] - spectrum.r[1] < 1e-8:
        raise DegeneracyError("r₁ degenerado: el signo del testigo no está definido")
    return float(np.real(np.trace(spectrum.witness() @ d)))


def sinisterness_variation(state: DensityMatrix, delta: np.ndarray) -> float:
    """δ𝒮 = −16·Tr{adj(𝒢(ρ))·𝒢(δρ)} (válida también con 𝒢 singular)."""
    d = _check_direction(delta)
    adj = adjugate4(g_array(as_matrix(state)))
    return float(-16.0 * np.real(np.trace(adj @ g_array(d))))


def werner_variation(epsilon: float, target: DensityMatrix) -> tuple[float, float]:
    """
    (δ𝒞_W, δ𝒮_W) sobre el camino (1−λ)ρ_W(ε) + λρ′.

    Raises:
        RangeError: ε ∉ (0, 1]
    """
    if not 0.0 < epsilon <= 1.0:
        raise RangeError(f"ε = {epsilon} fuera de (0, 1]")
    excess = float(np.real(np.trace(bell_projector() @ as_matrix(target)))) - (
        3 * epsilon + 1
    ) / 4
    delta_c = 2.0 * excess
    delta_s = -(epsilon**3) * (4.0 / epsilon) * excess
    return delta_c, delta_s


def project_to_werner_level(target: DensityMatrix, epsilon: float) -> DensityMatrix:
    """
    Mezcla ρ′ con Π o con (I−Π)/3 hasta que Tr{Πρ′} = (3ε+1)/4.
    """
    level = (3 * epsilon + 1) / 4
    rho = as_matrix(target)
    proj = bell_projector()
    x = float(np.real(np.trace(proj @ rho)))
    if x < level:
        t = (level - x) / (1 - x)
        mixed = (1 - t) * rho + t * proj
    else:
        t = 1 - level / x
        mixed = (1 - t) * rho + t * (np.eye(4) - proj) / 3
    return DensityMatrix(mixed)


# =============================================================================
# DIFERENCIAS FINITAS
# =============================================================================


class FiniteDifference(BaseModel):
    derivative: float
    step: float
    scheme: str
    halvings: int


def richardson_derivative(
    f: Callable[[float], float],
    step: float,
    feasible: Callable[[float], bool],
) -> FiniteDifference:
    """
    Derivada en 0 por diferencias centrales + un paso de Richardson.

    Si el punto hacia atrás no es factible tras MAX_HALVINGS reducciones se
    usan diferencias hacia delante (también extrapoladas).
    """
    h, halvings = step, 0
    while halvings < MAX_HALVINGS and not (feasible(h) and feasible(-h)):
        h /= 2
        halvings += 1
    if feasible(h) and feasible(-h):
        coarse = (f(h) - f(-h)) / (2 * h)
        fine = (f(h / 2) - f(-h / 2)) / h
        return FiniteDifference(
            derivative=(4 * fine - coarse) / 3, step=h, scheme="central", halvings=halvings
        )

    h, halvings = step, 0
    while not feasible(h):
        h /= 2
        halvings += 1
        if halvings > MAX_HALVINGS:
            raise ConstraintError("ningún paso factible en la dirección dada")
    f0 = f(0.0)
    coarse = (f(h) - f0) / h
    fine = (f(h / 2) - f0) / (h / 2)
    return FiniteDifference(
        derivative=2 * fine - coarse, step=h, scheme="forward", halvings=halvings
    )


def _path_oracles(
    rho: np.ndarray, delta: np.ndarray
) -> tuple[Callable[[float], bool], Callable[[float], float], Callable[[float], float]]:
    def feasible(lam: float) -> bool:
        return float(np.linalg.eigvalsh(rho + lam * delta)[0]) >= -FEASIBILITY_TOL

    def conc(lam: float) -> float:
        return concurrence(DensityMatrix(rho + lam * delta))

    def sinis(lam: float) -> float:
        return sinisterness(DensityMatrix(rho + lam * delta))

    return feasible, conc, sinis


def _relative_error(analytic: Optional[float], numeric: float) -> Optional[float]:
    if analytic is None:
        return None
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-12)


class PerturbationReport(BaseModel):
    """Comparación analítica vs diferencias finitas."""

    analytic_dc: Optional[float]
    analytic_ds: float
    numeric_dc: float
    numeric_ds: float
    step: float
    scheme: str
    halvings: int
    relative_error_dc: Optional[float]
    relative_error_ds: float


def _build_report(
    rho: np.ndarray,
    delta: np.ndarray,
    analytic_dc: Optional[float],
    analytic_ds: float,
    step: float,
) -> PerturbationReport:
    feasible, conc, sinis = _path_oracles(rho, delta)
    fd_c = richardson_derivative(conc, step, feasible)
    fd_s = richardson_derivative(sinis, step, feasible)
    if fd_c.halvings:
        logger.info(f"📉 Paso reducido {fd_c.halvings} veces para mantener ρ ≥ 0")
    return PerturbationReport(
        analytic_dc=analytic_dc,
        analytic_ds=analytic_ds,
        numeric_dc=fd_c.derivative,
        numeric_ds=fd_s.derivative,
        step=fd_c.step,
        scheme=fd_c.scheme,
        halvings=fd_c.halvings,
        relative_error_dc=_relative_error(analytic_dc, fd_c.derivative),
        relative_error_ds=_relative_error(analytic_ds, fd_s.derivative),
    )


def perturbation_report(
    state: DensityMatrix, delta: np.ndarray, step: float = 1e-5
) -> PerturbationReport:
    """
    Informe para una dirección arbitraria. δ𝒞 analítico queda en None si la
    concurrencia no es diferenciable en ρ.
    """
    d = _check_direction(delta)
    try:
        analytic_dc: Optional[float] = concurrence_variation(state, d)
    except DegeneracyError as e:
        logger.warning(f"⚠️ δ𝒞 analítico no disponible: {e}")
        analytic_dc = None
    return _build_report(
        as_matrix(state), d, analytic_dc, sinisterness_variation(state, d), step
    )


def werner_report(
    epsilon: float, target: DensityMatrix, step: float = 1e-5
) -> PerturbationReport:
    """Informe sobre el camino (1−λ)ρ_W + λρ′."""
    delta_c, delta_s = werner_variation(epsilon, target)
    base = werner(epsilon).matrix
    return _build_report(base, as_matrix(target) - base, delta_c, delta_s, step)
