"""
=============================================================================
MÓDULO: Sinisterness de Dos Qubits
=============================================================================

𝒮 = Det{c}: determinante de la matriz de correlaciones conexas. Un valor
negativo indica que los marcos de la SVD de c tienen quiralidad opuesta
(una transformación propia y otra impropia).

FUNDAMENTACIÓN TEÓRICA:
- Camino observable: Det{c} por Levi-Civita sobre decompose(ρ).c
- Camino de referencia: 𝒮 = −16·Det{𝒢}, con 𝒢_{(a,c),(b,d)} = ρ_{ab,cd}
  (reordenamiento con transposición parcial de los elementos de ρ)
- Γ = 2·W𝒢Wᵀ con filas de W = vec(σ_μᵀ)/√2 y Det{W} = i
- Formas cerradas: puro −𝒞⁴, Werner −ε³, estados X −16(v²−u²)(qt−rs)

ARQUITECTURA:
- g_array / g_matrix: construcción de 𝒢
- sinisterness: camino 𝒢 con verificación cruzada opcional
- chiral_svd / classify_chirality: estructura quiral de c
- sinisterness_closed_form: casos especiales analíticos
"""

import logging
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.bloch import PAULIS, BlochData, decompose
from src.errors import ChiralityUndefined, NumericalError, PathDisagreement, RangeError
from src.numerics import det3_levi_civita, svd3
from src.states import (
    DensityMatrix,
    PureState,
    XStateParams,
    as_matrix,
    bell_projector,
)

logger = logging.getLogger(__name__)

CHIRALITY_THRESHOLD = 1e-12
DUAL_PATH_TOL = 1e-9
SEPARABLE_BOUND = 1.0 / 27.0


# =============================================================================
# MATRIZ 𝒢
# =============================================================================


def g_array(rho: np.ndarray) -> np.ndarray:
    """𝒢[2a+c, 2b+d] = ρ[2a+b, 2c+d]."""
    return np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def g_matrix(state: DensityMatrix) -> np.ndarray:
    """𝒢(ρ) como array complejo 4×4."""
    return g_array(as_matrix(state))


def w_matrix() -> np.ndarray:
    """Cambio de base W con filas vec(σ_μᵀ)/√2 (orden fila mayor sobre (a, c))."""
    return np.stack([p.T.reshape(4) for p in PAULIS]) / np.sqrt(2)


def gamma_from_g(g: np.ndarray) -> np.ndarray:
    """Γ = 2·W𝒢Wᵀ (parte real)."""
    w = w_matrix()
    return np.real(2 * w @ np.asarray(g, dtype=complex) @ w.T)


def werner_inverse_g(epsilon: float) -> np.ndarray:
    """𝒢_W⁻¹ = (2/ε)·[I + (ε−1)Π]."""
    if epsilon == 0:
        raise RangeError("𝒢_W es singular en ε = 0")
    return (2.0 / epsilon) * (np.eye(4) + (epsilon - 1.0) * bell_projector())


# =============================================================================
# SINISTERNESS
# =============================================================================


def sinisterness_from_array(rho: np.ndarray) -> float:
    """−16·Det{𝒢(ρ)} sobre un array, sin validar el estado."""
    det = np.linalg.det(g_array(rho))
    if abs(det.imag) > 1e-9:
        raise NumericalError(f"Det{{𝒢}} con parte imaginaria {det.imag:.3e}")
    return float(-16.0 * det.real)


def sinisterness_observable(state: DensityMatrix) -> float:
    """Det{c} de la descomposición de Bloch (camino de observables)."""
    return det3_levi_civita(decompose(state).c)


def sinisterness(
    state: DensityMatrix, cross_check: bool = False, tol: float = DUAL_PATH_TOL
) -> float:
    """
    Sinisterness por el camino −16·Det{𝒢}.

    Args:
        state: Estado validado
        cross_check: Si True, compara con Det{c} del camino de Bloch
        tol: Tolerancia relativa tol·(1+|𝒮|) de la comparación

    Raises:
        PathDisagreement: si los dos caminos discrepan
    """
    value = sinisterness_from_array(as_matrix(state))
    if cross_check:
        observable = sinisterness_observable(state)
        if abs(observable - value) > tol * (1 + abs(value)):
            raise PathDisagreement(
                f"Det{{c}} = {observable!r} vs −16·Det{{𝒢}} = {value!r}"
            )
    return value


# =============================================================================
# QUIRALIDAD
# =============================================================================


class ChiralSVD(BaseModel):
    """c = U·diag(s)·Vᵀ con los signos de quiralidad Det U, Det V."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    det_u: int
    det_v: int

    @property
    def sinister(self) -> bool:
        return self.det_u * self.det_v == -1 and float(np.prod(self.s)) > CHIRALITY_THRESHOLD

    @property
    def classification(self) -> str:
        return "sinister" if self.det_u * self.det_v == -1 else "dexter"

    def determinant(self) -> float:
        """Det U·Det V·s₁s₂s₃ (= Det{c})."""
        return float(self.det_u * self.det_v * np.prod(self.s))


def chiral_svd(c: np.ndarray, threshold: float = CHIRALITY_THRESHOLD) -> ChiralSVD:
    """
    SVD quiral de la matriz de correlaciones.

    Raises:
        ChiralityUndefined: si algún valor singular < threshold
    """
    u, s, v = svd3(c)
    if s[-1] < threshold:
        raise ChiralityUndefined(
            f"valor singular mínimo {s[-1]:.3e} < {threshold}: signos de quiralidad no definidos"
        )
    return ChiralSVD(
        u=u,
        s=s,
        v=v,
        det_u=int(np.sign(np.linalg.det(u))),
        det_v=int(np.sign(np.linalg.det(v))),
    )


def classify_chirality(
    c: np.ndarray, threshold: float = CHIRALITY_THRESHOLD
) -> tuple[str, Optional[ChiralSVD]]:
    """("sinister" | "dexter" | "undefined", SVD o None)."""
    try:
        svd = chiral_svd(c, threshold)
    except ChiralityUndefined:
        return "undefined", None
    return svd.classification, svd


def primed_frames(data: BlochData) -> BlochData:
    """
    Bloch en los marcos de la SVD: a′ = Uᵀa, b′ = Vᵀb, c′ = diag(s).
    """
    u, s, v = svd3(data.c)
    return BlochData(a=u.T @ data.a, b=v.T @ data.b, c=np.diag(s))


# =============================================================================
# FORMAS CERRADAS
# =============================================================================


def pure_concurrence(psi: Union[PureState, Any]) -> float:
    """2|αδ − βγ| de un estado puro normalizado."""
    state = psi if isinstance(psi, PureState) else PureState(amplitudes=psi)
    alpha, beta, gamma, delta = state.amplitudes / state.norm()
    return float(2 * abs(alpha * delta - beta * gamma))


def x_state_sinisterness(p: XStateParams) -> float:
    return float(-16.0 * (p.v**2 - p.u**2) * (p.q * p.t - p.r * p.s))


def x_state_concurrence(p: XStateParams) -> float:
    return float(2 * max(p.u - np.sqrt(p.q * p.t), p.v - np.sqrt(p.r * p.s), 0.0))


def werner_concurrence(epsilon: float) -> float:
    return max((3 * epsilon - 1) / 2, 0.0)


def sinisterness_closed_form(kind: str, params: Any = None) -> float:
    """
    Forma cerrada de 𝒮 para una familia de estados.

    Args:
        kind: "pure" | "werner" | "x-state" | "classical" | "werner-from-concurrence"
        params: amplitudes / ε / XStateParams / 𝒞 según el caso

    Raises:
        RangeError: parámetros inválidos para la familia
    """
    if kind == "pure":
        return -pure_concurrence(params) ** 4
    if kind == "werner":
        eps = float(params)
        if not -1.0 / 3.0 - 1e-12 <= eps <= 1.0 + 1e-12:
            raise RangeError(f"ε = {eps} fuera de [−1/3, 1]")
        return -(eps**3)
    if kind == "x-state":
        p = params if isinstance(params, XStateParams) else XStateParams(**params)
        if p.u > np.sqrt(p.r * p.s) + 1e-15 or p.v > np.sqrt(p.q * p.t) + 1e-15:
            raise RangeError("parámetros X no positivos")
        return x_state_sinisterness(p)
    if kind == "classical":
        return 0.0
    if kind == "werner-from-concurrence":
        conc = float(params)
        if not 0.0 < conc <= 1.0:
            raise RangeError(f"𝒞 = {conc} fuera de (0, 1]")
        return -(((2 * conc + 1) / 3) ** 3)
    raise RangeError(f"familia desconocida: {kind!r}")


def pure_overlap_symmetry(psi: np.ndarray, phi: np.ndarray) -> tuple[complex, complex]:
    """(⟨ψ̃|φ⟩, ⟨φ̃|ψ⟩) con |ψ̃⟩ = σ₂⊗σ₂|ψ*⟩."""
    flip = np.kron(PAULIS[2], PAULIS[2])
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    psi_tilde = flip @ psi.conj()
    phi_tilde = flip @ phi.conj()
    return complex(np.vdot(psi_tilde, phi)), complex(np.vdot(phi_tilde, psi))
