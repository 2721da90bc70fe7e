"""
=============================================================================
MÓDULO: Descomposición de Bloch / Fano
=============================================================================

ρ = ¼(I + a·σ)⊗(I + b·σ) + ¼ Σ_ij c_ij σ_i⊗σ_j

FUNDAMENTACIÓN TEÓRICA:
- a_i = ⟨σ_i⊗I⟩, b_j = ⟨I⊗σ_j⟩ (vectores de Bloch locales)
- c_ij = ⟨σ_i⊗σ_j⟩ − a_i·b_j (matriz de correlaciones conexas)
- Γ_μν = ⟨σ_μ⊗σ_ν⟩ con σ_0 = I: Γ = [[1, bᵀ], [a, c + a·bᵀ]]
- Convención de Pauli: σ₁ = X, σ₂ = [[0, i], [−i, 0]], σ₃ = diag(−1, 1)

ARQUITECTURA:
- BlochData: modelo pydantic con a, b, c y Γ derivado
- decompose / fano_reconstruct / purity_from_gamma
"""

import logging
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.errors import NumericalError
from src.states import POSITIVITY_TOL, DensityMatrix, as_matrix

logger = logging.getLogger(__name__)

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_3 = np.array([[-1, 0], [0, 1]], dtype=complex)
PAULIS = np.stack([SIGMA_0, SIGMA_1, SIGMA_2, SIGMA_3])

# PAULI_PRODUCTS[μ, ν] = σ_μ ⊗ σ_ν
PAULI_PRODUCTS = np.einsum("mij,nkl->mnikjl", PAULIS, PAULIS).reshape(4, 4, 4, 4)

IMAG_TOL = 1e-9
BLOCH_TOL = 1e-10


class BlochData(BaseModel):
    """Vectores locales a, b y correlaciones conexas c de un estado."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @field_validator("a", "b", mode="before")
    @classmethod
    def _vector(cls, value: Any) -> np.ndarray:
        arr = np.asarray(value, dtype=float)
        if arr.shape != (3,):
            raise ValueError(f"vector de Bloch de forma {arr.shape}, se esperaba (3,)")
        return arr

    @field_validator("c", mode="before")
    @classmethod
    def _matrix(cls, value: Any) -> np.ndarray:
        arr = np.asarray(value, dtype=float)
        if arr.shape != (3, 3):
            raise ValueError(f"c de forma {arr.shape}, se esperaba (3, 3)")
        return arr

    @property
    def gamma(self) -> np.ndarray:
        """Matriz 4×4 de expectaciones Γ_μν = ⟨σ_μ⊗σ_ν⟩."""
        g = np.empty((4, 4))
        g[0, 0] = 1.0
        g[0, 1:] = self.b
        g[1:, 0] = self.a
        g[1:, 1:] = self.c + np.outer(self.a, self.b)
        return g

    def within_bounds(self, tol: float = BLOCH_TOL) -> bool:
        """|a|, |b| ≤ 1 y |Γ_ij| ≤ 1."""
        return bool(
            np.linalg.norm(self.a) <= 1 + tol
            and np.linalg.norm(self.b) <= 1 + tol
            and np.all(np.abs(self.gamma) <= 1 + tol)
        )

    def to_json_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist(), "c": self.c.tolist()}

    @classmethod
    def from_gamma(cls, gamma: np.ndarray) -> "BlochData":
        g = np.asarray(gamma, dtype=float)
        a, b = g[1:, 0], g[0, 1:]
        return cls(a=a, b=b, c=g[1:, 1:] - np.outer(a, b))


def expectation_matrix(rho: np.ndarray) -> np.ndarray:
    """Γ_μν = Tr{ρ·σ_μ⊗σ_ν} en complejo (sin proyectar)."""
    return np.einsum("mnij,ji->mn", PAULI_PRODUCTS, rho)


def decompose(state: DensityMatrix) -> BlochData:
    """
    Descomposición de Fano de un estado.

    Un estado semidefinido positivo cumple |a|, |b| ≤ 1 y |Γ_ij| ≤ 1; las
    matrices no físicas (validate=False) se descomponen sin esa cota.

    Raises:
        NumericalError: si alguna expectación tiene |Im| > 1e−9, o si un
            estado físico da datos de Bloch fuera de las cotas
    """
    rho = as_matrix(state)
    gamma = expectation_matrix(rho)
    worst = float(np.max(np.abs(gamma.imag)))
    if worst > IMAG_TOL:
        raise NumericalError(f"expectación con parte imaginaria {worst:.3e}")
    data = BlochData.from_gamma(gamma.real)
    if not data.within_bounds():
        hermitian = (rho + rho.conj().T) / 2
        if float(np.linalg.eigvalsh(hermitian)[0]) >= -POSITIVITY_TOL:
            raise NumericalError("datos de Bloch fuera de |a|, |b|, |Γ_ij| ≤ 1")
    return data


def fano_reconstruct(data: BlochData) -> DensityMatrix:
    """
    ρ = ¼ Σ_μν Γ_μν σ_μ⊗σ_ν.

    No se exige positividad: datos arbitrarios pueden dar una matriz no
    física (ver DensityMatrix.is_positive_semidefinite()).
    """
    rho = np.einsum("mn,mnij->ij", data.gamma, PAULI_PRODUCTS) / 4
    matrix = DensityMatrix(rho, validate=False)
    if not matrix.is_positive_semidefinite():
        logger.debug("⚠️ Reconstrucción de Fano no semidefinida positiva")
    return matrix


def purity_from_gamma(gamma: np.ndarray) -> float:
    """Tr{ρ²} = Tr{ΓᵀΓ}/4."""
    g = np.asarray(gamma, dtype=float)
    return float(np.trace(g.T @ g) / 4)


def single_qubit_bloch(psi: np.ndarray) -> np.ndarray:
    """Vector de Bloch ⟨ψ|σ|ψ⟩ de un qubit puro."""
    vec = np.asarray(psi, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return np.real(np.einsum("i,kij,j->k", vec.conj(), PAULIS[1:], vec))
