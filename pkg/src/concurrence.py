"""
=============================================================================
MÓDULO: Concurrencia de Wootters
=============================================================================

𝒞 = max{√r₁ − √r₂ − √r₃ − √r₄, 0} con rₙ autovalores (descendentes) de la
matriz no hermítica ℛ = ρ̃ρ, ρ̃ = (σ₂⊗σ₂)ρ*(σ₂⊗σ₂).

FUNDAMENTACIÓN TEÓRICA:
- Espectro de ℛ: con ρ = XX†, los rₙ no nulos coinciden con los
  autovalores de ττ†, τ = XᵀΣX simétrica compleja (Σ = σ₂⊗σ₂)
- Oráculo hermítico: λₙ autovalores de √(√ρ ρ̃ √ρ)
- Sistema bi-ortogonal: ⟨ṽₘ|vₙ⟩ = δₘₙ con |ṽ⟩ = Σ|v*⟩ y
  ⟨vₘ|ρ|vₙ⟩ = √rₙ δₘₙ

ARQUITECTURA:
- r_spectrum (Jacobi sobre la forma reducida) alimenta concurrence()
- r_eigenvalues (eig4 sobre ℛ) es el espectro "de cuártica" del informe;
  con rₙ agrupados o nulos se usa r_spectrum
- biorthogonal_system construye vectores y el operador testigo 𝒲
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.errors import DegeneracyError
from src.numerics import eig4, jacobi_eigh
from src.states import DensityMatrix, as_matrix

logger = logging.getLogger(__name__)

SIGMA_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex
)

# Autovalores de ρ por debajo se tratan como rango nulo
RANK_TOL = 1e-13
# Separación relativa mínima entre rₙ para confiar en las raíces de eig4
QUARTIC_GAP = 1e-4
DEGENERACY_GAP = 1e-8
NULL_R_TOL = 1e-10


def spin_flip(state: DensityMatrix) -> DensityMatrix:
    """ρ̃ = (σ₂⊗σ₂)·ρ*·(σ₂⊗σ₂)."""
    return DensityMatrix(SIGMA_YY @ as_matrix(state).conj() @ SIGMA_YY, validate=False)


def r_matrix(state: DensityMatrix) -> np.ndarray:
    """ℛ = ρ̃·ρ."""
    rho = as_matrix(state)
    return SIGMA_YY @ rho.conj() @ SIGMA_YY @ rho


def _clustered(r: np.ndarray) -> bool:
    gaps = -np.diff(np.sort(r)[::-1])
    return bool(np.any(gaps <= QUARTIC_GAP * max(float(np.max(r)), 1e-300)))


def r_eigenvalues(state: DensityMatrix) -> np.ndarray:
    """
    Autovalores de ℛ por la cuártica (eig4), descendentes y recortados a ≥ 0.

    Las raíces de eig4 solo son precisas con rₙ bien separados. Si el
    espectro reducido tiene rₙ agrupados (separación relativa ≤ 1e−4, lo que
    incluye varios rₙ nulos: estados puros, Werner, Bell) se devuelve
    r_spectrum.
    """
    reference = r_spectrum(state)
    if _clustered(reference):
        logger.debug("🔁 rₙ agrupados: espectro desde la forma reducida")
        values = reference
    else:
        values = np.real(eig4(r_matrix(state)))
    return np.sort(np.clip(values, 0.0, None))[::-1]


def _factor(rho: np.ndarray) -> np.ndarray:
    """X con ρ = XX†, sin columnas de autovalor despreciable."""
    w, v = jacobi_eigh(rho)
    keep = w > RANK_TOL
    return v[:, keep] * np.sqrt(w[keep])


def r_spectrum(state: DensityMatrix) -> np.ndarray:
    """rₙ de ℛ (descendentes) desde la forma hermítica reducida ττ†."""
    x = _factor(as_matrix(state))
    r = np.zeros(4)
    if x.shape[1] == 0:
        return r
    tau = x.T @ SIGMA_YY @ x
    values, _ = jacobi_eigh(tau @ tau.conj().T)
    r[: values.size] = np.clip(values, 0.0, None)
    return np.sort(r)[::-1]


def concurrence_from_r(r: np.ndarray) -> float:
    roots = np.sqrt(np.clip(np.asarray(r, dtype=float), 0.0, None))
    return float(max(roots[0] - roots[1:].sum(), 0.0))


def concurrence(state: DensityMatrix) -> float:
    """Concurrencia 𝒞 ∈ [0, 1]."""
    return min(concurrence_from_r(r_spectrum(state)), 1.0)


def _psd_sqrt(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    w[w < RANK_TOL * max(w.max(), 1.0)] = 0.0
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence_hermitian_oracle(state: DensityMatrix) -> float:
    """𝒞 = max{λ₁−λ₂−λ₃−λ₄, 0}, λ de √(√ρ ρ̃ √ρ) con eigh de numpy."""
    rho = as_matrix(state)
    root = _psd_sqrt(rho)
    h = root @ spin_flip(state).matrix @ root
    h = (h + h.conj().T) / 2
    w = np.clip(np.linalg.eigvalsh(h), 0.0, None)
    w[w < RANK_TOL * max(w.max(), 1.0)] = 0.0
    lam = np.sort(np.sqrt(w))[::-1]
    return float(max(lam[0] - lam[1:].sum(), 0.0))


# =============================================================================
# SISTEMA BI-ORTOGONAL
# =============================================================================


class ConcurrenceSpectrum(BaseModel):
    """
    rₙ descendentes con vectores derechos vₙ e izquierdos ṽₙ = Σ·vₙ*
    (columnas).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    r: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    degenerate: bool = False

    def biorthogonality_residual(self) -> float:
        """max |⟨ṽₘ|vₙ⟩ − δₘₙ|."""
        gram = self.left_vectors.conj().T @ self.right_vectors
        return float(np.max(np.abs(gram - np.eye(4))))

    def completeness_residual(self) -> float:
        """max |Σₙ |vₙ⟩⟨ṽₙ| − I|."""
        total = self.right_vectors @ self.left_vectors.conj().T
        return float(np.max(np.abs(total - np.eye(4))))

    def rho_diagonal_residual(self, state: DensityMatrix) -> float:
        """max |⟨vₘ|ρ|vₙ⟩ − √rₙ δₘₙ|."""
        v = self.right_vectors
        proj = v.conj().T @ as_matrix(state) @ v
        return float(np.max(np.abs(proj - np.diag(np.sqrt(self.r)))))

    def rayleigh_values(self, state: DensityMatrix) -> np.ndarray:
        """⟨ṽₙ|ℛ|vₙ⟩."""
        rr = r_matrix(state)
        return np.array(
            [
                np.vdot(self.left_vectors[:, n], rr @ self.right_vectors[:, n])
                for n in range(4)
            ]
        )

    def witness(self) -> np.ndarray:
        """𝒲 = |v₁⟩⟨v₁| − Σ_{n>1} |vₙ⟩⟨vₙ| (en general no son proyectores)."""
        signs = np.array([1.0, -1.0, -1.0, -1.0])
        v = self.right_vectors
        return (v * signs) @ v.conj().T


def _clusters(r: np.ndarray) -> list[list[int]]:
    groups = [[0]]
    for n in range(1, r.size):
        if r[groups[-1][-1]] - r[n] < DEGENERACY_GAP:
            groups[-1].append(n)
        else:
            groups.append([n])
    return groups


def _symmetric_unitary_frame(b: np.ndarray) -> np.ndarray:
    """
    T unitaria con Tᵀ·B·T = I para B simétrica compleja y unitaria.

    Re B e Im B conmutan; una base real común los diagonaliza.
    """
    _, o = jacobi_eigh(b.real + np.sqrt(2.0) * b.imag)
    phases = np.diag(o.T @ b @ o)
    return o * np.exp(-0.5j * np.angle(phases))


def biorthogonal_system(
    state: DensityMatrix, allow_degenerate: bool = True
) -> ConcurrenceSpectrum:
    """
    Vectores bi-ortogonales de ℛ con ⟨ṽₘ|vₙ⟩ = δₘₙ.

    Autovalores aislados: núcleo de ℛ − rₙI. Grupos degenerados (salto
    < 1e−8): vₙ = rₙ^{1/4}·ρ^{−1/2}·eₙ con eₙ autovectores de √ρ ρ̃ √ρ,
    re-fasados para la normalización bilineal.

    Raises:
        DegeneracyError: algún rₙ < 1e−10, ρ sin rango completo, o grupos
            degenerados con allow_degenerate=False
    """
    rho = as_matrix(state)
    w, u = jacobi_eigh(rho)
    if w[-1] <= RANK_TOL:
        raise DegeneracyError(f"ρ sin rango completo (autovalor mínimo {w[-1]:.3e})")
    root = (u * np.sqrt(w)) @ u.conj().T
    inv_root = (u / np.sqrt(w)) @ u.conj().T
    h = root @ SIGMA_YY @ rho.conj() @ SIGMA_YY @ root
    r, e = jacobi_eigh((h + h.conj().T) / 2)
    if r[-1] < NULL_R_TOL:
        raise DegeneracyError(f"rₙ mínimo {r[-1]:.3e} < {NULL_R_TOL}: subespacio nulo")

    groups = _clusters(r)
    degenerate = any(len(g) > 1 for g in groups)
    if degenerate and not allow_degenerate:
        raise DegeneracyError(f"rₙ degenerados (salto < {DEGENERACY_GAP}): {r.tolist()}")

    rr = SIGMA_YY @ rho.conj() @ SIGMA_YY @ rho
    vectors = np.empty((4, 4), dtype=complex)
    for group in groups:
        if len(group) == 1:
            n = group[0]
            _, _, vh = np.linalg.svd(rr - r[n] * np.eye(4))
            vec = vh[-1].conj()
            vectors[:, n] = vec / np.sqrt(vec @ SIGMA_YY @ vec)
        else:
            block = inv_root @ e[:, group] * r[group] ** 0.25
            gram = block.T @ SIGMA_YY @ block
            vectors[:, group] = block @ _symmetric_unitary_frame(gram)

    left = SIGMA_YY @ vectors.conj()
    return ConcurrenceSpectrum(
        r=r, right_vectors=vectors, left_vectors=left, degenerate=degenerate
    )
