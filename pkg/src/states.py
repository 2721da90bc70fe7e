"""
=============================================================================
MÓDULO: Estados de Dos Qubits
=============================================================================

Construcción y validación de matrices densidad 4×4: estados puros, familia
de Werner, estados X, mezclas de productos puros y muestreadores aleatorios
reproducibles por semilla.

FUNDAMENTACIÓN TEÓRICA:
- Un estado es una matriz hermítica, de traza 1 y semidefinida positiva
- Base computacional |00⟩,|01⟩,|10⟩,|11⟩ (qubit A el índice lento)
- ρ_W = ε·Π + (1−ε)·I/4 con Π el proyector sobre (|00⟩+|11⟩)/√2

ARQUITECTURA:
- DensityMatrix: contenedor validado (hermiticidad 1e−12, traza 1e−12,
  autovalor mínimo ≥ −1e−10)
- PureState, XStateParams, EnsembleSpec: esquemas pydantic de entrada
- Archivos de estado JSON: {"rho": 4×4 de pares [re, im]}
"""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.errors import (
    NormalizationError,
    PositivityError,
    RangeError,
    StateParseError,
    StateValidationError,
    WeightError,
)

logger = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
PURE_NORM_TOL = 1e-9

# Semillas de 64 bits
SeedLike = Union[int, np.random.SeedSequence]


class DensityMatrix:
    """
    Matriz densidad de dos qubits.

    Con validate=False se admite una matriz hermítica de traza 1 no
    necesariamente positiva (reconstrucciones de Fano, pasos de diferencias
    finitas); is_positive_semidefinite() lo informa.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix: Any, *, validate: bool = True):
        arr = np.array(matrix, dtype=complex)
        if arr.shape != (4, 4):
            raise StateValidationError(
                f"la matriz densidad debe ser 4×4, llegó {arr.shape}", "shape"
            )
        if validate:
            _check_hermitian_unit_trace(arr)
            min_eig = float(np.linalg.eigvalsh((arr + arr.conj().T) / 2)[0])
            if min_eig < -POSITIVITY_TOL:
                raise StateValidationError(
                    f"autovalor mínimo {min_eig:.3e} < −{POSITIVITY_TOL}", "positivity"
                )
        self.matrix = (arr + arr.conj().T) / 2

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def is_positive_semidefinite(self, tol: float = POSITIVITY_TOL) -> bool:
        return self.min_eigenvalue() >= -tol

    def purity(self) -> float:
        """Tr{ρ²}."""
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def to_json_dict(self) -> dict:
        return {"rho": [[[z.real, z.imag] for z in row] for row in self.matrix]}

    def __repr__(self) -> str:
        return f"DensityMatrix(purity={self.purity():.6f})"


def _check_hermitian_unit_trace(arr: np.ndarray) -> None:
    herm_dev = float(np.max(np.abs(arr - arr.conj().T)))
    if herm_dev > HERMITICITY_TOL:
        raise StateValidationError(
            f"la matriz no es hermítica (desviación {herm_dev:.3e})", "hermiticity"
        )
    trace = np.trace(arr)
    if abs(trace - 1.0) > TRACE_TOL:
        raise StateValidationError(
            f"traza {trace.real:.15g} ≠ 1 (tolerancia {TRACE_TOL})", "trace"
        )


def as_matrix(state: Union[DensityMatrix, np.ndarray]) -> np.ndarray:
    """Acepta un DensityMatrix o un array 4×4 y devuelve el array complejo."""
    if isinstance(state, DensityMatrix):
        return state.matrix
    return np.asarray(state, dtype=complex)


# =============================================================================
# ESQUEMAS DE ENTRADA
# =============================================================================


def _complex_vector(value: Any, size: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=complex).reshape(-1)
    if arr.shape != (size,):
        raise ValueError(f"{name}: se esperaban {size} amplitudes, llegaron {arr.size}")
    return arr


class PureState(BaseModel):
    """Vector de 4 amplitudes complejas (α, β, γ, δ) en la base computacional."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    amplitudes: np.ndarray = Field(..., description="Amplitudes (α, β, γ, δ)")

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _complex_vector(value, 4, "amplitudes")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class XStateParams(BaseModel):
    """
    Poblaciones q, r, s, t y coherencias u, v de un estado X.

    ρ_X = [[q,0,0,v],[0,r,u,0],[0,u,s,0],[v,0,0,t]] (todo real).
    La positividad (√(rs) ≥ u, √(qt) ≥ v) se comprueba en x_state.
    """

    q: float = Field(..., ge=0)
    r: float = Field(..., ge=0)
    s: float = Field(..., ge=0)
    t: float = Field(..., ge=0)
    u: float = Field(..., ge=0)
    v: float = Field(..., ge=0)

    @model_validator(mode="after")
    def _populations_sum_to_one(self) -> "XStateParams":
        total = self.q + self.r + self.s + self.t
        if abs(total - 1.0) > TRACE_TOL:
            raise ValueError(f"q+r+s+t = {total!r} ≠ 1")
        return self


class EnsembleTerm(BaseModel):
    """Un término p·|ψ_A⟩⟨ψ_A|⊗|ψ_B⟩⟨ψ_B| de una mezcla separable."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    weight: float
    qubit_a: np.ndarray
    qubit_b: np.ndarray

    @field_validator("qubit_a", "qubit_b", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        arr = _complex_vector(value, 2, "qubit")
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise ValueError("vector de qubit nulo")
        return arr / norm


class EnsembleSpec(BaseModel):
    """Mezcla convexa de productos puros."""

    terms: list[EnsembleTerm] = Field(..., min_length=1)

    @property
    def weights(self) -> np.ndarray:
        return np.array([term.weight for term in self.terms])

    @classmethod
    def from_lists(
        cls, weights: Sequence[float], qubits_a: Sequence[Any], qubits_b: Sequence[Any]
    ) -> "EnsembleSpec":
        return cls(
            terms=[
                EnsembleTerm(weight=w, qubit_a=a, qubit_b=b)
                for w, a, b in zip(weights, qubits_a, qubits_b, strict=True)
            ]
        )


# =============================================================================
# CONSTRUCTORES
# =============================================================================

BELL_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def bell_projector() -> np.ndarray:
    """Π = |Φ⁺⟩⟨Φ⁺|."""
    return np.outer(BELL_PHI_PLUS, BELL_PHI_PLUS.conj())


def from_pure(psi: Union[PureState, Sequence[complex], np.ndarray]) -> DensityMatrix:
    """
    ρ = |ψ⟩⟨ψ|.

    Raises:
        NormalizationError: si | ‖ψ‖ − 1 | > 1e−9
    """
    state = psi if isinstance(psi, PureState) else PureState(amplitudes=psi)
    norm = state.norm()
    if abs(norm - 1.0) > PURE_NORM_TOL:
        raise NormalizationError(f"‖ψ‖ = {norm:.12g}, se requiere 1 ± {PURE_NORM_TOL}")
    amps = state.amplitudes / norm
    return DensityMatrix(np.outer(amps, amps.conj()))


def werner(epsilon: float) -> DensityMatrix:
    """
    Estado de Werner ρ_W = ε·Π + (1−ε)·I/4.

    Raises:
        RangeError: si ε ∉ [−1/3, 1]
    """
    if not (-1.0 / 3.0 - 1e-12 <= epsilon <= 1.0 + 1e-12):
        raise RangeError(f"ε = {epsilon} fuera de [−1/3, 1]")
    return DensityMatrix(epsilon * bell_projector() + (1.0 - epsilon) * np.eye(4) / 4)


def x_state(params: XStateParams) -> DensityMatrix:
    """
    Estado X a partir de sus seis parámetros reales.

    Raises:
        PositivityError: si √(rs) < u o √(qt) < v
    """
    p = params
    if np.sqrt(p.r * p.s) < p.u - 1e-15:
        raise PositivityError(f"u = {p.u} > √(rs) = {np.sqrt(p.r * p.s)}")
    if np.sqrt(p.q * p.t) < p.v - 1e-15:
        raise PositivityError(f"v = {p.v} > √(qt) = {np.sqrt(p.q * p.t)}")
    matrix = np.array(
        [
            [p.q, 0, 0, p.v],
            [0, p.r, p.u, 0],
            [0, p.u, p.s, 0],
            [p.v, 0, 0, p.t],
        ],
        dtype=complex,
    )
    return DensityMatrix(matrix)


def classical_state(populations: Sequence[float]) -> DensityMatrix:
    """Estado diagonal (clásicamente correlacionado) con poblaciones dadas."""
    pops = np.asarray(populations, dtype=float)
    if pops.shape != (4,) or np.any(pops < 0) or abs(pops.sum() - 1) > TRACE_TOL:
        raise WeightError("poblaciones: 4 valores ≥ 0 que sumen 1")
    return DensityMatrix(np.diag(pops).astype(complex))


def from_ensemble(ensemble: EnsembleSpec) -> DensityMatrix:
    """
    ρ = Σ pₙ |aₙ⟩⟨aₙ| ⊗ |bₙ⟩⟨bₙ|.

    Raises:
        WeightError: pesos negativos o que no suman 1 (tolerancia 1e−12)
    """
    weights = ensemble.weights
    if np.any(weights < 0):
        raise WeightError(f"pesos negativos: {weights.tolist()}")
    if abs(weights.sum() - 1.0) > TRACE_TOL:
        raise WeightError(f"Σp = {weights.sum()!r} ≠ 1")
    rho = np.zeros((4, 4), dtype=complex)
    for term in ensemble.terms:
        product = np.kron(term.qubit_a, term.qubit_b)
        rho += term.weight * np.outer(product, product.conj())
    return DensityMatrix(rho)


def local_unitary_conjugate(
    state: DensityMatrix, unitary_a: np.ndarray, unitary_b: np.ndarray
) -> DensityMatrix:
    """(U_A⊗U_B)·ρ·(U_A⊗U_B)†."""
    op = np.kron(unitary_a, unitary_b)
    return DensityMatrix(op @ state.matrix @ op.conj().T)


# =============================================================================
# MUESTREO ALEATORIO
# =============================================================================


class SamplingMode(str, Enum):
    UNIFORM = "uniform"
    TOWARD_PURE = "toward-pure"
    TOWARD_WERNER = "toward-werner"


class SamplingMetadata(BaseModel):
    """Parámetros sorteados por random_density_biased."""

    seed: int
    mode: SamplingMode
    mixing_weight: Optional[float] = None
    epsilon: Optional[float] = None


def _rng(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(seed)


def _cholesky_like(rng: np.random.Generator) -> np.ndarray:
    t = rng.random((4, 4)) + 1j * rng.random((4, 4))
    rho = t.conj().T @ t
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_density(seed: SeedLike) -> DensityMatrix:
    """
    ρ = T†T / Tr{T†T} con Re, Im de T uniformes en [0, 1) (PCG64).
    """
    return DensityMatrix(_cholesky_like(_rng(seed)))


def random_unit_vector(rng: np.random.Generator, size: int) -> np.ndarray:
    """Vector complejo uniforme en la esfera (gaussianas normalizadas)."""
    vec = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return vec / np.linalg.norm(vec)


def random_pure_state(seed: SeedLike) -> PureState:
    return PureState(amplitudes=random_unit_vector(_rng(seed), 4))


def random_local_unitary(rng: np.random.Generator) -> np.ndarray:
    """Unitaria 2×2 por QR de una matriz gaussiana compleja con fases fijadas."""
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def biased_sample(
    seed: int,
    mode: Union[SamplingMode, str],
    bias_low: float = 0.8,
    bias_high: float = 1.0,
) -> tuple[DensityMatrix, SamplingMetadata]:
    """
    Muestra ρ sesgada hacia los estados puros o hacia la familia de Werner.

    uniform:        ρ_rand
    toward-pure:    (1−λ)·ρ_rand + λ·|ψ⟩⟨ψ|
    toward-werner:  (1−λ)·ρ_rand + λ·ρ_W(ε),  ε ~ U[−1/3, 1]
    con λ ~ U[bias_low, bias_high).
    """
    mode = SamplingMode(mode)
    rng = _rng(seed)
    rho = _cholesky_like(rng)
    meta = SamplingMetadata(seed=seed, mode=mode)
    if mode is SamplingMode.UNIFORM:
        return DensityMatrix(rho), meta

    lam = float(rng.uniform(bias_low, bias_high))
    meta.mixing_weight = lam
    if mode is SamplingMode.TOWARD_PURE:
        psi = random_unit_vector(rng, 4)
        target = np.outer(psi, psi.conj())
    else:
        eps = float(rng.uniform(-1.0 / 3.0, 1.0))
        meta.epsilon = eps
        target = werner(eps).matrix
    return DensityMatrix((1 - lam) * rho + lam * target), meta


def random_density_biased(
    seed: int, mode: Union[SamplingMode, str], bias_low: float = 0.8, bias_high: float = 1.0
) -> DensityMatrix:
    return biased_sample(seed, mode, bias_low, bias_high)[0]


def random_x_params(seed: SeedLike) -> XStateParams:
    """Poblaciones Dirichlet(1,1,1,1); coherencias uniformes bajo su cota."""
    rng = _rng(seed)
    q, r, s, t = rng.dirichlet(np.ones(4))
    t = max(0.0, 1.0 - (q + r + s))
    u = float(rng.uniform()) * np.sqrt(r * s)
    v = float(rng.uniform()) * np.sqrt(q * t)
    return XStateParams(q=q, r=r, s=s, t=t, u=u, v=v)


def random_ensemble(seed: SeedLike, terms: int = 4) -> EnsembleSpec:
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    weights[-1] = 1.0 - weights[:-1].sum()
    qubits_a = [random_unit_vector(rng, 2) for _ in range(terms)]
    qubits_b = [random_unit_vector(rng, 2) for _ in range(terms)]
    return EnsembleSpec.from_lists(weights, qubits_a, qubits_b)


def derive_seeds(seed: int, n: int) -> list[int]:
    """Semillas independientes por registro a partir de una semilla maestra."""
    state = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)
    return [int(x) for x in state]


# =============================================================================
# ARCHIVOS DE ESTADO
# =============================================================================


def parse_state_json(text: str) -> DensityMatrix:
    """
    Parsea {"rho": [[[re, im], ...] ×4] ×4} y valida el estado.

    Raises:
        StateParseError: JSON inválido o forma incorrecta
        StateValidationError: el estado no es físico
    """
    try:
        payload = json.loads(text)
        rows = payload["rho"]
        arr = np.array(
            [[complex(float(z[0]), float(z[1])) for z in row] for row in rows],
            dtype=complex,
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as e:
        raise StateParseError(f"archivo de estado mal formado: {e}") from e
    if arr.shape != (4, 4):
        raise StateParseError(f"'rho' debe ser 4×4, llegó {arr.shape}")
    return DensityMatrix(arr)


def load_state_file(path: Union[str, Path]) -> DensityMatrix:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise StateParseError(f"no se pudo leer {path}: {e}") from e
    logger.info(f"📂 Estado cargado desde {path}")
    return parse_state_json(text)
