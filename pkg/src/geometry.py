"""
=============================================================================
MÓDULO: Geometría de Tetraedros de Bloch
=============================================================================

Para un estado separable de cuatro términos, Det{c} se reduce a volúmenes de
tetraedros formados por los vectores de Bloch de cada qubit:

    𝒮_sep = 36·p₁p₂p₃p₄·𝒱(a₁..a₄)·𝒱(b₁..b₄)

y el volumen máximo de un tetraedro inscrito en la esfera unidad, 8/(9√3),
acota |𝒮_sep| ≤ 1/27.

ARQUITECTURA:
- quad_volume / triple_product_T: volúmenes con signo y productos triples
- separable_sinisterness: forma cerrada para mezclas de productos
- max_volume_search: escalada aleatoria con reinicios + pulido por gradiente
"""

import logging
from typing import Any, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.bloch import single_qubit_bloch
from src.errors import CardinalityError, WeightError
from src.states import EnsembleSpec

logger = logging.getLogger(__name__)

MAX_TETRAHEDRON_VOLUME = 8.0 / (9.0 * np.sqrt(3.0))
REGULAR_TETRAHEDRON = np.array(
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
) / np.sqrt(3.0)


class VertexQuad(BaseModel):
    """Cuatro vectores reales a₁..a₄ (filas)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    vertices: np.ndarray

    @field_validator("vertices", mode="before")
    @classmethod
    def _shape(cls, value: Any) -> np.ndarray:
        arr = np.asarray(value, dtype=float)
        if arr.shape != (4, 3):
            raise ValueError(f"se esperaban 4 vectores 3D, forma {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vértices no finitos")
        return arr


QuadLike = Union[VertexQuad, np.ndarray, Sequence[Sequence[float]]]


def _vertices(quad: QuadLike) -> np.ndarray:
    if isinstance(quad, VertexQuad):
        return quad.vertices
    return VertexQuad(vertices=quad).vertices


def _signed_volume(v: np.ndarray) -> float:
    return float(np.dot(np.cross(v[0] - v[1], v[1] - v[2]), v[2] - v[3]) / 6.0)


def quad_volume(quad: QuadLike) -> float:
    """𝒱 = [(a₁−a₂)×(a₂−a₃)]·(a₃−a₄)/6, con signo."""
    return _signed_volume(_vertices(quad))


def _check_triple(k: int, l: int, m: int) -> tuple[int, int, int]:
    idx = (k, l, m)
    if len(set(idx)) != 3 or not all(1 <= i <= 4 for i in idx):
        raise IndexError(f"índices {idx} deben ser distintos y estar en 1..4")
    return k - 1, l - 1, m - 1


def _check_weights(weights: Sequence[float]) -> np.ndarray:
    p = np.asarray(weights, dtype=float)
    if p.shape != (4,) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise WeightError(f"se esperaban 4 probabilidades que sumen 1: {p.tolist()}")
    return p


def triple_product_T(
    quad: QuadLike, weights: Sequence[float], k: int, l: int, m: int
) -> float:
    """T_kℓm = [(a_k−ā)×(a_ℓ−ā)]·(a_m−ā) con ā = Σ pₙaₙ (índices 1..4)."""
    v = _vertices(quad)
    p = _check_weights(weights)
    i, j, n = _check_triple(k, l, m)
    mean = p @ v
    return float(np.dot(np.cross(v[i] - mean, v[j] - mean), v[n] - mean))


def triple_product_reduced(
    quad: QuadLike, weights: Sequence[float], k: int, l: int, m: int
) -> float:
    """6·Σₙ pₙ·𝒱(a_k, a_ℓ, a_m, aₙ)."""
    v = _vertices(quad)
    p = _check_weights(weights)
    i, j, n = _check_triple(k, l, m)
    return 6.0 * sum(
        p[x] * _signed_volume(np.stack([v[i], v[j], v[n], v[x]])) for x in range(4)
    )


def separable_sinisterness(ensemble: EnsembleSpec) -> float:
    """
    36·p₁p₂p₃p₄·𝒱(a)·𝒱(b) para una mezcla de hasta cuatro productos puros.

    Raises:
        CardinalityError: más de cuatro términos
    """
    terms = ensemble.terms
    if len(terms) > 4:
        raise CardinalityError(f"la fórmula admite ≤ 4 términos, llegaron {len(terms)}")
    if len(terms) < 4:
        return 0.0
    p = ensemble.weights
    a = np.stack([single_qubit_bloch(t.qubit_a) for t in terms])
    b = np.stack([single_qubit_bloch(t.qubit_b) for t in terms])
    return float(36.0 * np.prod(p) * _signed_volume(a) * _signed_volume(b))


# =============================================================================
# BÚSQUEDA DEL VOLUMEN MÁXIMO
# =============================================================================


class VolumeSearchResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    volume: float
    vertices: np.ndarray
    restarts: int
    iterations: int

    def edge_lengths(self) -> np.ndarray:
        v = self.vertices
        return np.array(
            [np.linalg.norm(v[i] - v[j]) for i in range(4) for j in range(i + 1, 4)]
        )


def _to_angles(v: np.ndarray) -> np.ndarray:
    theta = np.arccos(np.clip(v[:, 2], -1.0, 1.0))
    phi = np.arctan2(v[:, 1], v[:, 0])
    return np.column_stack([theta, phi])


def _from_angles(angles: np.ndarray) -> np.ndarray:
    theta, phi = angles[:, 0], angles[:, 1]
    v = np.column_stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _hill_climb(
    rng: np.random.Generator, vertices: np.ndarray, iterations: int, step: float = 0.5
) -> tuple[np.ndarray, float]:
    angles = _to_angles(vertices)
    best = abs(_signed_volume(_from_angles(angles)))
    for _ in range(iterations):
        candidate = angles + rng.normal(0.0, step, angles.shape)
        value = abs(_signed_volume(_from_angles(candidate)))
        if value > best:
            angles, best = candidate, value
            step = min(step * 1.2, 1.0)
        else:
            step = max(step * 0.97, 1e-6)
    return _from_angles(angles), best


def _volume_gradient(v: np.ndarray) -> np.ndarray:
    # 𝒱 es afín en cada vértice: la diferencia unitaria es exacta
    base = _signed_volume(v)
    grad = np.empty((4, 3))
    for n in range(4):
        for k in range(3):
            shifted = v.copy()
            shifted[n, k] += 1.0
            grad[n, k] = _signed_volume(shifted) - base
    return grad


def _polish(vertices: np.ndarray, max_steps: int = 2000) -> np.ndarray:
    """Ascenso por gradiente proyectado sobre la esfera."""
    v = vertices.copy()
    alpha = 0.5
    for _ in range(max_steps):
        volume = _signed_volume(v)
        sign = 1.0 if volume >= 0 else -1.0
        grad = _volume_gradient(v)
        tangent = grad - np.sum(grad * v, axis=1, keepdims=True) * v
        candidate = v + alpha * sign * tangent
        candidate /= np.linalg.norm(candidate, axis=1, keepdims=True)
        if abs(_signed_volume(candidate)) > abs(volume):
            v = candidate
            alpha = min(alpha * 1.5, 2.0)
        else:
            alpha *= 0.5
            if alpha < 1e-12:
                break
    return v


def max_volume_optimum(
    seed: int,
    iterations: int,
    start: Optional[np.ndarray] = None,
    restarts: int = 10,
    polish: bool = True,
) -> VolumeSearchResult:
    """
    Reinicios aleatorios + escalada en coordenadas esféricas sobre cuatro
    vectores unitarios, seguido de un pulido del mejor candidato.

    Args:
        seed: Semilla del generador
        iterations: Pasos totales de escalada (repartidos entre reinicios)
        start: Cuádrupla inicial para el primer reinicio (opcional)
        restarts: Número de reinicios
        polish: Aplicar ascenso por gradiente al final
    """
    if iterations < 1:
        raise ValueError("iterations ≥ 1")
    rng = np.random.default_rng(seed)
    n_restarts = max(1, min(restarts, iterations))
    per_restart = max(1, iterations // n_restarts)

    best_v, best = None, -1.0
    for index in range(n_restarts):
        if index == 0 and start is not None:
            initial = np.asarray(start, dtype=float)
            initial = initial / np.linalg.norm(initial, axis=1, keepdims=True)
        else:
            initial = rng.normal(size=(4, 3))
            initial /= np.linalg.norm(initial, axis=1, keepdims=True)
        candidate, value = _hill_climb(rng, initial, per_restart)
        if value > best:
            best_v, best = candidate, value

    if polish:
        best_v = _polish(best_v)
        best = abs(_signed_volume(best_v))
    logger.debug(f"🔺 Volumen máximo encontrado: {best:.12f}")
    return VolumeSearchResult(
        volume=best, vertices=best_v, restarts=n_restarts, iterations=per_restart * n_restarts
    )


def max_volume_search(seed: int, iterations: int, start: Optional[np.ndarray] = None) -> float:
    """Mejor |𝒱| encontrado (≤ 8/(9√3))."""
    return max_volume_optimum(seed, iterations, start=start).volume
