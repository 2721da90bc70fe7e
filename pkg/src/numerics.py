"""
=============================================================================
MÓDULO: Núcleos Numéricos de Dimensión Fija
=============================================================================

Primitivas de álgebra lineal para matrices 3×3 y 4×4 sobre arrays numpy,
escritas aquí para que los caminos de cálculo del kit no dependan de un
eigensolver genérico y puedan contrastarse contra numpy.linalg en los tests.

FUNDAMENTACIÓN TEÓRICA:
- Determinante 3×3 por contracción con el tensor de Levi-Civita
- Método de Jacobi para matrices hermíticas (reales o complejas)
- SVD 3×3 vía Jacobi sobre mᵀm y completado ortonormal
- Autovalores 4×4: Faddeev–LeVerrier + cuártica (cúbica resolvente de
  Ferrari) + un paso de Newton

ARQUITECTURA:
- Funciones puras, sin estado, entradas validadas por forma
- Los autovalores se devuelven ordenados de mayor a menor
"""

import cmath
import logging
import math
from typing import NamedTuple

import numpy as np

from src.errors import NumericalError

logger = logging.getLogger(__name__)

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0

# Parte imaginaria por debajo de IMAG_TOL·(1+|re|) se proyecta a cero
IMAG_TOL = 1e-9


def _require_shape(m: np.ndarray, shape: tuple, name: str) -> np.ndarray:
    arr = np.asarray(m)
    if arr.shape != shape:
        raise NumericalError(f"{name}: se esperaba forma {shape}, llegó {arr.shape}")
    return arr


# =============================================================================
# DETERMINANTES
# =============================================================================


def det3_levi_civita(m: np.ndarray) -> float:
    """
    Determinante 3×3 como Σ ε_ijk m_0i m_1j m_2k.

    Args:
        m: Matriz real 3×3

    Returns:
        Det{m}
    """
    arr = _require_shape(m, (3, 3), "det3_levi_civita").astype(float)
    return float(np.einsum("ijk,i,j,k->", LEVI_CIVITA, arr[0], arr[1], arr[2]))


def adjugate4(m: np.ndarray) -> np.ndarray:
    """Adjunta clásica 4×4 por cofactores (válida también si m es singular)."""
    arr = _require_shape(m, (4, 4), "adjugate4").astype(complex)
    cof = np.empty((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            minor = np.delete(np.delete(arr, i, axis=0), j, axis=1)
            cof[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return cof.T


# =============================================================================
# JACOBI HERMÍTICO
# =============================================================================


def jacobi_eigh(
    a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 50
) -> tuple[np.ndarray, np.ndarray]:
    """
    Autodescomposición de una matriz hermítica por rotaciones de Jacobi.

    Cada rotación elimina a_pq tras llevar su fase a la diagonal. Funciona
    igual para matrices reales simétricas (la fase es ±1).

    Args:
        a: Matriz hermítica n×n
        tol: Umbral relativo de la norma fuera de la diagonal
        max_sweeps: Barridos máximos antes de fallar

    Returns:
        (autovalores descendentes, autovectores en columnas)
    """
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NumericalError(f"jacobi_eigh: matriz cuadrada requerida, forma {arr.shape}")
    dtype = complex if np.iscomplexobj(arr) else float
    work = np.array(arr, dtype=dtype)
    work = (work + work.conj().T) / 2
    n = work.shape[0]
    vecs = np.eye(n, dtype=dtype)

    scale = float(np.sqrt(np.sum(np.abs(work) ** 2)))
    if scale == 0.0:
        return np.zeros(n), vecs

    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(np.abs(work[off_mask]) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (work[q, q].real - work[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                block = np.array(
                    [[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=dtype
                )
                idx = [p, q]
                work[:, idx] = work[:, idx] @ block
                work[idx, :] = block.conj().T @ work[idx, :]
                work[p, q] = work[q, p] = 0.0
                vecs[:, idx] = vecs[:, idx] @ block
    else:
        raise NumericalError("jacobi_eigh: sin convergencia tras el máximo de barridos")

    values = np.real(np.diag(work)).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], vecs[:, order]


# =============================================================================
# SVD 3×3
# =============================================================================


class SVD3(NamedTuple):
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def svd3(m: np.ndarray, tol: float = 1e-12) -> SVD3:
    """
    Descomposición m = U·diag(s)·Vᵀ con s ≥ 0 descendentes.

    V sale de Jacobi sobre mᵀm; las columnas de U se obtienen de m·V,
    completando con vectores ortonormales cuando un s_i es nulo.
    """
    arr = _require_shape(m, (3, 3), "svd3").astype(float)
    _, v = jacobi_eigh(arr.T @ arr)
    b = arr @ v
    s = np.linalg.norm(b, axis=0)
    order = np.argsort(-s, kind="stable")
    s, b, v = s[order], b[:, order], v[:, order]

    cutoff = tol * max(1.0, s[0])
    if s[0] <= cutoff:
        return SVD3(np.eye(3), np.zeros(3), np.eye(3))

    u1 = b[:, 0] / s[0]
    if s[1] > cutoff:
        u2 = b[:, 1] - np.dot(u1, b[:, 1]) * u1
    else:
        # completar con el eje menos alineado con u1
        axis = np.zeros(3)
        axis[int(np.argmin(np.abs(u1)))] = 1.0
        u2 = axis - np.dot(u1, axis) * u1
    u2 = u2 / np.linalg.norm(u2)
    u3 = np.cross(u1, u2)
    if s[2] > cutoff and np.dot(u3, b[:, 2]) < 0:
        u3 = -u3
    return SVD3(np.column_stack([u1, u2, u3]), s, v)


# =============================================================================
# AUTOVALORES 4×4 (FADDEEV–LEVERRIER + CUÁRTICA)
# =============================================================================


def characteristic_coefficients(m: np.ndarray) -> np.ndarray:
    """
    Coeficientes [1, c3, c2, c1, c0] de Det{x·I − m} por Faddeev–LeVerrier.
    """
    arr = _require_shape(m, (4, 4), "characteristic_coefficients").astype(complex)
    coeffs = [1.0 + 0j]
    acc = np.zeros((4, 4), dtype=complex)
    for k in range(1, 5):
        acc = arr @ acc + coeffs[-1] * np.eye(4)
        coeffs.append(-np.trace(arr @ acc) / k)
    return np.array(coeffs, dtype=complex)


def _quadratic_roots(b: complex, c: complex) -> list[complex]:
    disc = cmath.sqrt(b * b - 4 * c)
    first = -(b + disc) / 2 if abs(b + disc) >= abs(b - disc) else -(b - disc) / 2
    if first == 0:
        return [0j, 0j]
    return [first, c / first]


def cubic_roots(a2: complex, a1: complex, a0: complex) -> list[complex]:
    """Raíces de z³ + a2·z² + a1·z + a0 (Cardano en aritmética compleja)."""
    shift = a2 / 3
    p = a1 - a2 * a2 / 3
    q = 2 * a2**3 / 27 - a2 * a1 / 3 + a0
    root = cmath.sqrt((q / 2) ** 2 + (p / 3) ** 3)
    cube = -q / 2 + root if abs(-q / 2 + root) >= abs(-q / 2 - root) else -q / 2 - root
    if cube == 0:
        return [-shift] * 3
    u = cube ** (1 / 3)
    v = -p / (3 * u)
    omega = cmath.exp(2j * cmath.pi / 3)
    return [u * omega**k + v * omega ** (-k) - shift for k in range(3)]


def quartic_roots(coeffs: np.ndarray) -> list[complex]:
    """
    Raíces de x⁴ + b·x³ + c·x² + d·x + e por Ferrari.

    Args:
        coeffs: [1, b, c, d, e]
    """
    _, b, c, d, e = (complex(x) for x in coeffs)
    shift = b / 4
    p = c - 3 * b * b / 8
    q = d - b * c / 2 + b**3 / 8
    r = e - b * d / 4 + b * b * c / 16 - 3 * b**4 / 256

    scale = 1.0 + abs(p) ** 1.5 + abs(r) ** 0.75
    if abs(q) <= 1e-15 * scale:
        ys = []
        for w in _quadratic_roots(p, r):
            sq = cmath.sqrt(w)
            ys.extend([sq, -sq])
    else:
        m = max(cubic_roots(p, p * p / 4 - r, -q * q / 8), key=abs)
        s = cmath.sqrt(2 * m)
        ys = _quadratic_roots(-s, p / 2 + m + q / (2 * s))
        ys += _quadratic_roots(s, p / 2 + m - q / (2 * s))
    return [y - shift for y in ys]


def _newton_polish(coeffs: np.ndarray, x: complex) -> complex:
    deriv = np.polyder(coeffs)
    fx = np.polyval(coeffs, x)
    dfx = np.polyval(deriv, x)
    if dfx == 0:
        return x
    candidate = x - fx / dfx
    return candidate if abs(np.polyval(coeffs, candidate)) < abs(fx) else x


def eig4(m: np.ndarray) -> np.ndarray:
    """
    Autovalores de una matriz compleja 4×4 sin eigensolver de librería.

    Las partes imaginarias con |im| < 1e−9·(1+|re|) se proyectan a cero.
    Orden: parte real descendente, desempate por parte imaginaria.

    Returns:
        Array complejo de 4 autovalores
    """
    coeffs = characteristic_coefficients(m)
    roots = [_newton_polish(coeffs, x) for x in quartic_roots(coeffs)]
    cleaned = [
        complex(z.real, 0.0) if abs(z.imag) < IMAG_TOL * (1 + abs(z.real)) else z
        for z in roots
    ]
    cleaned.sort(key=lambda z: (-z.real, -z.imag))
    return np.array(cleaned, dtype=complex)
