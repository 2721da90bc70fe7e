"""
=============================================================================
MÓDULO: Suite de Identidades
=============================================================================

Ejecuta las identidades de forma cerrada contra el pipeline y reporta el
residuo medido de cada una. Es el contenido de `app.py verify`.

IDENTIDADES:
- werner_grid, werner_concurrence: 𝒮 = −ε³ (dos caminos) y 𝒞_W
- pure_law: 𝒮 = −𝒞⁴ en estados puros
- dual_path: Det{c} = −16·Det{𝒢}
- x_state: 𝒮 y 𝒞 de estados X; 𝒮 < 0 si 𝒞 > 0
- separable_formula, separable_three_terms: volúmenes de tetraedros
- purity, fano_round_trip, gamma_w_identity
- max_volume, max_volume_regular
- det_expansion
- concurrence_cross: camino ℛ vs oráculo hermítico
- werner_perturbation, werner_stationarity: δ𝒞_W y δ𝒮_W vs diferencias finitas
- local_unitary, estimator_plumbing

ARQUITECTURA:
- Registro de checks con decorador (@identity)
- `scale` multiplica los tamaños de muestra completos (1.0 = suite completa,
  la CLI usa 0.1 por defecto)
"""

import logging
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel

from src.bloch import decompose, fano_reconstruct, purity_from_gamma
from src.callbacks import ProgressCallback, get_callback_handler
from src.concurrence import concurrence, concurrence_hermitian_oracle
from src.experiments import expected_correlations
from src.geometry import (
    MAX_TETRAHEDRON_VOLUME,
    REGULAR_TETRAHEDRON,
    max_volume_optimum,
    separable_sinisterness,
)
from src.numerics import det3_levi_civita
from src.perturbation import det_expansion, project_to_werner_level, werner_report
from src.sinisterness import (
    g_matrix,
    gamma_from_g,
    sinisterness,
    sinisterness_observable,
    werner_concurrence,
    x_state_concurrence,
    x_state_sinisterness,
)
from src.states import (
    derive_seeds,
    from_ensemble,
    from_pure,
    local_unitary_conjugate,
    random_density,
    random_ensemble,
    random_local_unitary,
    random_pure_state,
    random_x_params,
    werner,
    x_state,
)

logger = logging.getLogger(__name__)


class CheckResult(BaseModel):
    name: str
    passed: bool
    residual: float
    tolerance: float
    samples: int
    detail: Optional[str] = None


CheckFn = Callable[[int, int], tuple[float, bool, Optional[str]]]

# nombre -> (tamaño completo, tolerancia, función)
IDENTITIES: dict[str, tuple[int, float, CheckFn]] = {}


def identity(name: str, full_samples: int, tolerance: float):
    """Registra una identidad. La función recibe (seed, n) y devuelve
    (residuo, ok adicional, detalle)."""

    def register(fn: CheckFn) -> CheckFn:
        IDENTITIES[name] = (full_samples, tolerance, fn)
        return fn

    return register


def _within(residual: float, tolerance: float) -> bool:
    return bool(np.isfinite(residual) and residual <= tolerance)


# =============================================================================
# IDENTIDADES DE FORMA CERRADA
# =============================================================================


@identity("werner_grid", 200, 1e-10)
def _werner_grid(seed: int, n: int):
    worst = 0.0
    for eps in np.linspace(-1.0 / 3.0, 1.0, max(n, 2)):
        state = werner(eps)
        worst = max(
            worst,
            abs(sinisterness(state) + eps**3),
            abs(sinisterness_observable(state) + eps**3),
        )
    return worst, True, None


@identity("werner_concurrence", 200, 1e-10)
def _werner_concurrence(seed: int, n: int):
    worst = 0.0
    for eps in np.linspace(-1.0 / 3.0, 1.0, max(n, 2)):
        worst = max(worst, abs(concurrence(werner(eps)) - werner_concurrence(eps)))
    return worst, True, None


@identity("pure_law", 10_000, 1e-9)
def _pure_law(seed: int, n: int):
    worst = 0.0
    for s in derive_seeds(seed, n):
        state = from_pure(random_pure_state(s))
        worst = max(worst, abs(sinisterness(state) + concurrence(state) ** 4))
    return worst, True, None


@identity("dual_path", 100_000, 1e-9)
def _dual_path(seed: int, n: int):
    worst = 0.0
    for s in derive_seeds(seed, n):
        state = random_density(s)
        value = sinisterness(state)
        worst = max(worst, abs(sinisterness_observable(state) - value) / (1 + abs(value)))
    return worst, True, None


@identity("x_state", 1_000, 1e-10)
def _x_state(seed: int, n: int):
    worst, sign_failures = 0.0, 0
    for s in derive_seeds(seed, n):
        params = random_x_params(s)
        state = x_state(params)
        sinis, conc = sinisterness(state), concurrence(state)
        worst = max(
            worst,
            abs(sinis - x_state_sinisterness(params)),
            abs(conc - x_state_concurrence(params)),
        )
        if conc > 1e-12 and not sinis < 0:
            sign_failures += 1
    detail = f"{sign_failures} estados entrelazados con 𝒮 ≥ 0" if sign_failures else None
    return worst, sign_failures == 0, detail


@identity("separable_formula", 1_000, 1e-9)
def _separable_formula(seed: int, n: int):
    worst = 0.0
    for s in derive_seeds(seed, n):
        ensemble = random_ensemble(s, terms=4)
        pipeline = det3_levi_civita(decompose(from_ensemble(ensemble)).c)
        worst = max(worst, abs(separable_sinisterness(ensemble) - pipeline))
    return worst, True, None


@identity("separable_three_terms", 1_000, 1e-12)
def _separable_three_terms(seed: int, n: int):
    worst = 0.0
    for s in derive_seeds(seed, n):
        worst = max(worst, abs(sinisterness(from_ensemble(random_ensemble(s, terms=3)))))
    return worst, True, None


@identity("purity", 1_000, 1e-12)
def _purity(seed: int, n: int):
    worst = 0.0
    for s in derive_seeds(seed, n):
        state = random_density(s)
        worst = max(worst, abs(purity_from_gamma(decompose(state).gamma) - state.purity()))
    return worst, True, None


@identity("fano_round_trip", 1_000, 1e-12)
def _fano_round_trip(seed: int, n: int):
    worst = 0.0
    for s in derive_seeds(seed, n):
        state = random_density(s)
        rebuilt = fano_reconstruct(decompose(state))
        worst = max(worst, float(np.max(np.abs(rebuilt.matrix - state.matrix))))
    return worst, True, None


@identity("gamma_w_identity", 1_000, 1e-12)
def _gamma_w_identity(seed: int, n: int):
    worst = 0.0
    for s in derive_seeds(seed, n):
        state = random_density(s)
        diff = gamma_from_g(g_matrix(state)) - decompose(state).gamma
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst, True, None


@identity("max_volume", 10_000, 1e-4)
def _max_volume(seed: int, n: int):
    best = max_volume_optimum(seed, n).volume
    exceeded = best > MAX_TETRAHEDRON_VOLUME + 1e-9
    detail = f"|𝒱| = {best!r} supera 8/(9√3)" if exceeded else None
    return MAX_TETRAHEDRON_VOLUME - best, not exceeded, detail


@identity("max_volume_regular", 1, 1e-10)
def _max_volume_regular(seed: int, n: int):
    result = max_volume_optimum(seed, 1, start=REGULAR_TETRAHEDRON, restarts=1)
    return abs(result.volume - MAX_TETRAHEDRON_VOLUME), True, None


@identity("det_expansion", 1_000, 1e-10)
def _det_expansion(seed: int, n: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        a = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / 2
        lam = float(rng.uniform(0.1, 1.0))
        exact = np.linalg.det(np.eye(4) + lam * a)
        worst = max(worst, abs(det_expansion(a, lam, 4) - exact) / max(abs(exact), 1.0))
    return worst, True, None


@identity("concurrence_cross", 1_000, 1e-8)
def _concurrence_cross(seed: int, n: int):
    worst = 0.0
    for s in derive_seeds(seed, n):
        state = random_density(s)
        worst = max(worst, abs(concurrence(state) - concurrence_hermitian_oracle(state)))
    return worst, True, None


# =============================================================================
# PERTURBACIONES E INVARIANZA
# =============================================================================


def _scaled_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), 1e-2)


@identity("werner_perturbation", 100, 1e-3)
def _werner_perturbation(seed: int, n: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in derive_seeds(seed, n):
        eps = float(rng.uniform(0.1, 1.0))
        report = werner_report(eps, random_density(s))
        worst = max(worst, _scaled_error(report.analytic_ds, report.numeric_ds))
        # 𝒞_W no es diferenciable en ε = 1/3 ni en el borde puro
        if 0.4 <= eps <= 0.95:
            worst = max(worst, _scaled_error(report.analytic_dc, report.numeric_dc))
    return worst, True, None


@identity("werner_stationarity", 100, 1e-3)
def _werner_stationarity(seed: int, n: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in derive_seeds(seed, n):
        eps = float(rng.uniform(0.1, 0.95))
        target = project_to_werner_level(random_density(s), eps)
        worst = max(worst, abs(werner_report(eps, target).numeric_ds))
    return worst, True, None


@identity("local_unitary", 1_000, 1e-8)
def _local_unitary(seed: int, n: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in derive_seeds(seed, n):
        state = random_density(s)
        rotated = local_unitary_conjugate(
            state, random_local_unitary(rng), random_local_unitary(rng)
        )
        worst = max(
            worst,
            abs(sinisterness(rotated) - sinisterness(state)),
            abs(concurrence(rotated) - concurrence(state)),
        )
    return worst, True, None


@identity("estimator_plumbing", 1_000, 1e-12)
def _estimator_plumbing(seed: int, n: int):
    worst = 0.0
    for s in derive_seeds(seed, n):
        state = random_density(s)
        diff = expected_correlations(state).c_hat - decompose(state).c
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst, True, None


# =============================================================================
# EJECUCIÓN
# =============================================================================


def run_identity(name: str, seed: int, scale: float = 1.0) -> CheckResult:
    full, tolerance, fn = IDENTITIES[name]
    samples = max(1, int(round(full * scale)))
    try:
        residual, ok, detail = fn(seed, samples)
    except Exception as e:
        logger.error(f"❌ {name}: {type(e).__name__}: {e}")
        return CheckResult(
            name=name,
            passed=False,
            residual=float("inf"),
            tolerance=tolerance,
            samples=samples,
            detail=f"{type(e).__name__}: {e}",
        )
    return CheckResult(
        name=name,
        passed=ok and _within(float(residual), tolerance),
        residual=float(residual),
        tolerance=tolerance,
        samples=samples,
        detail=detail,
    )


def run_verification(
    seed: int,
    scale: float = 0.1,
    only: Optional[list[str]] = None,
    callback: Optional[ProgressCallback] = None,
) -> list[CheckResult]:
    """
    Ejecuta las identidades registradas (o las de `only`) en orden de registro.

    Args:
        seed: Semilla maestra; cada identidad recibe una semilla derivada
        scale: Fracción de los tamaños de muestra completos
        only: Subconjunto de nombres
        callback: Receptor de eventos check_result
    """
    names = list(IDENTITIES) if only is None else list(only)
    unknown = [n for n in names if n not in IDENTITIES]
    if unknown:
        raise ValueError(f"identidades desconocidas: {unknown}")
    callback = callback or get_callback_handler(f"verify-{seed}")
    seeds = dict(zip(IDENTITIES, derive_seeds(seed, len(IDENTITIES))))

    results = []
    for name in names:
        result = run_identity(name, seeds[name], scale)
        callback.on_check(result.name, result.passed, result.residual, result.tolerance)
        if result.detail:
            callback.on_error(f"{name}: {result.detail}")
        results.append(result)
    return results
