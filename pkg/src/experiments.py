"""
=============================================================================
MÓDULO: Experimentos Numéricos
=============================================================================

Barridos Monte Carlo del plano (𝒞, 𝒮) y un simulador de medidas con un
número finito de disparos que estima 𝒮 sin reconstruir ρ.

FUNDAMENTACIÓN TEÓRICA:
- Envolvente: para estados entrelazados −𝒞⁴ ≥ 𝒮 ≥ −((2𝒞+1)/3)³
  (estados puros arriba, Werner abajo); separables |𝒮| ≤ 1/27
- Estimador: 9 configuraciones (σ_i, σ_j), ĉ_ij = ⟨xy⟩ − ⟨x⟩⟨y⟩,
  𝒮̂ = Det{ĉ}; sesgo O(1/N) por el estimador de covarianza plug-in

ARQUITECTURA:
- evaluate_record / scan_random_states: registros por semilla derivada,
  opcionalmente repartidos en un pool de procesos, ordenados por semilla
- simulate_measurements / expected_correlations / estimator_convergence
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.bloch import PAULIS
from src.callbacks import ProgressCallback, get_callback_handler
from src.concurrence import concurrence
from src.errors import ConstraintError
from src.numerics import det3_levi_civita
from src.sinisterness import SEPARABLE_BOUND, sinisterness
from src.states import DensityMatrix, SamplingMode, as_matrix, biased_sample, derive_seeds

logger = logging.getLogger(__name__)

SEPARABLE_TOL = 1e-12

MODE_PRESETS: dict[str, tuple[SamplingMode, ...]] = {
    "uniform": (SamplingMode.UNIFORM,),
    "toward-pure": (SamplingMode.TOWARD_PURE,),
    "toward-werner": (SamplingMode.TOWARD_WERNER,),
    "biased": (SamplingMode.TOWARD_PURE, SamplingMode.TOWARD_WERNER),
    "mixed": (SamplingMode.UNIFORM, SamplingMode.TOWARD_PURE, SamplingMode.TOWARD_WERNER),
}


def resolve_modes(mode_mix: Union[str, Sequence[Union[str, SamplingMode]]]) -> tuple[SamplingMode, ...]:
    if isinstance(mode_mix, str):
        if mode_mix not in MODE_PRESETS:
            raise ValueError(f"preset de modos desconocido: {mode_mix!r}")
        return MODE_PRESETS[mode_mix]
    modes = tuple(SamplingMode(m) for m in mode_mix)
    if not modes:
        raise ValueError("se requiere al menos un modo")
    return modes


# =============================================================================
# BARRIDO DE ESTADOS
# =============================================================================


class ScanRecord(BaseModel):
    """Un estado muestreado y su posición respecto a la envolvente."""

    seed: int
    mode: SamplingMode
    concurrence: float
    sinisterness: float
    purity: float
    separable: bool
    upper_violation: bool = False
    lower_violation: bool = False
    separable_violation: bool = False

    @property
    def violation(self) -> bool:
        return self.upper_violation or self.lower_violation or self.separable_violation


def envelope_flags(conc: float, sinis: float, tol: float = 1e-9) -> tuple[bool, bool, bool, bool]:
    """(separable, viola cota superior, viola cota inferior, viola ±1/27)."""
    if conc <= SEPARABLE_TOL:
        return True, False, False, abs(sinis) > SEPARABLE_BOUND + tol
    upper = sinis > -(conc**4) + tol
    lower = sinis < -(((2 * conc + 1) / 3) ** 3) - tol
    return False, upper, lower, False


def evaluate_record(
    seed: int,
    mode: Union[SamplingMode, str],
    bias_low: float = 0.8,
    bias_high: float = 1.0,
    tol: float = 1e-9,
) -> ScanRecord:
    state, meta = biased_sample(seed, mode, bias_low, bias_high)
    conc = concurrence(state)
    sinis = sinisterness(state)
    separable, upper, lower, sep_violation = envelope_flags(conc, sinis, tol)
    return ScanRecord(
        seed=seed,
        mode=meta.mode,
        concurrence=conc,
        sinisterness=sinis,
        purity=state.purity(),
        separable=separable,
        upper_violation=upper,
        lower_violation=lower,
        separable_violation=sep_violation,
    )


def _evaluate_chunk(args: tuple) -> list[ScanRecord]:
    jobs, bias_low, bias_high, tol = args
    return [evaluate_record(seed, mode, bias_low, bias_high, tol) for seed, mode in jobs]


def scan_random_states(
    n: int,
    seed: int,
    mode_mix: Union[str, Sequence[Union[str, SamplingMode]]] = "biased",
    tol: float = 1e-9,
    bias_low: float = 0.8,
    bias_high: float = 1.0,
    workers: int = 1,
    callback: Optional[ProgressCallback] = None,
) -> list[ScanRecord]:
    """
    Muestrea n estados y los contrasta con la envolvente (𝒞, 𝒮).

    El registro i usa la semilla derivada i y el modo modes[i % len(modes)].
    La salida se ordena por semilla, así es idéntica con cualquier número de
    workers.
    """
    if n < 1:
        raise ValueError("n ≥ 1")
    modes = resolve_modes(mode_mix)
    callback = callback or get_callback_handler(f"scan-{seed}")
    callback.on_scan_start(n, [m.value for m in modes])

    jobs = [(s, modes[i % len(modes)]) for i, s in enumerate(derive_seeds(seed, n))]
    if workers > 1:
        size = -(-n // (workers * 4))
        chunks = [
            (jobs[i : i + size], bias_low, bias_high, tol) for i in range(0, n, size)
        ]
        records: list[ScanRecord] = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_evaluate_chunk, chunks):
                done_before = len(records)
                records.extend(part)
                callback.on_chunk(done_before, len(records), n)
    else:
        records = []
        for index, (s, mode) in enumerate(jobs):
            records.append(evaluate_record(s, mode, bias_low, bias_high, tol))
            callback.on_record(index, n)

    records.sort(key=lambda rec: rec.seed)
    for rec in records:
        for bound, flag in (
            ("upper", rec.upper_violation),
            ("lower", rec.lower_violation),
            ("separable", rec.separable_violation),
        ):
            if flag:
                callback.on_violation(rec.seed, bound, rec.concurrence, rec.sinisterness)
    summary = summarize_scan(records, seed, modes, bias_low, bias_high)
    callback.on_scan_finish(summary.total_violations, summary.separable_fraction)
    return records


class ScanSummary(BaseModel):
    n: int
    seed: int
    modes: list[str]
    upper_violations: int
    lower_violations: int
    separable_violations: int
    total_violations: int
    separable_count: int
    separable_fraction: float
    min_sinisterness: float
    max_sinisterness: float
    max_concurrence: float
    bias_range: tuple[float, float]


def summarize_scan(
    records: Sequence[ScanRecord],
    seed: int,
    modes: Sequence[SamplingMode],
    bias_low: float = 0.8,
    bias_high: float = 1.0,
) -> ScanSummary:
    sinis = [r.sinisterness for r in records]
    separable = sum(r.separable for r in records)
    return ScanSummary(
        n=len(records),
        seed=seed,
        modes=[m.value for m in modes],
        upper_violations=sum(r.upper_violation for r in records),
        lower_violations=sum(r.lower_violation for r in records),
        separable_violations=sum(r.separable_violation for r in records),
        total_violations=sum(r.violation for r in records),
        separable_count=separable,
        separable_fraction=separable / len(records),
        min_sinisterness=min(sinis),
        max_sinisterness=max(sinis),
        max_concurrence=max(r.concurrence for r in records),
        bias_range=(bias_low, bias_high),
    )


# =============================================================================
# SIMULADOR DE MEDIDAS
# =============================================================================

# Resultados (x, y) en el orden de las probabilidades conjuntas
OUTCOMES_X = np.array([1.0, 1.0, -1.0, -1.0])
OUTCOMES_Y = np.array([1.0, -1.0, 1.0, -1.0])


def _setting_probabilities(rho: np.ndarray, i: int, j: int) -> np.ndarray:
    """P(x, y) = Tr{ρ·P^i_x ⊗ P^j_y} para (x, y) ∈ {++, +−, −+, −−}."""
    probs = []
    for x, y in zip(OUTCOMES_X, OUTCOMES_Y):
        proj_a = (PAULIS[0] + x * PAULIS[i]) / 2
        proj_b = (PAULIS[0] + y * PAULIS[j]) / 2
        probs.append(np.real(np.trace(rho @ np.kron(proj_a, proj_b))))
    p = np.clip(np.array(probs), 0.0, None)
    return p / p.sum()


def _moments(weights: np.ndarray) -> tuple[float, float, float, float]:
    """(⟨x⟩, ⟨y⟩, ĉ, var de la covarianza por muestra) bajo pesos normalizados."""
    mx = float(weights @ OUTCOMES_X)
    my = float(weights @ OUTCOMES_Y)
    cov = float(weights @ (OUTCOMES_X * OUTCOMES_Y)) - mx * my
    z = (OUTCOMES_X - mx) * (OUTCOMES_Y - my)
    spread = max(float(weights @ z**2) - cov**2, 0.0)
    return mx, my, cov, spread


class MeasurementEstimate(BaseModel):
    """Estimación de a, b, c y 𝒮 a partir de N disparos por configuración."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    shots: Optional[int]
    a_hat: np.ndarray
    b_hat: np.ndarray
    c_hat: np.ndarray
    sinisterness_hat: float
    sinisterness_exact: float
    standard_error: float

    def to_json_dict(self) -> dict:
        return {
            "shots": self.shots,
            "a_hat": self.a_hat.tolist(),
            "b_hat": self.b_hat.tolist(),
            "c_hat": self.c_hat.tolist(),
            "sinisterness_hat": self.sinisterness_hat,
            "sinisterness_exact": self.sinisterness_exact,
            "standard_error": self.standard_error,
        }


def _cofactors3(c: np.ndarray) -> np.ndarray:
    """∂Det{c}/∂c_ij."""
    return np.array([np.cross(c[1], c[2]), np.cross(c[2], c[0]), np.cross(c[0], c[1])])


def _estimate(
    state: DensityMatrix, shots: Optional[int], rng: Optional[np.random.Generator]
) -> MeasurementEstimate:
    rho = as_matrix(state)
    mean_x = np.empty((3, 3))
    mean_y = np.empty((3, 3))
    c_hat = np.empty((3, 3))
    variance = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            probs = _setting_probabilities(rho, i + 1, j + 1)
            if shots is None:
                weights = probs
            else:
                weights = rng.multinomial(shots, probs) / shots
            mean_x[i, j], mean_y[i, j], c_hat[i, j], spread = _moments(weights)
            if shots is not None:
                variance[i, j] = spread / shots
    estimate = det3_levi_civita(c_hat)
    se = float(np.sqrt(np.sum(_cofactors3(c_hat) ** 2 * variance)))
    return MeasurementEstimate(
        shots=shots,
        a_hat=mean_x.mean(axis=1),
        b_hat=mean_y.mean(axis=0),
        c_hat=np.clip(c_hat, -1.0, 1.0),
        sinisterness_hat=estimate,
        sinisterness_exact=sinisterness(state),
        standard_error=se,
    )


def simulate_measurements(state: DensityMatrix, shots: int, seed: int) -> MeasurementEstimate:
    """
    Simula `shots` pares de resultados (±1, ±1) para cada una de las 9
    configuraciones (σ_i, σ_j) y estima 𝒮̂ = Det{ĉ}.
    """
    if shots < 1:
        raise ValueError("shots ≥ 1")
    return _estimate(state, shots, np.random.default_rng(seed))


def expected_correlations(state: DensityMatrix) -> MeasurementEstimate:
    """Límite de infinitos disparos: las mismas fórmulas con probabilidades exactas."""
    return _estimate(state, None, None)


class ConvergenceRow(BaseModel):
    shots: int
    rms_error: float
    mean_estimate: float
    bias: float


class ConvergenceTable(BaseModel):
    rows: list[ConvergenceRow]
    slope: Optional[float]
    exact: float


def estimator_convergence(
    state: DensityMatrix, ladder: Sequence[int], repeats: int, seed: int
) -> ConvergenceTable:
    """
    Error RMS de 𝒮̂ sobre `repeats` repeticiones para cada peldaño de disparos;
    pendiente log-log ajustada cuando hay ≥ 2 peldaños.
    """
    rungs = [int(s) for s in ladder]
    if not rungs or any(b <= a for a, b in zip(rungs, rungs[1:])):
        raise ConstraintError(f"la escalera de disparos debe ser creciente: {rungs}")
    if repeats < 1:
        raise ValueError("repeats ≥ 1")
    exact = sinisterness(state)
    children = np.random.SeedSequence(seed).spawn(len(rungs))
    rows = []
    for shots, child in zip(rungs, children):
        rng = np.random.default_rng(child)
        estimates = np.array(
            [_estimate(state, shots, rng).sinisterness_hat for _ in range(repeats)]
        )
        rows.append(
            ConvergenceRow(
                shots=shots,
                rms_error=float(np.sqrt(np.mean((estimates - exact) ** 2))),
                mean_estimate=float(estimates.mean()),
                bias=float(estimates.mean() - exact),
            )
        )
    slope = None
    if len(rows) >= 2 and all(r.rms_error > 0 for r in rows):
        slope = float(
            np.polyfit(np.log10(rungs), np.log10([r.rms_error for r in rows]), 1)[0]
        )
    return ConvergenceTable(rows=rows, slope=slope, exact=exact)
