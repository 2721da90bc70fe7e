"""
=============================================================================
MÓDULO: Formato de Salidas
=============================================================================

Convierte resultados del kit en salidas estables: CSV de barridos, informes
JSON y resúmenes de texto. Misma entrada y semilla → mismos bytes.

ARQUITECTURA:
- format_float: 17 cifras significativas (round-trip exacto de float64)
- write_scan_csv: una fila por ScanRecord
- analysis_report: agrega Bloch, Γ, 𝒮, quiralidad, 𝒞 y cotas de un estado
- dumps_json / scan_summary_text / check_table_text
"""

import io
import json
from pathlib import Path
from typing import Any, Optional, Sequence, TextIO, Union

import numpy as np
import pandas as pd

from src.bloch import decompose
from src.concurrence import concurrence, r_eigenvalues
from src.sinisterness import (
    CHIRALITY_THRESHOLD,
    classify_chirality,
    sinisterness,
    sinisterness_observable,
)
from src.states import DensityMatrix

CSV_HEADER = ["seed", "mode", "concurrence", "sinisterness", "purity", "separable", "violation"]
ENTANGLED_TOL = 1e-12


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def _plain(value: Any) -> Any:
    """Convierte arrays y escalares numpy a tipos JSON nativos."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def dumps_json(payload: Any) -> str:
    return json.dumps(_plain(payload), indent=2, ensure_ascii=False) + "\n"


# =============================================================================
# CSV DE BARRIDOS
# =============================================================================


def write_scan_rows(records: Sequence[Any], stream: TextIO) -> None:
    rows = [
        [
            rec.seed,
            rec.mode.value,
            format_float(rec.concurrence),
            format_float(rec.sinisterness),
            format_float(rec.purity),
            int(rec.separable),
            int(rec.violation),
        ]
        for rec in records
    ]
    frame = pd.DataFrame(rows, columns=CSV_HEADER)
    frame.to_csv(stream, index=False, lineterminator="\n")


def write_scan_csv(records: Sequence[Any], path: Union[str, Path]) -> None:
    """
    Raises:
        OSError: si la ruta no es escribible
    """
    with open(path, "w", encoding="utf-8", newline="") as handle:
        write_scan_rows(records, handle)


def scan_csv_text(records: Sequence[Any]) -> str:
    buffer = io.StringIO()
    write_scan_rows(records, buffer)
    return buffer.getvalue()


# =============================================================================
# INFORMES
# =============================================================================


def analysis_report(state: DensityMatrix, threshold: Optional[float] = None) -> dict:
    """
    Informe completo de un estado: Bloch, Γ, 𝒮 por ambos caminos, SVD
    quiral, 𝒞, espectro de ℛ, pureza y cotas de la envolvente.
    """
    data = decompose(state)
    label, svd = classify_chirality(data.c, threshold or CHIRALITY_THRESHOLD)
    sinis = sinisterness(state)
    conc = concurrence(state)
    return {
        "bloch": data.to_json_dict(),
        "gamma": data.gamma.tolist(),
        "sinisterness": sinis,
        "sinisterness_observable": sinisterness_observable(state),
        "chirality": {
            "singular_values": None if svd is None else svd.s.tolist(),
            "detU": None if svd is None else svd.det_u,
            "detV": None if svd is None else svd.det_v,
        },
        "classification": label,
        "concurrence": conc,
        "r_eigenvalues": r_eigenvalues(state).tolist(),
        "purity": state.purity(),
        "entangled": conc > ENTANGLED_TOL,
        "bounds": {"upper": -(conc**4), "lower": -(((2 * conc + 1) / 3) ** 3)},
    }


def scan_summary_text(summary: Any) -> str:
    lines = [
        f"estados: {summary.n} (seed {summary.seed}, modos {', '.join(summary.modes)})",
        f"violaciones: {summary.total_violations} "
        f"(superior {summary.upper_violations}, inferior {summary.lower_violations}, "
        f"separable {summary.separable_violations})",
        f"fracción separable: {summary.separable_fraction:.4f} ({summary.separable_count})",
        f"𝒮 ∈ [{format_float(summary.min_sinisterness)}, {format_float(summary.max_sinisterness)}]",
        f"𝒞 máx: {format_float(summary.max_concurrence)}",
    ]
    return "\n".join(lines) + "\n"


def check_table_text(results: Sequence[Any]) -> str:
    width = max((len(r.name) for r in results), default=4)
    lines = []
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{mark}  {r.name:<{width}}  residuo {r.residual:.3e}  tol {r.tolerance:.1e}"
        )
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} identidades verificadas")
    return "\n".join(lines) + "\n"
