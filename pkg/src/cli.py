"""
=============================================================================
MÓDULO: Interfaz de Línea de Comandos
=============================================================================

Subcomandos:
    analyze   STATE                 informe JSON de un estado
    scan      --n --seed --mode     barrido Monte Carlo → CSV + resumen
    simulate  [STATE] --shots       estimador de 𝒮 con disparos finitos
    perturb   [STATE] --delta | --epsilon [--target]
    verify    [--scale] [--only]    suite de identidades

CÓDIGOS DE SALIDA:
    0  éxito
    1  error inesperado
    2  error de parseo o de E/S (archivo ilegible, salida no escribible)
    3  error de validación (estado no físico, parámetros fuera de rango)
    4  el barrido encontró violaciones de la envolvente
    5  alguna identidad de la suite falló
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from src.callbacks import get_callback_handler
from src.config import ToolkitConfig, get_config
from src.errors import ConstraintError, StateParseError, StateValidationError, ToolkitError
from src.experiments import (
    MODE_PRESETS,
    estimator_convergence,
    resolve_modes,
    scan_random_states,
    simulate_measurements,
    summarize_scan,
)
from src.formatting import (
    analysis_report,
    check_table_text,
    dumps_json,
    scan_csv_text,
    scan_summary_text,
    write_scan_csv,
)
from src.perturbation import perturbation_report, werner_report
from src.states import (
    BELL_PHI_PLUS,
    DensityMatrix,
    from_pure,
    load_state_file,
    random_density,
    werner,
)
from src.verification import IDENTITIES, run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_VIOLATION = 4
EXIT_IDENTITY = 5


class CliConfig(BaseModel):
    """Argumentos parseados fusionados sobre ToolkitConfig."""

    subcommand: Literal["analyze", "scan", "simulate", "perturb", "verify"]
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    target_path: Optional[Path] = None
    delta_path: Optional[Path] = None
    seed: int
    n: int = Field(ge=1)
    mode: str
    shots: int = Field(ge=1)
    tolerance: float = Field(gt=0)
    workers: int = Field(ge=1)
    bias_low: float
    bias_high: float
    threshold: float = Field(gt=0)
    progress_every: int = Field(ge=1)
    ladder: Optional[list[int]] = None
    repeats: int = Field(default=50, ge=1)
    epsilon: Optional[float] = None
    step: float = Field(default=1e-5, gt=0)
    scale: float = Field(default=0.1, gt=0)
    only: Optional[list[str]] = None
    json_output: bool = False

    @classmethod
    def from_namespace(cls, args: argparse.Namespace, config: ToolkitConfig) -> "CliConfig":
        def pick(name: str, fallback):
            value = getattr(args, name, None)
            return fallback if value is None else value

        return cls(
            subcommand=args.command,
            input_path=getattr(args, "state", None),
            output_path=getattr(args, "out", None),
            target_path=getattr(args, "target", None),
            delta_path=getattr(args, "delta", None),
            seed=pick("seed", config.default_seed),
            n=pick("n", config.scan_n),
            mode=pick("mode", config.scan_mode),
            shots=pick("shots", config.shots),
            tolerance=pick("tolerance", config.envelope_tolerance),
            workers=pick("workers", config.workers),
            bias_low=config.bias_low,
            bias_high=config.bias_high,
            threshold=pick("threshold", config.chirality_threshold),
            progress_every=config.progress_every,
            ladder=getattr(args, "ladder", None),
            repeats=pick("repeats", 50),
            epsilon=getattr(args, "epsilon", None),
            step=pick("step", 1e-5),
            scale=pick("scale", 0.1),
            only=getattr(args, "only", None),
            json_output=bool(getattr(args, "json", False)),
        )


# =============================================================================
# PARSER
# =============================================================================


def _ladder(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"escalera inválida: {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sinisterness",
        description="Kit de análisis de Sinisterness para pares de qubits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="Informe JSON de un estado")
    analyze.add_argument("state", type=Path, help="Archivo JSON {'rho': ...}")
    analyze.add_argument("--out", type=Path)
    analyze.add_argument("--threshold", type=float, help="Umbral de quiralidad")
    analyze.add_argument("--json", action="store_true", help="(el informe ya es JSON)")

    scan = sub.add_parser("scan", help="Barrido Monte Carlo del plano (𝒞, 𝒮)")
    scan.add_argument("--n", type=int)
    scan.add_argument("--seed", type=int)
    scan.add_argument("--mode", choices=sorted(MODE_PRESETS))
    scan.add_argument("--out", type=Path, help="CSV de salida (stdout si se omite)")
    scan.add_argument("--tolerance", type=float)
    scan.add_argument("--workers", type=int)
    scan.add_argument("--json", action="store_true", help="Resumen en JSON")

    simulate = sub.add_parser("simulate", help="Estimador de 𝒮 con disparos finitos")
    simulate.add_argument("state", type=Path, nargs="?", help="Bell si se omite")
    simulate.add_argument("--epsilon", type=float, help="Usar Werner(ε) como estado")
    simulate.add_argument("--shots", type=int)
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--ladder", type=_ladder, help="p.ej. 1000,10000,100000")
    simulate.add_argument("--repeats", type=int)
    simulate.add_argument("--out", type=Path)
    simulate.add_argument("--json", action="store_true")

    perturb = sub.add_parser("perturb", help="Variaciones de primer orden de 𝒞 y 𝒮")
    perturb.add_argument("state", type=Path, nargs="?")
    perturb.add_argument("--delta", type=Path, help="Archivo JSON {'delta': ...}")
    perturb.add_argument("--epsilon", type=float, help="Camino de Werner ρ_W(ε) → ρ′")
    perturb.add_argument("--target", type=Path, help="ρ′ (aleatorio con --seed si se omite)")
    perturb.add_argument("--seed", type=int)
    perturb.add_argument("--step", type=float)
    perturb.add_argument("--out", type=Path)
    perturb.add_argument("--json", action="store_true")

    verify = sub.add_parser("verify", help="Suite de identidades de forma cerrada")
    verify.add_argument("--seed", type=int)
    verify.add_argument("--scale", type=float, help="Fracción de los tamaños completos")
    verify.add_argument("--only", nargs="+", choices=list(IDENTITIES))
    verify.add_argument("--json", action="store_true")
    return parser


# =============================================================================
# SALIDAS
# =============================================================================


def _check_writable(path: Optional[Path]) -> None:
    if path is None:
        return
    parent = path.parent if str(path.parent) else Path(".")
    if path.is_dir() or not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OSError(f"ruta de salida no escribible: {path}")


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _load_delta(path: Path) -> np.ndarray:
    try:
        rows = json.loads(path.read_text(encoding="utf-8"))["delta"]
        arr = np.array([[complex(z[0], z[1]) for z in row] for row in rows], dtype=complex)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as e:
        raise StateParseError(f"archivo de perturbación mal formado: {e}") from e
    if arr.shape != (4, 4):
        raise StateParseError(f"'delta' debe ser 4×4, llegó {arr.shape}")
    return arr


# =============================================================================
# SUBCOMANDOS
# =============================================================================


def cmd_analyze(cfg: CliConfig) -> int:
    _check_writable(cfg.output_path)
    state = load_state_file(cfg.input_path)
    _emit(dumps_json(analysis_report(state, cfg.threshold)), cfg.output_path)
    return EXIT_OK


def cmd_scan(cfg: CliConfig) -> int:
    _check_writable(cfg.output_path)
    modes = resolve_modes(cfg.mode)
    callback = get_callback_handler(f"scan-{cfg.seed}", cfg.progress_every)
    records = scan_random_states(
        cfg.n,
        cfg.seed,
        modes,
        tol=cfg.tolerance,
        bias_low=cfg.bias_low,
        bias_high=cfg.bias_high,
        workers=cfg.workers,
        callback=callback,
    )
    summary = summarize_scan(records, cfg.seed, modes, cfg.bias_low, cfg.bias_high)
    text = dumps_json(summary.model_dump()) if cfg.json_output else scan_summary_text(summary)
    if cfg.output_path is None:
        sys.stdout.write(scan_csv_text(records))
        sys.stderr.write(text)
    else:
        write_scan_csv(records, cfg.output_path)
        sys.stdout.write(text)
    return EXIT_VIOLATION if summary.total_violations else EXIT_OK


def _simulation_state(cfg: CliConfig) -> DensityMatrix:
    if cfg.input_path is not None:
        return load_state_file(cfg.input_path)
    if cfg.epsilon is not None:
        return werner(cfg.epsilon)
    return from_pure(BELL_PHI_PLUS)


def cmd_simulate(cfg: CliConfig) -> int:
    _check_writable(cfg.output_path)
    state = _simulation_state(cfg)
    payload = {"estimate": simulate_measurements(state, cfg.shots, cfg.seed).to_json_dict()}
    if cfg.ladder:
        table = estimator_convergence(state, cfg.ladder, cfg.repeats, cfg.seed)
        payload["convergence"] = table.model_dump()
    _emit(dumps_json(payload), cfg.output_path)
    return EXIT_OK


def cmd_perturb(cfg: CliConfig) -> int:
    _check_writable(cfg.output_path)
    if cfg.epsilon is not None:
        target = (
            load_state_file(cfg.target_path)
            if cfg.target_path is not None
            else random_density(cfg.seed)
        )
        report = werner_report(cfg.epsilon, target, cfg.step)
    else:
        if cfg.input_path is None or cfg.delta_path is None:
            raise ConstraintError("perturb requiere STATE y --delta, o --epsilon")
        state = load_state_file(cfg.input_path)
        report = perturbation_report(state, _load_delta(cfg.delta_path), cfg.step)
    _emit(dumps_json(report.model_dump()), cfg.output_path)
    return EXIT_OK


def cmd_verify(cfg: CliConfig) -> int:
    callback = get_callback_handler(f"verify-{cfg.seed}", cfg.progress_every)
    results = run_verification(cfg.seed, cfg.scale, cfg.only, callback)
    if cfg.json_output:
        sys.stdout.write(dumps_json([r.model_dump() for r in results]))
    else:
        sys.stdout.write(check_table_text(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_IDENTITY


COMMANDS = {
    "analyze": cmd_analyze,
    "scan": cmd_scan,
    "simulate": cmd_simulate,
    "perturb": cmd_perturb,
    "verify": cmd_verify,
}


def _fail(code: int, invariant: str, message: str) -> int:
    sys.stderr.write(f"error [{invariant}]: {message}\n")
    logger.debug(f"❌ Salida {code} ({invariant})")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Punto de entrada. Devuelve el código de salida."""
    args = build_parser().parse_args(argv)
    try:
        cfg = CliConfig.from_namespace(args, get_config())
        return COMMANDS[cfg.subcommand](cfg)
    except StateParseError as e:
        return _fail(EXIT_IO, e.invariant, str(e))
    except OSError as e:
        return _fail(EXIT_IO, "io", str(e))
    except (StateValidationError, ConstraintError) as e:
        return _fail(EXIT_VALIDATION, e.invariant, str(e))
    except ValidationError as e:
        return _fail(EXIT_VALIDATION, "arguments", str(e))
    except ValueError as e:
        return _fail(EXIT_VALIDATION, "arguments", str(e))
    except ToolkitError as e:
        return _fail(EXIT_UNEXPECTED, e.invariant, str(e))
