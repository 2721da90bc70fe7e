"""
=============================================================================
MÓDULO: Configuración del Kit de Sinisterness
=============================================================================

Centraliza tolerancias, semillas y parámetros de muestreo. Cada valor puede
sobreescribirse desde el entorno (archivo .env) y, por encima, desde la CLI.

ARQUITECTURA:
- ToolkitConfig: modelo pydantic con defaults leídos de variables SINIS_*
- get_config(): singleton de proceso
- setup_logging(): handler colorlog para los puntos de entrada
"""

import logging
import os
from typing import Optional

import colorlog
from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

# Cargar variables de entorno
load_dotenv()

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


class ToolkitConfig(BaseModel):
    """
    Configuración del kit.

    Los defaults se evalúan al instanciar, así un cambio en el entorno se
    refleja tras reset_config().
    """

    default_seed: int = Field(
        default_factory=lambda: int(os.getenv("SINIS_SEED", "20240917")),
        description="Semilla por defecto de la CLI",
    )
    scan_n: int = Field(
        default_factory=lambda: int(os.getenv("SINIS_SCAN_N", "10000")), ge=1
    )
    scan_mode: str = Field(
        default_factory=lambda: os.getenv("SINIS_SCAN_MODE", "biased"),
        description="Preset de modos de muestreo para barridos",
    )
    shots: int = Field(
        default_factory=lambda: int(os.getenv("SINIS_SHOTS", "10000")), ge=1
    )
    envelope_tolerance: float = Field(
        default_factory=lambda: float(os.getenv("SINIS_TOLERANCE", "1e-9")), gt=0
    )
    chirality_threshold: float = Field(
        default_factory=lambda: float(os.getenv("SINIS_CHIRALITY_THRESHOLD", "1e-12")),
        gt=0,
    )
    bias_low: float = Field(
        default_factory=lambda: float(os.getenv("SINIS_BIAS_LOW", "0.8")), ge=0, le=1
    )
    bias_high: float = Field(
        default_factory=lambda: float(os.getenv("SINIS_BIAS_HIGH", "1.0")), ge=0, le=1
    )
    workers: int = Field(
        default_factory=lambda: int(os.getenv("SINIS_WORKERS", "1")), ge=1
    )
    log_level: str = Field(default_factory=lambda: os.getenv("SINIS_LOG_LEVEL", "INFO"))
    progress_every: int = Field(
        default_factory=lambda: int(os.getenv("SINIS_PROGRESS_EVERY", "10000")), ge=1
    )


# Singleton para reutilización
_config_instance: Optional[ToolkitConfig] = None


def get_config() -> ToolkitConfig:
    """
    Patrón Singleton para evitar múltiples lecturas del entorno.
    """
    global _config_instance
    if _config_instance is None:
        _config_instance = ToolkitConfig()
        logger.debug(
            f"⚙️ Configuración cargada: seed={_config_instance.default_seed} "
            f"| tol={_config_instance.envelope_tolerance}"
        )
    return _config_instance


def reset_config() -> None:
    global _config_instance
    _config_instance = None


def setup_logging(level: Optional[str] = None) -> None:
    """
    Instala un handler coloreado en el logger raíz (stderr).

    Args:
        level: Nivel de logging; por defecto el de la configuración
    """
    level_name = (level or get_config().log_level).upper()
    handler = colorlog.StreamHandler()
    handler.setFormatter(
        colorlog.ColoredFormatter(
            "%(log_color)s" + LOG_FORMAT,
            log_colors={
                "DEBUG": "cyan",
                "INFO": "green",
                "WARNING": "yellow",
                "ERROR": "red",
                "CRITICAL": "bold_red",
            },
        )
    )
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(getattr(logging, level_name, logging.INFO))
