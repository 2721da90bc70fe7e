"""
=============================================================================
MÓDULO: Sistema de Callbacks de Progreso
=============================================================================

Puente entre los barridos/verificaciones y el log: cada etapa emite un
evento con payload estructurado que se registra y se conserva en memoria
para inspección (tests, resúmenes).

ARQUITECTURA:
- ProgressCallback: emite eventos scan_start, scan_progress, violation,
  scan_finish, check_result, error
- get_callback_handler(): singleton por run_id, protegido con un lock
"""

import logging
import threading
from datetime import datetime
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class ProgressCallback:
    """
    Callback handler para barridos y suites de verificación.

    EVENTOS EMITIDOS:
    - scan_start: Inicio de un barrido
    - scan_progress: Cada `progress_every` registros
    - violation: Un registro viola la envolvente
    - scan_finish: Fin del barrido con resumen
    - check_result: Resultado de una identidad de la suite
    - error: Cualquier error durante la ejecución
    """

    def __init__(self, run_id: str = "default", progress_every: int = 10000):
        """
        Args:
            run_id: Identificador del run (aparece en cada evento)
            progress_every: Frecuencia de eventos de progreso
        """
        self.run_id = run_id
        self.progress_every = max(1, progress_every)
        self.start_time = datetime.now()
        self.events: List[Dict[str, Any]] = []
        logger.debug(f"🎬 Callback handler iniciado (run: {run_id})")

    def _emit(self, event_name: str, data: Dict[str, Any], level: int = logging.DEBUG):
        """
        Registra el evento y lo conserva en `events`.

        El payload guardado no lleva marcas de tiempo para que los resúmenes
        sean reproducibles; el tiempo transcurrido solo va al log.
        """
        payload = {"event": event_name, "run_id": self.run_id, **data}
        self.events.append(payload)
        elapsed = (datetime.now() - self.start_time).total_seconds()
        logger.log(level, f"{data.get('message', event_name)} [{elapsed:.1f}s]")

    # =========================================================================
    # BARRIDOS
    # =========================================================================

    def on_scan_start(self, n: int, modes: List[str]):
        self._emit(
            "scan_start",
            {"n": n, "modes": modes, "message": f"🚀 Barrido de {n} estados ({', '.join(modes)})"},
            logging.INFO,
        )

    def on_record(self, index: int, total: int):
        if (index + 1) % self.progress_every == 0 or index + 1 == total:
            self._emit(
                "scan_progress",
                {"done": index + 1, "total": total, "message": f"⏳ {index + 1}/{total} estados"},
            )

    def on_chunk(self, done_before: int, done: int, total: int):
        """Avance de un bloque completo: emite si cruza algún múltiplo de progress_every."""
        if done // self.progress_every > done_before // self.progress_every or done == total:
            self._emit(
                "scan_progress",
                {"done": done, "total": total, "message": f"⏳ {done}/{total} estados"},
            )

    def on_violation(self, seed: int, bound: str, concurrence: float, sinisterness: float):
        """Un registro cae fuera de la envolvente (dato, no error)."""
        self._emit(
            "violation",
            {
                "seed": seed,
                "bound": bound,
                "concurrence": concurrence,
                "sinisterness": sinisterness,
                "message": f"⚠️ Violación de la cota {bound} (seed={seed})",
            },
            logging.WARNING,
        )

    def on_scan_finish(self, violations: int, separable_fraction: float):
        self._emit(
            "scan_finish",
            {
                "violations": violations,
                "separable_fraction": separable_fraction,
                "message": f"🎉 Barrido completado: {violations} violaciones, "
                f"{100 * separable_fraction:.1f}% separables",
            },
            logging.INFO,
        )

    # =========================================================================
    # VERIFICACIÓN Y ERRORES
    # =========================================================================

    def on_check(self, name: str, passed: bool, residual: float, tolerance: float):
        mark = "✅" if passed else "❌"
        self._emit(
            "check_result",
            {
                "name": name,
                "passed": passed,
                "residual": residual,
                "tolerance": tolerance,
                "message": f"{mark} {name}: residuo {residual:.3e} (tol {tolerance:.1e})",
            },
            logging.INFO if passed else logging.ERROR,
        )

    def on_error(self, error_message: str):
        self._emit(
            "error",
            {"error": error_message, "message": f"❌ Error: {error_message[:100]}"},
            logging.ERROR,
        )

    def events_named(self, event_name: str) -> List[Dict[str, Any]]:
        return [e for e in self.events if e["event"] == event_name]


# Singleton global
_global_callback: Optional[ProgressCallback] = None
_callback_lock = threading.Lock()


def get_callback_handler(run_id: str = "default", progress_every: int = 10000) -> ProgressCallback:
    """
    Factory para obtener instancia de callback.

    Returns:
        La instancia existente si el run_id coincide; si no, una nueva
    """
    global _global_callback
    with _callback_lock:
        if _global_callback is None or _global_callback.run_id != run_id:
            _global_callback = ProgressCallback(run_id, progress_every)
        return _global_callback
