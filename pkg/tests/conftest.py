"""Fixtures compartidas."""

import json
import os

import numpy as np
import pytest

import src.callbacks as callbacks
from src.config import reset_config
from src.states import BELL_PHI_PLUS, DensityMatrix, from_pure, random_density


@pytest.fixture(autouse=True)
def _fresh_singletons(monkeypatch):
    """Config y callback nuevos en cada test, sin variables SINIS_* heredadas."""
    for var in [v for v in os.environ if v.startswith("SINIS_")]:
        monkeypatch.delenv(var, raising=False)
    reset_config()
    callbacks._global_callback = None
    yield
    reset_config()
    callbacks._global_callback = None


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def bell():
    return from_pure(BELL_PHI_PLUS)


@pytest.fixture
def maximally_mixed():
    return DensityMatrix(np.eye(4) / 4)


@pytest.fixture
def entangled_full_rank():
    """0.75·|ψ⟩⟨ψ| + 0.25·σ con ψ = 0.8|00⟩ + 0.6|11⟩: rango completo, 𝒞 > 0."""
    psi = np.array([0.8, 0, 0, 0.6], dtype=complex)
    noise = random_density(3).matrix
    return DensityMatrix(0.75 * np.outer(psi, psi.conj()) + 0.25 * noise)


def random_traceless_hermitian(rng, scale=0.1):
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = (h + h.conj().T) / 2
    h -= np.trace(h) / 4 * np.eye(4)
    return scale * h


def state_json(matrix) -> str:
    arr = np.asarray(matrix, dtype=complex)
    return json.dumps({"rho": [[[z.real, z.imag] for z in row] for row in arr]})


@pytest.fixture
def write_state(tmp_path):
    """Escribe una matriz como archivo de estado y devuelve la ruta."""

    def _write(matrix, name="state.json"):
        path = tmp_path / name
        path.write_text(state_json(matrix), encoding="utf-8")
        return path

    return _write
