"""Standard observables and JSON ingestion of user-supplied ones."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import FormatError, HermiticityError
from .linalg import HERMITIAN_TOL, as_matrix, as_vector, check_hermitian, operator_norm


@dataclass(frozen=True)
class Observable:
    name: str
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        check_hermitian(m, HERMITIAN_TOL, name=self.name)
        m = m.view()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def norm_bound(self) -> float:
        return operator_norm(self.matrix)


@dataclass(frozen=True)
class Grid1D:
    n: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs at least 3 points, got {self.n}")
        if not self.x_min < self.x_max:
            raise ValueError(f"empty grid interval [{self.x_min}, {self.x_max}]")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


def position_operator(grid: Grid1D) -> Observable:
    return Observable("x", np.diag(grid.points))


def difference_matrix(grid: Grid1D, boundary: str = "dirichlet") -> np.ndarray:
    """Central first-difference matrix D, so that D @ psi ~ d(psi)/dx."""
    if boundary not in ("dirichlet", "periodic"):
        raise ValueError(f"unknown boundary {boundary!r}")
    n, h = grid.n, grid.h
    d = np.zeros((n, n))
    idx = np.arange(n - 1)
    d[idx, idx + 1] = 1.0 / (2 * h)
    d[idx + 1, idx] = -1.0 / (2 * h)
    if boundary == "periodic":
        d[0, n - 1] = -1.0 / (2 * h)
        d[n - 1, 0] = 1.0 / (2 * h)
    return d


def momentum_operator(grid: Grid1D, boundary: str = "dirichlet") -> Observable:
    return Observable("p", -1j * difference_matrix(grid, boundary))


def spin_operators(two_j: int) -> tuple[Observable, Observable, Observable]:
    """Jx, Jy, Jz for spin j = two_j/2 in the basis m = j, j-1, ..., -j."""
    if two_j < 1:
        raise ValueError(f"two_j must be >= 1, got {two_j}")
    j = two_j / 2
    m = j - np.arange(two_j + 1)
    # J+|m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one row above |m>
    jplus = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1).astype(complex)
    jminus = jplus.conj().T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    return Observable("jx", jx), Observable("jy", jy), Observable("jz", np.diag(m))


# --- JSON formats --------------------------------------------------------
# Complex numbers are [re, im] pairs; matrices are row-major.


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def _complex_array(raw, what: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: entries must be [re, im] number pairs") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise FormatError(f"{what}: entries must be [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _read_json(path) -> dict:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise FormatError(f"{path}: cannot read file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from exc
    if not isinstance(payload, dict):
        raise FormatError(f"{path}: expected a JSON object")
    return payload


def observable_to_dict(obs: Observable) -> dict:
    return {
        "name": obs.name,
        "dim": obs.dim,
        "matrix": [_pairs(row) for row in obs.matrix],
    }


def observable_from_dict(payload: dict, source: str = "observable") -> Observable:
    for key in ("name", "dim", "matrix"):
        if key not in payload:
            raise FormatError(f"{source}: missing field '{key}'")
    dim = payload["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise FormatError(f"{source}: field 'dim' must be a positive integer")
    matrix = _complex_array(payload["matrix"], f"{source}: field 'matrix'")
    if matrix.shape != (dim, dim):
        raise FormatError(f"{source}: field 'matrix' has shape {matrix.shape}, expected ({dim}, {dim})")
    if not np.all(np.isfinite(matrix)):
        raise FormatError(f"{source}: field 'matrix' has non-finite entries")
    try:
        return Observable(str(payload["name"]), matrix)
    except HermiticityError as exc:
        raise HermiticityError(f"{source}: {exc}") from exc


def save_observable(obs: Observable, path) -> None:
    Path(path).write_text(json.dumps(observable_to_dict(obs)), encoding="utf-8")


def load_observable(path) -> Observable:
    return observable_from_dict(_read_json(path), source=str(path))


def state_to_dict(psi) -> dict:
    psi = as_vector(psi)
    return {"dim": int(psi.size), "amplitudes": _pairs(psi)}


def state_from_dict(payload: dict, source: str = "state") -> np.ndarray:
    for key in ("dim", "amplitudes"):
        if key not in payload:
            raise FormatError(f"{source}: missing field '{key}'")
    dim = payload["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise FormatError(f"{source}: field 'dim' must be a positive integer")
    amps = _complex_array(payload["amplitudes"], f"{source}: field 'amplitudes'")
    if amps.shape != (dim,):
        raise FormatError(f"{source}: field 'amplitudes' has shape {amps.shape}, expected ({dim},)")
    if not np.all(np.isfinite(amps)):
        raise FormatError(f"{source}: field 'amplitudes' has non-finite entries")
    return amps


def save_state(psi, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(psi)), encoding="utf-8")


def load_state(path) -> np.ndarray:
    return state_from_dict(_read_json(path), source=str(path))
