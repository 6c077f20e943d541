"""Expectation values, uncertainties and the Robertson bound for (psi, A, B)."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateInputError, HermiticityError, NormalizationError
from .linalg import as_vector, check_dims, inner, norm

NORM_TOL = 1e-9
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class UncertaintyReport:
    a: float
    b: float
    c: float
    delta_a: float
    delta_b: float
    product: float
    bound: float
    defect: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "UncertaintyReport":
        return cls(**{k: float(payload[k]) for k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class SchwarzWitness:
    gap: float
    proportional: bool
    z: complex | None


def matrix_of(obs) -> np.ndarray:
    return obs.matrix if hasattr(obs, "matrix") else np.asarray(obs)


def check_state(psi, tol: float = NORM_TOL) -> np.ndarray:
    psi = as_vector(psi)
    n = norm(psi)
    if abs(n - 1.0) > tol:
        raise NormalizationError(f"state is not normalized: |psi| = {n!r}")
    return psi


def _mean(psi: np.ndarray, a: np.ndarray, a_psi: np.ndarray, imag_tol: float) -> float:
    value = np.vdot(psi, a_psi)
    if abs(value.imag) > imag_tol * (1.0 + float(np.abs(a).max())):
        raise HermiticityError(f"expectation value has imaginary part {value.imag:.3e}")
    return float(value.real)


def expectation(psi, obs, norm_tol: float = NORM_TOL, imag_tol: float = IMAG_TOL) -> float:
    psi = check_state(psi, norm_tol)
    a = matrix_of(obs)
    check_dims(psi, a)
    return _mean(psi, a, a @ psi, imag_tol)


def uncertainty_of(psi, obs, norm_tol: float = NORM_TOL, imag_tol: float = IMAG_TOL) -> float:
    """Standard deviation |(A - a) psi|."""
    psi = check_state(psi, norm_tol)
    a = matrix_of(obs)
    check_dims(psi, a)
    a_psi = a @ psi
    mean = _mean(psi, a, a_psi, imag_tol)
    return norm(a_psi - mean * psi)


def centered(psi, obs, norm_tol: float = NORM_TOL, imag_tol: float = IMAG_TOL):
    """Return (mean, (A - mean) psi, A psi)."""
    a = matrix_of(obs)
    check_dims(psi, a)
    a_psi = a @ psi
    mean = _mean(psi, a, a_psi, imag_tol)
    return mean, a_psi - mean * psi, a_psi


def robertson_report(psi, obs_a, obs_b, norm_tol: float = NORM_TOL, imag_tol: float = IMAG_TOL) -> UncertaintyReport:
    psi = check_state(psi, norm_tol)
    a, da_psi, a_psi = centered(psi, obs_a, norm_tol, imag_tol)
    b, db_psi, b_psi = centered(psi, obs_b, norm_tol, imag_tol)
    # <psi, -i[A,B] psi> = 2 Im <A psi, B psi> for Hermitian A, B
    c = 2.0 * inner(a_psi, b_psi).imag
    delta_a = norm(da_psi)
    delta_b = norm(db_psi)
    product = delta_a * delta_b
    bound = 0.5 * abs(c)
    return UncertaintyReport(a, b, c, delta_a, delta_b, product, bound, product - bound)


def schwarz_gap(psi, phi, tol: float = 1e-9) -> SchwarzWitness:
    psi = as_vector(psi)
    phi = as_vector(phi)
    check_dims(psi, phi)
    phi_norm = norm(phi)
    if phi_norm == 0.0:
        raise DegenerateInputError("phi must be non-zero")
    psi_norm = norm(psi)
    gap = psi_norm * phi_norm - abs(inner(psi, phi))
    z = inner(phi, psi) / inner(phi, phi)
    proportional = norm(psi - z * phi) <= tol * psi_norm
    return SchwarzWitness(gap, proportional, z if proportional else None)
