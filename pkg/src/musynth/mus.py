"""Minimum uncertainty states: membership test, lambda, and eigenvector synthesis.

A normalized state psi with nonzero spread in B attains equality in the
Robertson bound for (A, B) exactly when

    (A - a) psi = i * lam * (B - b) psi

for a real ``lam`` with |lam| = dA/dB and sign opposite to c = <-i[A, B]>.
Equivalently psi is an eigenvector of K = A - i lam B with eigenvalue
a - i lam b, which is how ``find_mus_at_lambda`` builds new ones.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConvergenceError, DegenerateInputError, ResolutionError, SignAmbiguousError
from .linalg import (
    check_dims,
    general_eigenpairs,
    hermitian_eigenpairs,
    inner,
    norm,
    operator_norm,
)
from .observables import Grid1D, momentum_operator, position_operator, state_to_dict
from .uncertainty import UncertaintyReport, centered, check_state, expectation, matrix_of, robertson_report

log = logging.getLogger(__name__)

MUS_TOL = 1e-8
FAMILY_CSV_HEADER = [
    "lambda", "index", "re_mu", "im_mu", "a", "b", "delta_a", "delta_b",
    "product", "bound", "defect", "residual", "is_mus",
]


class Reason(str, Enum):
    OK = "ok"
    NONZERO_DEFECT = "nonzero_defect"
    DELTA_B_ZERO = "delta_b_zero"
    RESIDUAL_EXCEEDS_TOL = "residual_exceeds_tol"


@dataclass(frozen=True)
class MusVerdict:
    is_mus: bool
    lam: float | None
    condition_residual: float
    gap1: float
    gap2: float
    report: UncertaintyReport
    reason: Reason

    def to_dict(self) -> dict:
        return {
            "is_mus": self.is_mus,
            "lambda": self.lam,
            "condition_residual": self.condition_residual,
            "gap1": self.gap1,
            "gap2": self.gap2,
            "reason": self.reason.value,
            "report": self.report.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MusVerdict":
        lam = payload["lambda"]
        return cls(
            is_mus=bool(payload["is_mus"]),
            lam=None if lam is None else float(lam),
            condition_residual=float(payload["condition_residual"]),
            gap1=float(payload["gap1"]),
            gap2=float(payload["gap2"]),
            report=UncertaintyReport.from_dict(payload["report"]),
            reason=Reason(payload["reason"]),
        )


@dataclass(frozen=True)
class MusCandidate:
    state: np.ndarray
    mu: complex
    lam: float
    a: float
    b: float
    verdict: MusVerdict
    # set when lam == 0 and the state came from the Hermitian eigenvectors of A
    from_hermitian: bool = False

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "mu": [self.mu.real, self.mu.imag],
            "a": self.a,
            "b": self.b,
            "from_hermitian": self.from_hermitian,
            "state": state_to_dict(self.state),
            "verdict": self.verdict.to_dict(),
        }


@dataclass
class MusFamily:
    lambdas: list[float]
    groups: list[list[MusCandidate]]
    notes: list[str | None] = field(default_factory=list)

    @property
    def candidates(self) -> list[MusCandidate]:
        return [c for group in self.groups for c in group]

    def rows(self) -> list[list]:
        out = []
        for lam, group in zip(self.lambdas, self.groups):
            for index, cand in enumerate(group):
                r = cand.verdict.report
                out.append([
                    lam, index, cand.mu.real, cand.mu.imag, cand.a, cand.b,
                    r.delta_a, r.delta_b, r.product, r.bound, r.defect,
                    cand.verdict.condition_residual, cand.verdict.is_mus,
                ])
        return out


def _scalar_stats(psi, obs_a, obs_b):
    """Report plus the centred vectors and their overlap w = ((A-a)psi, (B-b)psi)."""
    report = robertson_report(psi, obs_a, obs_b)
    _, da_psi, _ = centered(psi, obs_a)
    _, db_psi, _ = centered(psi, obs_b)
    return report, da_psi, db_psi, inner(da_psi, db_psi)


def _norm_bound(obs) -> float:
    return obs.norm_bound if hasattr(obs, "norm_bound") else operator_norm(np.asarray(obs))


def condition_residual(psi, obs_a, obs_b, lam: float) -> float:
    """|(A - a) psi - i lam (B - b) psi|."""
    psi = check_state(psi)
    _, da_psi, _ = centered(psi, obs_a)
    _, db_psi, _ = centered(psi, obs_b)
    return norm(da_psi - 1j * lam * db_psi)


def _lambda_from(report: UncertaintyReport, tol: float) -> float:
    if report.delta_b <= tol:
        raise DegenerateInputError(f"delta B = {report.delta_b:.3e} is below tolerance {tol:.1e}")
    if report.delta_a <= tol:
        return 0.0
    if abs(report.c) <= tol:
        raise SignAmbiguousError(f"sign of lambda undefined: |c| = {abs(report.c):.3e}")
    return -math.copysign(report.delta_a / report.delta_b, report.c)


def lambda_of_state(psi, obs_a, obs_b, tol: float = 1e-9) -> float:
    return _lambda_from(robertson_report(psi, obs_a, obs_b), tol)


def inequality_chain(psi, obs_a, obs_b) -> tuple[float, float]:
    """Slack in dA dB >= |w| >= |Im w|, with w = ((A-a)psi, (B-b)psi)."""
    psi = check_state(psi)
    report, _, _, w = _scalar_stats(psi, obs_a, obs_b)
    return report.product - abs(w), abs(w) - abs(w.imag)


def check_mus(psi, obs_a, obs_b, tol: float = MUS_TOL) -> MusVerdict:
    psi = check_state(psi)
    report, da_psi, db_psi, w = _scalar_stats(psi, obs_a, obs_b)
    gap1 = report.product - abs(w)
    gap2 = abs(w) - abs(w.imag)

    if report.delta_b <= tol:
        return MusVerdict(False, None, report.delta_a, gap1, gap2, report, Reason.DELTA_B_ZERO)
    try:
        lam = _lambda_from(report, tol)
    except SignAmbiguousError:
        # closest real lambda is 0 when c = 0; the residual there is dA
        return MusVerdict(False, None, report.delta_a, gap1, gap2, report, Reason.NONZERO_DEFECT)

    residual = norm(da_psi - 1j * lam * db_psi)
    scale = 1.0 + _norm_bound(obs_a) + abs(lam) * _norm_bound(obs_b)
    defect_ok = report.defect <= tol * (1.0 + report.bound)
    if lam == 0.0:
        defect_ok = defect_ok and report.bound <= tol
    if not defect_ok:
        reason = Reason.NONZERO_DEFECT
    elif residual > tol * scale:
        reason = Reason.RESIDUAL_EXCEEDS_TOL
    else:
        reason = Reason.OK
    return MusVerdict(reason is Reason.OK, lam, residual, gap1, gap2, report, reason)


def build_k_operator(obs_a, obs_b, lam: float) -> np.ndarray:
    a, b = matrix_of(obs_a), matrix_of(obs_b)
    check_dims(a, b)
    if not math.isfinite(lam):
        raise ValueError(f"lambda must be finite, got {lam}")
    return a - 1j * lam * b


def _dedupe(cands: list[MusCandidate]) -> list[MusCandidate]:
    kept: list[MusCandidate] = []
    for cand in cands:
        if all(abs(inner(k.state, cand.state)) < 1 - 1e-8 for k in kept):
            kept.append(cand)
    return kept


def find_mus_at_lambda(obs_a, obs_b, lam: float, tol: float = MUS_TOL) -> list[MusCandidate]:
    """Verified minimum uncertainty states among the eigenvectors of A - i lam B.

    Raises ConvergenceError if the eigensolver fails.
    """
    out = []
    if lam == 0.0:
        log.warning("lambda = 0: falling back to the eigenvectors of A")
        check_dims(matrix_of(obs_a), matrix_of(obs_b))
        for pair in hermitian_eigenpairs(matrix_of(obs_a)):
            verdict = check_mus(pair.vector, obs_a, obs_b, tol)
            if verdict.is_mus:
                b = expectation(pair.vector, obs_b)
                out.append(MusCandidate(pair.vector, pair.value, 0.0, pair.value.real, b, verdict, True))
        return _dedupe(out)

    k = build_k_operator(obs_a, obs_b, lam)
    for pair in general_eigenpairs(k, tol):
        verdict = check_mus(pair.vector, obs_a, obs_b, tol)
        if verdict.is_mus:
            mu = pair.value
            out.append(MusCandidate(pair.vector, mu, lam, mu.real, -mu.imag / lam, verdict))
    return _dedupe(out)


def sweep_lambda(obs_a, obs_b, grid, tol: float = MUS_TOL) -> MusFamily:
    lambdas = [float(x) for x in grid]
    if not lambdas:
        raise ValueError("lambda grid is empty")
    if any(x == 0.0 for x in lambdas):
        raise ValueError("lambda must be nonzero")
    family = MusFamily([], [], [])
    for lam in lambdas:
        try:
            group, note = find_mus_at_lambda(obs_a, obs_b, lam, tol), None
        except ConvergenceError as exc:
            log.error("lambda = %g: %s", lam, exc)
            group, note = [], str(exc)
        family.lambdas.append(lam)
        family.groups.append(group)
        family.notes.append(note)
    return family


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_family_csv(family: MusFamily, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(FAMILY_CSV_HEADER)
        for row in family.rows():
            writer.writerow([_fmt(v) for v in row])


def read_family_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != FAMILY_CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        rows = []
        for raw in reader:
            row = {k: float(v) for k, v in raw.items() if k not in ("index", "is_mus")}
            row["index"] = int(raw["index"])
            row["is_mus"] = raw["is_mus"] == "true"
            rows.append(row)
    return rows


# --- Gaussian wave packet ------------------------------------------------


def gaussian_packet(grid: Grid1D, x0: float, k: float, sigma: float) -> np.ndarray:
    """exp(ikx - (x - x0)^2 / 4 sigma^2) sampled on the grid, unit discrete norm."""
    if not sigma > 0:
        raise ResolutionError(f"sigma must be positive, got {sigma}")
    if grid.h > sigma / 4:
        raise ResolutionError(f"grid spacing {grid.h:.4g} does not resolve sigma = {sigma} (need h <= sigma/4)")
    slack = 1e-12 * max(1.0, abs(grid.x_min), abs(grid.x_max))
    if grid.x_min > x0 - 8 * sigma + slack or grid.x_max < x0 + 8 * sigma - slack:
        raise ResolutionError(
            f"grid [{grid.x_min}, {grid.x_max}] truncates the packet; need [x0 - 8 sigma, x0 + 8 sigma]"
        )
    x = grid.points
    psi = np.exp(1j * k * x - (x - x0) ** 2 / (4 * sigma**2))
    return psi / norm(psi)


@dataclass(frozen=True)
class GaussianVerification:
    verdict: MusVerdict
    eigen_residual: float
    eigenvalue: complex
    expected_lambda: float
    state: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.to_dict(),
            "lambda": self.verdict.lam,
            "expected_lambda": self.expected_lambda,
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
            "eigen_residual": self.eigen_residual,
        }


def verify_gaussian(
    grid: Grid1D, x0: float, k: float, sigma: float, boundary: str = "dirichlet", tol: float = 1e-3
) -> GaussianVerification:
    psi = gaussian_packet(grid, x0, k, sigma)
    xop = position_operator(grid)
    pop = momentum_operator(grid, boundary)
    verdict = check_mus(psi, xop, pop, tol)
    eigenvalue = complex(x0, 2 * sigma**2 * k)
    # (x + 2 sigma^2 d/dx) psi with d/dx = iP
    lhs = xop.matrix @ psi + 2 * sigma**2 * (1j * (pop.matrix @ psi))
    residual = norm(lhs - eigenvalue * psi) / (abs(eigenvalue) or 1.0)
    return GaussianVerification(verdict, residual, eigenvalue, -2 * sigma**2, psi)
