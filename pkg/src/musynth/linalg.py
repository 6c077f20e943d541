"""Dense complex linear algebra kernel.

Vectors and matrices are plain numpy arrays. ``as_vector`` / ``as_matrix``
validate and coerce user input; everything downstream assumes validated
arrays and never mutates its arguments.

The general (non-Hermitian) eigensolver is a complex Schur decomposition:
Householder reduction to upper Hessenberg form followed by single-shift QR
sweeps with Wilkinson shifts and deflation. Eigenvectors come from
back-substitution on the triangular factor.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, HermiticityError

log = logging.getLogger(__name__)

EPS = np.finfo(float).eps
HERMITIAN_TOL = 1e-10
EIGEN_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: np.ndarray


def as_vector(values) -> np.ndarray:
    v = np.asarray(values, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_matrix(values) -> np.ndarray:
    m = np.asarray(values)
    if not np.iscomplexobj(m):
        m = m.astype(float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def check_dims(*arrays: np.ndarray) -> int:
    dims = {a.shape[0] for a in arrays}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def inner(psi, phi) -> complex:
    """Inner product, conjugate-linear in ``psi``."""
    psi = np.asarray(psi)
    phi = np.asarray(phi)
    if psi.shape != phi.shape:
        raise DimensionError(f"dimension mismatch: {psi.shape} vs {phi.shape}")
    return complex(np.vdot(psi, phi))


def norm(phi) -> float:
    return float(np.linalg.norm(phi))


def normalize(phi) -> np.ndarray:
    phi = as_vector(phi)
    n = norm(phi)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return phi / n


def operator_norm(m: np.ndarray) -> float:
    """Cheap upper bound on the spectral norm (max absolute row sum)."""
    return float(np.abs(m).sum(axis=1).max())


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its largest-magnitude entry is real and positive.

    Entries within 1e-12 of the maximum magnitude count as ties; the lowest
    index wins.
    """
    mags = np.abs(v)
    top = mags.max()
    if top == 0.0:
        return v.copy()
    idx = int(np.argmax(mags >= top * (1 - 1e-12)))
    return v * (np.conj(v[idx]) / mags[idx])


def hermiticity_defect(m: np.ndarray) -> tuple[float, tuple[int, int]]:
    diff = np.abs(m - m.conj().T)
    idx = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[idx]), (int(idx[0]), int(idx[1]))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    worst, _ = hermiticity_defect(m)
    return worst <= tol * (1.0 + float(np.abs(m).max()))


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL, name: str = "matrix") -> None:
    worst, (i, j) = hermiticity_defect(m)
    if worst > tol * (1.0 + float(np.abs(m).max())):
        raise HermiticityError(
            f"{name} is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = {worst:.3e}"
        )


def commutator_c(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return C with [A, B] = iC."""
    check_dims(a, b)
    c = -1j * (a @ b - b @ a)
    if is_hermitian(a) and is_hermitian(b):
        check_hermitian(c, name="commutator")
    return c


def hermitian_eigenpairs(m: np.ndarray, tol: float = HERMITIAN_TOL) -> list[EigenPair]:
    m = as_matrix(m)
    check_hermitian(m, tol)
    values, vectors = np.linalg.eigh(m)
    return [EigenPair(complex(values[k]), canonical_phase(vectors[:, k])) for k in range(len(values))]


# --- general eigensolver -------------------------------------------------


def _hessenberg(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction: returns (H, Q) with a = Q H Q^H."""
    n = a.shape[0]
    h = a.astype(complex, copy=True)
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = h[k + 1 :, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        q[:, k + 1 :] -= 2.0 * np.outer(q[:, k + 1 :] @ v, v.conj())
        h[k + 2 :, k] = 0.0
    return h, q


def _givens(x: complex, y: complex) -> np.ndarray:
    """Unitary G with G @ [x, y] = [r, 0]."""
    if y == 0:
        return np.eye(2, dtype=complex)
    ax = abs(x)
    r = np.hypot(ax, abs(y))
    if ax == 0:
        s = np.conj(y) / abs(y)
        return np.array([[0.0, s], [-np.conj(s), 0.0]], dtype=complex)
    c = ax / r
    s = (x / ax) * np.conj(y) / r
    return np.array([[c, s], [-np.conj(s), c]], dtype=complex)


def _wilkinson_shift(h: np.ndarray, hi: int) -> complex:
    a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
    c, d = h[hi, hi - 1], h[hi, hi]
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    mu1 = 0.5 * (a + d) + disc
    mu2 = 0.5 * (a + d) - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _qr_sweep(h: np.ndarray, z: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    n = h.shape[0]
    x, y = h[lo, lo] - mu, h[lo + 1, lo]
    for k in range(lo, hi):
        g = _givens(x, y)
        j0 = max(lo, k - 1)
        h[k : k + 2, j0:n] = g @ h[k : k + 2, j0:n]
        i1 = min(k + 3, hi + 1)
        gh = g.conj().T
        h[:i1, k : k + 2] = h[:i1, k : k + 2] @ gh
        z[:, k : k + 2] = z[:, k : k + 2] @ gh
        if k > lo:
            h[k + 1, k - 1] = 0.0
        if k < hi - 1:
            x, y = h[k + 1, k], h[k + 2, k]


def schur(a: np.ndarray, max_sweeps_per_value: int = 30) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form: returns (T, Z) with a = Z T Z^H, T upper triangular."""
    a = as_matrix(a)
    n = a.shape[0]
    h, z = _hessenberg(a)
    if n == 1:
        return h, z
    hnorm = max(float(np.abs(h).max()), np.finfo(float).tiny)
    floor = EPS * hnorm * 1e-3
    hi = n - 1
    its = 0
    total = 0
    limit = max_sweeps_per_value * n
    best = np.inf
    while hi > 0:
        lo = hi
        while lo > 0:
            scale = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if scale == 0.0:
                scale = hnorm
            if abs(h[lo, lo - 1]) <= max(EPS * scale, floor):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        best = min(best, float(abs(h[hi, hi - 1])))
        if total >= limit:
            raise ConvergenceError("QR iteration did not converge", best)
        its += 1
        total += 1
        if its % 10 == 0:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            mu = _wilkinson_shift(h, hi)
        _qr_sweep(h, z, lo, hi, mu)
    return np.triu(h), z


def _triangular_eigvecs(t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    small = EPS * max(float(np.abs(t).max()), np.finfo(float).tiny)
    out = np.zeros((n, n), dtype=complex)
    for k in range(n):
        x = np.zeros(k + 1, dtype=complex)
        x[k] = 1.0
        lam = t[k, k]
        for i in range(k - 1, -1, -1):
            d = t[i, i] - lam
            if abs(d) < small:
                d = small
            x[i] = -(t[i, i + 1 : k + 1] @ x[i + 1 : k + 1]) / d
            if abs(x[i]) > 1e100:
                x /= abs(x[i])
        out[: k + 1, k] = x / np.linalg.norm(x)
    return out


def eigen_residual(m: np.ndarray, value: complex, vector: np.ndarray) -> float:
    return float(np.linalg.norm(m @ vector - value * vector))


def _refine(m: np.ndarray, value: complex, v: np.ndarray, steps: int = 3) -> np.ndarray:
    n = m.shape[0]
    shift = value + EPS * (1.0 + operator_norm(m))
    shifted = m - shift * np.eye(n)
    for _ in range(steps):
        try:
            v = np.linalg.solve(shifted, v)
        except np.linalg.LinAlgError:
            break
        v = v / np.linalg.norm(v)
    return v


def general_eigenpairs(m: np.ndarray, tol: float = EIGEN_RESIDUAL_TOL) -> list[EigenPair]:
    """All eigenpairs of a square complex matrix, ordered by (Re, Im).

    For defective matrices only genuinely independent eigenvectors are
    returned, so the list can be shorter than the dimension. Every returned
    pair satisfies ``|Mv - mu v| <= tol * (1 + |M|)``.
    """
    m = as_matrix(m)
    n = m.shape[0]
    t, z = schur(m)
    values = np.diag(t).copy()
    vectors = z @ _triangular_eigvecs(t)
    bound = tol * (1.0 + np.linalg.norm(m, 2))
    cluster = np.sqrt(EPS) * (1.0 + float(np.abs(values).max()))

    order = np.lexsort((values.imag, values.real))
    kept: list[EigenPair] = []
    for k in order:
        mu = complex(values[k])
        v = vectors[:, k] / np.linalg.norm(vectors[:, k])
        if eigen_residual(m, mu, v) > bound:
            v = _refine(m, mu, v)
            if eigen_residual(m, mu, v) > bound:
                log.debug("dropping eigenvalue %s: residual above %.3e", mu, bound)
                continue
        same = [p.vector for p in kept if abs(p.value - mu) <= cluster]
        if same:
            basis, _ = np.linalg.qr(np.column_stack(same))
            if np.linalg.norm(v - basis @ (basis.conj().T @ v)) < 1e-6:
                continue
        kept.append(EigenPair(mu, canonical_phase(v)))
    if not kept and n > 0:
        raise ConvergenceError("no eigenvector met the residual bound", float("nan"))
    return kept
