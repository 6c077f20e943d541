import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from musynth.errors import DegenerateInputError, DimensionError, ResolutionError, SignAmbiguousError
from musynth.linalg import general_eigenpairs
from musynth.mus import (
    FAMILY_CSV_HEADER,
    MusCandidate,
    MusVerdict,
    Reason,
    _dedupe,
    build_k_operator,
    check_mus,
    condition_residual,
    find_mus_at_lambda,
    gaussian_packet,
    inequality_chain,
    lambda_of_state,
    read_family_csv,
    sweep_lambda,
    verify_gaussian,
    write_family_csv,
)
from musynth.observables import Grid1D, momentum_operator, position_operator
from musynth.uncertainty import expectation, robertson_report

from util import random_hermitian, random_state

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0])
C8, S8 = math.cos(math.pi / 8), math.sin(math.pi / 8)


def bloch(psi):
    """Bloch vector of a spin-1/2 state, computed from the amplitudes directly."""
    u, d = psi
    return np.array([2 * (np.conj(u) * d).real, 2 * (np.conj(u) * d).imag, abs(u) ** 2 - abs(d) ** 2])


# --- condition residual and lambda -----------------------------------------


def test_condition_residual_hand_oracle(spin_half, up):
    jx, jy, _ = spin_half
    # Jx|up> = |down>/2, Jy|up> = i|down>/2
    assert condition_residual(up, jx, jy, -1.0) == pytest.approx(0.0, abs=1e-15)
    assert condition_residual(up, jx, jy, 1.0) == pytest.approx(1.0)


def test_condition_residual_common_eigenvector():
    a = np.diag([1.0, 2.0, 3.0])
    b = np.diag([-1.0, 5.0, 0.5])
    for lam in (-2.0, 0.3, 7.0):
        assert condition_residual([0, 1, 0], a, b, lam) == 0.0


def test_lambda_of_state_spin_up(spin_half, up):
    assert lambda_of_state(up, spin_half[0], spin_half[1]) == pytest.approx(-1.0, abs=1e-15)


def test_lambda_of_state_gaussian():
    grid = Grid1D(2048, -6.0, 8.0)
    psi = gaussian_packet(grid, 1.0, 2.0, 0.7)
    lam = lambda_of_state(psi, position_operator(grid), momentum_operator(grid))
    assert lam == pytest.approx(-2 * 0.7**2, rel=1e-3)


def test_lambda_of_state_eigenvector_of_a():
    assert lambda_of_state([1, 0], SZ, SX) == 0.0


def test_lambda_of_state_degenerate_b():
    with pytest.raises(DegenerateInputError):
        lambda_of_state(np.array([1, 1]) / np.sqrt(2), SZ, SX)


def test_lambda_of_state_sign_ambiguous(spin_half):
    psi = np.array([1, np.exp(1j * np.pi / 4)]) / np.sqrt(2)  # equatorial: <Jz> = 0
    with pytest.raises(SignAmbiguousError):
        lambda_of_state(psi, spin_half[0], spin_half[1])


# --- inequality chain -------------------------------------------------------


def test_inequality_chain_tight_at_mus(spin_half, up):
    g1, g2 = inequality_chain(up, spin_half[0], spin_half[1])
    assert abs(g1) <= 1e-15 and abs(g2) <= 1e-15


def test_inequality_chain_degenerate():
    assert inequality_chain([1, 0], SZ, SZ) == (0.0, 0.0)


def test_inequality_chain_xz_plane_state_is_tight(spin_half):
    # any spin-1/2 state with n_y = 0 saturates the (Jx, Jy) bound
    psi = np.array([C8, S8])
    assert bloch(psi)[1] == 0.0
    g1, g2 = inequality_chain(psi, spin_half[0], spin_half[1])
    assert abs(g1) <= 1e-12 and abs(g2) <= 1e-12


def test_inequality_chain_slack_off_plane(spin_half):
    psi = np.array([C8, np.exp(1j * np.pi / 4) * S8])
    g1, g2 = inequality_chain(psi, spin_half[0], spin_half[1])
    assert g1 > 1e-3 or g2 > 1e-3


# --- check_mus --------------------------------------------------------------


def test_check_mus_spin_up(spin_half, up):
    v = check_mus(up, spin_half[0], spin_half[1], 1e-9)
    assert v.is_mus and v.reason is Reason.OK
    assert v.lam == pytest.approx(-1.0, abs=1e-12)


def test_check_mus_eigenstate_of_a_has_zero_lambda():
    v = check_mus([1, 0], SZ, SX)
    assert v.is_mus and v.lam == 0.0
    assert v.report.product == 0.0 and v.report.bound == 0.0


def test_check_mus_xz_plane_state(spin_half):
    psi = np.array([C8, S8])
    n = bloch(psi)
    v = check_mus(psi, spin_half[0], spin_half[1])
    assert v.is_mus
    # |lambda| = dA/dB with dA^2 = (1 - nx^2)/4, dB^2 = 1/4, sign opposite to nz/2
    assert v.lam == pytest.approx(-math.sqrt(1 - n[0] ** 2), abs=1e-12)


def test_check_mus_off_plane_state(spin_half):
    psi = np.array([C8, np.exp(1j * np.pi / 4) * S8])
    n = bloch(psi)
    v = check_mus(psi, spin_half[0], spin_half[1])
    assert not v.is_mus and v.reason is Reason.NONZERO_DEFECT
    # product^2 - bound^2 = nx^2 ny^2 / 16
    r = v.report
    assert r.product**2 - r.bound**2 == pytest.approx(n[0] ** 2 * n[1] ** 2 / 16, abs=1e-14)


def test_check_mus_delta_b_zero():
    v = check_mus(np.array([1, 1]) / np.sqrt(2), SZ, SX)
    assert not v.is_mus and v.reason is Reason.DELTA_B_ZERO and v.lam is None


def test_check_mus_zero_commutator_expectation(spin_half):
    psi = np.array([1, np.exp(1j * np.pi / 4)]) / np.sqrt(2)
    v = check_mus(psi, spin_half[0], spin_half[1])
    assert not v.is_mus and v.reason is Reason.NONZERO_DEFECT


def test_verdict_dict_round_trip(spin_half, up):
    v = check_mus(up, spin_half[0], spin_half[1])
    assert MusVerdict.from_dict(v.to_dict()) == v


def test_residual_defect_identity(rng):
    # |(A-a)psi - i lam (B-b)psi|^2 = 2 |lam| defect at lam = lambda_of_state
    for _ in range(50):
        dim = int(rng.integers(2, 9))
        a, b, psi = random_hermitian(rng, dim), random_hermitian(rng, dim), random_state(rng, dim)
        r = robertson_report(psi, a, b)
        lam = lambda_of_state(psi, a, b)
        assert condition_residual(psi, a, b, lam) ** 2 == pytest.approx(2 * abs(lam) * r.defect, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 8), theta=st.floats(0, 2 * np.pi))
def test_check_mus_phase_invariance(seed, dim, theta):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, dim), random_hermitian(rng, dim)
    lam = float(rng.uniform(0.2, 2.0))
    psi = general_eigenpairs(a - 1j * lam * b)[0].vector
    v1 = check_mus(psi, a, b)
    v2 = check_mus(np.exp(1j * theta) * psi, a, b)
    assert v1.is_mus == v2.is_mus and v1.reason == v2.reason
    for x, y in [(v1.lam, v2.lam), (v1.condition_residual, v2.condition_residual), (v1.gap1, v2.gap1), (v1.gap2, v2.gap2)]:
        assert x == pytest.approx(y, abs=1e-10)


# --- synthesis -------------------------------------------------------------


def test_build_k_operator(spin_half):
    jx, jy, _ = spin_half
    assert np.array_equal(build_k_operator(jx, jy, 0.0), jx.matrix)
    assert np.allclose(build_k_operator(jx, jy, -1.0), [[0, 1], [0, 0]])
    assert np.allclose(build_k_operator(jx, jy, 1.0), [[0, 0], [1, 0]])
    with pytest.raises(DimensionError):
        build_k_operator(jx, np.eye(3), 1.0)


def test_find_spin_half_lambda_minus_one(spin_half):
    cands = find_mus_at_lambda(spin_half[0], spin_half[1], -1.0)
    assert len(cands) == 1
    c = cands[0]
    assert np.allclose(c.state, [1, 0]) and c.mu == 0 and c.a == 0 and c.b == 0
    assert c.verdict.is_mus


def test_find_spin_half_lambda_plus_one(spin_half):
    cands = find_mus_at_lambda(spin_half[0], spin_half[1], 1.0)
    assert len(cands) == 1
    c = cands[0]
    assert np.allclose(c.state, [0, 1]) and c.mu == 0
    assert c.verdict.report.c == pytest.approx(-0.5)
    assert c.verdict.lam == pytest.approx(1.0)


def test_find_spin_one(spin_one):
    jx, jy, _ = spin_one
    cands = find_mus_at_lambda(jx, jy, -0.5)
    assert cands
    for c in cands:
        assert c.verdict.is_mus and c.verdict.report.defect <= 1e-10
        assert c.a == pytest.approx(expectation(c.state, jx), abs=1e-9)
        assert c.b == pytest.approx(expectation(c.state, jy), abs=1e-9)


def test_find_lambda_zero_falls_back_to_eigenvectors_of_a(spin_half):
    cands = find_mus_at_lambda(spin_half[0], spin_half[1], 0.0)
    assert len(cands) == 2
    assert all(c.from_hermitian and c.verdict.lam == 0.0 for c in cands)


def test_dedupe_drops_rephased_copy(spin_half, up):
    v = check_mus(up, spin_half[0], spin_half[1])
    c1 = MusCandidate(up, 0j, -1.0, 0.0, 0.0, v)
    c2 = MusCandidate(1j * up, 0j, -1.0, 0.0, 0.0, v)
    assert _dedupe([c1, c2]) == [c1]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 10), lam=st.floats(-3, 3).filter(lambda x: abs(x) > 1e-3))
def test_eigenvectors_are_mus(seed, dim, lam):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, dim), random_hermitian(rng, dim)
    k = a - 1j * lam * b
    for pair in general_eigenpairs(k):
        v = check_mus(pair.vector, a, b, 1e-8)
        assert v.is_mus
        r = v.report
        assert abs(2 * lam**2 * r.delta_b**2 + lam * r.c) <= 1e-8 * (1 + abs(r.c))
        assert abs(r.delta_a - abs(lam) * r.delta_b) <= 1e-8
        assert v.lam == pytest.approx(lam, rel=1e-8)
        assert pair.value.real == pytest.approx(r.a, abs=1e-9)
        assert -pair.value.imag / lam == pytest.approx(r.b, abs=1e-9)


def test_sweep_spin_half(spin_half):
    fam = sweep_lambda(spin_half[0], spin_half[1], [-1.0])
    assert fam.lambdas == [-1.0]
    assert len(fam.candidates) == 1 and np.allclose(fam.candidates[0].state, [1, 0])


def test_sweep_spin_one(spin_one):
    fam = sweep_lambda(spin_one[0], spin_one[1], [-2, -1, -0.5, 0.5, 1, 2])
    assert len(fam.groups) == 6 and all(note is None for note in fam.notes)
    assert fam.candidates and all(c.verdict.is_mus for c in fam.candidates)
    # K = J+ and J- are single Jordan blocks
    assert len(fam.groups[1]) == 1 and len(fam.groups[4]) == 1


def test_sweep_preconditions(spin_half):
    with pytest.raises(ValueError, match="empty"):
        sweep_lambda(spin_half[0], spin_half[1], [])
    with pytest.raises(ValueError, match="nonzero"):
        sweep_lambda(spin_half[0], spin_half[1], [1.0, 0.0])


def test_sweep_records_failures(spin_half, monkeypatch):
    import musynth.mus as mus
    from musynth.errors import ConvergenceError

    real = mus.find_mus_at_lambda

    def flaky(a, b, lam, tol):
        if lam == 2.0:
            raise ConvergenceError("forced", 0.1)
        return real(a, b, lam, tol)

    monkeypatch.setattr(mus, "find_mus_at_lambda", flaky)
    fam = mus.sweep_lambda(spin_half[0], spin_half[1], [1.0, 2.0])
    assert fam.lambdas == [1.0, 2.0]
    assert fam.groups[1] == [] and "forced" in fam.notes[1] and fam.notes[0] is None


def test_family_csv_round_trip(tmp_path, spin_one):
    fam = sweep_lambda(spin_one[0], spin_one[1], [-2.0, 0.5, 1.0 / 3.0])
    path = tmp_path / "fam.csv"
    write_family_csv(fam, path)
    assert path.read_text().splitlines()[0] == ",".join(FAMILY_CSV_HEADER)
    rows = read_family_csv(path)
    assert len(rows) == len(fam.candidates)
    for row, expected in zip(rows, fam.rows()):
        got = [row[k] for k in FAMILY_CSV_HEADER]
        assert got == expected  # 17 significant digits are lossless


# --- Gaussian packet ---------------------------------------------------------


def test_gaussian_packet_norm_and_mean():
    grid = Grid1D(2048, -6.0, 8.0)
    psi = gaussian_packet(grid, 1.0, 2.0, 0.7)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-14)
    assert expectation(psi, position_operator(grid)) == pytest.approx(1.0, abs=1e-6)


def test_gaussian_packet_periodic_momentum():
    sigma = 0.7
    grid = Grid1D(2801, 1 - 10 * sigma, 1 + 10 * sigma)
    assert grid.h <= sigma / 50
    psi = gaussian_packet(grid, 1.0, 2.0, sigma)
    assert expectation(psi, momentum_operator(grid, "periodic")) == pytest.approx(2.0, abs=1e-3)


@pytest.mark.parametrize(
    "grid, sigma",
    [(Grid1D(8, -6.0, 8.0), 0.7), (Grid1D(2048, -3.0, 5.0), 0.7), (Grid1D(100, -6, 8), -1.0)],
)
def test_gaussian_packet_resolution_errors(grid, sigma):
    with pytest.raises(ResolutionError):
        gaussian_packet(grid, 1.0, 2.0, sigma)


def test_verify_gaussian_worked_example():
    res = verify_gaussian(Grid1D(2048, -6.0, 8.0), 1.0, 2.0, 0.7)
    assert res.verdict.is_mus
    assert res.verdict.lam == pytest.approx(-0.98, abs=1e-3)
    assert res.eigenvalue == pytest.approx(1.0 + 1.96j, abs=1e-15)
    assert res.eigen_residual <= 1e-3


def test_verify_gaussian_second_order_convergence():
    coarse = verify_gaussian(Grid1D(1024, -6.0, 8.0), 1.0, 2.0, 0.7)
    fine = verify_gaussian(Grid1D(2047, -6.0, 8.0), 1.0, 2.0, 0.7)
    assert coarse.eigen_residual / fine.eigen_residual == pytest.approx(4.0, rel=0.05)


def test_verify_gaussian_periodic_boundary():
    res = verify_gaussian(Grid1D(1024, -6.0, 8.0), 1.0, 2.0, 0.7, boundary="periodic")
    assert res.verdict.is_mus
