import numpy as np


def random_hermitian(rng, n, scale=1.0):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (g + g.conj().T) / 2


def random_state(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def brute_report(psi, a, b):
    """Uncertainty statistics straight from the textbook formulas."""
    mean = lambda m: (psi.conj() @ m @ psi).real
    ma, mb = mean(a), mean(b)
    va = mean(a @ a) - ma**2
    vb = mean(b @ b) - mb**2
    c = (psi.conj() @ (-1j * (a @ b - b @ a)) @ psi).real
    return ma, mb, c, np.sqrt(max(va, 0.0)), np.sqrt(max(vb, 0.0))
