import math

import numpy as np
import pytest
from scipy.special import sici

from ghostsim.core import PhysicsContext

ACCEPTANCE_LINES = []


@pytest.fixture
def ctx():
    return PhysicsContext.natural()


def radial_antiderivative(x):
    """Antiderivative of (1 - sin(x)/x)/x: ln x + sin(x)/x - Ci(x)."""
    _, ci = sici(x)
    return math.log(x) + math.sin(x) / x - ci


def exact_pair_distance(positions, weights, k_min, k_max, alpha):
    """Closed-form int dk (alpha/pi)/k sum_jl w_j w_l sinc(k d_jl) for neutral weights.

    Independent of the package's quadrature; uses the sine/cosine integrals.
    """
    pos = np.asarray(positions, dtype=float)
    w = np.asarray(weights, dtype=float)
    assert abs(w.sum()) < 1e-12
    total = 0.0
    for j in range(len(w)):
        for l in range(j + 1, len(w)):
            d = float(np.linalg.norm(pos[j] - pos[l]))
            if d == 0.0:
                # coincident points: 1 - sinc(0) = 0, no contribution
                continue
            total += w[j] * w[l] * (radial_antiderivative(k_max * d) - radial_antiderivative(k_min * d))
    return -2.0 * alpha / math.pi * total


def exact_single_charge_n(delta_r, q, k_min, k_max, alpha):
    if delta_r == 0:
        return 0.0
    return 2.0 * alpha / math.pi * q * q * (
        radial_antiderivative(k_max * delta_r) - radial_antiderivative(k_min * delta_r)
    )


def spherical_average(f, n_theta=200, n_phi=200):
    """Product rule over the unit sphere: Gauss-Legendre in cos(theta), trapezoid in phi.

    Returns the integral of f(unit_vectors) over solid angle.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    ct = x[:, None]
    st = np.sqrt(1 - ct**2)
    dirs = np.stack(
        [st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], np.broadcast_to(ct, (n_theta, n_phi))], axis=-1
    ).reshape(-1, 3)
    weights = (w[:, None] * np.full((1, n_phi), 2 * np.pi / n_phi)).ravel()
    return float(np.dot(weights, f(dirs)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
