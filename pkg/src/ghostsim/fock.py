"""Single-mode scalar-photon Fock space with the Gupta-Bleuler parity metric.

States are stored as coefficient vectors in the ordinary number basis
``|0>, |1>, ..., |N-1>`` of a standard oscillator ``[a, a^dagger] = 1``.
The scalar-photon creation operator is realised as ``a^T = M a^dagger M``
with ``M = (-1)^{a^dagger a}``, which gives ``a^T = -a^dagger`` and
``[a, a^T] = -1``.

Two quadratic forms appear. The *indefinite* ("naive") norm pairs a ket with
the bra obtained by the ``T``-adjoint (``a^T <-> a``); in the number basis
it equals ``<psi|M|psi>`` and is negative on odd states. The Gupta-Bleuler
M-norm inserts ``M`` into that pairing and is positive definite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc, gammaln

from .exceptions import DomainError, TruncationError

__all__ = [
    "DEFAULT_N",
    "TAIL_TOL",
    "FockVector",
    "MMetric",
    "lowering",
    "scalar_creation",
    "number_state",
    "vacuum",
    "scalar_built_state",
    "displace",
    "coherent_overlap_closed",
    "brute_force_overlap",
    "m_inner",
    "indefinite_norm",
    "m_norm",
    "algebraic_norm",
    "LadderReport",
    "scalar_ladder_check",
    "supplementary_residual",
    "driven_ground_state",
    "required_truncation",
]

DEFAULT_N = 64
TAIL_TOL = 1e-12


@dataclass(frozen=True)
class FockVector:
    """Coefficients ``c_0 .. c_{N-1}`` in the number basis."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size < 2:
            raise TruncationError("a Fock vector needs a truncation N >= 2", required_n=2)
        if not np.all(np.isfinite(c)):
            raise DomainError("Fock coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return int(self.coeffs.size)

    def norm(self) -> float:
        """Ordinary Hilbert-space norm."""
        return float(np.linalg.norm(self.coeffs))

    def mean_photons(self) -> float:
        p = np.abs(self.coeffs) ** 2
        return float(np.dot(np.arange(self.N), p) / p.sum())

    def apply(self, op: np.ndarray) -> "FockVector":
        return FockVector(op @ self.coeffs)

    def __add__(self, other: "FockVector") -> "FockVector":
        _same_n(self, other)
        return FockVector(self.coeffs + other.coeffs)

    def __sub__(self, other: "FockVector") -> "FockVector":
        _same_n(self, other)
        return FockVector(self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "FockVector":
        return FockVector(self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class MMetric:
    """Parity operator ``(-1)^{a^dagger a}`` on an N-level truncation."""

    N: int
    signs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.N < 2:
            raise TruncationError("the M-metric needs N >= 2", required_n=2)
        s = np.where(np.arange(self.N) % 2 == 0, 1.0, -1.0)
        s.setflags(write=False)
        object.__setattr__(self, "signs", s)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.signs)


def _same_n(psi: FockVector, phi: FockVector):
    if psi.N != phi.N:
        raise DomainError(f"truncation mismatch: {psi.N} vs {phi.N}")


def lowering(N: int) -> np.ndarray:
    """Standard annihilation matrix, ``a|n> = sqrt(n)|n-1>``."""
    return np.diag(np.sqrt(np.arange(1, N, dtype=float)), k=1)


def scalar_creation(N: int, sign: float = 1.0) -> np.ndarray:
    """``a^T = M a^dagger M``; ``sign=-1`` flips it (used to test the checks)."""
    M = MMetric(N).matrix
    return sign * (M @ lowering(N).T @ M)


def vacuum(N: int = DEFAULT_N) -> FockVector:
    c = np.zeros(N, dtype=complex)
    c[0] = 1.0
    return FockVector(c)


def number_state(n: int, N: int = DEFAULT_N) -> FockVector:
    if not 0 <= n < N:
        raise TruncationError(f"number state |{n}> does not fit", required_n=n + 1)
    c = np.zeros(N, dtype=complex)
    c[n] = 1.0
    return FockVector(c)


def scalar_built_state(n: int, N: int = DEFAULT_N, sign: float = 1.0) -> FockVector:
    """``(a^T)^n |0>`` by repeated matrix application."""
    if n >= N:
        raise TruncationError(f"(a^T)^{n}|0> does not fit", required_n=n + 1)
    aT = scalar_creation(N, sign=sign)
    c = vacuum(N).coeffs.copy()
    for _ in range(n):
        c = aT @ c
    return FockVector(c)


def _tail_mass(lam: complex, N: int) -> float:
    # Poisson(|lam|^2) probability of n >= N
    mu = abs(lam) ** 2
    if mu == 0.0:
        return 0.0
    return float(gammainc(N, mu))


def required_truncation(lam: complex, tol: float = TAIL_TOL) -> int:
    """Smallest N with Poisson tail mass below ``tol``."""
    N = 2
    while _tail_mass(lam, N) >= tol:
        N += 1 if N < 64 else N // 4
    return N


def displace(lam: complex, N: int = DEFAULT_N, tol: float = TAIL_TOL) -> FockVector:
    """Coherent state ``exp(-|lam|^2/2) sum lam^n/sqrt(n!) |n>``.

    Raises
    ------
    TruncationError
        If the discarded tail mass would exceed ``tol``.
    """
    lam = complex(lam)
    if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
        raise DomainError(f"non-finite amplitude {lam!r}")
    if N < 2:
        raise TruncationError("truncation too small", required_n=2)
    tail = _tail_mass(lam, N)
    if tail >= tol:
        raise TruncationError(
            f"|lambda|={abs(lam):.6g} leaves tail mass {tail:.3g} beyond N={N}",
            required_n=required_truncation(lam, tol),
        )
    n = np.arange(N)
    if lam == 0:
        return vacuum(N)
    # log-magnitude form avoids overflow in lam^n and n!
    logmag = n * math.log(abs(lam)) - 0.5 * gammaln(n + 1) - 0.5 * abs(lam) ** 2
    phase = np.exp(1j * n * np.angle(lam))
    return FockVector(np.exp(logmag) * phase)


def coherent_overlap_closed(lambda_a: complex, lambda_b: complex) -> complex:
    """``<lambda_a|lambda_b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)``.

    Its modulus is ``exp(-|a - b|^2 / 2)``; the imaginary part of
    ``conj(a) b`` supplies the phase.
    """
    a, b = complex(lambda_a), complex(lambda_b)
    return complex(np.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + a.conjugate() * b))


def brute_force_overlap(lambda_a: complex, lambda_b: complex, N: int = DEFAULT_N) -> complex:
    """Ordinary inner product of two truncated coherent-state vectors."""
    return complex(np.vdot(displace(lambda_a, N).coeffs, displace(lambda_b, N).coeffs))


def m_inner(psi: FockVector, phi: FockVector, M: MMetric | None = None) -> complex:
    """``<psi|M|phi>``: the ordinary inner product with parity signs interleaved."""
    _same_n(psi, phi)
    M = M or MMetric(psi.N)
    if M.N != psi.N:
        raise DomainError(f"metric truncation {M.N} does not match state truncation {psi.N}")
    return complex(np.vdot(psi.coeffs, M.signs * phi.coeffs))


def indefinite_norm(psi: FockVector) -> float:
    """Norm with the bra formed by the ``T``-adjoint; negative on odd states.

    The ``T``-bra of ``psi`` is ``(M psi)^dagger``, so this equals
    ``m_inner(psi, psi)``.
    """
    return float(m_inner(psi, psi).real)


def algebraic_norm(n: int, N: int = DEFAULT_N, sign: float = 1.0) -> float:
    """``<0| a^n (a^T)^n |0>`` evaluated by matrix products.

    This is the "usual" norm of ``(a^T)^n|0>`` when ``a`` is taken as the
    adjoint of ``a^T``; with ``[a, a^T] = -1`` it equals ``(-1)^n n!``.
    """
    psi = scalar_built_state(n, N, sign)
    bra = np.linalg.matrix_power(lowering(N), n)[0]
    return float(np.real(bra @ psi.coeffs))


def m_norm(psi: FockVector) -> float:
    """Gupta-Bleuler norm: ``T``-bra, then ``M``, then ket. Positive definite."""
    M = MMetric(psi.N)
    t_bra = np.conj(M.signs * psi.coeffs)
    return float(np.real(t_bra @ (M.signs * psi.coeffs)))


@dataclass(frozen=True)
class LadderReport:
    """Outcome of :func:`scalar_ladder_check`."""

    N: int
    commutator_max_dev: float
    top_level_dev: float
    adjoint_max_dev: float
    metric_square_dev: float
    metric_hermitian_dev: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.commutator_max_dev <= self.tol
            and self.adjoint_max_dev <= self.tol
            and self.metric_square_dev == 0.0
            and self.metric_hermitian_dev == 0.0
        )


def scalar_ladder_check(N: int = 16, tol: float = 1e-14, sign: float = 1.0) -> LadderReport:
    """Check ``[a, a^T] = -1`` below the top level and ``M a^dagger M = -a^dagger``.

    ``sign`` multiplies ``a^T``; anything but ``+1`` should fail.
    """
    if N < 4:
        raise TruncationError("ladder check needs N >= 4", required_n=4)
    a = lowering(N)
    aT = scalar_creation(N, sign=sign)
    M = MMetric(N).matrix
    comm = a @ aT - aT @ a
    target = -np.eye(N)
    dev = np.abs(comm - target)
    return LadderReport(
        N=N,
        commutator_max_dev=float(dev[: N - 1, : N - 1].max()),
        top_level_dev=float(dev[N - 1, N - 1]),
        adjoint_max_dev=float(np.abs(aT + a.T).max()),
        metric_square_dev=float(np.abs(M @ M - np.eye(N)).max()),
        metric_hermitian_dev=float(np.abs(M - M.conj().T).max()),
        tol=tol,
    )


def supplementary_residual(lam: complex, psi: FockVector) -> float:
    """``||(a - lam) psi|| / ||psi||``; zero iff ``psi`` is the coherent state ``|lam>``.

    Only the truncation tail contributes for ``psi = displace(lam)``.
    """
    nrm = psi.norm()
    if nrm == 0.0:
        raise DomainError("zero-norm state")
    r = lowering(psi.N) @ psi.coeffs - complex(lam) * psi.coeffs
    return float(np.linalg.norm(r) / nrm)


def driven_ground_state(omega: float, drive_strength: float, N: int = DEFAULT_N, hbar: float = 1.0):
    """Ground state of ``hbar omega a^dagger a + drive (a + a^dagger)``.

    Completing the square gives the coherent state with
    ``lambda = -drive / (hbar omega)``.

    Returns
    -------
    tuple of (complex, FockVector)
    """
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError(f"omega must be positive, got {omega!r}")
    lam = complex(-drive_strength / (hbar * omega))
    return lam, displace(lam, N)


def driven_hamiltonian(omega: float, drive_strength: float, N: int, hbar: float = 1.0) -> np.ndarray:
    """Truncated matrix of the driven oscillator, for numerical cross-checks."""
    a = lowering(N)
    return hbar * omega * (a.T @ a) + drive_strength * (a + a.T)
