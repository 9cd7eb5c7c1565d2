"""Self-checks of the scalar-photon Fock-space machinery."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fock
from .exceptions import TruncationError

__all__ = ["Check", "VerifyReport", "verify", "DEFAULT_TOLERANCES"]

DEFAULT_TOLERANCES = {
    "ladder_commutator": 1e-14,
    "ladder_adjoint": 1e-14,
    "coherent_overlap": 1e-10,
    "supplementary_residual": 1e-8,
    "displace_mean_photons": 1e-10,
}


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    deviation: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name:<28} tol={self.tolerance:.1e}  dev={self.deviation:.3e}"
        return f"{text}  {self.detail}" if self.detail else text


@dataclass(frozen=True)
class VerifyReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def _random_amplitudes(rng, count, radius=2.0):
    r = radius * np.sqrt(rng.random(count))
    theta = 2 * np.pi * rng.random(count)
    return r * np.exp(1j * theta)


def verify(fock_n: int = fock.DEFAULT_N, tol: float | None = None, adjoint_sign: float = 1.0, pairs: int = 200, seed: int = 0) -> VerifyReport:
    """Run every Fock-space oracle.

    ``tol`` overrides the overlap, residual and mean-photon tolerances.
    ``adjoint_sign`` is a mutation hook: ``-1`` must make the ladder checks fail.
    """
    tols = dict(DEFAULT_TOLERANCES)
    if tol is not None:
        for key in ("coherent_overlap", "supplementary_residual", "displace_mean_photons"):
            tols[key] = tol
    checks = []

    ladder_n = min(fock_n, 16)
    try:
        rep = fock.scalar_ladder_check(ladder_n, tol=tols["ladder_commutator"], sign=adjoint_sign)
    except TruncationError as exc:
        checks.append(Check("ladder_commutator", tols["ladder_commutator"], float("inf"), False, f"truncation refused: {exc}"))
    else:
        checks.append(Check("ladder_commutator", tols["ladder_commutator"], rep.commutator_max_dev,
                            rep.commutator_max_dev <= tols["ladder_commutator"], f"N={ladder_n}, top level excluded"))
        checks.append(Check("ladder_adjoint", tols["ladder_adjoint"], rep.adjoint_max_dev,
                            rep.adjoint_max_dev <= tols["ladder_adjoint"], "M a^dagger M = -a^dagger"))
        checks.append(Check("metric_square", 0.0, rep.metric_square_dev, rep.metric_square_dev == 0.0, "M^2 = 1"))

    # sign structure of (a^T)^n |0>
    try:
        signs_ok = True
        top = min(fock_n, 12)
        for n in range(top):
            psi = fock.scalar_built_state(n, fock_n, adjoint_sign)
            naive = fock.algebraic_norm(n, fock_n, adjoint_sign)
            if np.sign(naive) != (-1) ** n or not fock.m_norm(psi) > 0:
                signs_ok = False
        checks.append(Check("norm_signs", 0.0, 0.0 if signs_ok else 1.0, signs_ok,
                            f"odd (a^T)^n|0> indefinite-negative, M-norm positive, n<{top}"))
    except TruncationError as exc:
        checks.append(Check("norm_signs", 0.0, float("inf"), False, f"truncation refused: {exc}"))

    rng = np.random.default_rng(seed)
    la = _random_amplitudes(rng, pairs)
    lb = _random_amplitudes(rng, pairs)
    try:
        dev_overlap = max(abs(fock.coherent_overlap_closed(a, b) - fock.brute_force_overlap(a, b, fock_n)) for a, b in zip(la, lb))
        dev_resid = max(fock.supplementary_residual(a, fock.displace(a, fock_n)) for a in la)
        dev_mean = max(abs(fock.displace(a, fock_n).mean_photons() - abs(a) ** 2) for a in la)
    except TruncationError as exc:
        for key in ("coherent_overlap", "supplementary_residual", "displace_mean_photons"):
            checks.append(Check(key, tols[key], float("inf"), False, f"truncation refused: {exc}"))
    else:
        checks.append(Check("coherent_overlap", tols["coherent_overlap"], dev_overlap,
                            dev_overlap < tols["coherent_overlap"], f"{pairs} pairs, |lambda|<=2, N={fock_n}"))
        checks.append(Check("supplementary_residual", tols["supplementary_residual"], dev_resid,
                            dev_resid < tols["supplementary_residual"], "||(a - lambda)|lambda>||"))
        checks.append(Check("displace_mean_photons", tols["displace_mean_photons"], dev_mean,
                            dev_mean < tols["displace_mean_photons"], "<n> = |lambda|^2"))
    return VerifyReport(tuple(checks))
