"""Physical constants, geometry types and per-mode amplitudes of the scalar field.

Internal conventions
--------------------
Lengths are measured in units of the reference length ``r0`` (by default the
reduced Compton wavelength of the electron), wavenumbers in ``1/r0`` and
charges in units of the elementary charge. A :class:`PhysicsContext` carries
the values of hbar, c, eps0 and e in whatever unit system it was built for;
the per-mode amplitudes returned here are made dimensionless by the mode
measure ``d^3k`` expressed in ``(1/r0)^3``, so results do not depend on the
unit system chosen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.constants as sc

from .exceptions import DomainError

__all__ = [
    "PhysicsContext",
    "Position3",
    "ChargeConfiguration",
    "WaveVector",
    "coupling_g",
    "eta_eigenvalue",
    "mode_mean_photons",
]

#: Fine-structure constant (CODATA, via scipy.constants).
ALPHA = sc.fine_structure
#: Planck mass over electron mass.
PLANCK_TO_ELECTRON_MASS = math.sqrt(sc.hbar * sc.c / sc.G) / sc.m_e


@dataclass(frozen=True)
class PhysicsContext:
    """Unit system plus the constants every other module consumes.

    Use :meth:`natural` (the default everywhere) or :meth:`si`. Direct
    construction is allowed but the invariants are checked.
    """

    alpha: float
    hbar: float
    c: float
    eps0: float
    e_charge: float
    planck_charge: float
    planck_mass: float
    r0: float
    system: str = "natural"

    def __post_init__(self):
        for name in ("alpha", "hbar", "c", "eps0", "e_charge", "planck_charge", "planck_mass", "r0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")
        ratio = (self.e_charge / self.planck_charge) ** 2
        if abs(ratio - self.alpha) > 1e-12 * self.alpha:
            raise DomainError(
                f"inconsistent constants: (e/Q_P)^2 = {ratio!r} but alpha = {self.alpha!r}"
            )

    @classmethod
    def natural(cls, alpha: float = ALPHA) -> "PhysicsContext":
        """hbar = c = eps0 = 1, lengths in r0 = hbar/(m_e c), masses in m_e."""
        e = math.sqrt(4.0 * math.pi * alpha)
        return cls(
            alpha=alpha,
            hbar=1.0,
            c=1.0,
            eps0=1.0,
            e_charge=e,
            planck_charge=math.sqrt(4.0 * math.pi),
            planck_mass=PLANCK_TO_ELECTRON_MASS,
            r0=1.0,
            system="natural",
        )

    @classmethod
    def si(cls) -> "PhysicsContext":
        """SI values; r0 is the reduced Compton wavelength in metres, masses in kg."""
        qp = math.sqrt(4.0 * math.pi * sc.epsilon_0 * sc.hbar * sc.c)
        return cls(
            alpha=(sc.e / qp) ** 2,
            hbar=sc.hbar,
            c=sc.c,
            eps0=sc.epsilon_0,
            e_charge=sc.e,
            planck_charge=qp,
            planck_mass=math.sqrt(sc.hbar * sc.c / sc.G),
            r0=sc.hbar / (sc.m_e * sc.c),
            system="si",
        )

    @property
    def electron_mass(self) -> float:
        """Electron mass in the context's mass unit."""
        return self.hbar / (self.r0 * self.c)


@dataclass(frozen=True)
class Position3:
    """A point in space, components in units of r0."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise DomainError(f"non-finite position {self!r}")

    @classmethod
    def of(cls, value) -> "Position3":
        if isinstance(value, Position3):
            return value
        x, y, z = (float(v) for v in value)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def distance(self, other: "Position3") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))


@dataclass(frozen=True)
class ChargeConfiguration:
    """Static point charges; ``charges`` holds ``(Position3, q)`` with q in units of e.

    A zero charge is accepted and simply decouples from the field.
    """

    charges: tuple
    label: str = ""

    def __post_init__(self):
        pairs = tuple((Position3.of(p), float(q)) for p, q in self.charges)
        if not pairs:
            raise DomainError("a charge configuration needs at least one charge")
        for _, q in pairs:
            if not math.isfinite(q):
                raise DomainError(f"charges must be finite, got {q!r}")
        object.__setattr__(self, "charges", pairs)

    @classmethod
    def single(cls, position, q: float = 1.0, label: str = "") -> "ChargeConfiguration":
        return cls(((position, q),), label=label)

    @property
    def positions(self) -> np.ndarray:
        return np.array([p.as_array() for p, _ in self.charges])

    @property
    def q(self) -> np.ndarray:
        return np.array([q for _, q in self.charges])

    def translated(self, shift) -> "ChargeConfiguration":
        s = np.asarray(shift, dtype=float)
        return ChargeConfiguration(
            tuple((p.as_array() + s, q) for p, q in self.charges), label=self.label
        )


@dataclass(frozen=True)
class WaveVector:
    """Wave vector in units of 1/r0. The zero mode is excluded."""

    kx: float
    ky: float
    kz: float
    k: float = field(init=False)

    def __post_init__(self):
        k = math.sqrt(self.kx**2 + self.ky**2 + self.kz**2)
        if not (math.isfinite(k) and k > 0):
            raise DomainError(f"wave vector must be finite and nonzero, got ({self.kx}, {self.ky}, {self.kz})")
        object.__setattr__(self, "k", k)

    @classmethod
    def of(cls, value) -> "WaveVector":
        if isinstance(value, WaveVector):
            return value
        kx, ky, kz = (float(v) for v in value)
        return cls(kx, ky, kz)

    def omega(self, ctx: PhysicsContext) -> float:
        """Angular frequency c*|k| in the context's units."""
        return ctx.c * self.k / ctx.r0

    def as_array(self) -> np.ndarray:
        return np.array([self.kx, self.ky, self.kz], dtype=float)

    def __neg__(self) -> "WaveVector":
        return WaveVector(-self.kx, -self.ky, -self.kz)


def _check_k(k):
    k = np.asarray(k, dtype=float)
    if np.any(~np.isfinite(k)) or np.any(k <= 0):
        raise DomainError("wavenumber must be finite and strictly positive")
    return k


def coupling_g(k, q: float, ctx: PhysicsContext | None = None):
    """Mode coupling ``q c sqrt(hbar / (2 eps0 omega (2 pi)^3))``.

    Parameters
    ----------
    k : float or array_like
        Wavenumber(s) in units of 1/r0, strictly positive.
    q : float
        Charge in units of e.
    ctx : PhysicsContext, optional
        Defaults to natural units.

    Returns
    -------
    float or ndarray
        The coupling in the context's own units (scales as ``q k^{-1/2}``).
    """
    ctx = ctx or PhysicsContext.natural()
    k = _check_k(k)
    omega = ctx.c * k / ctx.r0
    g = q * ctx.e_charge * ctx.c * np.sqrt(ctx.hbar / (2.0 * ctx.eps0 * omega * (2.0 * np.pi) ** 3))
    return g if g.ndim else float(g)


def _amplitude_prefactor(k, ctx: PhysicsContext):
    # g(k)/(hbar omega) per unit charge, rescaled to the dimensionless mode measure
    omega = ctx.c * k / ctx.r0
    return coupling_g(k, 1.0, ctx) / (ctx.hbar * omega) / ctx.r0**1.5


def eta_eigenvalue(kvec, cfg: ChargeConfiguration, ctx: PhysicsContext | None = None) -> complex:
    """Coherent amplitude of the scalar mode ``kvec`` sourced by ``cfg``.

    Sum over charges of ``g_c(k)/(hbar omega) * exp(-i k.r_c)``.
    """
    ctx = ctx or PhysicsContext.natural()
    kv = WaveVector.of(kvec)
    pref = _amplitude_prefactor(kv.k, ctx)
    phases = np.exp(-1j * (cfg.positions @ kv.as_array()))
    return complex(pref * np.sum(cfg.q * phases))


def eta_eigenvalues(kvecs: np.ndarray, positions: np.ndarray, q: np.ndarray, ctx: PhysicsContext | None = None) -> np.ndarray:
    """Vectorised :func:`eta_eigenvalue` over an ``(M, 3)`` array of wave vectors."""
    ctx = ctx or PhysicsContext.natural()
    kvecs = np.atleast_2d(np.asarray(kvecs, dtype=float))
    k = _check_k(np.linalg.norm(kvecs, axis=1))
    phases = np.exp(-1j * kvecs @ np.asarray(positions, dtype=float).T)
    return _amplitude_prefactor(k, ctx) * (phases @ np.asarray(q, dtype=float))


def mode_mean_photons(kvec, cfg: ChargeConfiguration, ctx: PhysicsContext | None = None) -> float:
    """Mean scalar-photon number ``|lambda(k)|^2`` in mode ``kvec``."""
    return abs(eta_eigenvalue(kvec, cfg, ctx)) ** 2


def single_charge_amplitude(k, q: float = 1.0, ctx: PhysicsContext | None = None):
    """``|lambda(k)|`` for one charge; scales as ``k^{-3/2}``."""
    ctx = ctx or PhysicsContext.natural()
    k = _check_k(k)
    out = abs(q) * _amplitude_prefactor(k, ctx)
    return out if np.ndim(out) else float(out)


def as_positions(values: Iterable[Sequence[float]]) -> list[Position3]:
    return [Position3.of(v) for v in values]
