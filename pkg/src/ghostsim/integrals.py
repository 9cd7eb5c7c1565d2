"""Cutoff-regularised radial integrals for the scalar-photon number and visibility.

The per-mode squared distance between the coherent field states of a charge
at ``r_a`` and at ``r_b`` is integrated over ``d^3k`` between an infrared and
an ultraviolet cutoff. The solid-angle integral is done analytically
(``<cos(k.d)> = sin(kd)/(kd)``) and the remaining radial integral by a
composite Gauss-Legendre rule on a grid uniform in ``ln k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    PhysicsContext,
    Position3,
    WaveVector,
    _amplitude_prefactor,
    _check_k,
)
from .exceptions import ConfigurationError, DomainError

__all__ = [
    "CutoffPair",
    "RadialModeGrid",
    "SeparationGeometry",
    "sinc",
    "per_mode_distance2",
    "angular_reduced_integrand",
    "pair_kernel_integrand",
    "total_photon_number",
    "visibility",
    "charge_decoherence_scaling",
    "mass_decoherence_scaling",
    "asymptotic_slope",
    "DEFAULT_BOX",
    "DEFAULT_NODES",
]

#: Default apparatus scale L_box in units of r0; the IR cutoff is 1/L_box.
DEFAULT_BOX = 1e6
DEFAULT_NODES = 2048
_SINC_SERIES_BELOW = 1e-4


def sinc(x):
    """Unnormalised ``sin(x)/x`` with ``sinc(0) = 1``; series below ``|x| < 1e-4``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SINC_SERIES_BELOW
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def one_minus_sinc(x):
    """``1 - sin(x)/x`` without cancellation for small ``x``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    safe = np.where(small, 1.0, x)
    x2 = x * x
    series = x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    out = np.where(small, series, 1.0 - np.sin(safe) / safe)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CutoffPair:
    """Infrared and ultraviolet wavenumber cutoffs in units of 1/r0."""

    k_min: float = 1.0 / DEFAULT_BOX
    k_max: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.k_min) and math.isfinite(self.k_max)):
            raise ConfigurationError("cutoffs must be finite")
        if not 0.0 < self.k_min < self.k_max:
            raise ConfigurationError(
                f"cutoffs must satisfy 0 < k_min < k_max, got k_min={self.k_min!r}, k_max={self.k_max!r}"
            )

    @classmethod
    def default(cls, box: float = DEFAULT_BOX, r0: float = 1.0) -> "CutoffPair":
        """UV cutoff at 1/r0, IR cutoff at 1/box."""
        return cls(k_min=1.0 / box, k_max=1.0 / r0)


@dataclass(frozen=True)
class RadialModeGrid:
    """Quadrature nodes and weights for ``int_{k_min}^{k_max} f(k) dk``.

    Built by :meth:`log_uniform`: ``panels`` equal panels in ``ln k``, each
    carrying a ``points_per_panel`` Gauss-Legendre rule. The weights include
    the Jacobian ``dk = k d(ln k)``.
    """

    k: np.ndarray
    weights: np.ndarray
    k_min: float
    k_max: float
    scheme: str = "log-gauss-legendre"
    points_per_panel: int = 8

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if k.shape != w.shape or k.ndim != 1 or k.size == 0:
            raise ConfigurationError("grid nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(k) <= 0):
            raise ConfigurationError("grid nodes must be strictly increasing")
        if np.any(w <= 0):
            raise ConfigurationError("grid weights must be positive")
        if k[0] <= self.k_min or k[-1] >= self.k_max:
            raise ConfigurationError("grid nodes must lie inside (k_min, k_max)")
        k.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "weights", w)

    @classmethod
    def log_uniform(
        cls,
        k_min: float,
        k_max: float,
        n_nodes: int = DEFAULT_NODES,
        points_per_panel: int = 8,
    ) -> "RadialModeGrid":
        """Composite Gauss-Legendre rule, uniform in ``ln k``.

        ``n_nodes`` must be a positive multiple of ``points_per_panel``.
        """
        CutoffPair(k_min, k_max)
        if points_per_panel < 1 or n_nodes < points_per_panel or n_nodes % points_per_panel:
            raise ConfigurationError(
                f"n_nodes={n_nodes} must be a positive multiple of points_per_panel={points_per_panel}"
            )
        panels = n_nodes // points_per_panel
        x, w = np.polynomial.legendre.leggauss(points_per_panel)
        edges = np.linspace(math.log(k_min), math.log(k_max), panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wu = (half[:, None] * w[None, :]).ravel()
        k = np.exp(u)
        return cls(k=k, weights=wu * k, k_min=k_min, k_max=k_max, points_per_panel=points_per_panel)

    @classmethod
    def for_cutoffs(cls, cutoffs: CutoffPair, n_nodes: int = DEFAULT_NODES, points_per_panel: int = 8) -> "RadialModeGrid":
        return cls.log_uniform(cutoffs.k_min, cutoffs.k_max, n_nodes, points_per_panel)

    @property
    def n_nodes(self) -> int:
        return int(self.k.size)

    @property
    def cutoffs(self) -> CutoffPair:
        return CutoffPair(self.k_min, self.k_max)

    def covers(self, cutoffs: CutoffPair, rtol: float = 1e-12) -> bool:
        return math.isclose(self.k_min, cutoffs.k_min, rel_tol=rtol) and math.isclose(
            self.k_max, cutoffs.k_max, rel_tol=rtol
        )

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class SeparationGeometry:
    """The two locations a single charge is superposed across."""

    r_a: Position3
    r_b: Position3
    delta_r: float = field(init=False)

    def __post_init__(self):
        ra, rb = Position3.of(self.r_a), Position3.of(self.r_b)
        object.__setattr__(self, "r_a", ra)
        object.__setattr__(self, "r_b", rb)
        object.__setattr__(self, "delta_r", ra.distance(rb))

    @classmethod
    def along_x(cls, delta_r: float) -> "SeparationGeometry":
        """Symmetric pair at ``(+-delta_r/2, 0, 0)``."""
        if not (math.isfinite(delta_r) and delta_r >= 0):
            raise DomainError(f"delta_r must be finite and nonnegative, got {delta_r!r}")
        h = 0.5 * delta_r
        return cls(Position3(-h, 0.0, 0.0), Position3(h, 0.0, 0.0))


def per_mode_distance2(kvec, geom: SeparationGeometry, q: float = 1.0, ctx: PhysicsContext | None = None) -> float:
    """``|lambda_a(k) - lambda_b(k)|^2 = 2 g^2/(hbar omega)^2 (1 - cos(k.(r_a - r_b)))``."""
    ctx = ctx or PhysicsContext.natural()
    kv = WaveVector.of(kvec)
    amp2 = (q * _amplitude_prefactor(kv.k, ctx)) ** 2
    phase = float(kv.as_array() @ (geom.r_a.as_array() - geom.r_b.as_array()))
    # 1 - cos(x) = 2 sin^2(x/2) keeps full precision at small x
    return float(2.0 * amp2 * 2.0 * math.sin(0.5 * phase) ** 2)


def angular_reduced_integrand(k, delta_r: float, q: float = 1.0, ctx: PhysicsContext | None = None):
    """Solid-angle integral of :func:`per_mode_distance2` at fixed ``|k|``.

    ``4 pi k^2 * 2 g^2/(hbar omega)^2 * (1 - sinc(k delta_r))``; vectorised in ``k``.
    """
    ctx = ctx or PhysicsContext.natural()
    if not (math.isfinite(delta_r) and delta_r >= 0):
        raise DomainError(f"delta_r must be finite and nonnegative, got {delta_r!r}")
    k = _check_k(k)
    amp2 = (q * _amplitude_prefactor(k, ctx)) ** 2
    out = 4.0 * np.pi * k**2 * 2.0 * amp2 * one_minus_sinc(k * delta_r)
    return out if np.ndim(out) else float(out)


def pair_kernel_integrand(k, positions, weights, ctx: PhysicsContext | None = None):
    """Angular-averaged ``|sum_j w_j g/(hbar omega) exp(-i k.r_j)|^2`` times ``4 pi k^2``.

    Generalises :func:`angular_reduced_integrand` to any set of signed point
    weights: the solid-angle integral of each cross term ``cos(k.(r_j - r_l))``
    is ``4 pi sinc(k |r_j - r_l|)``. Weights must sum to zero (neutral
    difference) for the result to stay finite as ``k -> 0``; this is not
    enforced here.
    """
    ctx = ctx or PhysicsContext.natural()
    k = _check_k(k)
    pos = np.asarray(positions, dtype=float).reshape(-1, 3)
    w = np.asarray(weights, dtype=float).ravel()
    amp2 = _amplitude_prefactor(k, ctx) ** 2
    total = np.zeros_like(np.atleast_1d(k))
    kk = np.atleast_1d(k)
    for j in range(w.size):
        for l in range(j + 1, w.size):
            d = float(np.linalg.norm(pos[j] - pos[l]))
            total = total - 2.0 * w[j] * w[l] * one_minus_sinc(kk * d)
    # sum_{jl} w_j w_l sinc = (sum w)^2 - sum_{j != l} w_j w_l (1 - sinc)
    total = total + w.sum() ** 2
    out = 4.0 * np.pi * kk**2 * amp2 * total
    return out if np.ndim(k) else float(out[0])


def _check_grid(cutoffs: CutoffPair | None, grid: RadialModeGrid | None) -> RadialModeGrid:
    if grid is None:
        return RadialModeGrid.for_cutoffs(cutoffs or CutoffPair())
    if cutoffs is not None and not grid.covers(cutoffs):
        raise ConfigurationError(
            f"grid covers [{grid.k_min!r}, {grid.k_max!r}] but cutoffs are [{cutoffs.k_min!r}, {cutoffs.k_max!r}]"
        )
    return grid


def total_photon_number(
    geom: SeparationGeometry | float,
    q: float = 1.0,
    cutoffs: CutoffPair | None = None,
    grid: RadialModeGrid | None = None,
    ctx: PhysicsContext | None = None,
) -> float:
    """Integrated ``|lambda_a - lambda_b|^2`` over all modes between the cutoffs.

    ``geom`` may be a :class:`SeparationGeometry` or a bare ``delta_r``.
    For ``k_max * delta_r >> 1`` the result grows like
    ``(2 alpha / pi) q^2 ln(k_max delta_r)`` plus a constant.
    """
    ctx = ctx or PhysicsContext.natural()
    grid = _check_grid(cutoffs, grid)
    delta_r = geom.delta_r if isinstance(geom, SeparationGeometry) else float(geom)
    if delta_r == 0.0 or q == 0.0:
        return 0.0
    return grid.integrate(angular_reduced_integrand(grid.k, delta_r, q, ctx))


def visibility(n: float) -> float:
    """Modulus ``exp(-n/2)`` of the field-state overlap for integrated distance ``n``."""
    if not n >= 0:
        raise DomainError(f"photon number must be nonnegative, got {n!r}")
    return math.exp(-0.5 * n)


def asymptotic_slope(q: float = 1.0, ctx: PhysicsContext | None = None) -> float:
    """``dn/d ln(delta_r)`` at large ``k_max delta_r``: ``(2 alpha/pi) q^2``."""
    ctx = ctx or PhysicsContext.natural()
    return 2.0 * ctx.alpha / math.pi * q * q


def charge_decoherence_scaling(Q: float, ctx: PhysicsContext | None = None) -> float:
    """``1 - exp(-(Q/Q_P)^2)`` for a charge ``Q`` given in units of e."""
    ctx = ctx or PhysicsContext.natural()
    if not Q >= 0:
        raise DomainError(f"charge must be nonnegative, got {Q!r}")
    x = Q * ctx.e_charge / ctx.planck_charge
    return -math.expm1(-x * x)


def mass_decoherence_scaling(m: float, ctx: PhysicsContext | None = None) -> float:
    """``1 - exp(-(m/m_P)^2)`` for a mass in the context's mass unit (m_e if natural)."""
    ctx = ctx or PhysicsContext.natural()
    if not m >= 0:
        raise DomainError(f"mass must be nonnegative, got {m!r}")
    x = m / ctx.planck_mass
    return -math.expm1(-x * x)
