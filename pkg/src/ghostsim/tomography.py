"""Open-loop two-charge tomography.

Charges A (probe) and B (reference) are each superposed across a left and a
right location. Each of the four charge configurations drags along its own
coherent state of the scalar modes; tracing the field out leaves a 4x4
charge density matrix whose one-left-one-right block carries the observable
signal.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .core import PhysicsContext, Position3
from .exceptions import ConfigurationError, DomainError, UndefinedConditionalError
from .integrals import CutoffPair, RadialModeGrid, pair_kernel_integrand

__all__ = [
    "Config",
    "CONFIGURATIONS",
    "ONE_LEFT_ONE_RIGHT",
    "TomographyScenario",
    "FieldGram",
    "ChargeDensityMatrix",
    "coulomb_phase",
    "configuration_phases",
    "field_gram",
    "build_state_and_reduce",
    "expect_C_RL",
    "probe_visibility",
    "probe_entanglement_entropy",
    "entropy_from_overlap",
]


class Config(enum.IntEnum):
    """The four charge configurations, in matrix index order."""

    AR_BR = 0
    AL_BL = 1
    AR_BL = 2
    AL_BR = 3

    @property
    def arms(self) -> tuple[str, str]:
        a, b = self.name.split("_")
        return a, b


CONFIGURATIONS = tuple(Config)
ONE_LEFT_ONE_RIGHT = (Config.AR_BL, Config.AL_BR)


@dataclass(frozen=True)
class TomographyScenario:
    """Geometry, charges and numerics for one tomography run.

    Positions are in units of r0, charges in units of e, ``T`` in units of
    ``r0/c``. Left-labelled positions must satisfy ``n.r <= offset`` and
    right-labelled ones ``n.r >= offset`` for the partition plane
    ``(partition_normal, partition_offset)``. A charge's left and right
    locations may coincide (the rejoined, closed-loop limit) but A and B may
    never share a location.
    """

    r_AL: Position3
    r_AR: Position3
    r_BL: Position3
    r_BR: Position3
    q_A: float = 1.0
    q_B: float = 1.0
    cutoffs: CutoffPair = field(default_factory=CutoffPair)
    grid: RadialModeGrid | None = None
    T: float = 0.0
    partition_normal: tuple = (1.0, 0.0, 0.0)
    partition_offset: float = 0.0

    def __post_init__(self):
        for name in ("r_AL", "r_AR", "r_BL", "r_BR"):
            object.__setattr__(self, name, Position3.of(getattr(self, name)))
        for name in ("q_A", "q_B", "T", "partition_offset"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConfigurationError(f"{name} must be finite", field=name)
            object.__setattr__(self, name, value)
        if self.T < 0:
            raise ConfigurationError("interaction time must be nonnegative", field="T")
        if self.grid is None:
            object.__setattr__(self, "grid", RadialModeGrid.for_cutoffs(self.cutoffs))
        elif not self.grid.covers(self.cutoffs):
            raise ConfigurationError("grid does not cover the scenario cutoffs", field="grid")
        n = np.asarray(self.partition_normal, dtype=float)
        if n.shape != (3,) or not np.linalg.norm(n) > 0:
            raise ConfigurationError("partition normal must be a nonzero 3-vector", field="partition_normal")
        object.__setattr__(self, "partition_normal", tuple(n / np.linalg.norm(n)))

        side = {name: float(np.dot(self.partition_normal, self.position(name).as_array())) - self.partition_offset
                for name in ("AL", "AR", "BL", "BR")}
        for name, s in side.items():
            if name.endswith("L") and s > 0:
                raise ConfigurationError(f"position r_{name} lies on the right of the partition plane", field=f"r_{name}")
            if name.endswith("R") and s < 0:
                raise ConfigurationError(f"position r_{name} lies on the left of the partition plane", field=f"r_{name}")
        for a in ("AL", "AR"):
            for b in ("BL", "BR"):
                if self.position(a).distance(self.position(b)) == 0.0:
                    raise ConfigurationError(f"charges A and B coincide at r_{a} = r_{b}", field=f"r_{a}")

    def position(self, arm: str) -> Position3:
        return getattr(self, f"r_{arm}")

    def charge(self, arm: str) -> float:
        return self.q_A if arm.startswith("A") else self.q_B

    @classmethod
    def symmetric(
        cls,
        separation: float,
        spacing: float = 10.0,
        q_A: float = 1.0,
        q_B: float = 1.0,
        **kwargs,
    ) -> "TomographyScenario":
        """Two parallel arms mirror-symmetric about the plane ``x = 0``.

        A sits at ``(+-separation/2, 0, 0)``, B at ``(+-separation/2, spacing, 0)``.
        """
        h = 0.5 * separation
        return cls(
            r_AL=Position3(-h, 0.0, 0.0),
            r_AR=Position3(h, 0.0, 0.0),
            r_BL=Position3(-h, spacing, 0.0),
            r_BR=Position3(h, spacing, 0.0),
            q_A=q_A,
            q_B=q_B,
            **kwargs,
        )

    def with_charges(self, q_A: float, q_B: float) -> "TomographyScenario":
        return _replace(self, q_A=q_A, q_B=q_B)

    def transformed(self, rotation=None, shift=None) -> "TomographyScenario":
        """Rigidly move all four positions (and the partition plane with them)."""
        R = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        s = np.zeros(3) if shift is None else np.asarray(shift, dtype=float)
        n = R @ np.asarray(self.partition_normal)
        moved = {f"r_{arm}": R @ self.position(arm).as_array() + s for arm in ("AL", "AR", "BL", "BR")}
        return _replace(self, partition_normal=tuple(n), partition_offset=self.partition_offset + float(n @ s), **moved)

    def swapped(self) -> "TomographyScenario":
        """Exchange the roles of A and B."""
        return _replace(
            self, r_AL=self.r_BL, r_AR=self.r_BR, r_BL=self.r_AL, r_BR=self.r_AR, q_A=self.q_B, q_B=self.q_A
        )


def _replace(scn: TomographyScenario, **changes) -> TomographyScenario:
    return replace(scn, **changes)


@dataclass(frozen=True)
class FieldGram:
    """``G[c, c'] = <lambda_c|lambda_c'>`` over the four configurations."""

    matrix: np.ndarray
    log_distance: np.ndarray

    def __getitem__(self, idx):
        return self.matrix[idx]

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix).min())


@dataclass(frozen=True)
class ChargeDensityMatrix:
    """Reduced 4x4 state of the two charges after tracing out the field."""

    matrix: np.ndarray
    tol: float = 1e-10

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (4, 4):
            raise DomainError("charge density matrix must be 4x4")
        if np.abs(rho - rho.conj().T).max() > self.tol:
            raise DomainError("charge density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > self.tol:
            raise DomainError("charge density matrix does not have unit trace")
        if np.linalg.eigvalsh(rho).min() < -self.tol:
            raise DomainError("charge density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    def __getitem__(self, idx):
        return self.matrix[idx]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def coulomb_phase(r_i, r_j, q_i: float, q_j: float, T: float, ctx: PhysicsContext | None = None) -> float:
    """Phase ``-q_i q_j T / (4 pi eps0 hbar |r_i - r_j|)`` accrued over time ``T``.

    Lengths in r0, charges in e, ``T`` in units of ``r0/c``; in natural units
    this is ``-alpha q_i q_j T / |r_i - r_j|``.
    """
    ctx = ctx or PhysicsContext.natural()
    if not (math.isfinite(T) and T >= 0):
        raise DomainError(f"interaction time must be nonnegative, got {T!r}")
    d = Position3.of(r_i).distance(Position3.of(r_j))
    if d == 0.0:
        raise DomainError("coincident charges have no finite Coulomb phase")
    energy = q_i * q_j * ctx.e_charge**2 / (4.0 * math.pi * ctx.eps0 * d * ctx.r0)
    return -energy * (T * ctx.r0 / ctx.c) / ctx.hbar


def configuration_phases(scn: TomographyScenario, ctx: PhysicsContext | None = None) -> np.ndarray:
    out = np.empty(4)
    for c in CONFIGURATIONS:
        a, b = c.arms
        out[c] = coulomb_phase(scn.position(a), scn.position(b), scn.q_A, scn.q_B, scn.T, ctx)
    return out


def _difference_weights(scn: TomographyScenario, c: Config, cp: Config):
    """Signed point weights of ``lambda_c - lambda_c'`` with coincident points merged."""
    merged: dict[tuple, float] = {}
    order: list[tuple] = []
    for arms, sign in ((c.arms, 1.0), (cp.arms, -1.0)):
        for arm in arms:
            key = tuple(scn.position(arm).as_array())
            if key not in merged:
                merged[key] = 0.0
                order.append(key)
            merged[key] += sign * scn.charge(arm)
    positions = np.array([k for k in order if merged[k] != 0.0]).reshape(-1, 3)
    weights = np.array([merged[k] for k in order if merged[k] != 0.0])
    # self-energy terms cancel only if the difference is neutral
    scale = abs(scn.q_A) + abs(scn.q_B)
    if abs(weights.sum()) > 1e-12 * max(scale, 1.0):
        raise AssertionError("self-energy terms failed to cancel in a configuration difference")
    return positions, weights


def field_gram(scn: TomographyScenario, ctx: PhysicsContext | None = None) -> FieldGram:
    """Overlaps of the constrained field states of the four configurations.

    ``log G[c, c'] = -1/2 int d^3k |lambda_c - lambda_c'|^2 + i int d^3k Im(conj(lambda_c) lambda_c')``.
    The imaginary part is odd under ``k -> -k`` and integrates to zero, so
    the Gram matrix is real.
    """
    ctx = ctx or PhysicsContext.natural()
    grid = scn.grid
    D = np.zeros((4, 4))
    for c, cp in combinations(CONFIGURATIONS, 2):
        positions, weights = _difference_weights(scn, c, cp)
        if weights.size == 0:
            continue
        D[c, cp] = D[cp, c] = grid.integrate(pair_kernel_integrand(grid.k, positions, weights, ctx))
    G = np.exp(-0.5 * D).astype(complex)
    np.fill_diagonal(G, 1.0)
    return FieldGram(matrix=G, log_distance=D)


def build_state_and_reduce(scn: TomographyScenario, ctx: PhysicsContext | None = None) -> ChargeDensityMatrix:
    """``rho[c, c'] = 1/4 exp(i(phi_c - phi_c')) G[c', c]``."""
    G = field_gram(scn, ctx).matrix
    phi = configuration_phases(scn, ctx)
    phase = np.exp(1j * (phi[:, None] - phi[None, :]))
    return ChargeDensityMatrix(0.25 * phase * G.T)


def expect_C_RL(rho: ChargeDensityMatrix) -> tuple[float, float]:
    """Conditional expectation of the exchange observable and the subspace weight.

    Inside ``{(AR,BL), (AL,BR)}`` the observable flips the two configurations,
    so its expectation is ``2 Re rho[(AR,BL),(AL,BR)]``; this is divided by
    the subspace weight.
    """
    m = rho.matrix if isinstance(rho, ChargeDensityMatrix) else np.asarray(rho)
    i, j = ONE_LEFT_ONE_RIGHT
    w = float(np.real(m[i, i] + m[j, j]))
    if w <= 0.0:
        raise UndefinedConditionalError("one-left-one-right subspace has zero weight")
    return float(2.0 * np.real(m[i, j]) / w), w


def probe_visibility(scn: TomographyScenario, ctx: PhysicsContext | None = None) -> float:
    """``|<lambda_(AR,BL)|lambda_(AL,BR)>|``, the attenuation the experiment measures."""
    G = field_gram(scn, ctx)
    return float(abs(G[Config.AR_BL, Config.AL_BR]))


def entropy_from_overlap(overlap: complex) -> float:
    """Von Neumann entropy (bits) of ``[[1/2, v/2], [conj(v)/2, 1/2]]``."""
    v = abs(complex(overlap))
    if v > 1.0 + 1e-12:
        raise DomainError(f"overlap modulus exceeds one: {v!r}")
    v = min(v, 1.0)
    ev = np.array([0.5 * (1.0 + v), 0.5 * (1.0 - v)])
    ev = ev[ev > 0]
    return float(-np.sum(ev * np.log2(ev)))


def probe_entanglement_entropy(scn: TomographyScenario, reference: str = "L", ctx: PhysicsContext | None = None) -> float:
    """Entanglement (bits) between probe A and the field with B held fixed.

    B sits at its ``reference`` arm ("L" or "R") while A is superposed
    across its two arms.
    """
    if reference not in ("L", "R"):
        raise DomainError("reference arm must be 'L' or 'R'")
    G = field_gram(scn, ctx)
    left = Config[f"AL_B{reference}"]
    right = Config[f"AR_B{reference}"]
    return entropy_from_overlap(G[left, right])
