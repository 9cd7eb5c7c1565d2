"""INI-style run configuration.

Grammar
-------
Sections and keys (all optional unless noted; unknown sections or keys are
errors)::

    [units]
    system = natural            # natural | si
    alpha  = 0.0072973525693    # natural units only

    [geometry]                  # single charge superposed across r_a, r_b
    delta_r = 100               # or r_a = x, y, z and r_b = x, y, z
    q       = 1                 # units of e
    mass    = 0                 # units of m_e (natural) or kg (si)
    box     = 1e6               # apparatus scale; default k_min = 1/box
    k_min   = 1e-6
    k_max   = 1
    nodes   = 2048

    [scenario]                  # two-charge tomography
    r_AL = -50, 0, 0            # required: r_AL, r_AR, r_BL, r_BR
    r_AR =  50, 0, 0
    r_BL = -50, 10, 0
    r_BR =  50, 10, 0
    q_A = 1
    q_B = 1
    T   = 0                     # units of r0/c
    partition_normal = 1, 0, 0
    partition_offset = 0
    reference = L               # arm holding B for the entropy
    box / k_min / k_max / nodes as in [geometry]

    [sweep]
    axis    = delta_r           # delta_r | charge | k_max | k_min | mass
    min     = 10
    max     = 1e5
    count   = 50
    spacing = log               # linear | log
    output  = sweep.csv
    format  = csv               # csv | json | both

Lengths are in units of r0, wavenumbers in 1/r0. Comments start with ``#``
or ``;``.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import PhysicsContext, Position3
from .exceptions import ConfigurationError
from .integrals import DEFAULT_BOX, DEFAULT_NODES, CutoffPair, RadialModeGrid, SeparationGeometry
from .tomography import TomographyScenario

__all__ = [
    "RunConfig",
    "GeometrySpec",
    "SweepSpec",
    "parse_config",
    "load_config",
    "AXES",
]

AXES = ("delta_r", "charge", "k_max", "k_min", "mass")

_KEYS = {
    "units": {"system", "alpha"},
    "geometry": {"delta_r", "r_a", "r_b", "q", "mass", "box", "k_min", "k_max", "nodes"},
    "scenario": {
        "r_al", "r_ar", "r_bl", "r_br", "q_a", "q_b", "t", "partition_normal",
        "partition_offset", "reference", "box", "k_min", "k_max", "nodes", "mass",
    },
    "sweep": {"axis", "min", "max", "count", "spacing", "output", "format"},
}


@dataclass(frozen=True)
class GeometrySpec:
    """Single-charge run: geometry, charge, mass and radial grid."""

    geometry: SeparationGeometry
    q: float
    cutoffs: CutoffPair
    nodes: int = DEFAULT_NODES
    mass: float = 0.0

    @property
    def grid(self) -> RadialModeGrid:
        return RadialModeGrid.for_cutoffs(self.cutoffs, self.nodes)


@dataclass(frozen=True)
class SweepSpec:
    """One-axis parameter sweep."""

    axis: str
    start: float
    stop: float
    count: int
    spacing: str = "log"
    output: Path | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigurationError(f"unknown sweep axis {self.axis!r}; expected one of {', '.join(AXES)}", field="axis")
        if self.spacing not in ("linear", "log"):
            raise ConfigurationError(f"spacing must be 'linear' or 'log', got {self.spacing!r}", field="spacing")
        if self.format not in ("csv", "json", "both"):
            raise ConfigurationError(f"format must be csv, json or both, got {self.format!r}", field="format")
        if self.count < 2:
            raise ConfigurationError(f"count must be at least 2, got {self.count}", field="count")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)) or not self.start < self.stop:
            raise ConfigurationError(f"empty sweep range [{self.start!r}, {self.stop!r}]", field="min")
        if self.spacing == "log" and self.start <= 0:
            raise ConfigurationError("log spacing needs min > 0", field="min")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class RunConfig:
    ctx: PhysicsContext
    geometry: GeometrySpec | None = None
    scenario: TomographyScenario | None = None
    reference: str = "L"
    scenario_mass: float = 0.0
    sweep: SweepSpec | None = None
    source: str = "<string>"


class _Reader:
    """Typed access to one section with line-number diagnostics."""

    def __init__(self, parser, section, text):
        self.parser = parser
        self.section = section
        self.text = text

    def line_of(self, key):
        in_section = False
        for i, line in enumerate(self.text.splitlines(), start=1):
            stripped = line.strip()
            m = re.match(r"^\[([^\]]+)\]", stripped)
            if m:
                in_section = m.group(1).strip().lower() == self.section.lower()
                continue
            if in_section and re.match(rf"^{re.escape(key)}\s*[=:]", stripped, re.IGNORECASE):
                return i
        return None

    def has(self, key):
        return self.parser.has_option(self.section, key)

    def raw(self, key):
        return self.parser.get(self.section, key).strip()

    def error(self, key, message):
        return ConfigurationError(message, line=self.line_of(key), field=f"{self.section}.{key}")

    def float(self, key, default=None):
        if not self.has(key):
            if default is None:
                raise ConfigurationError(f"missing required key {key!r}", field=f"{self.section}.{key}")
            return default
        try:
            value = float(self.raw(key))
        except ValueError:
            raise self.error(key, f"expected a number, got {self.raw(key)!r}") from None
        if not math.isfinite(value):
            raise self.error(key, "value must be finite")
        return value

    def int(self, key, default=None):
        value = self.float(key, None if default is None else float(default))
        if value != int(value):
            raise self.error(key, f"expected an integer, got {self.raw(key)!r}")
        return int(value)

    def vector(self, key, default=None):
        if not self.has(key):
            if default is None:
                raise ConfigurationError(f"missing required key {key!r}", field=f"{self.section}.{key}")
            return default
        parts = [p for p in re.split(r"[,\s]+", self.raw(key)) if p]
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise self.error(key, f"expected three numbers, got {self.raw(key)!r}") from None
        if len(values) != 3 or not all(math.isfinite(v) for v in values):
            raise self.error(key, f"expected three finite numbers, got {self.raw(key)!r}")
        return tuple(values)

    def str(self, key, default):
        return self.raw(key) if self.has(key) else default

    def checked(self, key, build):
        try:
            return build()
        except ConfigurationError as exc:
            raise self.error(key, exc.message) from None


def _cutoffs(r: _Reader) -> tuple[CutoffPair, int]:
    box = r.float("box", DEFAULT_BOX)
    if box <= 0:
        raise r.error("box", "box must be positive")
    k_min = r.float("k_min", 1.0 / box)
    k_max = r.float("k_max", 1.0)
    cut = r.checked("k_min", lambda: CutoffPair(k_min, k_max))
    nodes = r.int("nodes", DEFAULT_NODES)
    r.checked("nodes", lambda: RadialModeGrid.for_cutoffs(cut, nodes))
    return cut, nodes


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    """Parse config text; every problem raises :class:`ConfigurationError`."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None

    for section in parser.sections():
        name = section.lower()
        if name not in _KEYS:
            raise ConfigurationError(f"unknown section [{section}]", field=section)
        reader = _Reader(parser, section, text)
        for key in parser.options(section):
            if key not in _KEYS[name]:
                raise ConfigurationError(f"unknown key {key!r}", line=reader.line_of(key), field=f"{section}.{key}")

    sections = {s.lower(): s for s in parser.sections()}

    def reader(name):
        return _Reader(parser, sections[name], text) if name in sections else None

    ctx = PhysicsContext.natural()
    if (u := reader("units")) is not None:
        system = u.str("system", "natural").lower()
        if system == "natural":
            alpha = u.float("alpha", ctx.alpha)
            if not 0 < alpha < 1:
                raise u.error("alpha", "alpha must lie in (0, 1)")
            ctx = PhysicsContext.natural(alpha)
        elif system == "si":
            if u.has("alpha"):
                raise u.error("alpha", "alpha is fixed by the SI constants")
            ctx = PhysicsContext.si()
        else:
            raise u.error("system", f"unknown unit system {system!r}")

    geometry = None
    if (g := reader("geometry")) is not None:
        if g.has("delta_r") and (g.has("r_a") or g.has("r_b")):
            raise g.error("delta_r", "give either delta_r or r_a/r_b, not both")
        if g.has("r_a") or g.has("r_b"):
            geom = SeparationGeometry(Position3.of(g.vector("r_a")), Position3.of(g.vector("r_b")))
        else:
            dr = g.float("delta_r")
            if dr < 0:
                raise g.error("delta_r", "delta_r must be nonnegative")
            geom = SeparationGeometry.along_x(dr)
        mass = g.float("mass", 0.0)
        if mass < 0:
            raise g.error("mass", "mass must be nonnegative")
        cut, nodes = _cutoffs(g)
        geometry = GeometrySpec(geom, g.float("q", 1.0), cut, nodes, mass)

    scenario = None
    reference = "L"
    scenario_mass = 0.0
    if (s := reader("scenario")) is not None:
        cut, nodes = _cutoffs(s)
        reference = s.str("reference", "L").upper()
        if reference not in ("L", "R"):
            raise s.error("reference", "reference must be L or R")
        scenario_mass = s.float("mass", 0.0)
        if scenario_mass < 0:
            raise s.error("mass", "mass must be nonnegative")
        kwargs = dict(
            r_AL=s.vector("r_AL"),
            r_AR=s.vector("r_AR"),
            r_BL=s.vector("r_BL"),
            r_BR=s.vector("r_BR"),
            q_A=s.float("q_A", 1.0),
            q_B=s.float("q_B", 1.0),
            T=s.float("T", 0.0),
            partition_normal=s.vector("partition_normal", (1.0, 0.0, 0.0)),
            partition_offset=s.float("partition_offset", 0.0),
            cutoffs=cut,
            grid=RadialModeGrid.for_cutoffs(cut, nodes),
        )
        try:
            scenario = TomographyScenario(**kwargs)
        except ConfigurationError as exc:
            key = (exc.field or "r_AL").lower()
            raise ConfigurationError(exc.message, line=s.line_of(key), field=f"scenario.{key}") from None

    sweep = None
    if (w := reader("sweep")) is not None:
        axis = w.str("axis", "")
        if not axis:
            raise ConfigurationError("missing required key 'axis'", field="sweep.axis")
        output = w.str("output", "")
        try:
            sweep = SweepSpec(
                axis=axis,
                start=w.float("min"),
                stop=w.float("max"),
                count=w.int("count"),
                spacing=w.str("spacing", "log").lower(),
                output=Path(output) if output else None,
                format=w.str("format", "csv").lower(),
            )
        except ConfigurationError as exc:
            key = exc.field or "axis"
            raise ConfigurationError(exc.message, line=w.line_of(key), field=f"sweep.{key}") from None

    return RunConfig(
        ctx=ctx,
        geometry=geometry,
        scenario=scenario,
        reference=reference,
        scenario_mass=scenario_mass,
        sweep=sweep,
        source=source,
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return parse_config(text, source=str(path))
